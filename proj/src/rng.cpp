#include "collie/rng.hpp"

namespace collie {

std::vector<std::size_t> DeterministicRng::sample_indices(std::size_t n, std::size_t count) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  shuffle(all);
  if (all.size() > count) all.resize(count);
  return all;
}

}  // namespace collie
