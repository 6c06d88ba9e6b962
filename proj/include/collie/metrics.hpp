#pragma once

#include <span>
#include <string>
#include <vector>

#include "collie/harness.hpp"

namespace collie {

enum class GroupBy { Structure, Source, Model, Overall };

struct GroupStats {
  std::string key;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double std_error = 0.0;  // sqrt(p(1-p)/(n-1))
};

/// Mean per-trial satisfaction over non-errored records, grouped.
std::vector<GroupStats> success_rate(std::span<const GenerationRecord> records,
                                     GroupBy group_by);

/// Unbiased probability that at least one of k samples out of n trials with
/// c successes satisfies the spec: 1 - C(n-c, k) / C(n, k).
double pass_at_k_estimate(std::size_t n, std::size_t c, std::size_t k);

struct PassAtKPoint {
  int k = 0;
  double mean = 0.0;       // averaged across instances
  double std_error = 0.0;  // across instances
  std::size_t instances = 0;
  std::size_t skipped = 0;  // instances with fewer than k valid trials
};

/// Curve over the given k values. With `naive_first_k` the empirical
/// any-success-in-the-first-k rate replaces the closed-form estimator.
std::vector<PassAtKPoint> pass_at_k(std::span<const GenerationRecord> records,
                                    const std::vector<int>& ks,
                                    bool naive_first_k = false);

struct RoundStats {
  int round = 0;
  std::size_t satisfied = 0;  // instances satisfied at this round or earlier
  double rate = 0.0;          // over all instances seen in the run
};

/// Cumulative per-round satisfaction for interactive runs: an instance
/// counts toward round r once any of its records with round <= r satisfies.
std::vector<RoundStats> satisfaction_by_round(std::span<const GenerationRecord> records);

inline constexpr std::size_t kWordValiditySupplementCount = 8;
/// Uncommon but legitimate words accepted on top of the reference list.
std::span<const std::string_view> word_validity_supplements();

struct WordValidityStats {
  std::size_t considered = 0;
  std::size_t valid = 0;
  double fraction = 0.0;
};

/// Fraction of word-level generations whose cleaned form appears in the
/// word list or the supplement set.
WordValidityStats word_validity(std::span<const GenerationRecord> records,
                                const std::vector<std::string>& word_list);

}  // namespace collie
