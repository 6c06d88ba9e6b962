#include "collie/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "collie/eval.hpp"
#include "collie/segment.hpp"

namespace collie {

namespace {

std::string group_key(const GenerationRecord& record, GroupBy group_by) {
  switch (group_by) {
    case GroupBy::Structure: return record.structure;
    case GroupBy::Source: return record.source;
    case GroupBy::Model: return record.model;
    case GroupBy::Overall: return "overall";
  }
  return "overall";
}

}  // namespace

std::vector<GroupStats> success_rate(std::span<const GenerationRecord> records,
                                     GroupBy group_by) {
  std::map<std::string, GroupStats> groups;
  for (const GenerationRecord& record : records) {
    if (record.errored) continue;
    GroupStats& stats = groups[group_key(record, group_by)];
    stats.trials += 1;
    if (record.satisfied) stats.successes += 1;
  }
  std::vector<GroupStats> out;
  out.reserve(groups.size());
  for (auto& [key, stats] : groups) {
    stats.key = key;
    stats.rate = stats.trials > 0
                     ? static_cast<double>(stats.successes) / static_cast<double>(stats.trials)
                     : 0.0;
    stats.std_error =
        stats.trials > 1
            ? std::sqrt(stats.rate * (1.0 - stats.rate) /
                        static_cast<double>(stats.trials - 1))
            : 0.0;
    out.push_back(std::move(stats));
  }
  return out;
}

double pass_at_k_estimate(std::size_t n, std::size_t c, std::size_t k) {
  if (k == 0 || n == 0 || k > n) return 0.0;
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;
  // 1 - C(n-c, k)/C(n, k) as a telescoping product, overflow-free.
  double ratio = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    ratio *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - ratio;
}

std::vector<PassAtKPoint> pass_at_k(std::span<const GenerationRecord> records,
                                    const std::vector<int>& ks, bool naive_first_k) {
  struct InstanceTrials {
    std::vector<std::pair<int, bool>> trials;  // (trial index, satisfied)
  };
  std::map<std::string, InstanceTrials> instances;
  for (const GenerationRecord& record : records) {
    if (record.errored || record.round != 1) continue;
    instances[record.instance_id].trials.emplace_back(record.trial, record.satisfied);
  }
  for (auto& [id, data] : instances) std::sort(data.trials.begin(), data.trials.end());

  std::vector<PassAtKPoint> curve;
  curve.reserve(ks.size());
  for (int k : ks) {
    PassAtKPoint point;
    point.k = k;
    std::vector<double> estimates;
    for (const auto& [id, data] : instances) {
      std::size_t n = data.trials.size();
      if (k <= 0 || n < static_cast<std::size_t>(k)) {
        point.skipped += 1;
        continue;
      }
      double estimate = 0.0;
      if (naive_first_k) {
        for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
          if (data.trials[i].second) {
            estimate = 1.0;
            break;
          }
        }
      } else {
        std::size_t c = static_cast<std::size_t>(
            std::count_if(data.trials.begin(), data.trials.end(),
                          [](const auto& t) { return t.second; }));
        estimate = pass_at_k_estimate(n, c, static_cast<std::size_t>(k));
      }
      estimates.push_back(estimate);
    }
    point.instances = estimates.size();
    if (!estimates.empty()) {
      double sum = 0.0;
      for (double e : estimates) sum += e;
      point.mean = sum / static_cast<double>(estimates.size());
      if (estimates.size() > 1) {
        double var = 0.0;
        for (double e : estimates) var += (e - point.mean) * (e - point.mean);
        var /= static_cast<double>(estimates.size() - 1);
        point.std_error = std::sqrt(var / static_cast<double>(estimates.size()));
      }
    }
    curve.push_back(point);
  }
  return curve;
}

std::vector<RoundStats> satisfaction_by_round(std::span<const GenerationRecord> records) {
  std::map<std::string, int> first_satisfied;  // instance -> earliest round
  std::set<std::string> instances;
  int max_round = 0;
  for (const GenerationRecord& record : records) {
    instances.insert(record.instance_id);
    max_round = std::max(max_round, record.round);
    if (record.errored || !record.satisfied) continue;
    auto [it, inserted] = first_satisfied.emplace(record.instance_id, record.round);
    if (!inserted) it->second = std::min(it->second, record.round);
  }
  std::vector<RoundStats> out;
  for (int round = 1; round <= max_round; ++round) {
    RoundStats stats;
    stats.round = round;
    for (const auto& [id, first] : first_satisfied) {
      if (first <= round) stats.satisfied += 1;
    }
    stats.rate = instances.empty() ? 0.0
                                   : static_cast<double>(stats.satisfied) /
                                         static_cast<double>(instances.size());
    out.push_back(stats);
  }
  return out;
}

std::span<const std::string_view> word_validity_supplements() {
  static const std::string_view supplements[kWordValiditySupplementCount] = {
      "supercalifragilisticexpialidocious",
      "pneumonoultramicroscopicsilicovolcanoconiosis",
      "antidisestablishmentarianism",
      "pseudopseudohypoparathyroidism",
      "extraterrestrializationism",
      "acceleratrix",
      "circumlocutrix",
      "procrastinatrix",
  };
  return supplements;
}

WordValidityStats word_validity(std::span<const GenerationRecord> records,
                                const std::vector<std::string>& word_list) {
  std::unordered_set<std::string_view> valid_words(word_list.begin(), word_list.end());
  for (std::string_view supplement : word_validity_supplements())
    valid_words.insert(supplement);

  WordValidityStats stats;
  for (const GenerationRecord& record : records) {
    if (record.errored || record.gen_level != Level::Word) continue;
    stats.considered += 1;
    std::string cleaned = normalize_word(preclean_generation(record.generation));
    if (valid_words.count(cleaned) > 0) stats.valid += 1;
  }
  stats.fraction = stats.considered > 0
                       ? static_cast<double>(stats.valid) / static_cast<double>(stats.considered)
                       : 0.0;
  return stats;
}

}  // namespace collie
