#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cric/generator.hpp"

namespace cric {

// Balancing unit. Functions producing concept/number/boolean answers are
// balanced by answer within a concept group; grounding functions by text
// input within the function (group carries the text input, the cap is
// enforced per function across those keys).
struct DistributionKey {
  FunctionName function = FunctionName::Exist;
  std::string group;

  auto operator<=>(const DistributionKey&) const = default;
};

enum class KeyKind : std::uint8_t { AnswerBalanced, TextInputBalanced };

// (key, value) memberships of one sample: for answer-balanced steps the
// value is the step's rendered output; for grounding steps it is the text
// input itself.
std::vector<std::pair<DistributionKey, std::string>> balance_keys(const QASample& sample,
                                                                  KeyKind kind);

using Histogram = std::map<DistributionKey, std::map<std::string, std::size_t>>;

Histogram histogram(const std::vector<QASample>& samples, KeyKind kind);

struct BucketReport {
  DistributionKey key;
  std::size_t before = 0;
  std::size_t after = 0;
  bool singleton = false;  // single-valued buckets cannot be balanced
  std::map<std::string, std::size_t> before_values;
  std::map<std::string, std::size_t> after_values;
};

struct BalanceReport {
  std::size_t input = 0;
  std::size_t retained = 0;
  std::size_t rounds = 0;
  std::vector<BucketReport> buckets;
};

struct BalanceResult {
  std::vector<QASample> retained;  // subset of input, original order
  BalanceReport report;
};

// Cap every value's share within its bucket at max_share by seeded uniform
// subsampling of over-represented values; under-represented values are kept
// whole. A sample is dropped when any of its keys selects it for dropping,
// and rounds repeat until every multi-value bucket satisfies
// max-share + 1/bucket_size post-hoc. Samples are never edited.
BalanceResult downsample(const std::vector<QASample>& samples, double max_share,
                         std::uint64_t seed);

}  // namespace cric
