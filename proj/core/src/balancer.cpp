#include "cric/balancer.hpp"

#include <algorithm>

#include "cric/errors.hpp"

namespace cric {

namespace {

bool answer_balanced(FunctionName f) {
  switch (f) {
    case FunctionName::Recognition:
    case FunctionName::QueryKG:
    case FunctionName::VerifyKG:
    case FunctionName::Exist:
    case FunctionName::Count:
      return true;
    default:
      return false;
  }
}

bool text_input_balanced(FunctionName f) {
  switch (f) {
    case FunctionName::Find:
    case FunctionName::Relate:
    case FunctionName::RelateReverse:
    case FunctionName::GroundKG:
      return true;
    default:
      return false;
  }
}

// Concept group of an Exist question: the head concept of the reference
// chain feeding it (first Find/GroundKG text walking back), "any" if the
// chain reaches Initial untouched.
std::string exist_group(const Program& p, std::size_t step_idx) {
  std::size_t cur = step_idx;
  while (true) {
    const Step& s = p.steps[cur];
    if (s.function == FunctionName::Find) {
      if (s.text.object) return *s.text.object;
      if (s.text.attribute) return *s.text.attribute;
    }
    if (s.function == FunctionName::GroundKG && s.text.tail) return *s.text.tail;
    if (s.inputs.empty()) return "any";
    cur = s.inputs[0];
  }
}

std::string text_input_of(const Step& s) {
  std::string out;
  for (const auto& [field, value] : present_text_fields(s.text)) {
    if (!out.empty()) out.push_back('|');
    out += value;
  }
  return out;
}

}  // namespace

std::vector<std::pair<DistributionKey, std::string>> balance_keys(const QASample& sample,
                                                                  KeyKind kind) {
  std::vector<std::pair<DistributionKey, std::string>> keys;
  const Program& p = sample.program;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    if (kind == KeyKind::AnswerBalanced && answer_balanced(s.function)) {
      DistributionKey key;
      key.function = s.function;
      switch (s.function) {
        case FunctionName::Recognition: key.group = *s.text.type_name; break;
        case FunctionName::QueryKG:
        case FunctionName::VerifyKG: key.group = *s.text.relation; break;
        case FunctionName::Exist: key.group = exist_group(p, s.inputs[0]); break;
        case FunctionName::Count: key.group = ""; break;
        default: break;
      }
      keys.emplace_back(key, render_answer(sample.trace.steps[i]));
    }
    if (kind == KeyKind::TextInputBalanced && text_input_balanced(s.function)) {
      std::string text = text_input_of(s);
      keys.emplace_back(DistributionKey{s.function, text}, text);
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

Histogram histogram(const std::vector<QASample>& samples, KeyKind kind) {
  Histogram h;
  for (const QASample& s : samples) {
    for (const auto& [key, value] : balance_keys(s, kind)) h[key][value]++;
  }
  return h;
}

namespace {

// Bucket identity inside downsample. Answer-balanced buckets cap answers
// within (function, group); text-input buckets cap text inputs within the
// function alone.
struct BucketId {
  KeyKind kind = KeyKind::AnswerBalanced;
  FunctionName function = FunctionName::Exist;
  std::string group;

  auto operator<=>(const BucketId&) const = default;
};

std::string bucket_label(const BucketId& b) {
  return std::string(b.kind == KeyKind::AnswerBalanced ? "A" : "T") + "/" +
         std::string(to_string(b.function)) + "/" + b.group;
}

// Largest per-value cap K with K <= max_share * sum(min(c, K)); 1 if none.
std::size_t solve_cap(const std::vector<std::size_t>& counts, double max_share) {
  std::vector<std::size_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> prefix(sorted.size() + 1, 0);
  for (std::size_t i = 0; i < sorted.size(); ++i) prefix[i + 1] = prefix[i] + sorted[i];
  const std::size_t max_count = sorted.empty() ? 0 : sorted.back();
  for (std::size_t cap = max_count; cap >= 1; --cap) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), cap);
    std::size_t below = static_cast<std::size_t>(it - sorted.begin());
    std::size_t total = prefix[below] + cap * (sorted.size() - below);
    if (static_cast<double>(cap) <= max_share * static_cast<double>(total)) return cap;
  }
  return 1;
}

}  // namespace

BalanceResult downsample(const std::vector<QASample>& samples, double max_share,
                         std::uint64_t seed) {
  if (!(max_share > 0.0) || max_share > 1.0) {
    throw ConfigError("downsample: max_share must be in (0, 1]");
  }

  // Per-sample bucket membership, computed once.
  std::vector<std::vector<std::pair<BucketId, std::string>>> memberships(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (const auto& [key, value] : balance_keys(samples[i], KeyKind::AnswerBalanced)) {
      memberships[i].emplace_back(BucketId{KeyKind::AnswerBalanced, key.function, key.group},
                                  value);
    }
    for (const auto& [key, value] : balance_keys(samples[i], KeyKind::TextInputBalanced)) {
      memberships[i].emplace_back(BucketId{KeyKind::TextInputBalanced, key.function, ""}, value);
    }
    std::sort(memberships[i].begin(), memberships[i].end());
    memberships[i].erase(std::unique(memberships[i].begin(), memberships[i].end()),
                         memberships[i].end());
  }

  std::vector<bool> retained(samples.size(), true);
  BalanceResult res;
  res.report.input = samples.size();

  std::map<BucketId, std::map<std::string, std::size_t>> before_hist;

  for (std::size_t round = 0;; ++round) {
    res.report.rounds = round + 1;
    std::map<BucketId, std::map<std::string, std::vector<std::size_t>>> buckets;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!retained[i]) continue;
      for (const auto& [bucket, value] : memberships[i]) buckets[bucket][value].push_back(i);
    }
    if (round == 0) {
      for (const auto& [bucket, values] : buckets) {
        for (const auto& [v, idxs] : values) before_hist[bucket][v] = idxs.size();
      }
    }

    std::vector<std::size_t> to_drop;
    for (const auto& [bucket, values] : buckets) {
      if (values.size() < 2) continue;  // singletons cannot be balanced
      std::vector<std::size_t> counts;
      counts.reserve(values.size());
      for (const auto& [v, idxs] : values) counts.push_back(idxs.size());
      const std::size_t cap = solve_cap(counts, max_share);
      for (const auto& [value, idxs] : values) {
        if (idxs.size() <= cap) continue;
        // Seeded per (round, bucket, value) so the outcome is independent
        // of map traversal and worker layout.
        Rng rng(derive_seed(seed, std::to_string(round) + "|" + bucket_label(bucket) + "|" +
                                      value));
        std::vector<std::size_t> pool = idxs;
        rng.shuffle(pool);
        for (std::size_t k = cap; k < pool.size(); ++k) to_drop.push_back(pool[k]);
      }
    }
    if (to_drop.empty()) break;
    for (std::size_t idx : to_drop) retained[idx] = false;
  }

  // Per-key before/after histograms for the report.
  std::map<BucketId, std::map<std::string, std::size_t>> after_hist;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!retained[i]) continue;
    for (const auto& [bucket, value] : memberships[i]) after_hist[bucket][value]++;
  }
  for (const auto& [bucket, values] : before_hist) {
    BucketReport br;
    br.key = {bucket.function, bucket.group};
    br.singleton = values.size() < 2;
    br.before_values = values;
    for (const auto& [v, n] : values) br.before += n;
    if (auto it = after_hist.find(bucket); it != after_hist.end()) {
      br.after_values = it->second;
      for (const auto& [v, n] : it->second) br.after += n;
    }
    res.report.buckets.push_back(std::move(br));
  }

  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (retained[i]) res.retained.push_back(samples[i]);
  }
  res.report.retained = res.retained.size();
  return res;
}

}  // namespace cric
