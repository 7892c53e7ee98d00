#include "cric/transe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fstream>
#include <istream>
#include <ostream>

#include "cric/errors.hpp"
#include "cric/rng.hpp"
#include "cric/text_util.hpp"

namespace cric::transe {

std::string_view to_string(Distance d) { return d == Distance::L1 ? "L1" : "L2"; }

Distance parse_distance(std::string_view s) {
  if (s == "L1") return Distance::L1;
  if (s == "L2") return Distance::L2;
  throw ConfigError("unknown distance '" + std::string(s) + "' (expected L1 or L2)");
}

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dist(Distance d, const std::vector<double>& diff) {
  double s = 0;
  if (d == Distance::L1) {
    for (double x : diff) s += std::fabs(x);
  } else {
    s = norm2(diff);
  }
  return s;
}

// Gradient of dist with respect to the difference vector.
std::vector<double> dist_grad(Distance d, const std::vector<double>& diff) {
  std::vector<double> g(diff.size(), 0.0);
  if (d == Distance::L1) {
    for (std::size_t i = 0; i < diff.size(); ++i) {
      g[i] = diff[i] > 0 ? 1.0 : diff[i] < 0 ? -1.0 : 0.0;
    }
  } else {
    double n = norm2(diff);
    if (n > 0) {
      for (std::size_t i = 0; i < diff.size(); ++i) g[i] = diff[i] / n;
    }
  }
  return g;
}

std::vector<double> translate_diff(const std::vector<double>& h, const std::vector<double>& r,
                                   const std::vector<double>& t) {
  std::vector<double> diff(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) diff[i] = h[i] + r[i] - t[i];
  return diff;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> entity_names,
                               std::vector<std::string> relation_names, std::size_t dimension,
                               Distance distance)
    : dimension_(dimension),
      distance_(distance),
      entity_names_(std::move(entity_names)),
      relation_names_(std::move(relation_names)) {
  std::sort(entity_names_.begin(), entity_names_.end());
  std::sort(relation_names_.begin(), relation_names_.end());
  for (std::size_t i = 0; i < entity_names_.size(); ++i) entity_index_[entity_names_[i]] = i;
  for (std::size_t i = 0; i < relation_names_.size(); ++i) relation_index_[relation_names_[i]] = i;
  entity_vecs_.assign(entity_names_.size(), std::vector<double>(dimension_, 0.0));
  relation_vecs_.assign(relation_names_.size(), std::vector<double>(dimension_, 0.0));
}

std::vector<double>& EmbeddingTable::entity(const std::string& name) {
  auto it = entity_index_.find(name);
  if (it == entity_index_.end()) throw LookupError("unknown entity '" + name + "'");
  return entity_vecs_[it->second];
}

const std::vector<double>& EmbeddingTable::entity(const std::string& name) const {
  auto it = entity_index_.find(name);
  if (it == entity_index_.end()) throw LookupError("unknown entity '" + name + "'");
  return entity_vecs_[it->second];
}

std::vector<double>& EmbeddingTable::relation(const std::string& name) {
  auto it = relation_index_.find(name);
  if (it == relation_index_.end()) throw LookupError("unknown relation '" + name + "'");
  return relation_vecs_[it->second];
}

const std::vector<double>& EmbeddingTable::relation(const std::string& name) const {
  auto it = relation_index_.find(name);
  if (it == relation_index_.end()) throw LookupError("unknown relation '" + name + "'");
  return relation_vecs_[it->second];
}

void EmbeddingTable::save(std::ostream& out) const {
  out << "cric-transe v1\n";
  out << "dimension " << dimension_ << '\n';
  out << "distance " << to_string(distance_) << '\n';
  out << "norm_policy " << norm_policy_ << '\n';
  auto dump = [&](const std::vector<std::string>& names,
                  const std::vector<std::vector<double>>& vecs, const char* label) {
    out << label << ' ' << names.size() << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << names[i] << '\t';
      for (std::size_t j = 0; j < vecs[i].size(); ++j) {
        if (j) out << ' ';
        out << format_double17(vecs[i][j]);
      }
      out << '\n';
    }
  };
  dump(entity_names_, entity_vecs_, "entities");
  dump(relation_names_, relation_vecs_, "relations");
}

EmbeddingTable EmbeddingTable::load(std::istream& in) {
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("embedding table: unexpected end of file");
    return line;
  };
  if (next_line() != "cric-transe v1") throw ParseError("embedding table: bad header");

  auto header_value = [&](const std::string& key) {
    next_line();
    if (!starts_with(line, key + " ")) {
      throw ParseError("embedding table: expected '" + key + "', got '" + line + "'");
    }
    return line.substr(key.size() + 1);
  };
  std::size_t dimension = std::stoull(header_value("dimension"));
  Distance distance = parse_distance(header_value("distance"));
  std::string policy = header_value("norm_policy");

  auto read_block = [&](const std::string& label, std::vector<std::string>& names,
                        std::vector<std::vector<double>>& vecs) {
    std::size_t count = std::stoull(header_value(label));
    for (std::size_t i = 0; i < count; ++i) {
      next_line();
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw ParseError("embedding table: missing TAB in row");
      names.push_back(line.substr(0, tab));
      std::vector<double> v;
      for (const std::string& tok : tokenize_ws(line.substr(tab + 1))) {
        v.push_back(parse_double_strict(tok));
      }
      if (v.size() != dimension) {
        throw ParseError("embedding table: row '" + names.back() + "' has " +
                         std::to_string(v.size()) + " values, expected " +
                         std::to_string(dimension));
      }
      vecs.push_back(std::move(v));
    }
  };

  std::vector<std::string> ents, rels;
  std::vector<std::vector<double>> evecs, rvecs;
  read_block("entities", ents, evecs);
  read_block("relations", rels, rvecs);

  EmbeddingTable t(ents, rels, dimension, distance);
  t.norm_policy_ = policy;
  for (std::size_t i = 0; i < ents.size(); ++i) t.entity(ents[i]) = evecs[i];
  for (std::size_t i = 0; i < rels.size(); ++i) t.relation(rels[i]) = rvecs[i];
  return t;
}

void EmbeddingTable::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embedding table: " + path);
  save(out);
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding table: " + path);
  return load(in);
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& cfg) {
  if (kg.empty()) throw ConfigError("transe::train: knowledge graph is empty");
  if (cfg.epochs < 1) throw ConfigError("transe::train: epochs must be >= 1");
  if (cfg.margin <= 0) throw ConfigError("transe::train: margin must be > 0");
  if (cfg.dimension < 1) throw ConfigError("transe::train: dimension must be >= 1");

  std::vector<std::string> relations = kg.relations();
  TrainResult res;
  res.table = EmbeddingTable(kg.entities(), relations, cfg.dimension, cfg.distance);
  EmbeddingTable& table = res.table;

  Rng rng(cfg.seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dimension));
  auto init = [&](std::vector<double>& v) {
    for (double& x : v) x = rng.uniform(-bound, bound);
  };
  for (const std::string& e : table.entity_names()) init(table.entity(e));
  for (const std::string& r : table.relation_names()) {
    std::vector<double>& v = table.relation(r);
    init(v);
    double n = norm2(v);
    if (n > 0) {
      for (double& x : v) x /= n;
    }
  }

  const std::vector<std::string>& entities = table.entity_names();
  const std::vector<Triplet>& triplets = kg.triplets();
  std::vector<std::size_t> order(triplets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0;

    for (std::size_t idx : order) {
      const Triplet& pos = triplets[idx];
      for (std::size_t neg = 0; neg < cfg.negatives_per_positive; ++neg) {
        // Corrupt head or tail uniformly; never sample a true triplet.
        Triplet cor = pos;
        bool found = false;
        for (int attempt = 0; attempt < 100 && !found; ++attempt) {
          cor = pos;
          const std::string& replacement = entities[rng.index(entities.size())];
          if (rng.below(2) == 0) {
            cor.head = replacement;
          } else {
            cor.tail = replacement;
          }
          found = cor.head != cor.tail && !kg.has(cor.head, cor.relation, cor.tail);
        }
        if (!found) continue;

        std::vector<double>& h = table.entity(pos.head);
        std::vector<double>& r = table.relation(pos.relation);
        std::vector<double>& t = table.entity(pos.tail);
        std::vector<double>& ch = table.entity(cor.head);
        std::vector<double>& ct = table.entity(cor.tail);

        std::vector<double> diff_pos = translate_diff(h, r, t);
        std::vector<double> diff_neg = translate_diff(ch, r, ct);
        const double arg = cfg.margin + dist(cfg.distance, diff_pos) -
                           dist(cfg.distance, diff_neg);
        if (arg <= 0) continue;
        epoch_loss += arg;

        std::vector<double> gp = dist_grad(cfg.distance, diff_pos);
        std::vector<double> gn = dist_grad(cfg.distance, diff_neg);
        const double lr = cfg.learning_rate;
        for (std::size_t i = 0; i < cfg.dimension; ++i) {
          h[i] -= lr * gp[i];
          t[i] += lr * gp[i];
          r[i] -= lr * (gp[i] - gn[i]);
          ch[i] += lr * gn[i];
          ct[i] -= lr * gn[i];
        }
      }
    }

    // Project entities onto the unit ball.
    for (const std::string& e : table.entity_names()) {
      std::vector<double>& v = table.entity(e);
      double n = norm2(v);
      if (n > 1.0) {
        for (double& x : v) x /= n;
      }
    }
    res.loss_curve.push_back(epoch_loss);
  }
  return res;
}

double score(const EmbeddingTable& table, const std::string& head, const std::string& relation,
             const std::string& tail) {
  return dist(table.distance(),
              translate_diff(table.entity(head), table.relation(relation), table.entity(tail)));
}

namespace {

std::vector<std::string> rank_entities(const EmbeddingTable& table,
                                       const std::function<double(const std::string&)>& scorer,
                                       std::size_t k) {
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(table.entity_names().size());
  for (const std::string& e : table.entity_names()) scored.emplace_back(scorer(e), e);
  std::sort(scored.begin(), scored.end());
  k = std::min(k, scored.size());
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
  return out;
}

}  // namespace

std::vector<std::string> predict_tail(const EmbeddingTable& table, const std::string& head,
                                      const std::string& relation, std::size_t k) {
  const auto& h = table.entity(head);
  const auto& r = table.relation(relation);
  return rank_entities(
      table, [&](const std::string& e) { return dist(table.distance(),
                                                     translate_diff(h, r, table.entity(e))); },
      k);
}

std::vector<std::string> predict_head(const EmbeddingTable& table, const std::string& relation,
                                      const std::string& tail, std::size_t k) {
  const auto& r = table.relation(relation);
  const auto& t = table.entity(tail);
  return rank_entities(
      table, [&](const std::string& e) { return dist(table.distance(),
                                                     translate_diff(table.entity(e), r, t)); },
      k);
}

double hits_at_k(const EmbeddingTable& table, const std::vector<Triplet>& triplets,
                 std::size_t k) {
  if (triplets.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Triplet& t : triplets) {
    std::vector<std::string> tails = predict_tail(table, t.head, t.relation, k);
    if (std::find(tails.begin(), tails.end(), t.tail) != tails.end()) ++hits;
    std::vector<std::string> heads = predict_head(table, t.relation, t.tail, k);
    if (std::find(heads.begin(), heads.end(), t.head) != heads.end()) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(2 * triplets.size());
}

double margin_loss(const EmbeddingTable& table, const GradCheckBatch& batch) {
  double total = 0;
  for (const ContrastPair& p : batch.pairs) {
    double d_pos = score(table, p.positive.head, p.positive.relation, p.positive.tail);
    double d_neg = score(table, p.corrupted.head, p.corrupted.relation, p.corrupted.tail);
    total += std::max(0.0, batch.margin + d_pos - d_neg);
  }
  return total;
}

namespace {

struct ParamRef {
  bool is_entity;
  std::string name;
  auto operator<=>(const ParamRef&) const = default;
};

}  // namespace

double gradient_check(const EmbeddingTable& table, const GradCheckBatch& batch, double epsilon) {
  if (batch.pairs.empty()) throw PreconditionError("gradient_check: batch is empty");
  if (!(epsilon > 0) || epsilon > 1e-2) {
    throw PreconditionError("gradient_check: epsilon must be in (0, 1e-2]");
  }
  const std::size_t dim = table.dimension();
  const double kink_zone = 10.0 * epsilon;

  // Analytic gradient, plus per-coordinate kink flags.
  std::map<ParamRef, std::vector<double>> grad;
  std::map<ParamRef, std::vector<bool>> kink;
  auto slot = [&](bool is_entity, const std::string& name) -> std::pair<std::vector<double>&,
                                                                        std::vector<bool>&> {
    ParamRef ref{is_entity, name};
    auto [git, inserted] = grad.try_emplace(ref, std::vector<double>(dim, 0.0));
    auto [kit, kinserted] = kink.try_emplace(ref, std::vector<bool>(dim, false));
    (void)inserted;
    (void)kinserted;
    return {git->second, kit->second};
  };
  auto mark_kinks = [&](const std::vector<double>& diff, const Triplet& t) {
    for (std::size_t i = 0; i < dim; ++i) {
      bool near = table.distance() == Distance::L1
                      ? std::fabs(diff[i]) <= kink_zone
                      : dist(Distance::L2, diff) <= kink_zone;
      if (!near) continue;
      slot(true, t.head).second[i] = true;
      slot(false, t.relation).second[i] = true;
      slot(true, t.tail).second[i] = true;
    }
  };
  auto mark_all = [&](const Triplet& t) {
    for (std::size_t i = 0; i < dim; ++i) {
      slot(true, t.head).second[i] = true;
      slot(false, t.relation).second[i] = true;
      slot(true, t.tail).second[i] = true;
    }
  };

  for (const ContrastPair& p : batch.pairs) {
    std::vector<double> diff_pos = translate_diff(table.entity(p.positive.head),
                                                  table.relation(p.positive.relation),
                                                  table.entity(p.positive.tail));
    std::vector<double> diff_neg = translate_diff(table.entity(p.corrupted.head),
                                                  table.relation(p.corrupted.relation),
                                                  table.entity(p.corrupted.tail));
    const double arg = batch.margin + dist(table.distance(), diff_pos) -
                       dist(table.distance(), diff_neg);
    if (std::fabs(arg) <= kink_zone) {
      // Perturbation could cross the hinge; exclude everything it touches.
      mark_all(p.positive);
      mark_all(p.corrupted);
      continue;
    }
    mark_kinks(diff_pos, p.positive);
    mark_kinks(diff_neg, p.corrupted);
    if (arg <= 0) continue;

    std::vector<double> gp = dist_grad(table.distance(), diff_pos);
    std::vector<double> gn = dist_grad(table.distance(), diff_neg);
    for (std::size_t i = 0; i < dim; ++i) {
      slot(true, p.positive.head).first[i] += gp[i];
      slot(false, p.positive.relation).first[i] += gp[i];
      slot(true, p.positive.tail).first[i] -= gp[i];
      slot(true, p.corrupted.head).first[i] -= gn[i];
      slot(false, p.corrupted.relation).first[i] -= gn[i];
      slot(true, p.corrupted.tail).first[i] += gn[i];
    }
  }

  // Central finite differences on a scratch copy.
  EmbeddingTable scratch = table;
  double max_rel_err = 0;
  for (auto& [ref, g] : grad) {
    std::vector<double>& v = ref.is_entity ? scratch.entity(ref.name) : scratch.relation(ref.name);
    const std::vector<bool>& k = kink.at(ref);
    for (std::size_t i = 0; i < dim; ++i) {
      if (k[i]) continue;
      const double saved = v[i];
      v[i] = saved + epsilon;
      double up = margin_loss(scratch, batch);
      v[i] = saved - epsilon;
      double down = margin_loss(scratch, batch);
      v[i] = saved;
      const double fd = (up - down) / (2 * epsilon);
      const double a = g[i];
      // Differences below 1e-9 are rounding noise of the loss itself (the
      // quotient amplifies one ulp of a O(1) loss to ~1e-11).
      if (std::fabs(a - fd) < 1e-9) continue;
      const double rel = std::fabs(a - fd) / std::max({std::fabs(a), std::fabs(fd), 1e-8});
      max_rel_err = std::max(max_rel_err, rel);
    }
  }
  return max_rel_err;
}

}  // namespace cric::transe
