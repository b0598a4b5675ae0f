#include "wsc/objective.hpp"

#include <algorithm>
#include <exception>
#include <set>
#include <stdexcept>

#include <omp.h>

#include "wsc/inference.hpp"

namespace wsc {

Instance make_instance(const Message& message) {
  Instance inst;
  inst.sentence = tokenize(message.text);
  inst.char_gold = message.spans;
  std::sort(inst.char_gold.begin(), inst.char_gold.end());
  inst.gold = char_spans_to_word_spans(inst.sentence, message.spans);
  return inst;
}

Dataset make_dataset(const std::vector<Message>& messages, Split split) {
  Dataset d;
  d.split = split;
  d.instances.reserve(messages.size());
  for (const auto& m : messages) d.instances.push_back(make_instance(m));
  return d;
}

LabelSet collect_labels(const Dataset& dataset) {
  std::set<std::string> names;
  for (const auto& inst : dataset.instances) {
    for (const auto& s : inst.gold) names.insert(s.label);
  }
  if (names.empty()) names.insert("NP");
  return LabelSet(std::vector<std::string>(names.begin(), names.end()));
}

std::size_t drop_long_spans(Dataset& dataset, int max_seg_len) {
  std::size_t dropped = 0;
  for (auto& inst : dataset.instances) {
    auto& gold = inst.gold;
    const auto before = gold.size();
    std::erase_if(gold, [&](const WordSpan& s) {
      return s.last_token - s.first_token + 1 > static_cast<std::size_t>(max_seg_len);
    });
    dropped += before - gold.size();
  }
  return dropped;
}

namespace {

// Evaluates one instance. `apply(index, delta)` receives gradient terms in a
// fixed order: gold-path features, then negated expectations edge by edge.
// Returns false when the gold labeling is not representable.
template <class Apply>
bool instance_terms(const Instance& inst, std::span<const double> weights, const FeatureExtractor& fx,
                    ModelKind kind, double& value, Apply&& apply) {
  value = 0.0;
  if (inst.sentence.empty()) return true;
  const Lattice lattice =
      build_lattice(kind, inst.sentence, fx.labels(), fx.config().max_seg_len, &fx);
  const auto gold = find_path(lattice, spans_to_segmentation(inst.sentence.size(), inst.gold, fx.labels()));
  if (!gold) return false;
  const Marginals m = edge_marginals(lattice, weights);
  const auto& edges = lattice.edges();
  double gold_score = 0.0;
  for (int e : *gold) {
    for (const FeatureEntry& f : lattice.features(edges[e])) {
      gold_score += weights[f.index] * f.value;
      apply(f.index, f.value);
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double p = m.edge[e];
    for (const FeatureEntry& f : lattice.features(edges[e])) apply(f.index, -p * f.value);
  }
  value = gold_score - m.log_z;
  return true;
}

void check_inputs(std::span<const double> weights, const FeatureExtractor& fx, double lambda) {
  if (weights.size() != fx.dictionary().size()) {
    throw std::invalid_argument("weight vector has " + std::to_string(weights.size()) +
                                " entries, dictionary has " + std::to_string(fx.dictionary().size()));
  }
  if (!fx.dictionary().frozen()) throw std::invalid_argument("feature dictionary must be frozen");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be non-negative");
}

void add_regularizer(ObjectiveResult& r, std::span<const double> weights, double lambda) {
  double sq = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    sq += weights[i] * weights[i];
    r.gradient[i] -= 2.0 * lambda * weights[i];
  }
  r.value -= lambda * sq;
}

}  // namespace

ObjectiveResult objective_and_gradient_serial(std::span<const Instance> instances, std::span<const double> weights,
                                              const FeatureExtractor& fx, ModelKind kind, double lambda) {
  check_inputs(weights, fx, lambda);
  ObjectiveResult r;
  r.gradient.assign(weights.size(), 0.0);
  for (const Instance& inst : instances) {
    double v = 0.0;
    const bool ok =
        instance_terms(inst, weights, fx, kind, v, [&](std::uint32_t i, double d) { r.gradient[i] += d; });
    if (!ok) {
      ++r.skipped;
      continue;
    }
    r.value += v;
  }
  add_regularizer(r, weights, lambda);
  return r;
}

ObjectiveResult objective_and_gradient(std::span<const Instance> instances, std::span<const double> weights,
                                       const FeatureExtractor& fx, ModelKind kind, double lambda, int threads) {
  check_inputs(weights, fx, lambda);
  if (threads < 1) threads = 1;

  struct Contribution {
    bool ok = true;
    double value = 0.0;
    std::vector<std::pair<std::uint32_t, double>> terms;
    std::exception_ptr error;
  };

  ObjectiveResult r;
  r.gradient.assign(weights.size(), 0.0);
  const std::size_t batch = 64 * static_cast<std::size_t>(threads);
  std::vector<Contribution> work;
  for (std::size_t lo = 0; lo < instances.size(); lo += batch) {
    const std::size_t hi = std::min(instances.size(), lo + batch);
    work.assign(hi - lo, Contribution{});
    const auto count = static_cast<long>(hi - lo);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long k = 0; k < count; ++k) {
      Contribution& c = work[k];
      try {
        c.ok = instance_terms(instances[lo + k], weights, fx, kind, c.value,
                              [&](std::uint32_t i, double d) { c.terms.emplace_back(i, d); });
      } catch (...) {
        c.error = std::current_exception();
      }
    }
    // Replay in instance order: same summation order as the serial kernel.
    for (Contribution& c : work) {
      if (c.error) std::rethrow_exception(c.error);
      if (!c.ok) {
        ++r.skipped;
        continue;
      }
      for (const auto& [i, d] : c.terms) r.gradient[i] += d;
      r.value += c.value;
    }
  }
  add_regularizer(r, weights, lambda);
  return r;
}

}  // namespace wsc
