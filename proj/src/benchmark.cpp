#include "wsc/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <utility>

#include "wsc/synthetic.hpp"

namespace wsc {

double BenchReport::semi_weak_ratio() const {
  const ModelTiming* semi = find(ModelKind::Semi);
  const ModelTiming* weak = find(ModelKind::Weak);
  if (!semi || !weak || weak->mean_seconds <= 0.0) return 0.0;
  return semi->mean_seconds / weak->mean_seconds;
}

const ModelTiming* BenchReport::find(ModelKind kind) const {
  for (const auto& m : models) {
    if (m.kind == kind) return &m;
  }
  return nullptr;
}

ModelTiming time_objective(const Dataset& dataset, ModelKind kind, const FeatureConfig& features,
                           int iterations, int warmup, double lambda, const LabelSet* label_set) {
  if (iterations < 1 || warmup < 0) throw std::invalid_argument("bad iteration counts");
  Dataset data = dataset;
  if (kind != ModelKind::Linear) drop_long_spans(data, features.max_seg_len);
  const LabelSet labels = label_set ? *label_set : collect_labels(data);

  FeatureDictionary dict;
  std::size_t edges = 0, tokens = 0, sentences = 0;
  {
    FeatureExtractor builder(labels, features, dict);
    for (const auto& inst : data.instances) {
      if (inst.sentence.empty()) continue;
      edges += build_lattice(kind, inst.sentence, labels, features.max_seg_len, &builder).edges().size();
      tokens += inst.sentence.size();
      ++sentences;
    }
  }
  dict.freeze();
  const FeatureExtractor fx(labels, features, std::as_const(dict));
  // Small deterministic weights so the exponentials are not all trivial.
  std::vector<double> w(dict.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.01 * static_cast<double>(static_cast<int>(i % 7) - 3);

  ModelTiming t;
  t.kind = kind;
  t.num_labels = labels.num_segment_labels();
  t.max_seg_len = features.max_seg_len;
  if (sentences > 0) {
    t.n = (tokens + sentences / 2) / sentences;
    t.edges = (edges + sentences / 2) / sentences;
  }
  for (int i = 0; i < warmup + iterations; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const ObjectiveResult r = objective_and_gradient(data.instances, w, fx, kind, lambda, 1);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!std::isfinite(r.value)) throw NumericalError("non-finite objective during benchmark");
    if (i >= warmup) t.samples.push_back(s);
  }
  const double n = static_cast<double>(t.samples.size());
  t.mean_seconds = std::accumulate(t.samples.begin(), t.samples.end(), 0.0) / n;
  double var = 0.0;
  for (double s : t.samples) var += (s - t.mean_seconds) * (s - t.mean_seconds);
  t.stddev_seconds = t.samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  std::vector<double> sorted = t.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  t.median_seconds = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return t;
}

BenchReport benchmark_training(const Dataset& dataset, const BenchConfig& config) {
  config.features.validate();
  if (config.features.use_brown) throw std::invalid_argument("benchmarks do not support +b features");
  BenchReport report;
  for (ModelKind kind : config.models) {
    report.models.push_back(
        time_objective(dataset, kind, config.features, config.iterations, config.warmup, config.lambda));
  }
  return report;
}

std::vector<ModelTiming> sweep_labels(const SweepConfig& config) {
  std::vector<ModelTiming> rows;
  FeatureConfig features;
  features.max_seg_len = config.max_seg_len;
  for (int k : config.num_labels) {
    SyntheticConfig sc;
    sc.sentences = config.sentences;
    sc.min_tokens = sc.max_tokens = config.n;
    sc.num_labels = k;
    sc.max_chunk_tokens = std::min(config.max_seg_len, 4);
    sc.seed = config.seed + static_cast<std::uint64_t>(k);
    const Dataset data = make_dataset(synthetic_corpus(sc));
    const LabelSet labels(synthetic_labels(k));
    for (ModelKind kind : config.models) {
      rows.push_back(time_objective(data, kind, features, config.iterations, config.warmup, 1.0, &labels));
    }
  }
  return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<ModelTiming>& rows) {
  out << "model,num_labels,n,L,edges,sec_per_iter\n";
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << r.num_labels << ',' << r.n << ',' << r.max_seg_len << ',' << r.edges << ','
        << r.mean_seconds << '\n';
  }
}

void to_json(nlohmann::json& j, const ModelTiming& t) {
  j = {{"model", to_string(t.kind)},
       {"num_labels", t.num_labels},
       {"n", t.n},
       {"L", t.max_seg_len},
       {"edges", t.edges},
       {"mean_sec_per_iter", t.mean_seconds},
       {"median_sec_per_iter", t.median_seconds},
       {"stddev_sec_per_iter", t.stddev_seconds},
       {"samples", t.samples}};
}

void to_json(nlohmann::json& j, const BenchReport& r) {
  j = {{"models", r.models}, {"semi_weak_ratio", r.semi_weak_ratio()}};
}

}  // namespace wsc
