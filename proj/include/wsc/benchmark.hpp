// Per-iteration timing of the objective and gradient, plus a synthetic sweep
// over the number of labels.

#ifndef WSC_BENCHMARK_HPP
#define WSC_BENCHMARK_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "wsc/features.hpp"
#include "wsc/lattice.hpp"
#include "wsc/objective.hpp"

namespace wsc {

struct ModelTiming {
  ModelKind kind = ModelKind::Linear;
  int num_labels = 2;   // segment labels including O
  std::size_t n = 0;    // tokens per sentence (mean, rounded, for real data)
  int max_seg_len = 6;
  std::size_t edges = 0;  // lattice edges per sentence (mean, rounded)
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
  double stddev_seconds = 0.0;
  std::vector<double> samples;
};

struct BenchConfig {
  std::vector<ModelKind> models = {ModelKind::Linear, ModelKind::Semi, ModelKind::Weak};
  FeatureConfig features;  // features.max_seg_len is L
  int iterations = 5;
  int warmup = 1;
  double lambda = 1.0;
};

struct BenchReport {
  std::vector<ModelTiming> models;
  // mean(semi) / mean(weak); 0 when either model is missing.
  double semi_weak_ratio() const;
  const ModelTiming* find(ModelKind kind) const;
};

// Times one objective+gradient evaluation per iteration on a single thread.
// Dictionary construction and warm-up evaluations are excluded. Labels
// default to those seen in the data.
ModelTiming time_objective(const Dataset& dataset, ModelKind kind, const FeatureConfig& features,
                           int iterations, int warmup, double lambda = 1.0,
                           const LabelSet* labels = nullptr);

BenchReport benchmark_training(const Dataset& dataset, const BenchConfig& config);

struct SweepConfig {
  std::vector<int> num_labels = {2, 4, 8, 16};
  std::vector<ModelKind> models = {ModelKind::Linear, ModelKind::Semi, ModelKind::Weak};
  std::size_t sentences = 50;
  std::size_t n = 20;
  int max_seg_len = 6;
  int iterations = 3;
  int warmup = 1;
  std::uint64_t seed = 1;
};

// Synthetic corpora of fixed sentence length, one per label count.
std::vector<ModelTiming> sweep_labels(const SweepConfig& config);

// `model,num_labels,n,L,edges,sec_per_iter` with a header line.
void write_timing_csv(std::ostream& out, const std::vector<ModelTiming>& rows);

void to_json(nlohmann::json& j, const ModelTiming& t);
void to_json(nlohmann::json& j, const BenchReport& r);

}  // namespace wsc

#endif  // WSC_BENCHMARK_HPP
