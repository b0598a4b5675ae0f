// Serial reference kernel against the OpenMP kernel on a synthetic corpus.

#include <benchmark/benchmark.h>

#include "wsc/objective.hpp"
#include "wsc/synthetic.hpp"

namespace {

struct Fixture {
  wsc::Dataset data;
  wsc::LabelSet labels;
  wsc::FeatureConfig config;
  wsc::FeatureDictionary dict;
  std::vector<double> weights;

  explicit Fixture(wsc::ModelKind kind) {
    wsc::SyntheticConfig sc;
    sc.sentences = 1000;
    sc.num_labels = 4;
    sc.seed = 3;
    data = wsc::make_dataset(wsc::synthetic_corpus(sc));
    labels = wsc::LabelSet(wsc::synthetic_labels(4));
    config = wsc::FeatureConfig::parse_flags("a,s");
    {
      wsc::FeatureExtractor fx(labels, config, dict);
      for (const auto& inst : data.instances) wsc::build_lattice(kind, inst.sentence, labels, config.max_seg_len, &fx);
    }
    dict.freeze();
    weights.assign(dict.size(), 0.01);
  }
};

const Fixture& fixture(wsc::ModelKind kind) {
  static const Fixture linear(wsc::ModelKind::Linear), semi(wsc::ModelKind::Semi), weak(wsc::ModelKind::Weak);
  switch (kind) {
    case wsc::ModelKind::Linear: return linear;
    case wsc::ModelKind::Semi: return semi;
    case wsc::ModelKind::Weak: return weak;
  }
  return weak;
}

void BM_Serial(benchmark::State& state) {
  const auto kind = static_cast<wsc::ModelKind>(state.range(0));
  const Fixture& f = fixture(kind);
  const wsc::FeatureExtractor fx(f.labels, f.config, f.dict);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wsc::objective_and_gradient_serial(f.data.instances, f.weights, fx, kind, 1.0));
  }
  state.SetLabel(std::string(wsc::to_string(kind)));
}

void BM_OpenMP(benchmark::State& state) {
  const auto kind = static_cast<wsc::ModelKind>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const Fixture& f = fixture(kind);
  const wsc::FeatureExtractor fx(f.labels, f.config, f.dict);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wsc::objective_and_gradient(f.data.instances, f.weights, fx, kind, 1.0, threads));
  }
  state.SetLabel(std::string(wsc::to_string(kind)) + " threads=" + std::to_string(threads));
}

}  // namespace

BENCHMARK(BM_Serial)->DenseRange(0, 2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OpenMP)
    ->ArgsProduct({{0, 1, 2}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
