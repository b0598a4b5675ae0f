#include "wsc/training.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <ceres/ceres.h>

#include "wsc/inference.hpp"

namespace wsc {

void TrainConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  if (lbfgs_history < 1) throw std::invalid_argument("L-BFGS history must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  features.validate();
}

FeatureExtractor Model::extractor() const {
  return FeatureExtractor(labels, features, dictionary, brown ? &*brown : nullptr);
}

std::vector<WordSpan> Model::predict(const Sentence& sentence) const {
  if (sentence.empty()) return {};
  const FeatureExtractor fx = extractor();
  const Lattice lattice = build_lattice(kind, sentence, labels, features.max_seg_len, &fx);
  return viterbi(lattice, weights).spans;
}

std::vector<std::vector<WordSpan>> Model::predict(const Dataset& dataset, int threads) const {
  const FeatureExtractor fx = extractor();
  const auto count = static_cast<long>(dataset.instances.size());
  std::vector<std::vector<WordSpan>> out(dataset.instances.size());
  std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(std::max(1, threads))
  for (long i = 0; i < count; ++i) {
    const Sentence& s = dataset.instances[i].sentence;
    if (s.empty()) continue;
    try {
      const Lattice lattice = build_lattice(kind, s, labels, features.max_seg_len, &fx);
      out[i] = viterbi(lattice, weights).spans;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

namespace {

class NegatedObjective final : public ceres::FirstOrderFunction {
 public:
  NegatedObjective(const Dataset& data, const FeatureExtractor& fx, const TrainConfig& config, bool& non_finite,
                   std::size_t& skipped)
      : data_(data), fx_(fx), config_(config), non_finite_(non_finite), skipped_(skipped) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const std::span<const double> w(parameters, fx_.dictionary().size());
    const ObjectiveResult r =
        objective_and_gradient(data_.instances, w, fx_, config_.kind, config_.lambda, config_.threads);
    skipped_ = r.skipped;
    bool finite = std::isfinite(r.value);
    for (double g : r.gradient) finite = finite && std::isfinite(g);
    if (!finite) {
      non_finite_ = true;
      return false;
    }
    *cost = -r.value;
    if (gradient) {
      for (std::size_t i = 0; i < r.gradient.size(); ++i) gradient[i] = -r.gradient[i];
    }
    return true;
  }

  int NumParameters() const override { return static_cast<int>(fx_.dictionary().size()); }

 private:
  const Dataset& data_;
  const FeatureExtractor& fx_;
  const TrainConfig& config_;
  bool& non_finite_;
  std::size_t& skipped_;
};

class IterationRecorder final : public ceres::IterationCallback {
 public:
  IterationRecorder(const IterationLogger& log, TrainingMetadata& meta) : log_(log), meta_(meta) {}

  ceres::CallbackReturnType operator()(const ceres::IterationSummary& s) override {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    if (s.iteration > 0) meta_.iteration_seconds.push_back(seconds);
    if (log_) log_({s.iteration, -s.cost, s.gradient_norm, seconds});
    return ceres::SOLVER_CONTINUE;
  }

 private:
  const IterationLogger& log_;
  TrainingMetadata& meta_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

Model train(const Dataset& train_set, const TrainConfig& config, const BrownClusterMap* brown,
            const IterationLogger& log) {
  config.validate();
  if (train_set.instances.empty()) throw std::invalid_argument("training set is empty");
  if (config.features.use_brown && !brown) throw std::invalid_argument("+b features need a Brown cluster map");

  Dataset data = train_set;
  Model model;
  model.kind = config.kind;
  model.features = config.features;
  model.lambda = config.lambda;
  if (brown && config.features.use_brown) model.brown = *brown;
  if (config.kind != ModelKind::Linear) {
    model.metadata.dropped_spans = drop_long_spans(data, config.features.max_seg_len);
  }
  model.labels = config.labels ? *config.labels : collect_labels(data);

  {
    FeatureExtractor builder(model.labels, model.features, model.dictionary, model.brown ? &*model.brown : nullptr);
    for (const auto& inst : data.instances) {
      if (!inst.sentence.empty()) {
        build_lattice(config.kind, inst.sentence, model.labels, model.features.max_seg_len, &builder);
      }
    }
  }
  model.dictionary.freeze();
  model.weights.assign(model.dictionary.size(), 0.0);
  if (model.weights.empty()) throw std::invalid_argument("training set produced no features");

  const FeatureExtractor fx = model.extractor();
  bool non_finite = false;
  std::size_t skipped = 0;
  ceres::GradientProblem problem(new NegatedObjective(data, fx, config, non_finite, skipped));

  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_lbfgs_rank = config.lbfgs_history;
  options.max_num_iterations = config.max_iterations;
  options.function_tolerance = config.tolerance;
  options.gradient_tolerance = 1e-10;
  options.parameter_tolerance = 1e-14;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;
  IterationRecorder recorder(log, model.metadata);
  options.callbacks.push_back(&recorder);

  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, model.weights.data(), &summary);
  if (non_finite && summary.iterations.size() <= 1) {
    throw NumericalError("objective is not finite at the starting point");
  }
  if (summary.termination_type == ceres::FAILURE) {
    if (non_finite) throw NumericalError("objective became non-finite: " + summary.message);
    throw NumericalError("L-BFGS failed: " + summary.message);
  }
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw NumericalError("non-finite weight after training");
  }
  model.metadata.iterations = summary.iterations.empty() ? 0 : static_cast<int>(summary.iterations.size()) - 1;
  model.metadata.final_objective = -summary.final_cost;
  model.metadata.skipped_instances = skipped;
  return model;
}

LambdaReport evaluate(const Model& model, const Dataset& dataset, int threads) {
  const auto predicted = model.predict(dataset, threads);
  LambdaReport r;
  r.lambda = model.lambda;
  r.char_level = EvalReport::from_counts(EvalLevel::Char, 0, 0, 0);
  r.word_level = EvalReport::from_counts(EvalLevel::Word, 0, 0, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const Instance& inst = dataset.instances[i];
    r.word_level += score_spans(inst.gold, predicted[i]);
    r.char_level += score_spans(inst.char_gold, word_spans_to_char_spans(inst.sentence, predicted[i]));
  }
  return r;
}

TuneResult tune_lambda(const Dataset& train_set, const Dataset& dev_set, const TrainConfig& config,
                       const std::vector<double>& grid, const BrownClusterMap* brown, const IterationLogger& log) {
  if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
  if (dev_set.instances.empty()) throw std::invalid_argument("development set is empty");
  TuneResult result;
  bool have_best = false;
  double best_f1 = -1.0;
  for (double lambda : grid) {
    TrainConfig c = config;
    c.lambda = lambda;
    Model m = train(train_set, c, brown, log);
    LambdaReport report = evaluate(m, dev_set, config.threads);
    result.reports.push_back(report);
    const double f1 = report.char_level.f1;
    if (!have_best || f1 > best_f1 || (f1 == best_f1 && lambda > result.best_lambda)) {
      have_best = true;
      best_f1 = f1;
      result.best_lambda = lambda;
      result.best_model = std::move(m);
    }
  }
  return result;
}

}  // namespace wsc
