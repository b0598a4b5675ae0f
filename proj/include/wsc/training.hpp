// L-BFGS training of the three chunkers, lambda selection, and model files.

#ifndef WSC_TRAINING_HPP
#define WSC_TRAINING_HPP

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsc/eval.hpp"
#include "wsc/features.hpp"
#include "wsc/lattice.hpp"
#include "wsc/objective.hpp"

namespace wsc {

// Default lambda grid.
inline const std::vector<double> kLambdaGrid = {0.125, 0.25, 0.5, 1.0, 2.0};

struct TrainConfig {
  ModelKind kind = ModelKind::Weak;
  double lambda = 1.0;
  int max_iterations = 500;
  double tolerance = 1e-6;  // relative objective change; infinity stops after one step
  int lbfgs_history = 10;
  FeatureConfig features;   // features.max_seg_len is L
  int threads = 1;
  std::optional<LabelSet> labels;  // derived from the training data when absent

  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double seconds = 0.0;
};

struct TrainingMetadata {
  int iterations = 0;
  double final_objective = 0.0;
  std::size_t dropped_spans = 0;      // gold chunks longer than L
  std::size_t skipped_instances = 0;  // gold labeling not representable
  std::vector<double> iteration_seconds;  // wall clock; not serialized
};

class Model {
 public:
  ModelKind kind = ModelKind::Weak;
  LabelSet labels;
  FeatureConfig features;
  double lambda = 0.0;
  FeatureDictionary dictionary;
  std::vector<double> weights;
  std::optional<BrownClusterMap> brown;
  TrainingMetadata metadata;

  FeatureExtractor extractor() const;
  std::vector<WordSpan> predict(const Sentence& sentence) const;
  std::vector<std::vector<WordSpan>> predict(const Dataset& dataset, int threads = 1) const;
};

using IterationLogger = std::function<void(const IterationRecord&)>;

// Runs L-BFGS from w = 0. Throws NumericalError if the objective becomes
// non-finite and std::invalid_argument on an empty training set.
Model train(const Dataset& train_set, const TrainConfig& config, const BrownClusterMap* brown = nullptr,
            const IterationLogger& log = {});

struct LambdaReport {
  double lambda = 0.0;
  EvalReport char_level;
  EvalReport word_level;
};

struct TuneResult {
  double best_lambda = 0.0;
  std::vector<LambdaReport> reports;  // in grid order
  Model best_model;
};

// Trains one model per grid value and keeps the one with the best
// character-level dev F1; ties go to the larger lambda.
TuneResult tune_lambda(const Dataset& train_set, const Dataset& dev_set, const TrainConfig& config,
                       const std::vector<double>& grid = kLambdaGrid, const BrownClusterMap* brown = nullptr,
                       const IterationLogger& log = {});

// Character- and word-level scores of a model on a dataset.
LambdaReport evaluate(const Model& model, const Dataset& dataset, int threads = 1);

// Versioned binary model file.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const Model& model, std::ostream& out);
void save_model(const Model& model, const std::filesystem::path& path);
// Throws DataError on bad magic, version mismatch or a corrupt file.
Model load_model(std::istream& in);
Model load_model(const std::filesystem::path& path);

// Human-readable dump: config, labels, and every feature with its weight.
nlohmann::json model_to_json(const Model& model);

}  // namespace wsc

#endif  // WSC_TRAINING_HPP
