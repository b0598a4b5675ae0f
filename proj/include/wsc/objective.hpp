// Regularized conditional log-likelihood and its gradient.
//
//   value    = sum_i [ score(gold_i) - log Z(x_i) ] - lambda * |w|^2
//   gradient = sum_i [ f(gold_i) - E[f | x_i] ]   - 2 * lambda * w
//
// Both are returned for maximization. Two kernels compute the same
// quantities: a serial reference, and an OpenMP version that evaluates
// instances in parallel and then replays their contributions in instance
// order, so its result is bit-identical to the serial one for any thread count.

#ifndef WSC_OBJECTIVE_HPP
#define WSC_OBJECTIVE_HPP

#include <span>
#include <vector>

#include "wsc/corpus_io.hpp"
#include "wsc/lattice.hpp"

namespace wsc {

struct Instance {
  Sentence sentence;
  std::vector<WordSpan> gold;
  std::vector<CharSpan> char_gold;  // original annotation, before snapping
};

enum class Split { Train, Dev, Test };

struct Dataset {
  std::vector<Instance> instances;
  Split split = Split::Train;
};

Instance make_instance(const Message& message);
Dataset make_dataset(const std::vector<Message>& messages, Split split = Split::Train);

// Chunk labels seen in the gold spans, sorted.
LabelSet collect_labels(const Dataset& dataset);

// Turns chunk spans longer than max_seg_len into O tokens. Returns how many
// spans were dropped.
std::size_t drop_long_spans(Dataset& dataset, int max_seg_len);

struct ObjectiveResult {
  double value = 0.0;
  std::vector<double> gradient;
  std::size_t skipped = 0;  // instances whose gold labeling the lattice cannot represent
};

// The extractor's dictionary must be frozen; weights.size() must equal its size.
ObjectiveResult objective_and_gradient_serial(std::span<const Instance> instances, std::span<const double> weights,
                                              const FeatureExtractor& features, ModelKind kind, double lambda);

ObjectiveResult objective_and_gradient(std::span<const Instance> instances, std::span<const double> weights,
                                       const FeatureExtractor& features, ModelKind kind, double lambda,
                                       int threads = 1);

}  // namespace wsc

#endif  // WSC_OBJECTIVE_HPP
