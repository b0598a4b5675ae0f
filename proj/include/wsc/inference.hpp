// Exact log-space dynamic programs over a Lattice.

#ifndef WSC_INFERENCE_HPP
#define WSC_INFERENCE_HPP

#include <span>
#include <vector>

#include "wsc/lattice.hpp"

namespace wsc {

// Numerically stable log(sum(exp(values))); -inf for an empty range.
double log_sum_exp(std::span<const double> values);

// w . f(e)
double edge_score(const Lattice& lattice, const Edge& edge, std::span<const double> weights);
// Per-edge scores in edge order.
std::vector<double> edge_scores(const Lattice& lattice, std::span<const double> weights);

double path_score(const Lattice& lattice, std::span<const int> path, std::span<const double> weights);

// log of the sum over root-to-leaf paths of exp(path score).
double log_partition(const Lattice& lattice, std::span<const double> weights);

struct Marginals {
  std::vector<double> edge;  // posterior probability of each edge
  double log_z = 0.0;
};

Marginals edge_marginals(const Lattice& lattice, std::span<const double> weights);

struct Decoded {
  std::vector<int> path;  // edge ids, root to leaf
  Segmentation segmentation;
  std::vector<WordSpan> spans;
  double score = 0.0;
};

// Max-score path. On ties the predecessor that comes first in topological
// order wins, which yields all-O labelings when every score is equal.
Decoded viterbi(const Lattice& lattice, std::span<const double> weights);

// Edge count of the lattice for a synthetic n-token sentence with
// num_labels segment labels (O plus num_labels - 1 chunk labels).
std::size_t complexity_probe(ModelKind kind, std::size_t n, int max_seg_len, int num_labels);

}  // namespace wsc

#endif  // WSC_INFERENCE_HPP
