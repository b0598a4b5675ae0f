#include "wsc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wsc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double max = *std::max_element(values.begin(), values.end());
  if (max == kNegInf || !std::isfinite(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double edge_score(const Lattice& lattice, const Edge& edge, std::span<const double> weights) {
  double s = 0.0;
  for (const FeatureEntry& f : lattice.features(edge)) s += weights[f.index] * f.value;
  return s;
}

std::vector<double> edge_scores(const Lattice& lattice, std::span<const double> weights) {
  std::vector<double> out;
  out.reserve(lattice.edges().size());
  for (const Edge& e : lattice.edges()) {
    for (const FeatureEntry& f : lattice.features(e)) {
      if (f.index >= weights.size()) throw std::invalid_argument("weight vector shorter than feature index");
    }
    out.push_back(edge_score(lattice, e, weights));
  }
  return out;
}

double path_score(const Lattice& lattice, std::span<const int> path, std::span<const double> weights) {
  double s = 0.0;
  for (int e : path) s += edge_score(lattice, lattice.edges()[e], weights);
  return s;
}

namespace {

// alpha[v] = log sum over root->v paths.
std::vector<double> forward(const Lattice& lattice, const std::vector<double>& scores) {
  const int num_nodes = static_cast<int>(lattice.nodes().size());
  std::vector<double> alpha(num_nodes, kNegInf);
  alpha[lattice.root()] = 0.0;
  std::vector<double> terms;
  for (int v = 1; v < num_nodes; ++v) {
    terms.clear();
    for (int e : lattice.in_edges(v)) terms.push_back(alpha[lattice.edges()[e].from] + scores[e]);
    alpha[v] = log_sum_exp(terms);
  }
  return alpha;
}

// beta[v] = log sum over v->leaf paths.
std::vector<double> backward(const Lattice& lattice, const std::vector<double>& scores) {
  const int num_nodes = static_cast<int>(lattice.nodes().size());
  std::vector<double> beta(num_nodes, kNegInf);
  beta[lattice.leaf()] = 0.0;
  std::vector<double> terms;
  for (int v = num_nodes - 2; v >= 0; --v) {
    terms.clear();
    for (int e : lattice.out_edges(v)) terms.push_back(beta[lattice.edges()[e].to] + scores[e]);
    beta[v] = log_sum_exp(terms);
  }
  return beta;
}

}  // namespace

double log_partition(const Lattice& lattice, std::span<const double> weights) {
  const auto scores = edge_scores(lattice, weights);
  return forward(lattice, scores)[lattice.leaf()];
}

Marginals edge_marginals(const Lattice& lattice, std::span<const double> weights) {
  const auto scores = edge_scores(lattice, weights);
  const auto alpha = forward(lattice, scores);
  const auto beta = backward(lattice, scores);
  Marginals m;
  m.log_z = alpha[lattice.leaf()];
  m.edge.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const Edge& e = lattice.edges()[i];
    m.edge[i] = std::exp(alpha[e.from] + scores[i] + beta[e.to] - m.log_z);
  }
  return m;
}

Decoded viterbi(const Lattice& lattice, std::span<const double> weights) {
  const auto scores = edge_scores(lattice, weights);
  const int num_nodes = static_cast<int>(lattice.nodes().size());
  std::vector<double> best(num_nodes, kNegInf);
  std::vector<int> back(num_nodes, -1);
  best[lattice.root()] = 0.0;
  for (int v = 1; v < num_nodes; ++v) {
    // In-edges are sorted by source, so strict > keeps the earliest on ties.
    for (int e : lattice.in_edges(v)) {
      const double cand = best[lattice.edges()[e].from] + scores[e];
      if (back[v] < 0 || cand > best[v]) {
        best[v] = cand;
        back[v] = e;
      }
    }
  }
  Decoded d;
  d.score = best[lattice.leaf()];
  for (int v = lattice.leaf(); v != lattice.root();) {
    const int e = back[v];
    if (e < 0) throw std::logic_error("leaf unreachable in lattice");
    d.path.push_back(e);
    v = lattice.edges()[e].from;
  }
  std::reverse(d.path.begin(), d.path.end());
  d.segmentation = path_segmentation(lattice, d.path);
  d.spans = segmentation_to_spans(d.segmentation, lattice.labels());
  return d;
}

std::size_t complexity_probe(ModelKind kind, std::size_t n, int max_seg_len, int num_labels) {
  if (num_labels < 1) throw std::invalid_argument("num_labels must be >= 1");
  std::vector<std::string> chunk_labels;
  for (int i = 1; i < num_labels; ++i) chunk_labels.push_back("L" + std::to_string(i));
  std::string text;
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text += ' ';
    tokens.push_back({"w", text.size(), text.size() + 1, false});
    text += 'w';
  }
  const Sentence sentence(text, std::move(tokens));
  return build_lattice(kind, sentence, LabelSet(chunk_labels), max_seg_len, nullptr).edges().size();
}

}  // namespace wsc
