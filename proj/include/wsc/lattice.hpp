// Per-sentence label lattices. Every root-to-leaf path is one legal labeling:
//
//   linear  Tag(i, t) nodes over BIO tags, edges between adjacent positions.
//   semi    Label(i, y) nodes ("a segment labeled y ends at token i"); an
//           edge from Label(j-1, y') to Label(i, y) is the segment j..i.
//   weak    Begin(j, y) / End(i, y) nodes. Segment edges Begin(j, y) ->
//           End(i, y) keep the label; transition edges End(i-1, y') ->
//           Begin(i, y) switch it.
//
// Nodes are stored in topological order (Root first, Leaf last). In-edges of
// each node are contiguous and sorted by source node.

#ifndef WSC_LATTICE_HPP
#define WSC_LATTICE_HPP

#include <cstdint>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsc/core.hpp"
#include "wsc/features.hpp"

namespace wsc {

enum class ModelKind { Linear, Semi, Weak };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class NodeKind { Root, Leaf, Tag, Label, Begin, End };

struct Node {
  NodeKind kind = NodeKind::Root;
  int position = -1;  // token index; -1 for Root, n for Leaf
  int label = -1;     // tag id for Tag nodes, segment label otherwise
};

enum class EdgeClass { Transition, Segment };

struct Edge {
  int from = 0;
  int to = 0;
  EdgeClass edge_class = EdgeClass::Transition;
  std::uint32_t feat_begin = 0;
  std::uint32_t feat_end = 0;
};

// A labeled token range [first, last]; O segments always have length 1.
struct Segment {
  std::size_t first = 0;
  std::size_t last = 0;
  int label = 0;

  friend auto operator<=>(const Segment&, const Segment&) = default;
};

using Segmentation = std::vector<Segment>;

class Lattice {
 public:
  ModelKind kind() const { return kind_; }
  const Sentence& sentence() const { return *sentence_; }
  const LabelSet& labels() const { return labels_; }
  int max_seg_len() const { return max_seg_len_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int root() const { return 0; }
  int leaf() const { return static_cast<int>(nodes_.size()) - 1; }

  std::span<const FeatureEntry> features(const Edge& e) const {
    return std::span<const FeatureEntry>(feats_).subspan(e.feat_begin, e.feat_end - e.feat_begin);
  }
  // Edge indices; in-edges come sorted by source node.
  auto in_edges(int node) const { return std::views::iota(in_offsets_[node], in_offsets_[node + 1]); }
  std::span<const int> out_edges(int node) const {
    return std::span<const int>(out_order_).subspan(out_offsets_[node], out_offsets_[node + 1] - out_offsets_[node]);
  }

  // Node id for (kind, position, label), or -1.
  int node_index(NodeKind kind, int position, int label) const;
  std::optional<int> find_edge(int from, int to) const;

  std::string node_name(int node) const;
  // One "from -> to [class]" line per edge.
  std::string debug_edges() const;

 private:
  friend class LatticeBuilder;

  ModelKind kind_ = ModelKind::Linear;
  const Sentence* sentence_ = nullptr;
  LabelSet labels_;
  int max_seg_len_ = 1;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<FeatureEntry> feats_;
  std::vector<int> node_lookup_;  // (position, slot) -> node id
  int slots_ = 0;
  std::vector<int> in_offsets_;
  std::vector<int> out_offsets_;
  std::vector<int> out_order_;
};

// `features` may be null, giving a featureless lattice (edge counting).
// The sentence must outlive the lattice. Throws std::invalid_argument on an
// empty sentence.
Lattice build_linear(const Sentence& sentence, const LabelSet& labels, const FeatureExtractor* features);
Lattice build_semi(const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                   const FeatureExtractor* features);
Lattice build_weak(const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                   const FeatureExtractor* features);
Lattice build_lattice(ModelKind kind, const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                      const FeatureExtractor* features);

// Labeling denoted by a root-to-leaf edge path.
Segmentation path_segmentation(const Lattice& lattice, std::span<const int> path);

// Fills the gaps between spans with O singletons. Throws std::invalid_argument
// on overlapping spans or labels outside the set.
Segmentation spans_to_segmentation(std::size_t n, const std::vector<WordSpan>& spans, const LabelSet& labels);
std::vector<WordSpan> segmentation_to_spans(const Segmentation& segmentation, const LabelSet& labels);

// Edge path realizing a segmentation, or nullopt when the lattice cannot
// represent it (e.g. a chunk longer than L).
std::optional<std::vector<int>> find_path(const Lattice& lattice, const Segmentation& segmentation);

}  // namespace wsc

#endif  // WSC_LATTICE_HPP
