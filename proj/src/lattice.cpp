#include "wsc/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wsc {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Semi: return "semi";
    case ModelKind::Weak: return "weak";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "semi") return ModelKind::Semi;
  if (name == "weak") return ModelKind::Weak;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

// Collects nodes in topological order and edges grouped by target node.
// Callers add a node, then all of its in-edges, before the next node.
class LatticeBuilder {
 public:
  LatticeBuilder(ModelKind kind, const Sentence& sentence, const LabelSet& labels, int max_seg_len, int slots,
                 const FeatureExtractor* fx)
      : fx_(fx) {
    if (sentence.empty()) throw std::invalid_argument("cannot build a lattice for an empty sentence");
    if (max_seg_len < 1) throw std::invalid_argument("max segment length must be >= 1");
    if (fx && !(fx->labels() == labels)) throw std::invalid_argument("extractor label set mismatch");
    lat_.kind_ = kind;
    lat_.sentence_ = &sentence;
    lat_.labels_ = labels;
    lat_.max_seg_len_ = max_seg_len;
    lat_.slots_ = slots;
    lat_.node_lookup_.assign(sentence.size() * slots, -1);
    if (fx) prepared_.emplace(fx->prepare(sentence));
    add_node({NodeKind::Root, -1, -1}, -1);
  }

  const FeatureExtractor* fx() const { return fx_; }
  const PreparedSentence& prepared() const { return *prepared_; }

  int add_node(Node node, int slot) {
    const int id = static_cast<int>(lat_.nodes_.size());
    lat_.nodes_.push_back(node);
    lat_.in_offsets_.push_back(static_cast<int>(lat_.edges_.size()));
    if (slot >= 0) lat_.node_lookup_[node.position * lat_.slots_ + slot] = id;
    return id;
  }

  int node(int position, int slot) const { return lat_.node_lookup_[position * lat_.slots_ + slot]; }

  // Adds an edge into the most recently added node.
  void add_edge(int from, EdgeClass cls, const FeatureVector& feats) {
    const auto begin = static_cast<std::uint32_t>(lat_.feats_.size());
    lat_.feats_.insert(lat_.feats_.end(), feats.begin(), feats.end());
    lat_.edges_.push_back({from, static_cast<int>(lat_.nodes_.size()) - 1, cls, begin,
                           static_cast<std::uint32_t>(lat_.feats_.size())});
  }

  // Segment features plus one transition feature, keeping index order.
  static void merge_into(FeatureVector& out, const FeatureVector& seg, const FeatureVector& tr) {
    out.clear();
    std::merge(seg.begin(), seg.end(), tr.begin(), tr.end(), std::back_inserter(out),
               [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
  }

  // Call after the leaf and its in-edges were added.
  Lattice finish() {
    Lattice& lat = lat_;
    lat.in_offsets_.push_back(static_cast<int>(lat.edges_.size()));
    const int num_nodes = static_cast<int>(lat.nodes_.size());
    lat.out_offsets_.assign(num_nodes + 1, 0);
    for (const Edge& e : lat.edges_) ++lat.out_offsets_[e.from + 1];
    for (int i = 0; i < num_nodes; ++i) lat.out_offsets_[i + 1] += lat.out_offsets_[i];
    lat.out_order_.assign(lat.edges_.size(), 0);
    std::vector<int> fill(lat.out_offsets_.begin(), lat.out_offsets_.end() - 1);
    for (int id = 0; id < static_cast<int>(lat.edges_.size()); ++id) {
      lat.out_order_[fill[lat.edges_[id].from]++] = id;
    }
    return std::move(lat);
  }

 private:
  Lattice lat_;
  const FeatureExtractor* fx_;
  std::optional<PreparedSentence> prepared_;
};

namespace {

const FeatureVector kNoFeatures;

}  // namespace

Lattice build_linear(const Sentence& sentence, const LabelSet& labels, const FeatureExtractor* fx) {
  const int n = static_cast<int>(sentence.size());
  const int tags = labels.num_tags();
  LatticeBuilder b(ModelKind::Linear, sentence, labels, 1, tags, fx);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < tags; ++t) {
      if (i == 0 && LabelSet::is_inside(t)) continue;
      b.add_node({NodeKind::Tag, i, t}, t);
      if (i == 0) {
        b.add_edge(0, EdgeClass::Transition, fx ? fx->linear(b.prepared(), 0, kStartLabel, t) : kNoFeatures);
        continue;
      }
      for (int p = 0; p < tags; ++p) {
        const int from = b.node(i - 1, p);
        if (from < 0 || !LabelSet::valid_transition(p, t)) continue;
        b.add_edge(from, EdgeClass::Transition, fx ? fx->linear(b.prepared(), i, p, t) : kNoFeatures);
      }
    }
  }
  b.add_node({NodeKind::Leaf, n, -1}, -1);
  for (int p = 0; p < tags; ++p) {
    const int from = b.node(n - 1, p);
    if (from < 0) continue;
    b.add_edge(from, EdgeClass::Transition, fx ? fx->linear(b.prepared(), n, p, kStopLabel) : kNoFeatures);
  }
  return b.finish();
}

Lattice build_semi(const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                   const FeatureExtractor* fx) {
  const int n = static_cast<int>(sentence.size());
  const int num_labels = labels.num_segment_labels();
  LatticeBuilder b(ModelKind::Semi, sentence, labels, max_seg_len, num_labels, fx);
  FeatureVector seg;
  FeatureVector merged;
  for (int i = 0; i < n; ++i) {
    for (int y = 0; y < num_labels; ++y) {
      b.add_node({NodeKind::Label, i, y}, y);
      const int limit = y == LabelSet::kOutside ? 1 : max_seg_len;
      // Longest segment first: sources in ascending topological order.
      for (int k = std::min(limit, i + 1); k >= 1; --k) {
        const int start = i - k + 1;
        if (fx) seg = fx->segment(b.prepared(), start, i, y, std::nullopt);
        if (start == 0) {
          if (fx) LatticeBuilder::merge_into(merged, seg, fx->transition(kStartLabel, y));
          b.add_edge(0, EdgeClass::Segment, fx ? merged : kNoFeatures);
          continue;
        }
        for (int p = 0; p < num_labels; ++p) {
          if (fx) LatticeBuilder::merge_into(merged, seg, fx->transition(p, y));
          b.add_edge(b.node(start - 1, p), EdgeClass::Segment, fx ? merged : kNoFeatures);
        }
      }
    }
  }
  b.add_node({NodeKind::Leaf, n, -1}, -1);
  for (int p = 0; p < num_labels; ++p) {
    b.add_edge(b.node(n - 1, p), EdgeClass::Transition, fx ? fx->transition(p, kStopLabel) : kNoFeatures);
  }
  return b.finish();
}

Lattice build_weak(const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                   const FeatureExtractor* fx) {
  const int n = static_cast<int>(sentence.size());
  const int num_labels = labels.num_segment_labels();
  LatticeBuilder b(ModelKind::Weak, sentence, labels, max_seg_len, 2 * num_labels, fx);
  for (int i = 0; i < n; ++i) {
    for (int y = 0; y < num_labels; ++y) {
      b.add_node({NodeKind::Begin, i, y}, y);
      if (i == 0) {
        b.add_edge(0, EdgeClass::Transition, fx ? fx->transition(kStartLabel, y) : kNoFeatures);
        continue;
      }
      for (int p = 0; p < num_labels; ++p) {
        b.add_edge(b.node(i - 1, num_labels + p), EdgeClass::Transition,
                   fx ? fx->transition(p, y) : kNoFeatures);
      }
    }
    for (int y = 0; y < num_labels; ++y) {
      b.add_node({NodeKind::End, i, y}, num_labels + y);
      const int limit = y == LabelSet::kOutside ? 1 : max_seg_len;
      for (int k = std::min(limit, i + 1); k >= 1; --k) {
        const int start = i - k + 1;
        b.add_edge(b.node(start, y), EdgeClass::Segment,
                   fx ? fx->segment(b.prepared(), start, i, y, std::nullopt) : kNoFeatures);
      }
    }
  }
  b.add_node({NodeKind::Leaf, n, -1}, -1);
  for (int p = 0; p < num_labels; ++p) {
    b.add_edge(b.node(n - 1, num_labels + p), EdgeClass::Transition,
               fx ? fx->transition(p, kStopLabel) : kNoFeatures);
  }
  return b.finish();
}

Lattice build_lattice(ModelKind kind, const Sentence& sentence, const LabelSet& labels, int max_seg_len,
                      const FeatureExtractor* fx) {
  switch (kind) {
    case ModelKind::Linear: return build_linear(sentence, labels, fx);
    case ModelKind::Semi: return build_semi(sentence, labels, max_seg_len, fx);
    case ModelKind::Weak: return build_weak(sentence, labels, max_seg_len, fx);
  }
  throw std::invalid_argument("unknown model kind");
}

// ---------------------------------------------------------------------------
// Queries

int Lattice::node_index(NodeKind kind, int position, int label) const {
  if (kind == NodeKind::Root) return root();
  if (kind == NodeKind::Leaf) return leaf();
  if (position < 0 || position >= static_cast<int>(sentence_->size()) || label < 0) return -1;
  int slot = -1;
  switch (kind_) {
    case ModelKind::Linear:
      if (kind == NodeKind::Tag && label < labels_.num_tags()) slot = label;
      break;
    case ModelKind::Semi:
      if (kind == NodeKind::Label && label < labels_.num_segment_labels()) slot = label;
      break;
    case ModelKind::Weak:
      if (label >= labels_.num_segment_labels()) break;
      if (kind == NodeKind::Begin) slot = label;
      if (kind == NodeKind::End) slot = labels_.num_segment_labels() + label;
      break;
  }
  return slot < 0 ? -1 : node_lookup_[position * slots_ + slot];
}

std::optional<int> Lattice::find_edge(int from, int to) const {
  if (from < 0 || to < 0) return std::nullopt;
  for (int e : in_edges(to)) {
    if (edges_[e].from == from) return e;
  }
  return std::nullopt;
}

std::string Lattice::node_name(int node) const {
  const Node& nd = nodes_.at(node);
  switch (nd.kind) {
    case NodeKind::Root: return "Root";
    case NodeKind::Leaf: return "Leaf";
    case NodeKind::Tag: return "Tag(" + std::to_string(nd.position) + "," + labels_.tag_name(nd.label) + ")";
    case NodeKind::Label:
      return "Label(" + std::to_string(nd.position) + "," + labels_.segment_name(nd.label) + ")";
    case NodeKind::Begin:
      return "Begin(" + std::to_string(nd.position) + "," + labels_.segment_name(nd.label) + ")";
    case NodeKind::End: return "End(" + std::to_string(nd.position) + "," + labels_.segment_name(nd.label) + ")";
  }
  return "?";
}

std::string Lattice::debug_edges() const {
  std::ostringstream out;
  for (const Edge& e : edges_) {
    out << node_name(e.from) << " -> " << node_name(e.to) << " ["
        << (e.edge_class == EdgeClass::Segment ? "segment" : "transition") << "]\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Paths and segmentations

Segmentation spans_to_segmentation(std::size_t n, const std::vector<WordSpan>& spans, const LabelSet& labels) {
  std::vector<WordSpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end());
  Segmentation out;
  std::size_t next = 0;
  for (const auto& s : sorted) {
    if (s.first_token > s.last_token || s.last_token >= n) throw std::invalid_argument("span outside sentence");
    if (s.first_token < next) throw std::invalid_argument("overlapping spans");
    const int label = labels.segment_id(s.label);
    if (label < 0) throw std::invalid_argument("unknown chunk label '" + s.label + "'");
    for (; next < s.first_token; ++next) out.push_back({next, next, LabelSet::kOutside});
    out.push_back({s.first_token, s.last_token, label});
    next = s.last_token + 1;
  }
  for (; next < n; ++next) out.push_back({next, next, LabelSet::kOutside});
  return out;
}

std::vector<WordSpan> segmentation_to_spans(const Segmentation& segmentation, const LabelSet& labels) {
  std::vector<WordSpan> out;
  for (const auto& s : segmentation) {
    if (s.label != LabelSet::kOutside) out.push_back({s.first, s.last, labels.segment_name(s.label)});
  }
  return out;
}

Segmentation path_segmentation(const Lattice& lattice, std::span<const int> path) {
  Segmentation out;
  const auto& nodes = lattice.nodes();
  for (int id : path) {
    const Edge& e = lattice.edges()[id];
    const Node& to = nodes[e.to];
    switch (lattice.kind()) {
      case ModelKind::Linear: {
        if (to.kind != NodeKind::Tag) break;
        const auto pos = static_cast<std::size_t>(to.position);
        const int label = LabelSet::tag_label(to.label);
        if (LabelSet::is_inside(to.label)) {
          out.back().last = pos;
        } else {
          out.push_back({pos, pos, label});
        }
        break;
      }
      case ModelKind::Semi:
        if (to.kind == NodeKind::Label) {
          const auto first = static_cast<std::size_t>(nodes[e.from].position + 1);
          out.push_back({first, static_cast<std::size_t>(to.position), to.label});
        }
        break;
      case ModelKind::Weak:
        if (e.edge_class == EdgeClass::Segment) {
          out.push_back({static_cast<std::size_t>(nodes[e.from].position),
                         static_cast<std::size_t>(to.position), to.label});
        }
        break;
    }
  }
  return out;
}

std::optional<std::vector<int>> find_path(const Lattice& lattice, const Segmentation& segmentation) {
  std::vector<int> node_path{lattice.root()};
  for (const auto& s : segmentation) {
    const int first = static_cast<int>(s.first);
    const int last = static_cast<int>(s.last);
    switch (lattice.kind()) {
      case ModelKind::Linear:
        if (s.label == LabelSet::kOutside) {
          for (int i = first; i <= last; ++i) node_path.push_back(lattice.node_index(NodeKind::Tag, i, 0));
        } else {
          node_path.push_back(lattice.node_index(NodeKind::Tag, first, LabelSet::begin_tag(s.label)));
          for (int i = first + 1; i <= last; ++i) {
            node_path.push_back(lattice.node_index(NodeKind::Tag, i, LabelSet::inside_tag(s.label)));
          }
        }
        break;
      case ModelKind::Semi:
        node_path.push_back(lattice.node_index(NodeKind::Label, last, s.label));
        break;
      case ModelKind::Weak:
        node_path.push_back(lattice.node_index(NodeKind::Begin, first, s.label));
        node_path.push_back(lattice.node_index(NodeKind::End, last, s.label));
        break;
    }
  }
  node_path.push_back(lattice.leaf());
  std::vector<int> edges;
  edges.reserve(node_path.size() - 1);
  for (std::size_t i = 1; i < node_path.size(); ++i) {
    auto e = lattice.find_edge(node_path[i - 1], node_path[i]);
    if (!e) return std::nullopt;
    edges.push_back(*e);
  }
  // Reject paths that skip tokens or mislabel them.
  if (path_segmentation(lattice, edges) != segmentation) return std::nullopt;
  return edges;
}

}  // namespace wsc
