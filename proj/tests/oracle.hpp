// Brute-force reference for the lattice algorithms. Labelings are enumerated
// directly and scored from feature strings through a name -> weight map, so
// nothing here depends on lattice construction.

#ifndef WSC_TESTS_ORACLE_HPP
#define WSC_TESTS_ORACLE_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "wsc/features.hpp"
#include "wsc/inference.hpp"
#include "wsc/lattice.hpp"
#include "wsc/objective.hpp"

namespace oracle {

using wsc::LabelSet;
using wsc::ModelKind;
using wsc::Segment;
using wsc::Segmentation;

struct Labeling {
  Segmentation segmentation;
  double score = 0.0;
};

using WeightMap = std::unordered_map<std::string, double>;

inline WeightMap weight_map(const wsc::FeatureDictionary& dict, const std::vector<double>& w) {
  WeightMap m;
  for (std::uint32_t i = 0; i < dict.size(); ++i) m[dict.name(i)] = w[i];
  return m;
}

inline double sum_strings(const std::vector<std::string>& names, const WeightMap& w) {
  double s = 0.0;
  for (const auto& n : names) {
    if (auto it = w.find(n); it != w.end()) s += it->second;
  }
  return s;
}

inline std::string transition_name(const LabelSet& labels, int prev, int cur) {
  auto name = [&](int y) -> std::string {
    if (y == wsc::kStartLabel) return "<START>";
    if (y == wsc::kStopLabel) return "<STOP>";
    return labels.segment_name(y);
  };
  return "TR=" + name(prev) + "|" + name(cur);
}

// Every BIO tag sequence with valid transitions, as segmentations.
inline void enumerate_tags(std::size_t n, const LabelSet& labels, std::vector<int>& tags,
                           const std::function<void(const std::vector<int>&)>& visit) {
  if (tags.size() == n) {
    visit(tags);
    return;
  }
  const int prev = tags.empty() ? wsc::kStartLabel : tags.back();
  for (int t = 0; t < labels.num_tags(); ++t) {
    if (!LabelSet::valid_transition(prev, t)) continue;
    tags.push_back(t);
    enumerate_tags(n, labels, tags, visit);
    tags.pop_back();
  }
}

inline Segmentation tags_to_segmentation(const std::vector<int>& tags) {
  Segmentation seg;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int t = tags[i];
    if (LabelSet::is_inside(t)) {
      seg.back().last = i;
    } else {
      seg.push_back({i, i, LabelSet::tag_label(t)});
    }
  }
  return seg;
}

// Every segmentation with O segments of length 1 and chunks of length <= L.
inline void enumerate_segments(std::size_t n, int num_labels, int max_len, Segmentation& seg,
                               const std::function<void(const Segmentation&)>& visit) {
  const std::size_t pos = seg.empty() ? 0 : seg.back().last + 1;
  if (pos == n) {
    visit(seg);
    return;
  }
  for (int y = 0; y < num_labels; ++y) {
    const std::size_t limit = y == 0 ? 1 : static_cast<std::size_t>(max_len);
    for (std::size_t len = 1; len <= limit && pos + len <= n; ++len) {
      seg.push_back({pos, pos + len - 1, y});
      enumerate_segments(n, num_labels, max_len, seg, visit);
      seg.pop_back();
    }
  }
}

// All labelings of the sentence under the given model with their scores.
inline std::vector<Labeling> enumerate(ModelKind kind, const wsc::Sentence& s, const LabelSet& labels,
                                       const wsc::FeatureConfig& config, const WeightMap& w,
                                       const wsc::BrownClusterMap* brown = nullptr) {
  std::vector<Labeling> out;
  const std::size_t n = s.size();
  if (kind == ModelKind::Linear) {
    std::vector<int> tags;
    enumerate_tags(n, labels, tags, [&](const std::vector<int>& t) {
      double score = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        const int prev = i == 0 ? wsc::kStartLabel : t[i - 1];
        const int cur = i == n ? wsc::kStopLabel : t[i];
        score += sum_strings(wsc::linear_feature_strings(s, i, prev, cur, labels, config, brown), w);
      }
      out.push_back({tags_to_segmentation(t), score});
    });
    return out;
  }
  Segmentation seg;
  enumerate_segments(n, labels.num_segment_labels(), config.max_seg_len, seg, [&](const Segmentation& g) {
    double score = 0.0;
    int prev = wsc::kStartLabel;
    for (const Segment& x : g) {
      score += sum_strings(wsc::segment_feature_strings(s, x.first, x.last, x.label, std::nullopt, labels, config,
                                                        brown),
                           w);
      if (auto it = w.find(transition_name(labels, prev, x.label)); it != w.end()) score += it->second;
      prev = x.label;
    }
    if (auto it = w.find(transition_name(labels, prev, wsc::kStopLabel)); it != w.end()) score += it->second;
    out.push_back({g, score});
  });
  return out;
}

inline double log_z(const std::vector<Labeling>& all) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : all) m = std::max(m, l.score);
  double s = 0.0;
  for (const auto& l : all) s += std::exp(l.score - m);
  return m + std::log(s);
}

// Small random problem: sentence over a tiny vocabulary, label set, weights.
struct Problem {
  wsc::Sentence sentence;
  LabelSet labels;
  wsc::FeatureConfig config;
  wsc::FeatureDictionary dict;
  std::vector<double> weights;
  std::vector<wsc::WordSpan> gold;
};

inline wsc::Sentence random_sentence(std::mt19937_64& rng, std::size_t n) {
  static const char* kWords[] = {"Dr", "teh", "says", "u", "go", "lt25", "ok", "BUS"};
  std::uniform_int_distribution<int> pick(0, 7);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text += ' ';
    text += kWords[pick(rng)];
  }
  return wsc::tokenize(text);
}

inline std::vector<wsc::WordSpan> random_spans(std::mt19937_64& rng, std::size_t n, const LabelSet& labels,
                                               int max_len) {
  std::vector<wsc::WordSpan> spans;
  std::bernoulli_distribution open(0.4);
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> lab(0, static_cast<int>(labels.num_chunk_labels()) - 1);
  std::size_t i = 0;
  while (i < n) {
    if (labels.num_chunk_labels() > 0 && open(rng)) {
      const std::size_t l = std::min<std::size_t>(len(rng), n - i);
      spans.push_back({i, i + l - 1, labels.chunk_labels()[lab(rng)]});
      i += l;
    } else {
      ++i;
    }
  }
  return spans;
}

// n in [1, max_n], |Y| in [2, max_labels], L in [1, max_len]; the dictionary
// holds every feature of the model's lattice.
inline Problem random_problem(std::mt19937_64& rng, ModelKind kind, std::size_t max_n = 5, int max_labels = 3,
                              int max_len = 3, double weight_range = 2.0, bool features = true) {
  std::uniform_int_distribution<std::size_t> n_dist(1, max_n);
  std::uniform_int_distribution<int> y_dist(2, max_labels);
  std::uniform_int_distribution<int> l_dist(1, max_len);
  std::bernoulli_distribution flag(0.5);
  Problem p;
  p.sentence = random_sentence(rng, n_dist(rng));
  std::vector<std::string> chunk;
  const int num_labels = y_dist(rng);
  for (int y = 1; y < num_labels; ++y) chunk.push_back(y == 1 ? "NP" : "C" + std::to_string(y));
  p.labels = LabelSet(chunk);
  p.config.max_seg_len = l_dist(rng);
  if (features) {
    p.config.use_affix = flag(rng);
    p.config.use_shape = flag(rng);
  }
  {
    wsc::FeatureExtractor fx(p.labels, p.config, p.dict);
    wsc::build_lattice(kind, p.sentence, p.labels, p.config.max_seg_len, &fx);
  }
  p.dict.freeze();
  std::uniform_real_distribution<double> wd(-weight_range, weight_range);
  p.weights.resize(p.dict.size());
  for (auto& x : p.weights) x = wd(rng);
  p.gold = random_spans(rng, p.sentence.size(), p.labels, p.config.max_seg_len);
  return p;
}

}  // namespace oracle

#endif  // WSC_TESTS_ORACLE_HPP
