#include "wsc/features.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace wsc {

// ---------------------------------------------------------------------------
// Dictionary

FeatureDictionary FeatureDictionary::from_names(std::vector<std::string> names) {
  FeatureDictionary d;
  d.index_.reserve(names.size());
  for (std::uint32_t i = 0; i < names.size(); ++i) {
    if (!d.index_.emplace(names[i], i).second) {
      throw DataError("duplicate feature name '" + names[i] + "'");
    }
  }
  d.names_ = std::move(names);
  d.frozen_ = true;
  return d;
}

std::optional<std::uint32_t> FeatureDictionary::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> FeatureDictionary::lookup(const std::string& name) {
  if (auto found = find(name)) return found;
  if (frozen_) return std::nullopt;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

// ---------------------------------------------------------------------------
// Brown clusters

void BrownClusterMap::insert(const std::string& word, const std::string& cluster) {
  clusters_.emplace(word, cluster);
}

const std::string& BrownClusterMap::lookup(const std::string& word) const {
  auto it = clusters_.find(word);
  return it == clusters_.end() ? kUnknown : it->second;
}

std::vector<std::pair<std::string, std::string>> BrownClusterMap::entries() const {
  std::vector<std::pair<std::string, std::string>> out(clusters_.begin(), clusters_.end());
  std::sort(out.begin(), out.end());
  return out;
}

BrownClusterMap parse_brown_clusters(std::istream& in, const std::string& source) {
  BrownClusterMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == 0 || tab == std::string::npos) {
      throw DataError(source + ":" + std::to_string(lineno) + ": expected 'cluster<TAB>word[<TAB>count]'");
    }
    const auto tab2 = line.find('\t', tab + 1);
    std::string word = line.substr(tab + 1, tab2 == std::string::npos ? tab2 : tab2 - tab - 1);
    if (word.empty()) throw DataError(source + ":" + std::to_string(lineno) + ": empty word");
    map.insert(word, line.substr(0, tab));
  }
  return map;
}

BrownClusterMap load_brown_clusters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open Brown cluster file " + path.string());
  return parse_brown_clusters(in, path.string());
}

// ---------------------------------------------------------------------------
// Config

void FeatureConfig::validate() const {
  if (affix_max_len < 1) throw std::invalid_argument("affix_max_len must be >= 1");
  if (max_seg_len < 1) throw std::invalid_argument("max segment length must be >= 1");
}

FeatureConfig FeatureConfig::parse_flags(std::string_view flags, int max_seg_len) {
  FeatureConfig c;
  c.max_seg_len = max_seg_len;
  if (flags == "base") flags = "";
  std::size_t pos = 0;
  while (pos <= flags.size() && !flags.empty()) {
    auto comma = flags.find(',', pos);
    auto item = flags.substr(pos, comma == std::string_view::npos ? flags.npos : comma - pos);
    if (item == "a") c.use_affix = true;
    else if (item == "b") c.use_brown = true;
    else if (item == "s") c.use_shape = true;
    else if (!item.empty()) throw std::invalid_argument("unknown feature flag '" + std::string(item) + "'");
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  c.validate();
  return c;
}

std::string FeatureConfig::flags() const {
  std::string out;
  auto add = [&](bool on, const char* f) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += f;
  };
  add(use_affix, "a");
  add(use_brown, "b");
  add(use_shape, "s");
  return out.empty() ? "base" : out;
}

// ---------------------------------------------------------------------------
// Shapes and prepared tokens

std::string word_shape(std::string_view surface) {
  std::u32string out;
  for (char32_t c : utf8_decode(surface)) {
    char32_t s = c;
    if (c >= U'A' && c <= U'Z') s = U'X';
    else if (c >= U'a' && c <= U'z') s = U'x';
    else if (c >= U'0' && c <= U'9') s = U'd';
    const bool shape_char = s == U'X' || s == U'x' || s == U'd';
    if (shape_char && out.size() >= 2 && out[out.size() - 1] == s && out[out.size() - 2] == s) continue;
    out.push_back(s);
  }
  return utf8_encode(out);
}

PreparedSentence::PreparedSentence(const Sentence& sentence, const FeatureConfig& config,
                                   const BrownClusterMap* brown) {
  tokens_.reserve(sentence.size());
  for (const Token& t : sentence.tokens()) {
    PreparedToken p;
    p.word = t.surface;
    if (config.use_shape) p.shape = word_shape(t.surface);
    if (config.use_brown) p.cluster = brown ? brown->lookup(t.surface) : BrownClusterMap::kUnknown;
    if (config.use_affix) {
      const std::u32string cps = utf8_decode(t.surface);
      const std::size_t k = std::min<std::size_t>(cps.size(), config.affix_max_len);
      for (std::size_t len = 1; len <= k; ++len) {
        p.prefixes.push_back(utf8_encode(std::u32string_view(cps).substr(0, len)));
        p.suffixes.push_back(utf8_encode(std::u32string_view(cps).substr(cps.size() - len)));
      }
    }
    tokens_.push_back(std::move(p));
  }
}

// ---------------------------------------------------------------------------
// Templates

namespace {

const std::string kBos = "<BOS>";
const std::string kEos = "<EOS>";
const std::string kStartName = "<START>";
const std::string kStopName = "<STOP>";

const std::string& sentinel_or(int id, const std::string& name) {
  if (id == kStartLabel) return kStartName;
  if (id == kStopLabel) return kStopName;
  return name;
}

template <class Sink>
void emit_affixes(const PreparedToken& t, const std::string& suffix, Sink& sink) {
  for (std::size_t k = 0; k < t.prefixes.size(); ++k) {
    sink("P[" + std::to_string(k + 1) + "]=" + t.prefixes[k] + suffix);
    sink("X[" + std::to_string(k + 1) + "]=" + t.suffixes[k] + suffix);
  }
}

template <class Sink>
void emit_linear(const PreparedSentence& s, std::size_t i, const std::string& prev_tag,
                 const std::string& cur_tag, const FeatureConfig& config, Sink&& sink) {
  const std::string suffix = "|" + cur_tag;
  const PreparedToken* prev = i > 0 ? &s[i - 1] : nullptr;
  const PreparedToken* cur = i < s.size() ? &s[i] : nullptr;
  sink("W[-1]=" + (prev ? prev->word : kBos) + suffix);
  sink("W[0]=" + (cur ? cur->word : kEos) + suffix);
  sink("T=" + prev_tag + suffix);
  if (config.use_affix && cur) emit_affixes(*cur, suffix, sink);
  if (config.use_brown && cur) sink("B[0]=" + cur->cluster + suffix);
  if (config.use_shape) {
    sink("S[-1]=" + (prev ? prev->shape : kBos) + suffix);
    sink("S[0]=" + (cur ? cur->shape : kEos) + suffix);
  }
}

void check_segment(std::size_t n, std::size_t first, std::size_t last, int label, const LabelSet& labels,
                   const FeatureConfig& config) {
  if (first > last || last >= n) throw std::invalid_argument("segment outside sentence");
  if (label < 0 || label >= labels.num_segment_labels()) throw std::invalid_argument("bad segment label");
  const std::size_t len = last - first + 1;
  const std::size_t limit = label == LabelSet::kOutside ? 1 : static_cast<std::size_t>(config.max_seg_len);
  if (len > limit) {
    throw std::invalid_argument("segment length " + std::to_string(len) + " out of range for label " +
                                labels.segment_name(label));
  }
}

template <class Sink>
void emit_segment(const PreparedSentence& s, std::size_t first, std::size_t last,
                  const std::string& label, const std::string* prev_label, const FeatureConfig& config,
                  Sink&& sink) {
  const std::string suffix = "|" + label;
  const std::size_t len = last - first + 1;
  const std::size_t cap = std::min<std::size_t>(len, config.max_seg_len);
  for (std::size_t j = 0; j < cap; ++j) {
    const std::string idx = "[" + std::to_string(j) + "]=";
    const PreparedToken& fwd = s[first + j];
    const PreparedToken& bwd = s[last - j];
    sink("WS" + idx + fwd.word + suffix);
    sink("WE" + idx + bwd.word + suffix);
    if (config.use_brown) {
      sink("BS" + idx + fwd.cluster + suffix);
      sink("BE" + idx + bwd.cluster + suffix);
    }
    if (config.use_shape) {
      sink("SS" + idx + fwd.shape + suffix);
      sink("SE" + idx + bwd.shape + suffix);
    }
  }
  const PreparedToken* before = first > 0 ? &s[first - 1] : nullptr;
  const PreparedToken* after = last + 1 < s.size() ? &s[last + 1] : nullptr;
  sink("W[before]=" + (before ? before->word : kBos) + suffix);
  sink("W[after]=" + (after ? after->word : kEos) + suffix);
  if (config.use_shape) {
    sink("S[before]=" + (before ? before->shape : kBos) + suffix);
    sink("S[after]=" + (after ? after->shape : kEos) + suffix);
  }
  if (config.use_affix) {
    for (std::size_t t = first; t <= last; ++t) emit_affixes(s[t], suffix, sink);
  }
  if (prev_label) sink("TR=" + *prev_label + suffix);
}

// Sorts by index and sums duplicate entries.
void canonicalize(FeatureVector& v) {
  std::sort(v.begin(), v.end(), [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (out > 0 && v[out - 1].index == v[i].index) {
      v[out - 1].value += v[i].value;
    } else {
      v[out++] = v[i];
    }
  }
  v.resize(out);
}

}  // namespace

std::vector<std::string> linear_feature_strings(const Sentence& sentence, std::size_t i, int prev_tag,
                                                int cur_tag, const LabelSet& labels,
                                                const FeatureConfig& config, const BrownClusterMap* brown) {
  if (i > sentence.size()) throw std::invalid_argument("position outside sentence");
  const PreparedSentence prepared(sentence, config, brown);
  std::vector<std::string> out;
  const std::string& prev = sentinel_or(prev_tag, prev_tag >= 0 ? labels.tag_name(prev_tag) : kStartName);
  const std::string& cur = sentinel_or(cur_tag, cur_tag >= 0 ? labels.tag_name(cur_tag) : kStopName);
  emit_linear(prepared, i, prev, cur, config, [&](std::string f) { out.push_back(std::move(f)); });
  return out;
}

std::vector<std::string> segment_feature_strings(const Sentence& sentence, std::size_t first,
                                                 std::size_t last, int label, std::optional<int> prev_label,
                                                 const LabelSet& labels, const FeatureConfig& config,
                                                 const BrownClusterMap* brown) {
  check_segment(sentence.size(), first, last, label, labels, config);
  const PreparedSentence prepared(sentence, config, brown);
  std::vector<std::string> out;
  std::string prev_name;
  if (prev_label) {
    prev_name = *prev_label >= 0 ? labels.segment_name(*prev_label) : sentinel_or(*prev_label, kStartName);
  }
  emit_segment(prepared, first, last, labels.segment_name(label), prev_label ? &prev_name : nullptr, config,
               [&](std::string f) { out.push_back(std::move(f)); });
  return out;
}

// ---------------------------------------------------------------------------
// Extractor

FeatureExtractor::FeatureExtractor(LabelSet labels, FeatureConfig config, FeatureDictionary& dict,
                                   const BrownClusterMap* brown)
    : labels_(std::move(labels)), config_(config), dict_(&dict), mutable_dict_(&dict), brown_(brown) {
  config_.validate();
}

FeatureExtractor::FeatureExtractor(LabelSet labels, FeatureConfig config, const FeatureDictionary& dict,
                                   const BrownClusterMap* brown)
    : labels_(std::move(labels)), config_(config), dict_(&dict), brown_(brown) {
  config_.validate();
}

const std::string& FeatureExtractor::label_name(int label) const {
  return label >= 0 ? labels_.segment_name(label) : sentinel_or(label, kStartName);
}

const std::string& FeatureExtractor::tag_name(int tag) const {
  return tag >= 0 ? labels_.tag_name(tag) : sentinel_or(tag, kStartName);
}

FeatureVector FeatureExtractor::linear(const PreparedSentence& s, std::size_t i, int prev_tag,
                                       int cur_tag) const {
  FeatureVector v;
  emit_linear(s, i, tag_name(prev_tag), tag_name(cur_tag), config_, [&](const std::string& f) {
    if (auto id = index_of(f)) v.push_back({*id, 1.0});
  });
  canonicalize(v);
  return v;
}

FeatureVector FeatureExtractor::segment(const PreparedSentence& s, std::size_t first, std::size_t last,
                                        int label, std::optional<int> prev_label) const {
  check_segment(s.size(), first, last, label, labels_, config_);
  FeatureVector v;
  const std::string* prev = prev_label ? &label_name(*prev_label) : nullptr;
  emit_segment(s, first, last, labels_.segment_name(label), prev, config_, [&](const std::string& f) {
    if (auto id = index_of(f)) v.push_back({*id, 1.0});
  });
  canonicalize(v);
  return v;
}

FeatureVector FeatureExtractor::transition(int prev_label, int cur_label) const {
  FeatureVector v;
  if (auto id = index_of("TR=" + label_name(prev_label) + "|" + label_name(cur_label))) {
    v.push_back({*id, 1.0});
  }
  return v;
}

}  // namespace wsc
