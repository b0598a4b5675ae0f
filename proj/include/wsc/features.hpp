// Feature templates for the three chunkers and the feature-string dictionary.
//
// Every feature string is conjoined with the current tag (linear model) or
// the current segment label (segment models), e.g. "W[0]=Dr|B-NP".

#ifndef WSC_FEATURES_HPP
#define WSC_FEATURES_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wsc/core.hpp"

namespace wsc {

// Sentinel tag / label ids for the virtual positions before and after a sentence.
inline constexpr int kStartLabel = -1;
inline constexpr int kStopLabel = -2;

struct FeatureEntry {
  std::uint32_t index = 0;
  double value = 1.0;

  friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

// Sparse, sorted by index, indices unique.
using FeatureVector = std::vector<FeatureEntry>;

class FeatureDictionary {
 public:
  FeatureDictionary() = default;
  // Frozen dictionary with the given index order.
  static FeatureDictionary from_names(std::vector<std::string> names);

  std::optional<std::uint32_t> find(const std::string& name) const;
  // Inserts unseen names while unfrozen; after freeze() unseen names yield nullopt.
  std::optional<std::uint32_t> lookup(const std::string& name);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }
  const std::string& name(std::uint32_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
  bool frozen_ = false;
};

class BrownClusterMap {
 public:
  static inline const std::string kUnknown = "<UNK>";

  // Keeps the first cluster seen for a word.
  void insert(const std::string& word, const std::string& cluster);
  const std::string& lookup(const std::string& word) const;
  std::size_t size() const { return clusters_.size(); }
  bool empty() const { return clusters_.empty(); }
  // Entries sorted by word.
  std::vector<std::pair<std::string, std::string>> entries() const;

  friend bool operator==(const BrownClusterMap&, const BrownClusterMap&) = default;

 private:
  std::unordered_map<std::string, std::string> clusters_;
};

// `cluster<TAB>word[<TAB>count]` per line; blank lines are skipped.
BrownClusterMap load_brown_clusters(const std::filesystem::path& path);
BrownClusterMap parse_brown_clusters(std::istream& in, const std::string& source = "<stream>");

struct FeatureConfig {
  bool use_affix = false;  // +a
  bool use_brown = false;  // +b
  bool use_shape = false;  // +s
  int affix_max_len = 3;
  int max_seg_len = 6;  // L

  void validate() const;
  // "a,b,s" style flag list; "" or "base" for none.
  static FeatureConfig parse_flags(std::string_view flags, int max_seg_len = 6);
  std::string flags() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Upper -> X, lower -> x, digit -> d, anything else kept; runs of the same
// shape character longer than two collapse to two.
std::string word_shape(std::string_view surface);

// Per-token strings used by the templates, computed once per sentence.
struct PreparedToken {
  std::string word;
  std::string shape;
  std::string cluster;
  std::vector<std::string> prefixes;
  std::vector<std::string> suffixes;
};

class PreparedSentence {
 public:
  PreparedSentence(const Sentence& sentence, const FeatureConfig& config, const BrownClusterMap* brown);

  std::size_t size() const { return tokens_.size(); }
  const PreparedToken& operator[](std::size_t i) const { return tokens_[i]; }

 private:
  std::vector<PreparedToken> tokens_;
};

// Template expansion to feature strings, in emission order (may repeat).
// Position i ranges over 0..n; i == n is the transition into the leaf, with
// cur_tag == kStopLabel. prev_tag == kStartLabel at i == 0.
std::vector<std::string> linear_feature_strings(const Sentence& sentence, std::size_t i, int prev_tag,
                                                int cur_tag, const LabelSet& labels,
                                                const FeatureConfig& config,
                                                const BrownClusterMap* brown = nullptr);

// Segment covering tokens [first, last]. No transition feature is emitted
// when prev_label is nullopt. Throws std::invalid_argument when the segment
// length is not allowed for the label.
std::vector<std::string> segment_feature_strings(const Sentence& sentence, std::size_t first,
                                                 std::size_t last, int label, std::optional<int> prev_label,
                                                 const LabelSet& labels, const FeatureConfig& config,
                                                 const BrownClusterMap* brown = nullptr);

// Maps templates through a dictionary. Built over a mutable dictionary it
// inserts unseen features until the dictionary is frozen; over a const one it
// only looks up. Lookup-only extraction is safe to share across threads.
class FeatureExtractor {
 public:
  FeatureExtractor(LabelSet labels, FeatureConfig config, FeatureDictionary& dict,
                   const BrownClusterMap* brown = nullptr);
  FeatureExtractor(LabelSet labels, FeatureConfig config, const FeatureDictionary& dict,
                   const BrownClusterMap* brown = nullptr);

  const LabelSet& labels() const { return labels_; }
  const FeatureConfig& config() const { return config_; }
  const FeatureDictionary& dictionary() const { return *dict_; }
  const BrownClusterMap* brown() const { return brown_; }

  PreparedSentence prepare(const Sentence& sentence) const {
    return PreparedSentence(sentence, config_, brown_);
  }

  FeatureVector linear(const PreparedSentence& s, std::size_t i, int prev_tag, int cur_tag) const;
  FeatureVector segment(const PreparedSentence& s, std::size_t first, std::size_t last, int label,
                        std::optional<int> prev_label) const;
  // "TR=prev|cur"; either side may be a start/stop sentinel.
  FeatureVector transition(int prev_label, int cur_label) const;

 private:
  const std::string& label_name(int label) const;
  const std::string& tag_name(int tag) const;
  std::optional<std::uint32_t> index_of(const std::string& name) const {
    return mutable_dict_ ? mutable_dict_->lookup(name) : dict_->find(name);
  }

  LabelSet labels_;
  FeatureConfig config_;
  const FeatureDictionary* dict_;
  FeatureDictionary* mutable_dict_ = nullptr;
  const BrownClusterMap* brown_;
};

}  // namespace wsc

#endif  // WSC_FEATURES_HPP
