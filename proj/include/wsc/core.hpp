// Text, span and label types shared by every model, plus tokenization and
// the (lossy) conversions between character spans, word spans and BIO tags.
//
// All character offsets count Unicode scalar values of the UTF-8 raw text,
// never bytes.

#ifndef WSC_CORE_HPP
#define WSC_CORE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wsc {

// Malformed input data (corpus files, cluster files, spans out of range).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf during optimization or inference.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Decodes UTF-8 into code points; throws DataError on invalid sequences.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);
std::string utf8_encode(char32_t cp);

struct Token {
  std::string surface;
  std::size_t start = 0;  // inclusive, code points
  std::size_t end = 0;    // exclusive
  bool is_anon = false;

  friend bool operator==(const Token&, const Token&) = default;
};

class Sentence {
 public:
  Sentence() = default;
  // Validates the token invariants against raw_text.
  Sentence(std::string raw_text, std::vector<Token> tokens);

  const std::string& raw_text() const { return raw_text_; }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }

  // Length of raw_text in code points.
  std::size_t char_length() const { return chars_.size(); }
  // raw_text sliced at [start, end) code points.
  std::string slice(std::size_t start, std::size_t end) const;
  const std::u32string& chars() const { return chars_; }

 private:
  std::string raw_text_;
  std::u32string chars_;
  std::vector<Token> tokens_;
};

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string label;

  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;
};

struct WordSpan {
  std::size_t first_token = 0;
  std::size_t last_token = 0;  // inclusive
  std::string label;

  friend auto operator<=>(const WordSpan&, const WordSpan&) = default;
};

// Chunk labels plus the reserved outside label O.
//
// Segment label ids: 0 is O, 1..k are the chunk labels in order.
// BIO tag ids: 0 is O, 2c+1 is B-label(c), 2c+2 is I-label(c) for chunk c.
class LabelSet {
 public:
  static constexpr int kOutside = 0;

  explicit LabelSet(std::vector<std::string> chunk_labels = {"NP"});

  const std::vector<std::string>& chunk_labels() const { return chunk_labels_; }
  std::size_t num_chunk_labels() const { return chunk_labels_.size(); }

  // |Y| = chunk labels + O.
  int num_segment_labels() const { return static_cast<int>(chunk_labels_.size()) + 1; }
  const std::string& segment_name(int label) const { return segment_names_.at(label); }
  // Segment id of a chunk label name, or -1.
  int segment_id(std::string_view name) const;

  int num_tags() const { return 2 * static_cast<int>(chunk_labels_.size()) + 1; }
  const std::string& tag_name(int tag) const { return tag_names_.at(tag); }
  static int begin_tag(int segment_label) { return 2 * segment_label - 1; }
  static int inside_tag(int segment_label) { return 2 * segment_label; }
  static bool is_inside(int tag) { return tag > 0 && tag % 2 == 0; }
  static bool is_begin(int tag) { return tag % 2 == 1; }
  // Segment label a tag belongs to (0 for O).
  static int tag_label(int tag) { return (tag + 1) / 2; }
  // BIO validity of the transition prev -> cur; prev < 0 means sentence start.
  static bool valid_transition(int prev, int cur);

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> chunk_labels_;
  std::vector<std::string> segment_names_;
  std::vector<std::string> tag_names_;
};

struct BioTag {
  enum class Kind { O, B, I };
  Kind kind = Kind::O;
  std::string label;  // empty for O

  std::string str() const;
  static BioTag parse(std::string_view s);
  friend bool operator==(const BioTag&, const BioTag&) = default;
};

class BioSequence {
 public:
  BioSequence() = default;
  // Throws std::invalid_argument when an I tag does not continue a chunk of
  // the same label.
  explicit BioSequence(std::vector<BioTag> tags);

  const std::vector<BioTag>& tags() const { return tags_; }
  std::size_t size() const { return tags_.size(); }
  std::vector<std::string> strings() const;

  friend bool operator==(const BioSequence&, const BioSequence&) = default;

 private:
  std::vector<BioTag> tags_;
};

// Anonymization placeholder `<[A-Z][A-Z0-9]*>` first, then maximal
// alphanumeric/underscore runs, then maximal runs of other non-whitespace.
Sentence tokenize(std::string_view raw_text);

// Snaps character spans to token boundaries. Endpoints inside a token extend
// outward; endpoints in whitespace move inward to the nearest token edge.
// Spans touching no token are dropped and overlapping results are merged.
std::vector<WordSpan> char_spans_to_word_spans(const Sentence& sentence,
                                               std::vector<CharSpan> spans);

std::vector<CharSpan> word_spans_to_char_spans(const Sentence& sentence,
                                               const std::vector<WordSpan>& spans);

BioSequence word_spans_to_bio(const Sentence& sentence, const std::vector<WordSpan>& spans);
std::vector<WordSpan> bio_to_word_spans(const BioSequence& bio);

// True when both endpoints of the span fall on token boundaries.
bool is_token_aligned(const Sentence& sentence, const CharSpan& span);

}  // namespace wsc

#endif  // WSC_CORE_HPP
