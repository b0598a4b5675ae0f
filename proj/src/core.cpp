#include "wsc/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace wsc {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      cp = lead & 0x1F;
      extra = 1;
    } else if ((lead & 0xF0) == 0xE0) {
      cp = lead & 0x0F;
      extra = 2;
    } else if ((lead & 0xF8) == 0xF0) {
      cp = lead & 0x07;
      extra = 3;
    } else {
      throw DataError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + extra >= text.size() && extra > 0) {
      throw DataError("truncated UTF-8 sequence at offset " + std::to_string(i));
    }
    for (int k = 1; k <= extra; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        throw DataError("invalid UTF-8 continuation byte at offset " + std::to_string(i + k));
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) out += utf8_encode(cp);
  return out;
}

// ---------------------------------------------------------------------------
// Sentence

Sentence::Sentence(std::string raw_text, std::vector<Token> tokens)
    : raw_text_(std::move(raw_text)), chars_(utf8_decode(raw_text_)), tokens_(std::move(tokens)) {
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token& t = tokens_[i];
    if (t.start >= t.end) throw std::invalid_argument("empty token at index " + std::to_string(i));
    if (t.end > chars_.size()) throw std::invalid_argument("token outside raw text");
    if (i > 0 && t.start < prev_end) throw std::invalid_argument("overlapping tokens");
    if (utf8_encode(std::u32string_view(chars_).substr(t.start, t.end - t.start)) != t.surface) {
      throw std::invalid_argument("token surface does not match raw text: " + t.surface);
    }
    prev_end = t.end;
  }
}

std::string Sentence::slice(std::size_t start, std::size_t end) const {
  return utf8_encode(std::u32string_view(chars_).substr(start, end - start));
}

// ---------------------------------------------------------------------------
// Labels

LabelSet::LabelSet(std::vector<std::string> chunk_labels) : chunk_labels_(std::move(chunk_labels)) {
  segment_names_.push_back("O");
  tag_names_.push_back("O");
  for (std::size_t i = 0; i < chunk_labels_.size(); ++i) {
    const auto& name = chunk_labels_[i];
    if (name.empty() || name == "O") throw std::invalid_argument("invalid chunk label '" + name + "'");
    if (std::find(chunk_labels_.begin(), chunk_labels_.begin() + i, name) != chunk_labels_.begin() + i) {
      throw std::invalid_argument("duplicate chunk label '" + name + "'");
    }
    segment_names_.push_back(name);
    tag_names_.push_back("B-" + name);
    tag_names_.push_back("I-" + name);
  }
}

int LabelSet::segment_id(std::string_view name) const {
  for (std::size_t i = 0; i < chunk_labels_.size(); ++i) {
    if (chunk_labels_[i] == name) return static_cast<int>(i) + 1;
  }
  return -1;
}

bool LabelSet::valid_transition(int prev, int cur) {
  if (!is_inside(cur)) return true;
  if (prev <= 0) return false;
  return tag_label(prev) == tag_label(cur);
}

std::string BioTag::str() const {
  switch (kind) {
    case Kind::O: return "O";
    case Kind::B: return "B-" + label;
    case Kind::I: return "I-" + label;
  }
  return "O";
}

BioTag BioTag::parse(std::string_view s) {
  if (s == "O") return {};
  if (s.size() > 2 && s[1] == '-' && (s[0] == 'B' || s[0] == 'I')) {
    return {s[0] == 'B' ? Kind::B : Kind::I, std::string(s.substr(2))};
  }
  throw std::invalid_argument("not a BIO tag: " + std::string(s));
}

BioSequence::BioSequence(std::vector<BioTag> tags) : tags_(std::move(tags)) {
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    const BioTag& t = tags_[i];
    if (t.kind == BioTag::Kind::O) {
      if (!t.label.empty()) throw std::invalid_argument("O tag with a label");
      continue;
    }
    if (t.label.empty()) throw std::invalid_argument("chunk tag without a label");
    if (t.kind == BioTag::Kind::I &&
        (i == 0 || tags_[i - 1].kind == BioTag::Kind::O || tags_[i - 1].label != t.label)) {
      throw std::invalid_argument("I-" + t.label + " at position " + std::to_string(i) +
                                  " does not continue a chunk");
    }
  }
}

std::vector<std::string> BioSequence::strings() const {
  std::vector<std::string> out;
  out.reserve(tags_.size());
  for (const auto& t : tags_) out.push_back(t.str());
  return out;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

bool is_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

// Non-ASCII code points count as word characters except for the Latin-1
// punctuation/symbol range, general punctuation, arrows/symbols and emoji.
bool is_word(char32_t c) {
  if (c < 0x80) {
    return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') ||
           c == U'_';
  }
  if (is_space(c)) return false;
  if (c >= 0xA1 && c <= 0xBF && c != 0xAA && c != 0xB2 && c != 0xB3 && c != 0xB5 && c != 0xB9 &&
      c != 0xBA && c != 0xBC && c != 0xBD && c != 0xBE) {
    return false;
  }
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2010 && c <= 0x2BFF) return false;
  if (c >= 0x3001 && c <= 0x303F) return false;
  if (c >= 0xFF01 && c <= 0xFF0F) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;
  return true;
}

bool is_anon_char(char32_t c) { return (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9'); }

// Length of an anonymization placeholder starting at i, or 0.
std::size_t match_anon(const std::u32string& s, std::size_t i) {
  if (s[i] != U'<' || i + 2 >= s.size() || !(s[i + 1] >= U'A' && s[i + 1] <= U'Z')) return 0;
  std::size_t j = i + 2;
  while (j < s.size() && is_anon_char(s[j])) ++j;
  if (j < s.size() && s[j] == U'>') return j + 1 - i;
  return 0;
}

}  // namespace

Sentence tokenize(std::string_view raw_text) {
  const std::u32string chars = utf8_decode(raw_text);
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < chars.size()) {
    if (is_space(chars[i])) {
      ++i;
      continue;
    }
    std::size_t len = match_anon(chars, i);
    bool anon = len > 0;
    if (!anon) {
      const bool word = is_word(chars[i]);
      std::size_t j = i + 1;
      while (j < chars.size() && !is_space(chars[j]) && is_word(chars[j]) == word) ++j;
      len = j - i;
    }
    tokens.push_back({utf8_encode(std::u32string_view(chars).substr(i, len)), i, i + len, anon});
    i += len;
  }
  return Sentence(std::string(raw_text), std::move(tokens));
}

// ---------------------------------------------------------------------------
// Conversions

namespace {

void check_span_bounds(const Sentence& sentence, const CharSpan& span) {
  if (span.start >= span.end || span.end > sentence.char_length()) {
    throw DataError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                    ") outside text of length " + std::to_string(sentence.char_length()));
  }
}

}  // namespace

std::vector<WordSpan> char_spans_to_word_spans(const Sentence& sentence, std::vector<CharSpan> spans) {
  for (const auto& s : spans) check_span_bounds(sentence, s);
  std::stable_sort(spans.begin(), spans.end(),
                   [](const CharSpan& a, const CharSpan& b) { return a.start < b.start; });
  const auto& toks = sentence.tokens();
  std::vector<WordSpan> out;
  for (const auto& span : spans) {
    // First token whose end lies after span.start: it either contains start
    // (extend outward) or begins after it (start was in whitespace).
    auto first = std::partition_point(toks.begin(), toks.end(),
                                      [&](const Token& t) { return t.end <= span.start; });
    // Last token whose start lies before span.end.
    auto past_last = std::partition_point(toks.begin(), toks.end(),
                                          [&](const Token& t) { return t.start < span.end; });
    if (first == toks.end() || past_last == toks.begin() || first >= past_last) continue;
    WordSpan ws{static_cast<std::size_t>(first - toks.begin()),
                static_cast<std::size_t>(past_last - toks.begin()) - 1, span.label};
    if (!out.empty() && ws.first_token <= out.back().last_token) {
      out.back().last_token = std::max(out.back().last_token, ws.last_token);
    } else {
      out.push_back(std::move(ws));
    }
  }
  return out;
}

std::vector<CharSpan> word_spans_to_char_spans(const Sentence& sentence,
                                               const std::vector<WordSpan>& spans) {
  std::vector<CharSpan> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    if (s.first_token > s.last_token || s.last_token >= sentence.size()) {
      throw std::invalid_argument("word span outside sentence");
    }
    out.push_back({sentence[s.first_token].start, sentence[s.last_token].end, s.label});
  }
  return out;
}

BioSequence word_spans_to_bio(const Sentence& sentence, const std::vector<WordSpan>& spans) {
  std::vector<BioTag> tags(sentence.size());
  std::vector<bool> used(sentence.size(), false);
  for (const auto& s : spans) {
    if (s.first_token > s.last_token || s.last_token >= sentence.size()) {
      throw std::invalid_argument("word span outside sentence");
    }
    for (std::size_t i = s.first_token; i <= s.last_token; ++i) {
      if (used[i]) throw std::invalid_argument("overlapping word spans at token " + std::to_string(i));
      used[i] = true;
      tags[i] = {i == s.first_token ? BioTag::Kind::B : BioTag::Kind::I, s.label};
    }
  }
  return BioSequence(std::move(tags));
}

std::vector<WordSpan> bio_to_word_spans(const BioSequence& bio) {
  std::vector<WordSpan> out;
  const auto& tags = bio.tags();
  for (std::size_t i = 0; i < tags.size(); ++i) {
    switch (tags[i].kind) {
      case BioTag::Kind::B: out.push_back({i, i, tags[i].label}); break;
      case BioTag::Kind::I: out.back().last_token = i; break;
      case BioTag::Kind::O: break;
    }
  }
  return out;
}

bool is_token_aligned(const Sentence& sentence, const CharSpan& span) {
  bool start_ok = false;
  bool end_ok = false;
  for (const auto& t : sentence.tokens()) {
    start_ok = start_ok || t.start == span.start;
    end_ok = end_ok || t.end == span.end;
  }
  return start_ok && end_ok;
}

}  // namespace wsc
