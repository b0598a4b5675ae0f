#include <doctest.h>

#include <random>

#include "wsc/core.hpp"

using namespace wsc;

namespace {

std::vector<std::string> surfaces(const Sentence& s) {
  std::vector<std::string> out;
  for (const auto& t : s.tokens()) out.push_back(t.surface);
  return out;
}

}  // namespace

TEST_CASE("utf8 round trip and validation") {
  const std::string text = "caf\xC3\xA9 \xF0\x9F\x98\x80 ok";
  const auto cps = utf8_decode(text);
  CHECK(cps.size() == 9);
  CHECK(utf8_encode(cps) == text);
  CHECK_THROWS_AS(utf8_decode("\xC3"), DataError);
  CHECK_THROWS_AS(utf8_decode("\xFF"), DataError);
}

TEST_CASE("tokenize whitespace-separated words") {
  const Sentence s = tokenize("Dr teh says");
  REQUIRE(s.size() == 3);
  CHECK(surfaces(s) == std::vector<std::string>{"Dr", "teh", "says"});
  CHECK(s[0].start == 0);
  CHECK(s[0].end == 2);
  CHECK(s[1].start == 3);
  CHECK(s[1].end == 6);
  CHECK(s[2].start == 7);
  CHECK(s[2].end == 11);
}

TEST_CASE("tokenize splits punctuation runs from word runs") {
  CHECK(surfaces(tokenize("butshe's")) == std::vector<std::string>{"butshe", "'", "s"});
  CHECK(surfaces(tokenize("ok!! go")) == std::vector<std::string>{"ok", "!!", "go"});
}

TEST_CASE("tokenize keeps anonymization placeholders whole") {
  const Sentence s = tokenize("call <DECIMAL> now");
  REQUIRE(s.size() == 3);
  CHECK(s[1].surface == "<DECIMAL>");
  CHECK(s[1].is_anon);
  CHECK_FALSE(s[0].is_anon);
  // Lowercase brackets are not placeholders.
  CHECK(surfaces(tokenize("<abc>")) == std::vector<std::string>{"<", "abc", ">"});
}

TEST_CASE("tokenize counts offsets in code points") {
  const Sentence s = tokenize("caf\xC3\xA9 ok");
  REQUIRE(s.size() == 2);
  CHECK(s[0].surface == "caf\xC3\xA9");
  CHECK(s[0].end == 4);
  CHECK(s[1].start == 5);
  CHECK(s.slice(5, 7) == "ok");
  CHECK(s.char_length() == 7);
}

TEST_CASE("empty and whitespace-only input") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t ").empty());
}

TEST_CASE("sentence validates token invariants") {
  CHECK_THROWS(Sentence("ab", {{"ab", 0, 3, false}}));
  CHECK_THROWS(Sentence("ab cd", {{"cd", 3, 5, false}, {"ab", 0, 2, false}}));
  CHECK_THROWS(Sentence("ab", {{"xx", 0, 2, false}}));
}

TEST_CASE("label set ids") {
  const LabelSet labels({"NP", "VP"});
  CHECK(labels.num_segment_labels() == 3);
  CHECK(labels.num_tags() == 5);
  CHECK(labels.tag_name(LabelSet::begin_tag(1)) == "B-NP");
  CHECK(labels.tag_name(LabelSet::inside_tag(2)) == "I-VP");
  CHECK(LabelSet::tag_label(LabelSet::inside_tag(2)) == 2);
  CHECK(labels.segment_id("VP") == 2);
  CHECK(labels.segment_id("XX") == -1);
  CHECK(LabelSet::valid_transition(-1, 1));
  CHECK_FALSE(LabelSet::valid_transition(-1, 2));
  CHECK_FALSE(LabelSet::valid_transition(0, 2));
  CHECK(LabelSet::valid_transition(1, 2));
  CHECK_FALSE(LabelSet::valid_transition(1, 4));
  CHECK_THROWS_AS(LabelSet({"NP", "NP"}), std::invalid_argument);
  CHECK_THROWS_AS(LabelSet({"O"}), std::invalid_argument);
}

TEST_CASE("bio sequence validation") {
  CHECK(BioTag::parse("B-NP") == BioTag{BioTag::Kind::B, "NP"});
  CHECK(BioTag::parse("O").str() == "O");
  CHECK_THROWS(BioTag::parse("X-NP"));
  CHECK_THROWS_AS(BioSequence({BioTag::parse("I-NP")}), std::invalid_argument);
  CHECK_THROWS_AS(BioSequence({BioTag::parse("O"), BioTag::parse("I-NP")}), std::invalid_argument);
  CHECK_THROWS_AS(BioSequence({BioTag::parse("B-VP"), BioTag::parse("I-NP")}), std::invalid_argument);
  CHECK_NOTHROW(BioSequence({BioTag::parse("B-NP"), BioTag::parse("I-NP")}));
}

TEST_CASE("char spans snap to token boundaries") {
  const Sentence s = tokenize("Dr teh says ok");
  SUBCASE("aligned span") {
    const auto w = char_spans_to_word_spans(s, {{3, 11, "NP"}});
    CHECK(w == std::vector<WordSpan>{{1, 2, "NP"}});
  }
  SUBCASE("inside a token extends outward") {
    CHECK(char_spans_to_word_spans(s, {{4, 5, "NP"}}) == std::vector<WordSpan>{{1, 1, "NP"}});
  }
  SUBCASE("whitespace endpoints move inward") {
    CHECK(char_spans_to_word_spans(s, {{2, 7, "NP"}}) == std::vector<WordSpan>{{1, 1, "NP"}});
  }
  SUBCASE("whitespace-only span is dropped") {
    CHECK(char_spans_to_word_spans(s, {{2, 3, "NP"}}).empty());
  }
  SUBCASE("overlapping results merge") {
    CHECK(char_spans_to_word_spans(s, {{0, 4, "NP"}, {5, 8, "NP"}}) == std::vector<WordSpan>{{0, 2, "NP"}});
  }
  SUBCASE("out of range") {
    CHECK_THROWS_AS(char_spans_to_word_spans(s, {{0, 99, "NP"}}), DataError);
    CHECK_THROWS_AS(char_spans_to_word_spans(s, {{5, 4, "NP"}}), DataError);
  }
}

TEST_CASE("improper span inside a run-together token") {
  const Sentence s = tokenize("butshe's");
  // "she" is characters [3, 6) inside the token "butshe".
  CHECK(char_spans_to_word_spans(s, {{3, 6, "NP"}}) == std::vector<WordSpan>{{0, 0, "NP"}});
  CHECK_FALSE(is_token_aligned(s, {3, 6, "NP"}));
  CHECK(is_token_aligned(s, {0, 6, "NP"}));
}

TEST_CASE("word spans to bio and back") {
  const Sentence s = tokenize("Dr teh says");
  CHECK(word_spans_to_bio(s, {}).strings() == std::vector<std::string>{"O", "O", "O"});
  CHECK(word_spans_to_bio(s, {{0, 1, "NP"}}).strings() == std::vector<std::string>{"B-NP", "I-NP", "O"});
  CHECK(word_spans_to_bio(s, {{0, 0, "NP"}, {1, 1, "NP"}}).strings() ==
        std::vector<std::string>{"B-NP", "B-NP", "O"});
  CHECK(bio_to_word_spans(word_spans_to_bio(s, {{0, 1, "NP"}})) == std::vector<WordSpan>{{0, 1, "NP"}});
  CHECK_THROWS_AS(word_spans_to_bio(s, {{0, 1, "NP"}, {1, 2, "NP"}}), std::invalid_argument);
  CHECK(word_spans_to_char_spans(tokenize("Dr teh"), {{0, 0, "NP"}}) == std::vector<CharSpan>{{0, 2, "NP"}});
}

TEST_CASE("property: spans to bio to spans is the identity") {
  std::mt19937_64 rng(7);
  const Sentence s = tokenize("a b c d e f g h i j");
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<WordSpan> spans;
    std::size_t i = 0;
    while (i < s.size()) {
      if (rng() % 3 == 0) {
        const std::size_t len = 1 + rng() % 3;
        const std::size_t last = std::min(s.size() - 1, i + len - 1);
        spans.push_back({i, last, rng() % 2 ? "NP" : "VP"});
        i = last + 1;
      } else {
        ++i;
      }
    }
    CHECK(bio_to_word_spans(word_spans_to_bio(s, spans)) == spans);
  }
}

TEST_CASE("property: char-word-char snapping is a projection") {
  std::mt19937_64 rng(11);
  const Sentence s = tokenize("butshe's gonna call <NAME> at lt25 ok?? sure");
  const std::size_t len = s.char_length();
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t a = rng() % (len + 1), b = rng() % (len + 1);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const auto once = word_spans_to_char_spans(s, char_spans_to_word_spans(s, {{a, b, "NP"}}));
    const auto twice = word_spans_to_char_spans(s, char_spans_to_word_spans(s, once));
    CHECK(once == twice);
    for (const auto& c : once) CHECK(is_token_aligned(s, c));
  }
}

TEST_CASE("property: aligned spans survive the round trip exactly") {
  const Sentence s = tokenize("Dr teh says u go lt25");
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i; j < s.size(); ++j) {
      const CharSpan c{s[i].start, s[j].end, "NP"};
      CHECK(word_spans_to_char_spans(s, char_spans_to_word_spans(s, {c})) == std::vector<CharSpan>{c});
    }
  }
}
