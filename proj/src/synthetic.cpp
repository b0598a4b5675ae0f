#include "wsc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wsc {

std::vector<std::string> synthetic_labels(int num_labels) {
  if (num_labels < 2) throw std::invalid_argument("need at least one chunk label");
  if (num_labels == 2) return {"NP"};
  std::vector<std::string> out;
  for (int i = 1; i < num_labels; ++i) out.push_back("L" + std::to_string(i));
  return out;
}

namespace {

// Appends a word to text, returning its code point span (ASCII only here).
CharSpan append_word(std::string& text, const std::string& word) {
  if (!text.empty()) text += ' ';
  const std::size_t start = text.size();
  text += word;
  return {start, text.size(), ""};
}

}  // namespace

std::vector<Message> synthetic_corpus(const SyntheticConfig& c) {
  if (c.min_tokens < 1 || c.max_tokens < c.min_tokens || c.max_chunk_tokens < 1 || c.vocabulary < 1) {
    throw std::invalid_argument("bad synthetic corpus configuration");
  }
  const auto labels = synthetic_labels(c.num_labels);
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<std::size_t> length(c.min_tokens, c.max_tokens);
  std::uniform_int_distribution<std::size_t> word(0, c.vocabulary - 1);
  std::uniform_int_distribution<int> chunk_len(1, c.max_chunk_tokens);
  std::uniform_int_distribution<std::size_t> label(0, labels.size() - 1);
  std::bernoulli_distribution open(c.chunk_rate);

  std::vector<Message> out;
  out.reserve(c.sentences);
  for (std::size_t s = 0; s < c.sentences; ++s) {
    Message m;
    const std::size_t n = length(rng);
    std::size_t t = 0;
    while (t < n) {
      if (open(rng)) {
        const std::size_t len = std::min<std::size_t>(chunk_len(rng), n - t);
        const std::string& lab = labels[label(rng)];
        CharSpan span;
        for (std::size_t k = 0; k < len; ++k) {
          const CharSpan w = append_word(m.text, "w" + std::to_string(word(rng)));
          if (k == 0) span.start = w.start;
          span.end = w.end;
        }
        span.label = lab;
        m.spans.push_back(span);
        t += len;
      } else {
        append_word(m.text, "w" + std::to_string(word(rng)));
        ++t;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Message> separable_corpus(std::size_t sentences, std::uint64_t seed) {
  static const std::array<const char*, 24> kFiller = {
      "ok",   "lol", "going", "later", "can",  "you",  "call", "me",  "now",   "so",   "haha", "yes",
      "will", "go",  "at",    "home",  "want", "meet", "but",  "not", "sorry", "then", "just", "come"};
  static const std::array<const char*, 24> kNouns = {
      "bus",   "dinner", "lecture", "phone", "movie", "canteen", "library", "exam",
      "class", "party",  "ticket",  "money", "lunch", "project", "hostel",  "book",
      "car",   "game",   "friend",  "shop",  "mall",  "report",  "room",    "tutorial"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> units(3, 8);
  std::uniform_int_distribution<int> np_len(1, 3);
  std::uniform_int_distribution<std::size_t> filler(0, kFiller.size() - 1);
  std::uniform_int_distribution<std::size_t> noun(0, kNouns.size() - 1);
  std::bernoulli_distribution is_np(0.4);

  std::vector<Message> out;
  out.reserve(sentences);
  for (std::size_t s = 0; s < sentences; ++s) {
    Message m;
    const int u = units(rng);
    for (int k = 0; k < u; ++k) {
      if (is_np(rng)) {
        append_word(m.text, "the");
        CharSpan span;
        const int len = np_len(rng);
        for (int j = 0; j < len; ++j) {
          const CharSpan w = append_word(m.text, kNouns[noun(rng)]);
          if (j == 0) span.start = w.start;
          span.end = w.end;
        }
        span.label = "NP";
        m.spans.push_back(span);
      } else {
        append_word(m.text, kFiller[filler(rng)]);
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::size_t inject_improper_spans(std::vector<Message>& messages, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("rate must be in [0, 1]");
  // (message, span) pairs whose span starts on a token of two or more
  // characters and covers more than one character.
  std::vector<std::pair<std::size_t, std::size_t>> eligible;
  for (std::size_t m = 0; m < messages.size(); ++m) {
    const Sentence s = tokenize(messages[m].text);
    for (std::size_t k = 0; k < messages[m].spans.size(); ++k) {
      const CharSpan& span = messages[m].spans[k];
      const auto it = std::find_if(s.tokens().begin(), s.tokens().end(),
                                   [&](const Token& t) { return t.start == span.start; });
      if (it != s.tokens().end() && it->end - it->start >= 2 && span.start + 1 < span.end) {
        eligible.emplace_back(m, k);
        break;
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  const auto target = static_cast<std::size_t>(std::llround(rate * static_cast<double>(messages.size())));
  const std::size_t count = std::min(target, eligible.size());
  for (std::size_t i = 0; i < count; ++i) {
    messages[eligible[i].first].spans[eligible[i].second].start += 1;
  }
  return count;
}

}  // namespace wsc
