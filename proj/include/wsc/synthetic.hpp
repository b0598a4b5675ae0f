// Generated corpora for benchmarks and learning checks. All generators are
// deterministic given their seed.

#ifndef WSC_SYNTHETIC_HPP
#define WSC_SYNTHETIC_HPP

#include <cstdint>
#include <vector>

#include "wsc/corpus_io.hpp"

namespace wsc {

struct SyntheticConfig {
  std::size_t sentences = 100;
  std::size_t min_tokens = 8;
  std::size_t max_tokens = 25;
  int num_labels = 2;  // segment labels including O; chunk labels are NP or L1..Lk
  int max_chunk_tokens = 4;
  double chunk_rate = 0.3;  // probability of opening a chunk at a free token
  std::size_t vocabulary = 500;
  std::uint64_t seed = 1;
};

// Random words with random token-aligned chunks.
std::vector<Message> synthetic_corpus(const SyntheticConfig& config);

// Chunk label names used by synthetic_corpus for num_labels.
std::vector<std::string> synthetic_labels(int num_labels);

// Noun phrases drawn from a closed noun vocabulary, always introduced by the
// word "the"; everything else is filler. Linearly separable for every model.
std::vector<Message> separable_corpus(std::size_t sentences, std::uint64_t seed);

// Moves the start of one span into the middle of its first token (an
// "improper" span) in round(rate * messages.size()) randomly chosen messages,
// or in every eligible message if fewer qualify. A message is eligible when
// one of its spans starts on a token of two or more characters. Returns how
// many messages were changed.
std::size_t inject_improper_spans(std::vector<Message>& messages, double rate, std::uint64_t seed);

}  // namespace wsc

#endif  // WSC_SYNTHETIC_HPP
