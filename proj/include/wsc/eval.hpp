// Exact-match span scoring at character and word level, the gold conversion
// upper bound, and a paired message-level bootstrap.

#ifndef WSC_EVAL_HPP
#define WSC_EVAL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wsc/core.hpp"
#include "wsc/objective.hpp"

namespace wsc {

enum class EvalLevel { Char, Word };

std::string_view to_string(EvalLevel level);

struct EvalReport {
  EvalLevel level = EvalLevel::Char;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  // P = tp/(tp+fp), R = tp/(tp+fn), F = harmonic mean; 0 on empty denominators.
  static EvalReport from_counts(EvalLevel level, std::size_t tp, std::size_t fp, std::size_t fn);
  EvalReport& operator+=(const EvalReport& other);
};

void to_json(nlohmann::json& j, const EvalReport& r);

// A span counts as correct only when both boundaries and the label match.
// Throws std::invalid_argument if either list contains overlapping spans.
EvalReport score_spans(const std::vector<CharSpan>& gold, const std::vector<CharSpan>& predicted);
EvalReport score_spans(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& predicted);

// Micro-averaged over messages.
EvalReport score_corpus(const std::vector<std::vector<CharSpan>>& gold,
                        const std::vector<std::vector<CharSpan>>& predicted);
EvalReport score_corpus(const std::vector<std::vector<WordSpan>>& gold,
                        const std::vector<std::vector<WordSpan>>& predicted);

struct GoldBound {
  EvalReport char_level;
  EvalReport word_level;
};

// Scores the snapped gold (char -> word -> char) against the original
// character annotation: the best any word-based model can do.
GoldBound gold_upper_bound(const Dataset& dataset);

struct BootstrapResult {
  double observed_delta = 0.0;  // F1(A) - F1(B) on the full sample
  double mean_delta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool significant = false;  // interval excludes zero
  std::size_t resamples = 0;
};

// Paired bootstrap over messages of the F1 difference between systems A and B.
BootstrapResult bootstrap_interval(const std::vector<std::vector<CharSpan>>& gold,
                                   const std::vector<std::vector<CharSpan>>& predicted_a,
                                   const std::vector<std::vector<CharSpan>>& predicted_b,
                                   std::size_t resamples = 10000, double confidence = 0.95,
                                   std::uint64_t seed = 1);

// "name    P      R      F    |   P      R      F" in percent, char then word.
std::string format_table_header();
std::string format_table_row(std::string_view name, const EvalReport& char_level, const EvalReport& word_level);

}  // namespace wsc

#endif  // WSC_EVAL_HPP
