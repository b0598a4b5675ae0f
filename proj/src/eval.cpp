#include "wsc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <tuple>

namespace wsc {

std::string_view to_string(EvalLevel level) { return level == EvalLevel::Char ? "char" : "word"; }

EvalReport EvalReport::from_counts(EvalLevel level, std::size_t tp, std::size_t fp, std::size_t fn) {
  EvalReport r;
  r.level = level;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

EvalReport& EvalReport::operator+=(const EvalReport& other) {
  *this = from_counts(level, tp + other.tp, fp + other.fp, fn + other.fn);
  return *this;
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"level", to_string(r.level)}, {"precision", r.precision}, {"recall", r.recall},
                     {"f1", r.f1},  {"tp", r.tp}, {"fp", r.fp}, {"fn", r.fn}};
}

namespace {

auto key(const CharSpan& s) { return std::tie(s.start, s.end, s.label); }
auto key(const WordSpan& s) { return std::tie(s.first_token, s.last_token, s.label); }
std::size_t lo(const CharSpan& s) { return s.start; }
std::size_t hi(const CharSpan& s) { return s.end; }  // exclusive
std::size_t lo(const WordSpan& s) { return s.first_token; }
std::size_t hi(const WordSpan& s) { return s.last_token + 1; }

template <class Span>
std::vector<Span> sorted_checked(const std::vector<Span>& spans, const char* what) {
  std::vector<Span> out = spans;
  std::sort(out.begin(), out.end(), [](const Span& a, const Span& b) { return key(a) < key(b); });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (lo(out[i]) < hi(out[i - 1])) throw std::invalid_argument(std::string("overlapping ") + what + " spans");
  }
  return out;
}

template <class Span>
EvalReport score_impl(const std::vector<Span>& gold, const std::vector<Span>& predicted, EvalLevel level) {
  const auto g = sorted_checked(gold, "gold");
  const auto p = sorted_checked(predicted, "predicted");
  std::size_t tp = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < g.size() && j < p.size()) {
    if (key(g[i]) == key(p[j])) {
      ++tp;
      ++i;
      ++j;
    } else if (key(g[i]) < key(p[j])) {
      ++i;
    } else {
      ++j;
    }
  }
  return EvalReport::from_counts(level, tp, p.size() - tp, g.size() - tp);
}

template <class Span>
EvalReport corpus_impl(const std::vector<std::vector<Span>>& gold, const std::vector<std::vector<Span>>& predicted,
                       EvalLevel level) {
  if (gold.size() != predicted.size()) throw std::invalid_argument("gold and predicted message counts differ");
  EvalReport total = EvalReport::from_counts(level, 0, 0, 0);
  for (std::size_t m = 0; m < gold.size(); ++m) total += score_impl(gold[m], predicted[m], level);
  return total;
}

}  // namespace

EvalReport score_spans(const std::vector<CharSpan>& gold, const std::vector<CharSpan>& predicted) {
  return score_impl(gold, predicted, EvalLevel::Char);
}

EvalReport score_spans(const std::vector<WordSpan>& gold, const std::vector<WordSpan>& predicted) {
  return score_impl(gold, predicted, EvalLevel::Word);
}

EvalReport score_corpus(const std::vector<std::vector<CharSpan>>& gold,
                        const std::vector<std::vector<CharSpan>>& predicted) {
  return corpus_impl(gold, predicted, EvalLevel::Char);
}

EvalReport score_corpus(const std::vector<std::vector<WordSpan>>& gold,
                        const std::vector<std::vector<WordSpan>>& predicted) {
  return corpus_impl(gold, predicted, EvalLevel::Word);
}

GoldBound gold_upper_bound(const Dataset& dataset) {
  GoldBound b{EvalReport::from_counts(EvalLevel::Char, 0, 0, 0), EvalReport::from_counts(EvalLevel::Word, 0, 0, 0)};
  for (const auto& inst : dataset.instances) {
    const auto words = char_spans_to_word_spans(inst.sentence, inst.char_gold);
    b.char_level += score_spans(inst.char_gold, word_spans_to_char_spans(inst.sentence, words));
    b.word_level += score_spans(words, words);
  }
  return b;
}

BootstrapResult bootstrap_interval(const std::vector<std::vector<CharSpan>>& gold,
                                   const std::vector<std::vector<CharSpan>>& predicted_a,
                                   const std::vector<std::vector<CharSpan>>& predicted_b, std::size_t resamples,
                                   double confidence, std::uint64_t seed) {
  if (gold.size() != predicted_a.size() || gold.size() != predicted_b.size()) {
    throw std::invalid_argument("bootstrap requires aligned message lists");
  }
  if (gold.empty()) throw std::invalid_argument("bootstrap requires at least one message");
  if (resamples == 0 || !(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("bad bootstrap parameters");
  }
  const std::size_t n = gold.size();
  std::vector<EvalReport> a(n);
  std::vector<EvalReport> b(n);
  for (std::size_t m = 0; m < n; ++m) {
    a[m] = score_spans(gold[m], predicted_a[m]);
    b[m] = score_spans(gold[m], predicted_b[m]);
  }
  auto delta = [&](auto&& index_of) {
    EvalReport ta = EvalReport::from_counts(EvalLevel::Char, 0, 0, 0);
    EvalReport tb = ta;
    for (std::size_t k = 0; k < n; ++k) {
      ta += a[index_of(k)];
      tb += b[index_of(k)];
    }
    return ta.f1 - tb.f1;
  };

  BootstrapResult r;
  r.resamples = resamples;
  r.observed_delta = delta([](std::size_t k) { return k; });
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> sample(n);
  std::vector<double> deltas;
  deltas.reserve(resamples);
  for (std::size_t s = 0; s < resamples; ++s) {
    for (auto& x : sample) x = pick(rng);
    deltas.push_back(delta([&](std::size_t k) { return sample[k]; }));
  }
  std::sort(deltas.begin(), deltas.end());
  double sum = 0.0;
  for (double d : deltas) sum += d;
  r.mean_delta = sum / static_cast<double>(resamples);
  const double tail = (1.0 - confidence) / 2.0;
  auto quantile = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1)));
    return deltas[std::min(idx, resamples - 1)];
  };
  r.lower = quantile(tail);
  r.upper = quantile(1.0 - tail);
  r.significant = r.lower > 0.0 || r.upper < 0.0;
  return r;
}

std::string format_table_header() {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14s %7s %7s %7s | %7s %7s %7s", "", "char-P", "char-R", "char-F", "word-P",
                "word-R", "word-F");
  return buf;
}

std::string format_table_row(std::string_view name, const EvalReport& c, const EvalReport& w) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-14.*s %7.2f %7.2f %7.2f | %7.2f %7.2f %7.2f", static_cast<int>(name.size()),
                name.data(), 100 * c.precision, 100 * c.recall, 100 * c.f1, 100 * w.precision, 100 * w.recall,
                100 * w.f1);
  return buf;
}

}  // namespace wsc
