#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "wsc/benchmark.hpp"
#include "wsc/corpus_io.hpp"
#include "wsc/eval.hpp"
#include "wsc/synthetic.hpp"
#include "wsc/training.hpp"

namespace wsc::cli {

namespace fs = std::filesystem;

namespace {

// Invalid flag combinations or missing inputs, detected before any work.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> parse_grid(const std::string& text) {
  if (trim(text).empty() || trim(text) == "default") return kLambdaGrid;
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(trim(item), &used);
      if (used != trim(item).size()) throw std::invalid_argument(item);
      grid.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad --lambda-grid entry '" + item + "'");
    }
  }
  for (double v : grid) {
    if (!(v > 0.0)) throw UsageError("lambda values must be positive");
  }
  return grid;
}

std::vector<ModelKind> parse_models(const std::string& text) {
  std::vector<ModelKind> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(parse_model_kind(trim(item)));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("no models given");
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoi(trim(item)));
    } catch (const std::exception&) {
      throw UsageError("bad integer '" + item + "'");
    }
  }
  return out;
}

FeatureConfig feature_config(const std::string& flags, int max_seg_len) {
  try {
    FeatureConfig c = FeatureConfig::parse_flags(flags, max_seg_len);
    c.validate();
    return c;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// Opens `path` for writing, or returns the fallback stream for "" / "-".
class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<Message> read_input(const std::string& path, const std::string& format) {
  std::string f = format;
  if (f == "auto") {
    const fs::path p(path);
    f = fs::is_directory(p) || p.extension() == ".ann" || p.extension() == ".txt" ? "brat" : "jsonl";
  }
  if (f == "brat") return read_brat(path);
  return read_jsonl(fs::path(path));
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::string input;
  std::string format = "auto";
  std::string out;
};

// Statistics go to `out` when the dataset goes to a file, otherwise to `err`.
int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  const auto messages = read_input(a.input, a.format);
  const CorpusStats s = corpus_stats(messages);
  OutputTarget target(a.out, out);
  write_jsonl(target.get(), messages);
  std::ostream& report = &target.get() == &out ? err : out;
  report << std::left << std::setw(10) << "messages" << std::setw(10) << "NPs" << std::setw(18) << "improper NPs"
         << "tokens\n";
  std::ostringstream improper;
  improper << s.improper << " (" << std::fixed << std::setprecision(1) << s.improper_percent() << "%)";
  report << std::setw(10) << s.messages << std::setw(10) << s.spans << std::setw(18) << improper.str() << s.tokens
         << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string train_path;
  std::string dev_path;
  std::string model = "weak";
  std::string features = "base";
  double lambda = 1.0;
  std::optional<std::string> lambda_grid;
  int max_seg_len = 6;
  std::string brown;
  std::uint64_t seed = 1;
  int threads = 1;
  int max_iterations = 500;
  double tolerance = 1e-6;
  std::string out;
  std::string log;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  try {
    config.kind = parse_model_kind(a.model);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  config.features = feature_config(a.features, a.max_seg_len);
  config.lambda = a.lambda;
  config.threads = a.threads;
  config.max_iterations = a.max_iterations;
  config.tolerance = a.tolerance;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (config.features.use_brown && a.brown.empty()) throw UsageError("+b features need --brown <path>");
  if (!a.brown.empty() && !fs::is_regular_file(a.brown)) throw UsageError("Brown cluster file not found: " + a.brown);
  const std::vector<double> grid = a.lambda_grid ? parse_grid(*a.lambda_grid) : std::vector<double>{};
  if (a.lambda_grid && a.dev_path.empty()) throw UsageError("--lambda-grid needs --dev <path>");
  if (a.out.empty()) throw UsageError("--out <model path> is required");

  std::optional<BrownClusterMap> brown;
  if (config.features.use_brown) brown = load_brown_clusters(a.brown);
  const Dataset train_set = make_dataset(read_jsonl(fs::path(a.train_path)), Split::Train);
  std::optional<Dataset> dev;
  if (!a.dev_path.empty()) dev = make_dataset(read_jsonl(fs::path(a.dev_path)), Split::Dev);

  OutputTarget log_target(a.log, err);
  std::ostream& log = log_target.get();
  log << "iter objective grad_norm seconds\n";
  const IterationLogger logger = [&](const IterationRecord& r) {
    log << r.iteration << ' ' << std::setprecision(10) << r.objective << ' ' << r.grad_norm << ' '
        << std::setprecision(4) << r.seconds << '\n';
  };

  nlohmann::json report = {{"model", a.model}, {"features", config.features.flags()}, {"max_seg_len", a.max_seg_len},
                           {"seed", a.seed}};
  Model model;
  if (!grid.empty()) {
    TuneResult tuned = tune_lambda(train_set, *dev, config, grid, brown ? &*brown : nullptr, logger);
    out << format_table_header() << '\n';
    nlohmann::json dev_reports = nlohmann::json::array();
    for (const auto& r : tuned.reports) {
      std::ostringstream name;
      name << "dev lambda=" << r.lambda;
      out << format_table_row(name.str(), r.char_level, r.word_level) << '\n';
      dev_reports.push_back({{"lambda", r.lambda}, {"char", r.char_level}, {"word", r.word_level}});
    }
    report["dev"] = dev_reports;
    report["lambda"] = tuned.best_lambda;
    model = std::move(tuned.best_model);
  } else {
    model = train(train_set, config, brown ? &*brown : nullptr, logger);
    report["lambda"] = config.lambda;
    if (dev) {
      const LambdaReport r = evaluate(model, *dev, config.threads);
      out << format_table_header() << '\n' << format_table_row("dev", r.char_level, r.word_level) << '\n';
      report["dev"] = nlohmann::json::array({{{"lambda", r.lambda}, {"char", r.char_level}, {"word", r.word_level}}});
    }
  }
  save_model(model, fs::path(a.out));
  report["iterations"] = model.metadata.iterations;
  report["final_objective"] = model.metadata.final_objective;
  report["dropped_spans"] = model.metadata.dropped_spans;
  report["skipped_instances"] = model.metadata.skipped_instances;
  report["features_total"] = model.weights.size();
  out << report.dump() << '\n';
  return kSuccess;
}

// ---------------------------------------------------------------------------
// predict

struct PredictArgs {
  std::string model_path;
  std::string input;
  std::string format = "auto";
  int threads = 1;
  std::string out;
  bool dump_model = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  if (a.threads < 1) throw UsageError("--threads must be >= 1");
  const Model model = load_model(fs::path(a.model_path));
  if (a.dump_model) {
    out << model_to_json(model).dump(1) << '\n';
    return kSuccess;
  }
  if (a.input.empty()) throw UsageError("predict needs an input file");
  const auto messages = read_input(a.input, a.format);
  const Dataset data = make_dataset(messages, Split::Test);
  const auto predicted = model.predict(data, a.threads);
  std::vector<Message> result;
  result.reserve(messages.size());
  for (std::size_t i = 0; i < messages.size(); ++i) {
    result.push_back({messages[i].text, word_spans_to_char_spans(data.instances[i].sentence, predicted[i])});
  }
  OutputTarget target(a.out, out);
  write_jsonl(target.get(), result);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string gold;
  std::string predicted;
  std::string compare;
  std::string level = "both";
  std::string name = "system";
  bool upper_bound = false;
  int resamples = 10000;
  std::uint64_t seed = 1;
  std::string json;
};

struct Scored {
  EvalReport char_level;
  EvalReport word_level;
  std::vector<std::vector<CharSpan>> spans;
};

Scored score_file(const Dataset& gold, const std::vector<Message>& predicted, const std::string& path) {
  if (predicted.size() != gold.instances.size()) {
    throw DataError(path + ": " + std::to_string(predicted.size()) + " messages, gold has " +
                    std::to_string(gold.instances.size()));
  }
  Scored s;
  s.char_level = EvalReport::from_counts(EvalLevel::Char, 0, 0, 0);
  s.word_level = EvalReport::from_counts(EvalLevel::Word, 0, 0, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const Instance& g = gold.instances[i];
    if (predicted[i].text != g.sentence.raw_text()) {
      throw DataError(path + ":" + std::to_string(i + 1) + ": message text differs from gold");
    }
    std::vector<CharSpan> p = predicted[i].spans;
    std::sort(p.begin(), p.end());
    s.char_level += score_spans(g.char_gold, p);
    s.word_level += score_spans(g.gold, char_spans_to_word_spans(g.sentence, p));
    s.spans.push_back(std::move(p));
  }
  return s;
}

void print_row(std::ostream& out, const std::string& level, const std::string& name, const EvalReport& c,
               const EvalReport& w) {
  if (level == "both") {
    out << format_table_row(name, c, w) << '\n';
    return;
  }
  const EvalReport& r = level == "char" ? c : w;
  out << std::left << std::setw(24) << name << std::right << std::fixed << std::setprecision(2) << std::setw(8)
      << 100 * r.precision << std::setw(8) << 100 * r.recall << std::setw(8) << 100 * r.f1 << '\n';
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.level != "char" && a.level != "word" && a.level != "both") throw UsageError("--level must be char, word or both");
  if (a.resamples < 1) throw UsageError("--resamples must be >= 1");
  const Dataset gold = make_dataset(read_jsonl(fs::path(a.gold)), Split::Test);
  const Scored sys = score_file(gold, read_jsonl(fs::path(a.predicted)), a.predicted);

  if (a.level == "both") {
    out << format_table_header() << '\n';
  } else {
    out << std::left << std::setw(24) << "" << std::right << std::setw(8) << "P" << std::setw(8) << "R"
        << std::setw(8) << "F" << "   (" << a.level << "-level)\n";
  }
  nlohmann::json report;
  if (a.upper_bound) {
    const GoldBound b = gold_upper_bound(gold);
    print_row(out, a.level, "Gold", b.char_level, b.word_level);
    report["gold"] = {{"char", b.char_level}, {"word", b.word_level}};
  }
  print_row(out, a.level, a.name, sys.char_level, sys.word_level);
  report[a.name] = {{"char", sys.char_level}, {"word", sys.word_level}};
  if (!a.compare.empty()) {
    const Scored other = score_file(gold, read_jsonl(fs::path(a.compare)), a.compare);
    print_row(out, a.level, "compare", other.char_level, other.word_level);
    std::vector<std::vector<CharSpan>> gold_spans;
    for (const auto& inst : gold.instances) gold_spans.push_back(inst.char_gold);
    const BootstrapResult b =
        bootstrap_interval(gold_spans, sys.spans, other.spans, static_cast<std::size_t>(a.resamples), 0.95, a.seed);
    out << std::fixed << std::setprecision(2) << "char-level F1 difference " << 100 * b.observed_delta
        << ", 95% interval [" << 100 * b.lower << ", " << 100 * b.upper << "]"
        << (b.significant ? " significant\n" : " not significant\n");
    report["compare"] = {{"char", other.char_level}, {"word", other.word_level}};
    report["bootstrap"] = {{"observed_delta", b.observed_delta}, {"mean_delta", b.mean_delta},
                           {"lower", b.lower},          {"upper", b.upper},
                           {"significant", b.significant}, {"resamples", b.resamples},
                           {"seed", a.seed}};
  }
  if (!a.json.empty()) {
    OutputTarget target(a.json, out);
    target.get() << report.dump(1) << '\n';
  } else {
    out << report.dump() << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string data;
  std::string models = "linear,semi,weak";
  std::string features = "base";
  int max_seg_len = 6;
  std::size_t sentences = 2000;
  int num_labels = 2;
  int iterations = 5;
  int warmup = 1;
  std::uint64_t seed = 1;
  bool sweep = false;
  std::string sweep_labels = "2,4,8,16";
  std::size_t sweep_n = 20;
  std::size_t sweep_sentences = 100;
  std::string out;
  std::string json;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig config;
  config.models = parse_models(a.models);
  config.features = feature_config(a.features, a.max_seg_len);
  if (config.features.use_brown) throw UsageError("bench does not support +b features");
  config.iterations = a.iterations;
  config.warmup = a.warmup;
  if (a.iterations < 1 || a.warmup < 0) throw UsageError("bad --iterations/--warmup");
  const std::vector<int> label_counts = parse_ints(a.sweep_labels);
  for (int k : label_counts) {
    if (k < 2) throw UsageError("sweep label counts must be >= 2");
  }

  Dataset data;
  if (!a.data.empty()) {
    data = make_dataset(read_jsonl(fs::path(a.data)));
  } else {
    SyntheticConfig sc;
    sc.sentences = a.sentences;
    sc.num_labels = a.num_labels;
    sc.seed = a.seed;
    data = make_dataset(synthetic_corpus(sc));
  }
  const BenchReport report = benchmark_training(data, config);
  std::vector<ModelTiming> rows = report.models;
  std::vector<ModelTiming> sweep;
  if (a.sweep) {
    SweepConfig sc;
    sc.num_labels = label_counts;
    sc.models = config.models;
    sc.sentences = a.sweep_sentences;
    sc.n = a.sweep_n;
    sc.max_seg_len = a.max_seg_len;
    sc.iterations = a.iterations;
    sc.warmup = a.warmup;
    sc.seed = a.seed;
    sweep = sweep_labels(sc);
    rows.insert(rows.end(), sweep.begin(), sweep.end());
  }
  OutputTarget target(a.out, out);
  write_timing_csv(target.get(), rows);
  for (const auto& m : report.models) {
    err << to_string(m.kind) << ": mean " << m.mean_seconds << " s/iter, median " << m.median_seconds
        << " s/iter\n";
  }
  if (report.semi_weak_ratio() > 0) err << "semi/weak time ratio " << report.semi_weak_ratio() << '\n';
  if (!a.json.empty()) {
    nlohmann::json j = report;
    j["sweep"] = sweep;
    OutputTarget jt(a.json, out);
    jt.get() << j.dump(1) << '\n';
  }
  return kSuccess;
}

}  // namespace

std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || key == "config") {
      throw UsageError(path + ":" + std::to_string(number) + ": bad key '" + key + "'");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Chunking of noisy short messages with linear, semi-Markov and weak semi-Markov CRFs", "wsc"};
  app.require_subcommand(1);
  // Later occurrences win, so command-line flags override config entries.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Flat key = value file; keys mirror the long flags")
        ->check(CLI::ExistingFile);
  };

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "Read BRAT or JSON-lines data, print corpus statistics");
  ingest->add_option("input,--input", ia.input, "Input file or BRAT directory")->required()->check(CLI::ExistingPath);
  ingest->add_option("--format", ia.format)->check(CLI::IsMember({"auto", "brat", "jsonl"}));
  ingest->add_option("--out", ia.out, "Canonical JSON-lines output (stdout when absent)");
  add_config(ingest);

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model, optionally tuning lambda on a dev set");
  train_cmd->add_option("--train", ta.train_path, "Training data (JSON-lines)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", ta.dev_path, "Development data (JSON-lines)")->check(CLI::ExistingFile);
  train_cmd->add_option("--model", ta.model)->check(CLI::IsMember({"linear", "semi", "weak"}));
  train_cmd->add_option("--features", ta.features, "Comma list of a, b, s, or base");
  train_cmd->add_option("--lambda", ta.lambda, "L2 strength");
  train_cmd->add_option("--lambda-grid", ta.lambda_grid, "Comma list; empty or 'default' for the standard grid")
      ->expected(0, 1);
  train_cmd->add_option("--max-seg-len", ta.max_seg_len, "Maximum chunk length L");
  train_cmd->add_option("--brown", ta.brown, "Brown cluster file");
  train_cmd->add_option("--seed", ta.seed);
  train_cmd->add_option("--threads", ta.threads);
  train_cmd->add_option("--max-iterations", ta.max_iterations);
  train_cmd->add_option("--tolerance", ta.tolerance);
  train_cmd->add_option("--out", ta.out, "Model file to write");
  train_cmd->add_option("--log", ta.log, "Training log (stderr when absent)");
  add_config(train_cmd);

  PredictArgs pa;
  auto* predict = app.add_subcommand("predict", "Tag messages with a trained model");
  predict->add_option("model_path,--model-file", pa.model_path, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("input,--input", pa.input, "Messages to tag")->check(CLI::ExistingPath);
  predict->add_option("--format", pa.format)->check(CLI::IsMember({"auto", "brat", "jsonl"}));
  predict->add_option("--threads", pa.threads);
  predict->add_option("--out", pa.out, "JSON-lines output (stdout when absent)");
  predict->add_flag("--dump-model", pa.dump_model, "Print the model as JSON instead of predicting");
  add_config(predict);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score predictions against gold spans");
  eval->add_option("gold,--gold", ea.gold)->required()->check(CLI::ExistingFile);
  eval->add_option("predicted,--predicted", ea.predicted)->required()->check(CLI::ExistingFile);
  eval->add_option("--compare", ea.compare, "Second system for a paired bootstrap")->check(CLI::ExistingFile);
  eval->add_option("--level", ea.level, "char, word or both");
  eval->add_option("--name", ea.name, "Row label");
  eval->add_flag("--upper-bound", ea.upper_bound, "Also print the gold conversion upper bound");
  eval->add_option("--resamples", ea.resamples);
  eval->add_option("--seed", ea.seed);
  eval->add_option("--json", ea.json, "Write the JSON report here instead of stdout");
  add_config(eval);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Time objective and gradient evaluations per model");
  bench->add_option("--data", ba.data, "JSON-lines data; a synthetic corpus when absent")->check(CLI::ExistingFile);
  bench->add_option("--models", ba.models);
  bench->add_option("--model", ba.models, "Alias of --models");
  bench->add_option("--features", ba.features);
  bench->add_option("--max-seg-len", ba.max_seg_len);
  bench->add_option("--sentences", ba.sentences);
  bench->add_option("--num-labels", ba.num_labels);
  bench->add_option("--iterations", ba.iterations);
  bench->add_option("--warmup", ba.warmup);
  bench->add_option("--seed", ba.seed);
  bench->add_flag("--sweep", ba.sweep, "Also sweep the number of labels on synthetic data");
  bench->add_option("--sweep-labels", ba.sweep_labels);
  bench->add_option("--sweep-n", ba.sweep_n);
  bench->add_option("--sweep-sentences", ba.sweep_sentences);
  bench->add_option("--out", ba.out, "CSV output (stdout when absent)");
  bench->add_option("--json", ba.json);
  add_config(bench);

  try {
    // Splice config entries in right after the subcommand name.
    std::vector<std::string> argv = args;
    for (std::size_t i = 0; i < argv.size(); ++i) {
      std::string path;
      if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
      if (argv[i].rfind("--config=", 0) == 0) path = argv[i].substr(9);
      if (!path.empty()) {
        const auto extra = read_config(path);
        argv.insert(argv.begin() + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(ia, out, err);
    if (*train_cmd) return cmd_train(ta, out, err);
    if (*predict) return cmd_predict(pa, out);
    if (*eval) return cmd_eval(ea, out);
    if (*bench) return cmd_bench(ba, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace wsc::cli
