#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "wsc/corpus_io.hpp"
#include "wsc/synthetic.hpp"

using namespace wsc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("wsc_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"train"}).code == 1);
  CHECK(run({"ingest", "/nonexistent/file.jsonl"}).code == 1);
  const Run help = run({"train", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--lambda-grid") != std::string::npos);
}

TEST_CASE("ingest prints corpus statistics") {
  Workspace ws("ingest");
  write_jsonl(fs::path(ws.path("in.jsonl")), {{"Dr teh says", {{0, 6, "NP"}}}});
  const Run r = run({"ingest", ws.path("in.jsonl"), "--out", ws.path("out.jsonl")});
  CHECK(r.code == 0);
  CHECK(r.out.find("1         1         0 (0.0%)          3") != std::string::npos);
  CHECK(read_jsonl(fs::path(ws.path("out.jsonl"))).size() == 1);

  std::ofstream(ws.path("empty.jsonl")) << "";
  const Run e = run({"ingest", ws.path("empty.jsonl"), "--out", ws.path("empty_out.jsonl")});
  CHECK(e.code == 0);
  CHECK(e.out.find("0         0         0 (0.0%)          0") != std::string::npos);
  CHECK(slurp(ws.path("empty_out.jsonl")).empty());

  fs::create_directories(ws.dir / "brat");
  std::ofstream(ws.dir / "brat" / "m1.txt") << "butshe's ok";
  std::ofstream(ws.dir / "brat" / "m1.ann") << "T1\tNP 3 6\tshe\n";
  const Run b = run({"ingest", (ws.dir / "brat").string(), "--out", ws.path("brat.jsonl")});
  CHECK(b.code == 0);
  CHECK(b.out.find("1 (100.0%)") != std::string::npos);

  std::ofstream(ws.path("bad.jsonl")) << "{\"text\": 3}\n";
  const Run bad = run({"ingest", ws.path("bad.jsonl"), "--out", ws.path("x.jsonl")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("bad.jsonl:1") != std::string::npos);
}

TEST_CASE("train, predict and eval on a separable toy set") {
  Workspace ws("pipeline");
  write_jsonl(fs::path(ws.path("train.jsonl")), separable_corpus(200, 1));
  write_jsonl(fs::path(ws.path("dev.jsonl")), separable_corpus(40, 2));
  const Run t = run({"train", "--train", ws.path("train.jsonl"), "--dev", ws.path("dev.jsonl"), "--model", "weak",
                     "--lambda", "0.25", "--max-iterations", "100", "--out", ws.path("m.bin"), "--log",
                     ws.path("train.log")});
  REQUIRE(t.code == 0);
  CHECK(fs::exists(ws.path("m.bin")));
  CHECK(slurp(ws.path("train.log")).rfind("iter objective grad_norm seconds\n", 0) == 0);
  CHECK(t.out.find("\"lambda\":0.25") != std::string::npos);

  const Run p = run({"predict", ws.path("m.bin"), ws.path("dev.jsonl"), "--out", ws.path("pred.jsonl")});
  REQUIRE(p.code == 0);
  const Run e = run({"eval", ws.path("dev.jsonl"), ws.path("pred.jsonl"), "--upper-bound"});
  REQUIRE(e.code == 0);
  CHECK(e.out.find("\"f1\":1.0") != std::string::npos);
  CHECK(e.out.find("Gold") != std::string::npos);
  // Table row: char P R F then word P R F, all 100.
  CHECK(e.out.find("100.00  100.00  100.00 |  100.00  100.00  100.00") != std::string::npos);

  const Run single = run({"eval", ws.path("dev.jsonl"), ws.path("pred.jsonl"), "--level", "word"});
  CHECK(single.code == 0);
  CHECK(single.out.find("(word-level)") != std::string::npos);

  const Run dump = run({"predict", ws.path("m.bin"), "--dump-model"});
  CHECK(dump.code == 0);
  CHECK(dump.out.find("\"model\": \"weak\"") != std::string::npos);

  // Bootstrap against an empty system.
  std::vector<Message> blank = read_jsonl(fs::path(ws.path("dev.jsonl")));
  for (auto& m : blank) m.spans.clear();
  write_jsonl(fs::path(ws.path("blank.jsonl")), blank);
  const Run cmp = run({"eval", ws.path("dev.jsonl"), ws.path("pred.jsonl"), "--compare", ws.path("blank.jsonl"),
                       "--resamples", "500"});
  CHECK(cmp.code == 0);
  CHECK(cmp.out.find(" significant") != std::string::npos);
  CHECK(cmp.out.find("not significant") == std::string::npos);

  // Mismatched message counts.
  write_jsonl(fs::path(ws.path("short.jsonl")), {blank[0]});
  CHECK(run({"eval", ws.path("dev.jsonl"), ws.path("short.jsonl")}).code == 2);
}

TEST_CASE("config file with flag overrides and a lambda grid") {
  Workspace ws("config");
  write_jsonl(fs::path(ws.path("train.jsonl")), separable_corpus(150, 3));
  write_jsonl(fs::path(ws.path("dev.jsonl")), separable_corpus(30, 4));
  std::ofstream(ws.path("run.cfg")) << "# toy run\n"
                                    << "train = " << ws.path("train.jsonl") << "\n"
                                    << "dev = " << ws.path("dev.jsonl") << "\n"
                                    << "model = semi\n"
                                    << "features = s\n"
                                    << "lambda-grid = 0.5,1\n"
                                    << "max-iterations = 60\n"
                                    << "out = " << ws.path("m.bin") << "\n";
  const Run r = run({"train", "--config", ws.path("run.cfg"), "--log", ws.path("log.txt"), "--model", "linear"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("dev lambda=0.5") != std::string::npos);
  CHECK(r.out.find("dev lambda=1") != std::string::npos);
  CHECK(r.out.find("\"model\":\"linear\"") != std::string::npos);

  std::ofstream(ws.path("bad.cfg")) << "model weak\n";
  CHECK(run({"train", "--config", ws.path("bad.cfg")}).code == 1);
  std::ofstream(ws.path("unknown.cfg")) << "colour = blue\n";
  CHECK(run({"train", "--config", ws.path("unknown.cfg")}).code == 1);
}

TEST_CASE("validation happens before training") {
  Workspace ws("validate");
  write_jsonl(fs::path(ws.path("train.jsonl")), separable_corpus(10, 3));
  const Run missing = run({"train", "--train", ws.path("train.jsonl"), "--features", "b", "--brown",
                           ws.path("nope.txt"), "--out", ws.path("m.bin")});
  CHECK(missing.code == 1);
  CHECK_FALSE(fs::exists(ws.path("m.bin")));
  CHECK(run({"train", "--train", ws.path("train.jsonl"), "--features", "b", "--out", ws.path("m.bin")}).code == 1);
  CHECK(run({"train", "--train", ws.path("train.jsonl"), "--lambda", "-1", "--out", ws.path("m.bin")}).code == 1);
  CHECK(run({"train", "--train", ws.path("train.jsonl"), "--lambda-grid", "--out", ws.path("m.bin")}).code == 1);
  CHECK(run({"train", "--train", ws.path("train.jsonl"), "--model", "crf", "--out", ws.path("m.bin")}).code == 1);
}

TEST_CASE("brown clusters from the command line") {
  Workspace ws("brown");
  write_jsonl(fs::path(ws.path("train.jsonl")), separable_corpus(30, 3));
  std::ofstream(ws.path("clusters.txt")) << "0110\tthe\t10\n10\tbus\t3\n";
  const Run r = run({"train", "--train", ws.path("train.jsonl"), "--features", "a,b,s", "--brown",
                     ws.path("clusters.txt"), "--max-iterations", "5", "--out", ws.path("m.bin"), "--log",
                     ws.path("log.txt")});
  CHECK(r.code == 0);
  CHECK(run({"predict", ws.path("m.bin"), ws.path("train.jsonl"), "--out", ws.path("p.jsonl")}).code == 0);
}

TEST_CASE("identical training runs write identical model files") {
  Workspace ws("determinism");
  write_jsonl(fs::path(ws.path("train.jsonl")), separable_corpus(80, 5));
  for (const char* out : {"a.bin", "b.bin"}) {
    REQUIRE(run({"train", "--train", ws.path("train.jsonl"), "--threads", "3", "--max-iterations", "20", "--out",
                 ws.path(out), "--log", ws.path("log.txt")})
                .code == 0);
  }
  CHECK(slurp(ws.path("a.bin")) == slurp(ws.path("b.bin")));
}

TEST_CASE("corrupt model files are data errors") {
  Workspace ws("corrupt");
  std::ofstream(ws.path("bad.bin")) << "not a model";
  write_jsonl(fs::path(ws.path("in.jsonl")), {{"a b", {}}});
  const Run r = run({"predict", ws.path("bad.bin"), ws.path("in.jsonl")});
  CHECK(r.code == 2);
  CHECK(r.err.find("magic") != std::string::npos);
}

TEST_CASE("bench emits the timing CSV") {
  Workspace ws("bench");
  const Run r = run({"bench", "--sentences", "20", "--iterations", "1", "--warmup", "0", "--sweep",
                     "--sweep-labels", "2,4", "--sweep-sentences", "4", "--sweep-n", "6", "--json",
                     ws.path("bench.json")});
  REQUIRE(r.code == 0);
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "model,num_labels,n,L,edges,sec_per_iter");
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 5);
    ++rows;
  }
  CHECK(rows == 3 + 2 * 3);
  CHECK(slurp(ws.path("bench.json")).find("semi_weak_ratio") != std::string::npos);
  CHECK(run({"bench", "--models", "linear,crf"}).code == 1);
}
