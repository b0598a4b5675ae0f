#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsc/corpus_io.hpp"

using namespace wsc;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wsc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("jsonl round trip") {
  const std::vector<Message> msgs = {{"Dr teh says", {{0, 6, "NP"}}}, {"caf\xC3\xA9 ok", {}}};
  std::stringstream buf;
  write_jsonl(buf, msgs);
  const auto back = read_jsonl(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == msgs[0].text);
  CHECK(back[0].spans == msgs[0].spans);
  CHECK(back[1].text == msgs[1].text);
}

TEST_CASE("jsonl defaults and errors") {
  std::istringstream ok(R"({"text": "a b", "spans": [{"start": 0, "end": 1}]})"
                        "\n\n");
  const auto m = read_jsonl(ok);
  REQUIRE(m.size() == 1);
  CHECK(m[0].spans[0].label == "NP");

  std::istringstream bad("{\"text\": \"a\"}\n{oops\n");
  try {
    read_jsonl(bad, "data.jsonl");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("data.jsonl:2") != std::string::npos);
  }
  std::istringstream range(R"({"text": "ab", "spans": [{"start": 0, "end": 5}]})");
  CHECK_THROWS_AS(read_jsonl(range), DataError);
  std::istringstream missing(R"({"spans": []})");
  CHECK_THROWS_AS(read_jsonl(missing), DataError);
  CHECK_THROWS_AS(read_jsonl(fs::path("/nonexistent.jsonl")), DataError);
}

TEST_CASE("brat annotations") {
  const std::string text = "Dr teh says";
  std::istringstream ann("T1\tNP 0 6\tDr teh\nR1\tRel Arg1:T1 Arg2:T1\n#1\tNote T1\tx\n");
  const auto spans = parse_brat_annotations(ann, text);
  CHECK(spans == std::vector<CharSpan>{{0, 6, "NP"}});
  std::istringstream disc("T1\tNP 0 2;3 6\tDr teh\n");
  CHECK_THROWS_AS(parse_brat_annotations(disc, text), DataError);
  std::istringstream bad("T1\tNP 0 60\tDr teh\n");
  CHECK_THROWS_AS(parse_brat_annotations(bad, text), DataError);
}

TEST_CASE("brat directory") {
  const fs::path dir = temp_dir("brat");
  std::ofstream(dir / "b.txt") << "u go";
  std::ofstream(dir / "b.ann") << "";
  std::ofstream(dir / "a.txt") << "Dr teh says";
  std::ofstream(dir / "a.ann") << "T1\tNP 0 6\tDr teh\n";
  const auto msgs = read_brat(dir);
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].text == "Dr teh says");
  CHECK(msgs[0].spans.size() == 1);
  CHECK(msgs[1].spans.empty());
  CHECK(read_brat(dir / "a.ann").size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("corpus statistics") {
  const auto s = corpus_stats({{"Dr teh says", {{0, 6, "NP"}}}});
  CHECK(s.messages == 1);
  CHECK(s.spans == 1);
  CHECK(s.improper == 0);
  CHECK(s.tokens == 3);
  const auto t = corpus_stats({{"butshe's", {{3, 6, "NP"}}}});
  CHECK(t.improper == 1);
  CHECK(t.improper_percent() == 100.0);
  const auto e = corpus_stats({});
  CHECK(e.messages == 0);
  CHECK(e.improper_percent() == 0.0);
}
