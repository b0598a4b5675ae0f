#include "wsc/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wsc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Message> read_jsonl(std::istream& in, const std::string& source) {
  std::vector<Message> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    try {
      const json obj = json::parse(line);
      Message m;
      m.text = obj.at("text").get<std::string>();
      const std::size_t len = utf8_decode(m.text).size();
      if (obj.contains("spans")) {
        for (const auto& s : obj.at("spans")) {
          CharSpan span{s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                        s.value("label", std::string("NP"))};
          if (span.start >= span.end || span.end > len) {
            throw DataError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                            ") outside text");
          }
          m.spans.push_back(std::move(span));
        }
      }
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<Message> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_jsonl(in, path.string());
}

void write_jsonl(std::ostream& out, const std::vector<Message>& messages) {
  for (const auto& m : messages) {
    json spans = json::array();
    for (const auto& s : m.spans) spans.push_back({{"start", s.start}, {"end", s.end}, {"label", s.label}});
    out << json{{"text", m.text}, {"spans", spans}}.dump() << '\n';
  }
}

void write_jsonl(const fs::path& path, const std::vector<Message>& messages) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_jsonl(out, messages);
}

std::vector<CharSpan> parse_brat_annotations(std::istream& ann, const std::string& text,
                                             const std::string& source) {
  const std::size_t len = utf8_decode(text).size();
  std::vector<CharSpan> spans;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ann, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] != 'T') continue;
    const std::string where = source + ":" + std::to_string(lineno);
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos) throw DataError(where + ": missing tab-separated fields");
    const std::string body = line.substr(tab1 + 1, tab2 == std::string::npos ? tab2 : tab2 - tab1 - 1);
    if (body.find(';') != std::string::npos) {
      throw DataError(where + ": discontinuous spans are not supported");
    }
    std::istringstream fields(body);
    CharSpan span;
    if (!(fields >> span.label >> span.start >> span.end)) {
      throw DataError(where + ": expected '<LABEL> <start> <end>'");
    }
    if (span.start >= span.end || span.end > len) {
      throw DataError(where + ": span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                      ") outside text of length " + std::to_string(len));
    }
    spans.push_back(std::move(span));
  }
  std::sort(spans.begin(), spans.end());
  return spans;
}

std::vector<Message> read_brat(const fs::path& path) {
  std::vector<fs::path> texts;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.path().extension() == ".txt") texts.push_back(entry.path());
    }
    std::sort(texts.begin(), texts.end());
  } else {
    fs::path txt = path;
    txt.replace_extension(".txt");
    texts.push_back(txt);
  }
  std::vector<Message> out;
  for (const auto& txt : texts) {
    fs::path ann = txt;
    ann.replace_extension(".ann");
    Message m;
    m.text = read_file(txt);
    if (fs::exists(ann)) {
      std::ifstream in(ann);
      m.spans = parse_brat_annotations(in, m.text, ann.string());
    } else if (!fs::is_directory(path)) {
      throw DataError("missing annotation file " + ann.string());
    }
    out.push_back(std::move(m));
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Message>& messages) {
  CorpusStats st;
  for (const auto& m : messages) {
    const Sentence s = tokenize(m.text);
    ++st.messages;
    st.tokens += s.size();
    st.spans += m.spans.size();
    for (const auto& span : m.spans) {
      if (!is_token_aligned(s, span)) ++st.improper;
    }
  }
  return st;
}

}  // namespace wsc
