// Annotated-message readers and writers: BRAT standoff and JSON-lines.

#ifndef WSC_CORPUS_IO_HPP
#define WSC_CORPUS_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsc/core.hpp"

namespace wsc {

// One raw message with gold character spans.
struct Message {
  std::string text;
  std::vector<CharSpan> spans;
};

// Each line: {"text": "...", "spans": [{"start": s, "end": e, "label": "NP"}]}.
// Spans may be absent (unannotated input). Errors carry "path:line".
std::vector<Message> read_jsonl(const std::filesystem::path& path);
std::vector<Message> read_jsonl(std::istream& in, const std::string& source = "<stream>");
void write_jsonl(std::ostream& out, const std::vector<Message>& messages);
void write_jsonl(const std::filesystem::path& path, const std::vector<Message>& messages);

// Parses the T-lines of one .ann file against its text. Other record types
// (relations, events, notes) are ignored.
std::vector<CharSpan> parse_brat_annotations(std::istream& ann, const std::string& text,
                                             const std::string& source = "<ann>");

// Reads BRAT standoff. `path` may be a directory (every *.txt with a sibling
// *.ann, sorted by filename) or a single .txt/.ann file of a pair.
std::vector<Message> read_brat(const std::filesystem::path& path);

struct CorpusStats {
  std::size_t messages = 0;
  std::size_t spans = 0;
  std::size_t improper = 0;  // spans whose endpoints are not token boundaries
  std::size_t tokens = 0;

  double improper_percent() const { return spans == 0 ? 0.0 : 100.0 * improper / spans; }
};

CorpusStats corpus_stats(const std::vector<Message>& messages);

}  // namespace wsc

#endif  // WSC_CORPUS_IO_HPP
