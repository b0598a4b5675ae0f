// Model file layout (little-endian):
//
//   "WSCRFMDL"  u32 version
//   u8 kind  i32 L  u8 flags(a=1,b=2,s=4)  i32 affix_max_len  f64 lambda
//   u32 #chunk labels, strings
//   u32 #features, strings in index order, f64 weight per feature
//   u8 has_brown [u32 #entries, (word, cluster) string pairs sorted by word]
//   i32 iterations  f64 final objective  u64 dropped spans  u64 skipped instances
//   u64 FNV-1a hash of every preceding byte
//
// Strings are u32 byte length + UTF-8 bytes. Wall-clock timings are not
// stored so that identical training runs produce identical files.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wsc/training.hpp"

namespace wsc {

namespace {

constexpr char kMagic[8] = {'W', 'S', 'C', 'R', 'F', 'M', 'D', 'L'};

static_assert(std::endian::native == std::endian::little, "model files assume a little-endian host");

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) hash_ = (hash_ ^ p[i]) * 0x100000001b3ULL;
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  }
  template <class T>
  void pod(T v) {
    bytes(&v, sizeof v);
  }
  void str(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void finish() {
    const std::uint64_t h = hash_;
    out_.write(reinterpret_cast<const char*>(&h), sizeof h);
    if (!out_) throw DataError("failed to write model");
  }

 private:
  std::ostream& out_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (in_.gcount() != static_cast<std::streamsize>(n)) throw DataError("corrupt model file: truncated");
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) hash_ = (hash_ ^ p[i]) * 0x100000001b3ULL;
  }
  template <class T>
  T pod() {
    T v{};
    bytes(&v, sizeof v);
    return v;
  }
  std::uint32_t count(std::uint32_t limit = 1u << 30) {
    const auto n = pod<std::uint32_t>();
    if (n > limit) throw DataError("corrupt model file: implausible count");
    return n;
  }
  std::string str() {
    std::string s(count(1u << 24), '\0');
    bytes(s.data(), s.size());
    return s;
  }
  void finish() {
    const std::uint64_t expected = hash_;
    std::uint64_t stored = 0;
    in_.read(reinterpret_cast<char*>(&stored), sizeof stored);
    if (in_.gcount() != sizeof stored || stored != expected) throw DataError("corrupt model file: checksum mismatch");
    if (in_.peek() != std::char_traits<char>::eof()) throw DataError("corrupt model file: trailing bytes");
  }

 private:
  std::istream& in_;
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

void save_model(const Model& model, std::ostream& out) {
  Writer w(out);
  w.bytes(kMagic, sizeof kMagic);
  w.pod(kModelFormatVersion);
  w.pod(static_cast<std::uint8_t>(model.kind));
  w.pod(static_cast<std::int32_t>(model.features.max_seg_len));
  w.pod(static_cast<std::uint8_t>((model.features.use_affix ? 1 : 0) | (model.features.use_brown ? 2 : 0) |
                                  (model.features.use_shape ? 4 : 0)));
  w.pod(static_cast<std::int32_t>(model.features.affix_max_len));
  w.pod(model.lambda);
  w.pod(static_cast<std::uint32_t>(model.labels.chunk_labels().size()));
  for (const auto& l : model.labels.chunk_labels()) w.str(l);
  if (model.weights.size() != model.dictionary.size()) throw std::invalid_argument("weights/dictionary mismatch");
  w.pod(static_cast<std::uint32_t>(model.dictionary.size()));
  for (const auto& name : model.dictionary.names()) w.str(name);
  for (double x : model.weights) w.pod(x);
  w.pod(static_cast<std::uint8_t>(model.brown ? 1 : 0));
  if (model.brown) {
    const auto entries = model.brown->entries();
    w.pod(static_cast<std::uint32_t>(entries.size()));
    for (const auto& [word, cluster] : entries) {
      w.str(word);
      w.str(cluster);
    }
  }
  w.pod(static_cast<std::int32_t>(model.metadata.iterations));
  w.pod(model.metadata.final_objective);
  w.pod(static_cast<std::uint64_t>(model.metadata.dropped_spans));
  w.pod(static_cast<std::uint64_t>(model.metadata.skipped_instances));
  w.finish();
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(model, out);
}

Model load_model(std::istream& in) {
  Reader r(in);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw DataError("not a model file (bad magic bytes)");
  const auto version = r.pod<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw DataError("model format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  Model m;
  const auto kind = r.pod<std::uint8_t>();
  if (kind > 2) throw DataError("corrupt model file: bad model kind");
  m.kind = static_cast<ModelKind>(kind);
  m.features.max_seg_len = r.pod<std::int32_t>();
  const auto flags = r.pod<std::uint8_t>();
  m.features.use_affix = flags & 1;
  m.features.use_brown = flags & 2;
  m.features.use_shape = flags & 4;
  m.features.affix_max_len = r.pod<std::int32_t>();
  m.lambda = r.pod<double>();
  std::vector<std::string> labels(r.count(1u << 16));
  for (auto& l : labels) l = r.str();
  try {
    m.features.validate();
    m.labels = LabelSet(std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("corrupt model file: ") + e.what());
  }
  std::vector<std::string> names(r.count());
  for (auto& n : names) n = r.str();
  m.weights.resize(names.size());
  for (auto& x : m.weights) x = r.pod<double>();
  m.dictionary = FeatureDictionary::from_names(std::move(names));
  if (r.pod<std::uint8_t>()) {
    BrownClusterMap brown;
    const auto n = r.count();
    for (std::uint32_t i = 0; i < n; ++i) {
      std::string word = r.str();
      brown.insert(word, r.str());
    }
    m.brown = std::move(brown);
  }
  m.metadata.iterations = r.pod<std::int32_t>();
  m.metadata.final_objective = r.pod<double>();
  m.metadata.dropped_spans = r.pod<std::uint64_t>();
  m.metadata.skipped_instances = r.pod<std::uint64_t>();
  r.finish();
  return m;
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  return load_model(in);
}

nlohmann::json model_to_json(const Model& model) {
  // Array of [name, weight] keeps dictionary order.
  nlohmann::json features = nlohmann::json::array();
  for (std::uint32_t i = 0; i < model.dictionary.size(); ++i) {
    features.push_back({model.dictionary.name(i), model.weights[i]});
  }
  return {
      {"format_version", kModelFormatVersion},
      {"model", to_string(model.kind)},
      {"labels", model.labels.chunk_labels()},
      {"feature_flags", model.features.flags()},
      {"max_seg_len", model.features.max_seg_len},
      {"affix_max_len", model.features.affix_max_len},
      {"lambda", model.lambda},
      {"brown_entries", model.brown ? model.brown->size() : 0},
      {"iterations", model.metadata.iterations},
      {"final_objective", model.metadata.final_objective},
      {"dropped_spans", model.metadata.dropped_spans},
      {"skipped_instances", model.metadata.skipped_instances},
      {"weights", features},
  };
}

}  // namespace wsc
