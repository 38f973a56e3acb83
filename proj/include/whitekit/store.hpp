#pragma once

// On-disk layout for precomputed embeddings.
//
// Embedding file (little-endian):
//   offset 0   4 bytes  magic "EMB1"
//   offset 4   u16      format version (1)
//   offset 6   u16      dtype: 1 = float32, 2 = float64
//   offset 8   u32      n_rows
//   offset 12  u32      n_cols
//   offset 16  payload, row-major
//
// A dataset is a directory with a JSON manifest naming its files by role
// (embeddings, labels, splits for classification; left, right, gold for
// STS) together with the SHA-256 of each file.

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "whitekit/errors.hpp"
#include "whitekit/matrix_stats.hpp"
#include "whitekit/probes.hpp"
#include "whitekit/sts.hpp"
#include "whitekit/whitening.hpp"

namespace whitekit {

namespace fs = std::filesystem;

enum class DType : std::uint16_t { float32 = 1, float64 = 2 };

inline constexpr std::array<char, 4> kEmbeddingMagic = {'E', 'M', 'B', '1'};
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 16;

enum class TaskType { classification, sts };

inline std::string_view to_string(TaskType t) {
  return t == TaskType::classification ? "classification" : "sts";
}

struct DatasetManifest {
  std::string name;
  TaskType task = TaskType::classification;
  std::optional<int> n_classes;
  std::map<std::string, std::string> files;      // role -> relative path
  std::string model_name;
  Index dim = 0;
  Index count = 0;
  std::map<std::string, std::string> checksums;  // role -> sha256 hex
  // Present on manifests produced by whitening an existing dataset.
  std::optional<nlohmann::json> whitening;
};

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
  return v;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path.string(), "read failed");
  return bytes;
}

inline void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

}  // namespace detail

inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw InternalError("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

inline std::string sha256_file(const fs::path& path) {
  return sha256_hex(detail::read_file(path));
}

inline std::string encode_embeddings(const Matrix& x, DType dtype) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw InvalidInput("save_embeddings: matrix must have at least one row "
                       "and one column");
  }
  if (!x.allFinite()) throw InvalidInput("save_embeddings: non-finite entry");
  if (x.rows() > UINT32_MAX || x.cols() > UINT32_MAX) {
    throw InvalidInput("save_embeddings: matrix too large for the format");
  }
  const std::size_t width = dtype == DType::float32 ? 4 : 8;
  std::string out;
  out.reserve(kEmbeddingHeaderBytes +
              width * static_cast<std::size_t>(x.rows() * x.cols()));
  out.append(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  detail::put_le<std::uint16_t>(out, kEmbeddingVersion);
  detail::put_le<std::uint16_t>(out, static_cast<std::uint16_t>(dtype));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.rows()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.cols()));
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (dtype == DType::float32) {
        const auto f = static_cast<float>(x(i, j));
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof bits);
        detail::put_le(out, bits);
      } else {
        const double v = x(i, j);
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        detail::put_le(out, bits);
      }
    }
  }
  return out;
}

inline Matrix decode_embeddings(std::string_view bytes,
                                const std::string& origin = "<memory>") {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < kEmbeddingHeaderBytes ||
      std::memcmp(bytes.data(), kEmbeddingMagic.data(), 4) != 0) {
    throw SchemaError(origin + ": not an EMB1 embedding file");
  }
  const auto version = detail::get_le<std::uint16_t>(p + 4);
  const auto dtype = detail::get_le<std::uint16_t>(p + 6);
  const auto rows = detail::get_le<std::uint32_t>(p + 8);
  const auto cols = detail::get_le<std::uint32_t>(p + 12);
  if (version != kEmbeddingVersion) {
    throw SchemaError(origin + ": unsupported version " + std::to_string(version));
  }
  if (dtype != 1 && dtype != 2) {
    throw SchemaError(origin + ": unknown dtype code " + std::to_string(dtype));
  }
  if (rows == 0 || cols == 0) throw SchemaError(origin + ": empty matrix");
  const std::size_t width = dtype == 1 ? 4 : 8;
  const std::size_t expected =
      kEmbeddingHeaderBytes + width * std::size_t{rows} * std::size_t{cols};
  if (bytes.size() != expected) {
    throw SchemaError(origin + ": payload is " +
                      std::to_string(bytes.size() - kEmbeddingHeaderBytes) +
                      " bytes, header implies " +
                      std::to_string(expected - kEmbeddingHeaderBytes));
  }
  Matrix x(static_cast<Index>(rows), static_cast<Index>(cols));
  const unsigned char* q = p + kEmbeddingHeaderBytes;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (width == 4) {
        const auto bits = detail::get_le<std::uint32_t>(q);
        float f;
        std::memcpy(&f, &bits, sizeof f);
        x(i, j) = f;
      } else {
        const auto bits = detail::get_le<std::uint64_t>(q);
        std::memcpy(&x(i, j), &bits, sizeof bits);
      }
      q += width;
    }
  }
  if (!x.allFinite()) throw SchemaError(origin + ": non-finite value in payload");
  return x;
}

// Writes `x` and returns the SHA-256 of the file contents.
inline std::string save_embeddings(const Matrix& x, const fs::path& path,
                                   DType dtype = DType::float32) {
  const std::string bytes = encode_embeddings(x, dtype);
  detail::write_file(path, bytes);
  return sha256_hex(bytes);
}

inline Matrix load_embeddings(const fs::path& path) {
  return decode_embeddings(detail::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Text side files

inline std::string encode_labels(const std::vector<int>& labels) {
  std::string out;
  for (int y : labels) out += std::to_string(y) + '\n';
  return out;
}

inline std::string encode_reals(const Vector& v) {
  std::string out;
  char buf[32];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v(i));
    out += buf;
  }
  return out;
}

inline std::string encode_splits(const std::vector<Split>& splits) {
  std::string out;
  for (Split s : splits) {
    out += to_string(s);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace detail

inline std::vector<int> parse_labels(const std::string& text,
                                     const std::string& origin) {
  std::vector<int> labels;
  for (const auto& line : detail::nonempty_lines(text)) {
    std::size_t used = 0;
    int y = 0;
    try {
      y = std::stoi(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != line.size()) {
      throw SchemaError(origin + ": bad label '" + line + "'");
    }
    labels.push_back(y);
  }
  return labels;
}

inline Vector parse_reals(const std::string& text, const std::string& origin) {
  const auto lines = detail::nonempty_lines(text);
  Vector v(static_cast<Index>(lines.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(lines[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != lines[i].size() || !std::isfinite(x)) {
      throw SchemaError(origin + ": bad value '" + lines[i] + "'");
    }
    v(static_cast<Index>(i)) = x;
  }
  return v;
}

inline std::vector<Split> parse_splits(const std::string& text,
                                       const std::string& origin) {
  std::vector<Split> splits;
  for (const auto& line : detail::nonempty_lines(text)) {
    const auto s = parse_split(line);
    if (!s) throw SchemaError(origin + ": bad split tag '" + line + "'");
    splits.push_back(*s);
  }
  return splits;
}

// ---------------------------------------------------------------------------
// Manifests

inline nlohmann::ordered_json to_json(const DatasetManifest& m) {
  nlohmann::ordered_json j;
  j["name"] = m.name;
  j["task"] = std::string(to_string(m.task));
  if (m.n_classes) {
    j["n_classes"] = *m.n_classes;
  } else {
    j["n_classes"] = nullptr;
  }
  j["files"] = m.files;
  j["model_name"] = m.model_name;
  j["dim"] = m.dim;
  j["count"] = m.count;
  j["checksums"] = m.checksums;
  if (m.whitening) j["whitening"] = *m.whitening;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j,
                                          const std::string& origin) {
  try {
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    const auto task = j.at("task").get<std::string>();
    if (task == "classification") {
      m.task = TaskType::classification;
    } else if (task == "sts") {
      m.task = TaskType::sts;
    } else {
      throw SchemaError(origin + ": unknown task '" + task + "'");
    }
    if (j.contains("n_classes") && !j.at("n_classes").is_null()) {
      m.n_classes = j.at("n_classes").get<int>();
    }
    m.files = j.at("files").get<std::map<std::string, std::string>>();
    m.model_name = j.value("model_name", std::string{});
    m.dim = j.at("dim").get<Index>();
    m.count = j.at("count").get<Index>();
    m.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
    if (j.contains("whitening")) m.whitening = j.at("whitening");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(origin + ": " + e.what());
  }
}

inline void write_manifest(const DatasetManifest& m, const fs::path& path) {
  detail::write_file(path, to_json(m).dump(2) + "\n");
}

inline DatasetManifest read_manifest(const fs::path& path) {
  const std::string text = detail::read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return manifest_from_json(j, path.string());
}

inline std::vector<std::string> required_roles(TaskType task) {
  if (task == TaskType::classification) return {"embeddings", "labels"};
  return {"left", "right", "gold"};
}

struct LoadedDataset {
  DatasetManifest manifest;
  fs::path directory;
  std::variant<LabeledEmbeddingSet, SentencePairSet> data;

  bool is_classification() const {
    return std::holds_alternative<LabeledEmbeddingSet>(data);
  }
  const LabeledEmbeddingSet& labeled() const {
    return std::get<LabeledEmbeddingSet>(data);
  }
  const SentencePairSet& pairs() const { return std::get<SentencePairSet>(data); }
};

namespace detail {

// Reads every file named in the manifest and checks its SHA-256 before
// anything is parsed.
inline std::map<std::string, std::string> read_verified(
    const DatasetManifest& m, const fs::path& dir) {
  for (const auto& role : required_roles(m.task)) {
    if (!m.files.count(role)) {
      throw SchemaError(m.name + ": missing required file role '" + role + "'");
    }
  }
  std::map<std::string, std::string> contents;
  for (const auto& [role, rel] : m.files) {
    const auto it = m.checksums.find(role);
    if (it == m.checksums.end()) {
      throw SchemaError(m.name + ": no checksum for role '" + role + "'");
    }
    std::string bytes = read_file(dir / rel);
    if (sha256_hex(bytes) != it->second) {
      throw IntegrityError(m.name + ": checksum mismatch for " +
                           (dir / rel).string());
    }
    contents.emplace(role, std::move(bytes));
  }
  return contents;
}

inline void check_shape(const DatasetManifest& m, const Matrix& x,
                        const std::string& role) {
  if (x.cols() != m.dim) {
    throw SchemaError(m.name + ": " + role + " has dim " +
                      std::to_string(x.cols()) + ", manifest declares " +
                      std::to_string(m.dim));
  }
  if (x.rows() != m.count) {
    throw SchemaError(m.name + ": " + role + " has " + std::to_string(x.rows()) +
                      " rows, manifest declares " + std::to_string(m.count));
  }
}

}  // namespace detail

inline LoadedDataset load_dataset(const fs::path& manifest_path) {
  const DatasetManifest m = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  auto contents = detail::read_verified(m, dir);
  auto origin = [&](const std::string& role) {
    return (dir / m.files.at(role)).string();
  };

  if (m.task == TaskType::classification) {
    LabeledEmbeddingSet set;
    set.embeddings = decode_embeddings(contents.at("embeddings"), origin("embeddings"));
    detail::check_shape(m, set.embeddings, "embeddings");
    set.labels = parse_labels(contents.at("labels"), origin("labels"));
    if (set.labels.size() != static_cast<std::size_t>(m.count)) {
      throw SchemaError(m.name + ": label count " +
                        std::to_string(set.labels.size()) + " != " +
                        std::to_string(m.count));
    }
    int max_label = -1;
    for (int y : set.labels) {
      if (y < 0) throw SchemaError(m.name + ": negative label");
      max_label = std::max(max_label, y);
    }
    set.n_classes = m.n_classes.value_or(max_label + 1);
    if (max_label >= set.n_classes) {
      throw SchemaError(m.name + ": label " + std::to_string(max_label) +
                        " outside declared n_classes");
    }
    if (contents.count("splits")) {
      auto splits = parse_splits(contents.at("splits"), origin("splits"));
      if (splits.size() != static_cast<std::size_t>(m.count)) {
        throw SchemaError(m.name + ": splits file must have one tag per row");
      }
      set.splits = std::move(splits);
    }
    try {
      validate(set);
    } catch (const InvalidInput& e) {
      throw SchemaError(m.name + ": " + e.what());
    }
    return {m, dir, std::move(set)};
  }

  SentencePairSet pairs;
  pairs.left = decode_embeddings(contents.at("left"), origin("left"));
  pairs.right = decode_embeddings(contents.at("right"), origin("right"));
  detail::check_shape(m, pairs.left, "left");
  detail::check_shape(m, pairs.right, "right");
  pairs.gold = parse_reals(contents.at("gold"), origin("gold"));
  if (pairs.gold.size() != m.count) {
    throw SchemaError(m.name + ": gold count does not match pair count");
  }
  return {m, dir, std::move(pairs)};
}

// Writes a classification dataset directory and its manifest.json.
inline DatasetManifest write_classification_dataset(
    const LabeledEmbeddingSet& set, const fs::path& dir, const std::string& name,
    const std::string& model_name,
    const std::optional<nlohmann::json>& whitening = std::nullopt) {
  validate(set);
  fs::create_directories(dir);
  DatasetManifest m;
  m.name = name;
  m.task = TaskType::classification;
  m.n_classes = set.n_classes;
  m.model_name = model_name;
  m.dim = set.embeddings.cols();
  m.count = set.embeddings.rows();
  m.whitening = whitening;
  m.files["embeddings"] = "embeddings.emb";
  m.checksums["embeddings"] = save_embeddings(set.embeddings, dir / "embeddings.emb");
  const std::string labels = encode_labels(set.labels);
  detail::write_file(dir / "labels.txt", labels);
  m.files["labels"] = "labels.txt";
  m.checksums["labels"] = sha256_hex(labels);
  if (set.splits) {
    const std::string splits = encode_splits(*set.splits);
    detail::write_file(dir / "splits.txt", splits);
    m.files["splits"] = "splits.txt";
    m.checksums["splits"] = sha256_hex(splits);
  }
  write_manifest(m, dir / "manifest.json");
  return m;
}

inline DatasetManifest write_sts_dataset(
    const SentencePairSet& pairs, const fs::path& dir, const std::string& name,
    const std::string& model_name,
    const std::optional<nlohmann::json>& whitening = std::nullopt) {
  validate_pairs(pairs);
  fs::create_directories(dir);
  DatasetManifest m;
  m.name = name;
  m.task = TaskType::sts;
  m.model_name = model_name;
  m.dim = pairs.left.cols();
  m.count = pairs.left.rows();
  m.whitening = whitening;
  m.files["left"] = "left.emb";
  m.checksums["left"] = save_embeddings(pairs.left, dir / "left.emb");
  m.files["right"] = "right.emb";
  m.checksums["right"] = save_embeddings(pairs.right, dir / "right.emb");
  const std::string gold = encode_reals(pairs.gold);
  detail::write_file(dir / "gold.txt", gold);
  m.files["gold"] = "gold.txt";
  m.checksums["gold"] = sha256_hex(gold);
  write_manifest(m, dir / "manifest.json");
  return m;
}

// ---------------------------------------------------------------------------
// Whitening model files: model.json plus mean and W as float64 EMB1 files.

inline void save_whitening_model(const WhiteningModel& model, FitScope scope,
                                 const fs::path& dir) {
  fs::create_directories(dir);
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(model.kind));
  j["fit_scope"] = std::string(to_string(scope));
  j["eps_relative"] = model.eps_relative;
  j["eps_used"] = model.eps_used;
  j["fit_dims"] = {model.fit_rows, model.fit_cols};
  j["files"] = {{"mean", "model_mean.emb"}, {"w", "model_w.emb"}};
  j["checksums"] = {
      {"mean", save_embeddings(model.mean.transpose(), dir / "model_mean.emb",
                               DType::float64)},
      {"w", save_embeddings(model.w, dir / "model_w.emb", DType::float64)}};
  detail::write_file(dir / "model.json", j.dump(2) + "\n");
}

inline WhiteningModel load_whitening_model(const fs::path& model_json) {
  const std::string origin = model_json.string();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(model_json));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(origin + ": " + e.what());
  }
  const fs::path dir = model_json.parent_path();
  WhiteningModel model;
  try {
    const auto kind = parse_whitening_kind(j.at("kind").get<std::string>());
    if (!kind) throw SchemaError(origin + ": unknown whitening kind");
    model.kind = *kind;
    model.eps_relative = j.at("eps_relative").get<double>();
    model.eps_used = j.at("eps_used").get<double>();
    model.fit_rows = j.at("fit_dims").at(0).get<Index>();
    model.fit_cols = j.at("fit_dims").at(1).get<Index>();
    for (const char* role : {"mean", "w"}) {
      const auto rel = j.at("files").at(role).get<std::string>();
      const std::string bytes = detail::read_file(dir / rel);
      if (sha256_hex(bytes) != j.at("checksums").at(role).get<std::string>()) {
        throw IntegrityError(origin + ": checksum mismatch for " + rel);
      }
      const Matrix m = decode_embeddings(bytes, (dir / rel).string());
      if (std::string(role) == "mean") {
        model.mean = m.row(0).transpose();
        if (m.rows() != 1) throw SchemaError(origin + ": mean must be one row");
      } else {
        model.w = m;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(origin + ": " + e.what());
  }
  const Index d = model.fit_cols;
  if (model.mean.size() != d || model.w.rows() != d || model.w.cols() != d) {
    throw SchemaError(origin + ": stored matrices do not match fit_dims");
  }
  return model;
}

// ---------------------------------------------------------------------------
// CSV import: one embedding per line, comma separated, optionally followed by
// an integer label column.

struct CsvImport {
  Matrix embeddings;
  std::optional<std::vector<int>> labels;
};

inline CsvImport import_csv(const fs::path& path, bool last_column_is_label) {
  const auto lines = detail::nonempty_lines(detail::read_file(path));
  if (lines.empty()) throw SchemaError(path.string() + ": no rows");
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t width = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::vector<double> values;
    std::stringstream ss(lines[r]);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v)) {
        throw SchemaError(path.string() + ":" + std::to_string(r + 1) +
                          ": bad number '" + cell + "'");
      }
      values.push_back(v);
    }
    if (last_column_is_label) {
      if (values.size() < 2) {
        throw SchemaError(path.string() + ": row needs values and a label");
      }
      const double y = values.back();
      if (y != std::floor(y) || y < 0) {
        throw SchemaError(path.string() + ":" + std::to_string(r + 1) +
                          ": label must be a non-negative integer");
      }
      labels.push_back(static_cast<int>(y));
      values.pop_back();
    }
    if (r == 0) width = values.size();
    if (values.size() != width) {
      throw SchemaError(path.string() + ":" + std::to_string(r + 1) +
                        ": ragged row");
    }
    rows.push_back(std::move(values));
  }
  CsvImport out;
  out.embeddings.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      out.embeddings(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  if (last_column_is_label) out.labels = std::move(labels);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

struct SynthSpec {
  TaskType task = TaskType::classification;
  Index n = 1000;  // rows (classification) or pairs (sts)
  Index d = 16;
  int n_classes = 2;
  // Classification: class centroids sit at (separation / 2) * s_c with s_c a
  // random sign vector, so every coordinate is offset by `separation` noise
  // standard deviations between classes whose signs differ.
  double separation = 4.0;
  // Strength of a shared direction u: each row gets anisotropy * (1 + g) * u
  // with g standard normal, i.e. a common offset plus extra variance along u.
  double anisotropy = 0.0;
  std::uint64_t seed = 0;
  bool with_splits = false;
  std::string name = "synthetic";
  std::string model_name = "synthetic";
};

inline std::variant<LabeledEmbeddingSet, SentencePairSet> synth_data(
    const SynthSpec& spec) {
  if (spec.n < 2 || spec.d < 1) throw InvalidInput("synth: need n >= 2, d >= 1");
  if (spec.task == TaskType::classification &&
      (spec.n_classes < 2 || spec.n < spec.n_classes)) {
    throw InvalidInput("synth: need 2 <= n_classes <= n");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian_row = [&](Index d) {
    Vector v(d);
    for (Index j = 0; j < d; ++j) v(j) = normal(rng);
    return v;
  };
  Vector u = gaussian_row(spec.d);
  u /= u.norm();
  auto bias = [&]() -> Vector { return spec.anisotropy * (1.0 + normal(rng)) * u; };

  if (spec.task == TaskType::classification) {
    std::bernoulli_distribution coin(0.5);
    std::vector<Vector> centroids;
    for (int c = 0; c < spec.n_classes; ++c) {
      Vector s(spec.d);
      for (Index j = 0; j < spec.d; ++j) s(j) = coin(rng) ? 1.0 : -1.0;
      centroids.push_back(0.5 * spec.separation * s);
    }
    LabeledEmbeddingSet set;
    set.n_classes = spec.n_classes;
    set.embeddings.resize(spec.n, spec.d);
    for (Index i = 0; i < spec.n; ++i) {
      const int y = static_cast<int>(i % spec.n_classes);
      set.labels.push_back(y);
      set.embeddings.row(i) =
          (centroids[static_cast<std::size_t>(y)] + gaussian_row(spec.d) + bias())
              .transpose();
    }
    if (spec.with_splits) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<Split> splits;
      for (Index i = 0; i < spec.n; ++i) {
        const double r = unit(rng);
        splits.push_back(r < 0.8 ? Split::train : r < 0.9 ? Split::dev : Split::test);
      }
      set.splits = std::move(splits);
    }
    return set;
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SentencePairSet pairs;
  pairs.left.resize(spec.n, spec.d);
  pairs.right.resize(spec.n, spec.d);
  pairs.gold.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) {
    const double rho = unit(rng);
    const Vector a = gaussian_row(spec.d);
    const Vector noise = gaussian_row(spec.d);
    const Vector b = rho * a + std::sqrt(1.0 - rho * rho) * noise;
    pairs.left.row(i) = (a + bias()).transpose();
    pairs.right.row(i) = (b + bias()).transpose();
    pairs.gold(i) = 5.0 * rho;
  }
  return pairs;
}

// Generates a fixture and writes it as a dataset directory. Embeddings are
// stored as float32, so reloading yields the float32-rounded values.
inline DatasetManifest synth_fixture(const SynthSpec& spec, const fs::path& out_dir) {
  auto data = synth_data(spec);
  if (auto* set = std::get_if<LabeledEmbeddingSet>(&data)) {
    return write_classification_dataset(*set, out_dir, spec.name, spec.model_name);
  }
  return write_sts_dataset(std::get<SentencePairSet>(data), out_dir, spec.name,
                           spec.model_name);
}

}  // namespace whitekit
