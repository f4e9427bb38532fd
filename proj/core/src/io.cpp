#include "attndec/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "attndec/errors.hpp"

namespace fs = std::filesystem;

namespace attndec::io {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

constexpr char kMagic[4] = {'M', 'V', 'T', 'S'};

static_assert(std::endian::native == std::endian::little,
              "matrix container assumes a little-endian host");

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

void ensure_parent_dir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
    if (ec) throw io_error("cannot create directory " + parent.string() + ": " + ec.message());
  }
}

std::string join(const std::string& root, const std::string& rel) {
  if (root.empty()) return rel;
  return (fs::path(root) / rel).string();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// ---- raw container ----------------------------------------------------------

using Meta = std::map<std::string, std::string>;

void write_meta(const std::string& path, const Meta& meta) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  // Fixed key order keeps output byte-stable.
  bool first = true;
  for (const char* key : {"rate", "labels", "shape", "object"}) {
    const auto it = meta.find(key);
    if (it == meta.end()) continue;
    if (!first) out << ' ';
    out << key << '=' << it->second;
    first = false;
  }
  out << '\n';
  if (!out) throw io_error("write failed: " + path);
}

Meta read_meta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("missing sidecar file: " + path);
  std::string line;
  std::getline(in, line);
  Meta meta;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw io_error(path + ": malformed entry '" + tok + "'");
    meta[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return meta;
}

void write_raw(const std::string& path, const MatrixXd& data, const Meta& meta) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  const auto t = static_cast<std::uint32_t>(data.rows());
  const auto d = static_cast<std::uint32_t>(data.cols());
  const std::uint32_t reserved = 0;
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&t), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  std::vector<double> row(static_cast<size_t>(data.cols()));
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index c = 0; c < data.cols(); ++c) row[static_cast<size_t>(c)] = data(r, c);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw io_error("write failed: " + path);
  write_meta(path + ".meta", meta);
}

struct RawMatrix {
  MatrixXd data;
  Meta meta;
};

RawMatrix read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  char magic[4];
  std::uint32_t t = 0;
  std::uint32_t d = 0;
  std::uint32_t reserved = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&t), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw io_error(path + ": not a matrix container (bad magic)");
  }
  RawMatrix raw;
  raw.data.resize(static_cast<Index>(t), static_cast<Index>(d));
  std::vector<double> row(d);
  for (std::uint32_t r = 0; r < t; ++r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) {
      throw io_error(path + ": truncated payload (declared " + std::to_string(t) + "x" +
                     std::to_string(d) + ")");
    }
    for (std::uint32_t c = 0; c < d; ++c) raw.data(r, c) = row[c];
  }
  // Declared size must match the payload exactly.
  char extra;
  if (in.read(&extra, 1)) {
    throw io_error(path + ": trailing bytes beyond declared " + std::to_string(t) + "x" +
                   std::to_string(d) + " payload");
  }
  raw.meta = read_meta(path + ".meta");
  return raw;
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw invalid_argument(what + ": cannot parse number '" + text + "'");
  }
}

long long parse_int(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw invalid_argument(what + ": cannot parse integer '" + text + "'");
  }
}

}  // namespace

// ---- matrix container --------------------------------------------------------

void write_matrix(const std::string& path, const TimeSeries& series) {
  series.validate_shape();
  Meta meta;
  meta["rate"] = fmt(series.rate);
  std::string labels;
  for (size_t i = 0; i < series.labels.size(); ++i) {
    if (i) labels.push_back(',');
    labels += series.labels[i];
  }
  meta["labels"] = labels;
  write_raw(path, series.data, meta);
}

TimeSeries read_matrix(const std::string& path) {
  RawMatrix raw = read_raw(path);
  if (!raw.meta.count("rate")) throw io_error(path + ".meta: missing rate");
  if (!raw.meta.count("labels")) throw io_error(path + ".meta: missing labels");
  TimeSeries series;
  series.rate = parse_real(raw.meta["rate"], path + ".meta rate");
  series.labels = split(raw.meta["labels"], ',');
  series.data = std::move(raw.data);
  if (static_cast<Index>(series.labels.size()) != series.data.cols()) {
    throw io_error(path + ".meta: " + std::to_string(series.labels.size()) + " labels for " +
                   std::to_string(series.data.cols()) + " columns");
  }
  series.validate_shape();
  return series;
}

void write_csv(const std::string& path, const TimeSeries& series) {
  series.validate_shape();
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  for (size_t i = 0; i < series.labels.size(); ++i) {
    if (i) out << ',';
    out << series.labels[i];
  }
  out << '\n';
  out << std::setprecision(17);
  for (Index r = 0; r < series.data.rows(); ++r) {
    for (Index c = 0; c < series.data.cols(); ++c) {
      if (c) out << ',';
      out << series.data(r, c);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
  Meta meta;
  meta["rate"] = fmt(series.rate);
  write_meta(path + ".meta", meta);
}

TimeSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  TimeSeries series;
  series.labels = split(line, ',');
  const size_t d = series.labels.size();
  std::vector<double> values;
  Index rows = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != d) {
      throw io_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(d) +
                     " cells, got " + std::to_string(cells.size()));
    }
    for (const std::string& cell : cells) {
      values.push_back(parse_real(cell, path + ":" + std::to_string(line_no)));
    }
    ++rows;
  }
  if (rows == 0) throw io_error(path + ": no data rows");
  series.data.resize(rows, static_cast<Index>(d));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < static_cast<Index>(d); ++c) {
      series.data(r, c) = values[static_cast<size_t>(r) * d + static_cast<size_t>(c)];
    }
  }
  // The sidecar is optional for externally produced CSVs; rate stays 0 then.
  if (fs::exists(path + ".meta")) {
    Meta meta = read_meta(path + ".meta");
    if (meta.count("rate")) series.rate = parse_real(meta["rate"], path + ".meta rate");
  }
  return series;
}

TimeSeries read_series(const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") return read_csv(path);
  return read_matrix(path);
}

void write_series(const std::string& path, const TimeSeries& series) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    write_csv(path, series);
  } else {
    write_matrix(path, series);
  }
}

// ---- flow / mask containers ----------------------------------------------------

namespace {

std::array<Index, 3> parse_shape(const Meta& meta, const std::string& path) {
  const auto it = meta.find("shape");
  if (it == meta.end()) throw io_error(path + ".meta: missing shape");
  const std::vector<std::string> parts = split(it->second, 'x');
  if (parts.size() != 3) throw io_error(path + ".meta: shape must be HxWxC, got " + it->second);
  return {static_cast<Index>(parse_int(parts[0], path + " shape H")),
          static_cast<Index>(parse_int(parts[1], path + " shape W")),
          static_cast<Index>(parse_int(parts[2], path + " shape C"))};
}

}  // namespace

void write_flow(const std::string& path, const features::FlowField& flow) {
  if (flow.frames.empty()) throw invalid_argument("write_flow: empty flow field");
  const Index h = flow.frames[0].vx.rows();
  const Index w = flow.frames[0].vx.cols();
  MatrixXd data(static_cast<Index>(flow.frames.size()), h * w * 2);
  for (size_t f = 0; f < flow.frames.size(); ++f) {
    const features::FlowFrame& fr = flow.frames[f];
    if (fr.vx.rows() != h || fr.vx.cols() != w || fr.vy.rows() != h || fr.vy.cols() != w) {
      throw invalid_argument("write_flow: frame " + std::to_string(f) + " shape differs");
    }
    Index col = 0;
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) data(static_cast<Index>(f), col++) = fr.vx(r, c);
    }
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) data(static_cast<Index>(f), col++) = fr.vy(r, c);
    }
  }
  Meta meta;
  meta["rate"] = fmt(flow.frame_rate);
  meta["shape"] = std::to_string(h) + "x" + std::to_string(w) + "x2";
  write_raw(path, data, meta);
}

features::FlowField read_flow(const std::string& path) {
  RawMatrix raw = read_raw(path);
  const auto [h, w, ch] = parse_shape(raw.meta, path);
  if (ch != 2) throw io_error(path + ": flow container must have shape HxWx2");
  if (raw.data.cols() != h * w * 2) {
    throw io_error(path + ": payload width " + std::to_string(raw.data.cols()) +
                   " does not match shape");
  }
  features::FlowField flow;
  if (!raw.meta.count("rate")) throw io_error(path + ".meta: missing rate");
  flow.frame_rate = parse_real(raw.meta["rate"], path + ".meta rate");
  flow.frames.resize(static_cast<size_t>(raw.data.rows()));
  for (Index f = 0; f < raw.data.rows(); ++f) {
    features::FlowFrame& fr = flow.frames[static_cast<size_t>(f)];
    fr.vx.resize(h, w);
    fr.vy.resize(h, w);
    Index col = 0;
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) fr.vx(r, c) = raw.data(f, col++);
    }
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) fr.vy(r, c) = raw.data(f, col++);
    }
  }
  return flow;
}

void write_mask(const std::string& path, const features::ObjectMask& mask, double frame_rate) {
  if (mask.frames.empty()) throw invalid_argument("write_mask: empty mask");
  const Index h = mask.frames[0].rows();
  const Index w = mask.frames[0].cols();
  MatrixXd data(static_cast<Index>(mask.frames.size()), h * w);
  for (size_t f = 0; f < mask.frames.size(); ++f) {
    const auto& m = mask.frames[f];
    if (m.rows() != h || m.cols() != w) {
      throw invalid_argument("write_mask: frame " + std::to_string(f) + " shape differs");
    }
    Index col = 0;
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) data(static_cast<Index>(f), col++) = m(r, c) ? 1.0 : 0.0;
    }
  }
  Meta meta;
  meta["rate"] = fmt(frame_rate);
  meta["shape"] = std::to_string(h) + "x" + std::to_string(w) + "x1";
  if (!mask.object_id.empty()) meta["object"] = mask.object_id;
  write_raw(path, data, meta);
}

features::ObjectMask read_mask(const std::string& path) {
  RawMatrix raw = read_raw(path);
  const auto [h, w, ch] = parse_shape(raw.meta, path);
  if (ch != 1) throw io_error(path + ": mask container must have shape HxWx1");
  if (raw.data.cols() != h * w) {
    throw io_error(path + ": payload width " + std::to_string(raw.data.cols()) +
                   " does not match shape");
  }
  features::ObjectMask mask;
  if (raw.meta.count("object")) mask.object_id = raw.meta["object"];
  mask.frames.resize(static_cast<size_t>(raw.data.rows()));
  for (Index f = 0; f < raw.data.rows(); ++f) {
    auto& m = mask.frames[static_cast<size_t>(f)];
    m.resize(h, w);
    Index col = 0;
    for (Index r = 0; r < h; ++r) {
      for (Index c = 0; c < w; ++c) m(r, c) = raw.data(f, col++) != 0.0;
    }
  }
  return mask;
}

// ---- dataset manifest ----------------------------------------------------------

namespace {
constexpr const char* kManifestHeader = "attndec-dataset v1";
}

DatasetManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest: " + path);
  DatasetManifest manifest;
  manifest.root = fs::path(path).parent_path().string();
  std::string line;
  if (!std::getline(in, line) || line != kManifestHeader) {
    throw invalid_dataset(path + ": not a dataset manifest (expected '" +
                          std::string(kManifestHeader) + "')");
  }
  int line_no = 1;
  bool have_rate = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    if (tok == "rate") {
      std::string value;
      if (!(ss >> value)) throw invalid_dataset(where + ": missing rate value");
      manifest.rate = parse_real(value, where);
      have_rate = true;
    } else if (tok == "subjects") {
      std::string value;
      if (!(ss >> value)) throw invalid_dataset(where + ": missing subject count");
      manifest.n_subjects = static_cast<int>(parse_int(value, where));
    } else if (tok == "trial") {
      ManifestEntry entry;
      bool saw_subject = false, saw_pair = false, saw_pres = false, saw_att = false;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw invalid_dataset(where + ": malformed token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "subject") {
          entry.subject_id = static_cast<int>(parse_int(value, where));
          saw_subject = true;
        } else if (key == "pair") {
          entry.pair_id = static_cast<int>(parse_int(value, where));
          saw_pair = true;
        } else if (key == "presentation") {
          entry.presentation = static_cast<int>(parse_int(value, where));
          saw_pres = true;
        } else if (key == "attended") {
          entry.attended_object = static_cast<int>(parse_int(value, where));
          saw_att = true;
        } else if (key == "feat1") {
          entry.feature_paths[0] = value;
        } else if (key == "feat2") {
          entry.feature_paths[1] = value;
        } else {
          entry.modality_paths[key] = value;
        }
      }
      if (!saw_subject || !saw_pair || !saw_pres || !saw_att) {
        throw invalid_dataset(where + ": trial line missing subject/pair/presentation/attended");
      }
      if (entry.feature_paths[0].empty() || entry.feature_paths[1].empty()) {
        throw invalid_dataset(where + ": trial line missing feat1/feat2");
      }
      if (entry.modality_paths.empty()) {
        throw invalid_dataset(where + ": trial line lists no modalities");
      }
      manifest.entries.push_back(std::move(entry));
    } else {
      throw invalid_dataset(where + ": unknown directive '" + tok + "'");
    }
  }
  if (!have_rate) throw invalid_dataset(path + ": missing rate line");
  if (manifest.entries.empty()) throw invalid_dataset(path + ": no trial lines");
  return manifest;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << kManifestHeader << '\n';
  out << "rate " << fmt(manifest.rate) << '\n';
  out << "subjects " << manifest.n_subjects << '\n';
  for (const ManifestEntry& entry : manifest.entries) {
    out << "trial subject=" << entry.subject_id << " pair=" << entry.pair_id
        << " presentation=" << entry.presentation << " attended=" << entry.attended_object;
    for (const auto& [name, rel] : entry.modality_paths) out << ' ' << name << '=' << rel;
    out << " feat1=" << entry.feature_paths[0] << " feat2=" << entry.feature_paths[1] << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

std::vector<decoding::TrialRecord> load_records(const DatasetManifest& manifest) {
  if (manifest.rate <= 0.0) throw invalid_dataset("manifest rate must be positive");
  std::map<std::string, TimeSeries> feature_cache;
  const auto load_feature = [&](const std::string& rel) -> const TimeSeries& {
    auto it = feature_cache.find(rel);
    if (it == feature_cache.end()) {
      it = feature_cache.emplace(rel, read_series(join(manifest.root, rel))).first;
    }
    return it->second;
  };

  std::vector<decoding::TrialRecord> records;
  records.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    decoding::TrialRecord rec;
    rec.subject_id = entry.subject_id;
    rec.pair_id = entry.pair_id;
    rec.presentation = entry.presentation;
    rec.attended_object = entry.attended_object;
    for (const auto& [name, rel] : entry.modality_paths) {
      rec.modalities[name] = read_series(join(manifest.root, rel));
    }
    rec.features[0] = load_feature(entry.feature_paths[0]);
    rec.features[1] = load_feature(entry.feature_paths[1]);
    rec.validate();
    const std::string where = "record subject=" + std::to_string(rec.subject_id) +
                              " pair=" + std::to_string(rec.pair_id) +
                              " presentation=" + std::to_string(rec.presentation);
    if (rec.modalities.begin()->second.rate != manifest.rate) {
      throw invalid_dataset(where + ": series rate " +
                            fmt(rec.modalities.begin()->second.rate) +
                            " does not match manifest rate " + fmt(manifest.rate));
    }
    records.push_back(std::move(rec));
  }

  // Pairwise presentation structure: both presentations, opposite attention.
  std::map<std::pair<int, int>, std::map<int, int>> seen;  // (subject,pair) -> presentation -> attended
  for (const decoding::TrialRecord& rec : records) {
    auto& pres = seen[{rec.subject_id, rec.pair_id}];
    if (pres.count(rec.presentation)) {
      throw invalid_dataset("duplicate presentation " + std::to_string(rec.presentation) +
                            " for subject " + std::to_string(rec.subject_id) + " pair " +
                            std::to_string(rec.pair_id));
    }
    pres[rec.presentation] = rec.attended_object;
  }
  for (const auto& [key, pres] : seen) {
    if (pres.size() != 2 || !pres.count(1) || !pres.count(2)) {
      throw invalid_dataset("subject " + std::to_string(key.first) + " pair " +
                            std::to_string(key.second) + " does not have both presentations");
    }
    if (pres.at(1) == pres.at(2)) {
      throw invalid_dataset("subject " + std::to_string(key.first) + " pair " +
                            std::to_string(key.second) +
                            " attends the same object in both presentations");
    }
  }
  return records;
}

// ---- flat key-value config -------------------------------------------------------

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str(), path);
}

namespace {
std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}
}  // namespace

KeyValueConfig KeyValueConfig::from_string(const std::string& text, const std::string& origin) {
  KeyValueConfig kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw invalid_argument(origin + ":" + std::to_string(line_no) +
                             ": expected 'key = value', got '" + trimmed + "'");
    }
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) {
      throw invalid_argument(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    if (kv.values_.count(key)) {
      throw invalid_argument(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                             "'");
    }
    kv.values_[key] = value;
    kv.consumed_[key] = false;
  }
  return kv;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return it->second;
}

double KeyValueConfig::get_real(const std::string& key, double fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return parse_real(it->second, origin_ + " key '" + key + "'");
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  return parse_int(it->second, origin_ + " key '" + key + "'");
}

std::uint64_t KeyValueConfig::get_seed(const std::string& key, std::uint64_t fallback) {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  consumed_[key] = true;
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw invalid_argument(origin_ + " key '" + key + "': cannot parse seed '" + it->second + "'");
  }
}

void KeyValueConfig::require_consumed() const {
  std::string unknown;
  for (const auto& [key, used] : consumed_) {
    if (!used) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty()) {
    throw invalid_argument(origin_ + ": unknown config key(s): " + unknown);
  }
}

// ---- reports -----------------------------------------------------------------------

namespace {
constexpr const char* kDecodeHeader = "attndec-decode v1";
constexpr const char* kIscHeader = "attndec-isc v1";

std::string join_reals(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out.push_back(',');
    out += fmt(values[i]);
  }
  return out;
}
}  // namespace

void write_decode_report(const std::string& path, const decoding::DecodeReport& report) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << kDecodeHeader << '\n';
  out << "task " << report.task_name << '\n';
  out << "modality " << report.modality << '\n';
  out << "region " << report.region << '\n';
  out << "confounds " << (report.confounds_regressed ? "regress" : "none") << '\n';
  out << "combine_gaze_v " << (report.combined_gaze_v ? 1 : 0) << '\n';
  out << "segment_seconds " << fmt(report.segment_seconds) << '\n';
  out << "seed " << report.seed << '\n';
  out << "k " << report.k << '\n';
  out << "sum_components " << report.sum_components << '\n';
  out << "n_failed_folds " << report.n_failed_folds << '\n';
  out << "mean_accuracy " << fmt(report.mean_accuracy) << '\n';
  out << "pooled_null_mean " << fmt(report.pooled_null_mean) << '\n';
  out << "pooled_null_threshold " << fmt(report.pooled_null_threshold) << '\n';
  for (const decoding::SubjectSummary& s : report.subjects) {
    out << "subject id=" << s.subject_id << " trials=" << s.n_trials << " correct=" << s.n_correct
        << " accuracy=" << fmt(s.accuracy) << " null_mean=" << fmt(s.null_mean)
        << " null_threshold=" << fmt(s.null_threshold) << " p=" << fmt(s.p) << '\n';
  }
  for (const decoding::FoldResult& f : report.folds) {
    out << "fold subject=" << f.subject_id << " pair=" << f.pair_id;
    if (f.failed) {
      out << " failed=1 error=" << f.error << '\n';
      continue;
    }
    out << " trials=" << f.n_trials << " correct=" << f.n_correct
        << " accuracy=" << fmt(f.accuracy()) << " corr_observed=" << fmt(f.corr_observed)
        << " corr_threshold=" << fmt(f.corr_null_threshold) << " corr_p=" << fmt(f.corr_p)
        << " train_corrs=" << join_reals(f.train_corrs) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_decisions_csv(const std::string& path, const decoding::DecodeReport& report) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "subject,pair,presentation,segment,start_s,score_target,score_imposter,correct\n";
  for (const decoding::TrialDecision& d : report.decisions) {
    out << d.subject_id << ',' << d.pair_id << ',' << d.presentation << ',' << d.segment_index
        << ',' << fmt(d.start_s) << ',' << fmt(d.score_target) << ',' << fmt(d.score_imposter)
        << ',' << (d.correct ? 1 : 0) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

void write_null_csv(const std::string& path, const decoding::DecodeReport& report) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "kind,owner,value\n";
  for (const decoding::SubjectSummary& s : report.subjects) {
    for (const double v : s.null_values) {
      out << "accuracy_null,subject_" << s.subject_id << ',' << fmt(v) << '\n';
    }
  }
  for (const decoding::FoldResult& f : report.folds) {
    for (const double v : f.corr_null) {
      out << "corr_null,subject_" << f.subject_id << "_pair_" << f.pair_id << ',' << fmt(v)
          << '\n';
    }
  }
  if (!out) throw io_error("write failed: " + path);
}

ReportSummary read_decode_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open report: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kDecodeHeader) {
    throw invalid_dataset(path + ": not a decode report");
  }
  ReportSummary summary;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    if (tok == "task") {
      ss >> summary.task_name;
    } else if (tok == "mean_accuracy") {
      std::string value;
      ss >> value;
      summary.mean_accuracy = parse_real(value, path + " mean_accuracy");
    } else if (tok == "subject") {
      int id = 0;
      double accuracy = 0.0;
      bool saw_id = false, saw_acc = false;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "id") {
          id = static_cast<int>(parse_int(value, path + " subject id"));
          saw_id = true;
        } else if (key == "accuracy") {
          accuracy = parse_real(value, path + " subject accuracy");
          saw_acc = true;
        }
      }
      if (!saw_id || !saw_acc) throw invalid_dataset(path + ": malformed subject line");
      summary.subject_ids.push_back(id);
      summary.accuracies.push_back(accuracy);
    }
  }
  if (summary.subject_ids.empty()) throw invalid_dataset(path + ": report lists no subjects");
  return summary;
}

void write_sync_report(const std::string& path, const std::vector<SyncFoldRow>& rows, int k,
                       bool confounds) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << kIscHeader << '\n';
  out << "k " << k << '\n';
  out << "confounds " << (confounds ? "regress" : "none") << '\n';
  for (const SyncFoldRow& row : rows) {
    out << "fold pair=" << row.pair_id << " isc=" << join_reals(row.isc)
        << " null_threshold=" << fmt(row.null_threshold) << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace attndec::io
