#include "snne/container.hpp"

#include <cstdio>
#include <cstring>

#include "snne/errors.hpp"

namespace snne {

std::uint32_t crc32(const std::uint8_t* data, std::size_t size, std::uint32_t seed) {
  static const auto table = [] {
    std::vector<std::uint32_t> t(256);
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = seed ^ 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

namespace {

constexpr const char* kMagic = "SNNE1";

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

struct BlobReader {
  const std::uint8_t* p;
  const std::uint8_t* end;
  std::string name;

  std::uint64_t u64() {
    if (end - p < 8) throw IoError("truncated blob: " + name);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  void done() const {
    if (p != end) throw IoError("trailing bytes in blob: " + name);
  }
};

void put_vector(std::vector<std::uint8_t>& out, const std::vector<double>& v) {
  put_u64(out, v.size());
  for (double e : v) put_f64(out, e);
}

std::vector<double> get_vector(BlobReader& r) {
  const std::uint64_t n = r.u64();
  std::vector<double> v(n);
  for (std::uint64_t i = 0; i < n; ++i) v[i] = r.f64();
  return v;
}

void put_matrix(std::vector<std::uint8_t>& out, const Matrix& m) {
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

Matrix get_matrix(BlobReader& r) {
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  Matrix m(rows, cols);
  for (std::uint64_t i = 0; i < rows; ++i)
    for (std::uint64_t j = 0; j < cols; ++j) m(i, j) = r.f64();
  return m;
}

std::vector<std::uint8_t> encode_pipeline(const FittedPipeline& p) {
  std::vector<std::uint8_t> out;
  put_f64(out, p.fill_value);
  put_u64(out, p.bin_edges.size());
  for (const std::vector<double>& edges : p.bin_edges) put_vector(out, edges);
  put_vector(out, p.feature_means);
  put_vector(out, p.feature_scales);
  put_u64(out, p.degenerate_columns.size());
  for (std::uint8_t b : p.degenerate_columns) out.push_back(b);
  put_matrix(out, p.pca_basis);
  put_vector(out, p.pca_mean);
  put_f64(out, p.target_mean);
  put_f64(out, p.target_scale);
  return out;
}

FittedPipeline decode_pipeline(BlobReader& r) {
  FittedPipeline p;
  p.fill_value = r.f64();
  const std::uint64_t n_cols = r.u64();
  p.bin_edges.resize(n_cols);
  for (std::uint64_t c = 0; c < n_cols; ++c) p.bin_edges[c] = get_vector(r);
  p.feature_means = get_vector(r);
  p.feature_scales = get_vector(r);
  const std::uint64_t n_deg = r.u64();
  p.degenerate_columns.resize(n_deg);
  for (std::uint64_t c = 0; c < n_deg; ++c) {
    if (r.end - r.p < 1) throw IoError("truncated blob: " + r.name);
    p.degenerate_columns[c] = *r.p++;
  }
  p.pca_basis = get_matrix(r);
  p.pca_mean = get_vector(r);
  p.target_mean = r.f64();
  p.target_scale = r.f64();
  r.done();
  return p;
}

std::vector<std::uint8_t> encode_member(const SnnModel& m) {
  std::vector<std::uint8_t> out;
  put_u64(out, m.spec.input_dim);
  put_u64(out, m.spec.hidden_dim);
  put_u64(out, m.spec.trunk_layers);
  put_u64(out, m.spec.upper_layers);
  put_u64(out, m.spec.projection_dim);
  put_u64(out, m.spec.normalize_projection ? 1 : 0);
  put_f64(out, m.spec.alpha_dropout_rate);
  put_u64(out, m.spec.seed);
  const std::vector<const Matrix*> params = m.parameters();
  put_u64(out, params.size());
  for (const Matrix* p : params) put_matrix(out, *p);
  return out;
}

SnnModel decode_member(BlobReader& r) {
  SnnSpec spec;
  spec.input_dim = r.u64();
  spec.hidden_dim = r.u64();
  spec.trunk_layers = r.u64();
  spec.upper_layers = r.u64();
  spec.projection_dim = r.u64();
  spec.normalize_projection = r.u64() != 0;
  spec.alpha_dropout_rate = r.f64();
  spec.seed = r.u64();
  SnnModel model = lecun_init(spec, spec.seed);
  std::vector<Matrix*> params = model.parameters();
  const std::uint64_t count = r.u64();
  if (count != params.size()) throw IoError("member blob: parameter count mismatch");
  for (Matrix* p : params) {
    Matrix stored = get_matrix(r);
    if (stored.rows() != p->rows() || stored.cols() != p->cols())
      throw IoError("member blob: parameter shape mismatch");
    *p = std::move(stored);
  }
  r.done();
  return model;
}

std::string read_line(std::FILE* f, const std::string& path) {
  std::string line;
  for (;;) {
    const int c = std::fgetc(f);
    if (c == EOF) throw IoError("unexpected end of file: " + path);
    if (c == '\n') return line;
    line += static_cast<char>(c);
  }
}

std::uint64_t parse_field(const std::string& line, const std::string& key,
                          const std::string& path) {
  const std::string prefix = key + "=";
  if (line.rfind(prefix, 0) != 0)
    throw IoError("malformed container line '" + line + "' in " + path);
  return std::stoull(line.substr(prefix.size()));
}

}  // namespace

void save_ensemble(const EnsembleModel& ens, const std::string& path,
                   const Manifest& extra) {
  if (ens.members.empty()) throw ContractError("save_ensemble: no members");

  std::string manifest;
  manifest += "input_columns=" + std::to_string(ens.pipeline.input_columns()) + "\n";
  manifest += "model_inputs=" + std::to_string(ens.pipeline.output_dim()) + "\n";
  manifest += "members=" + std::to_string(ens.members.size()) + "\n";
  std::string seeds;
  for (std::size_t i = 0; i < ens.member_seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(ens.member_seeds[i]);
  }
  manifest += "seeds=" + seeds + "\n";
  const SnnSpec& spec = ens.members.front().spec;
  manifest += "hidden_dim=" + std::to_string(spec.hidden_dim) + "\n";
  manifest += "trunk_layers=" + std::to_string(spec.trunk_layers) + "\n";
  manifest += "upper_layers=" + std::to_string(spec.upper_layers) + "\n";
  manifest += "projection_dim=" + std::to_string(spec.projection_dim) + "\n";
  for (const auto& [key, value] : extra) manifest += key + "=" + value + "\n";

  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> blobs;
  blobs.emplace_back("pipeline", encode_pipeline(ens.pipeline));
  for (std::size_t i = 0; i < ens.members.size(); ++i)
    blobs.emplace_back("member" + std::to_string(i), encode_member(ens.members[i]));

  std::uint32_t crc = crc32(reinterpret_cast<const std::uint8_t*>(manifest.data()),
                            manifest.size());
  for (const auto& [name, payload] : blobs)
    crc = crc32(payload.data(), payload.size(), crc);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "%s\n", kMagic);
  std::fprintf(f, "version=1\n");
  std::fprintf(f, "manifest_bytes=%zu\n", manifest.size());
  std::fwrite(manifest.data(), 1, manifest.size(), f);
  std::fprintf(f, "blobs=%zu\n", blobs.size());
  for (const auto& [name, payload] : blobs) {
    std::fprintf(f, "blob=%s,bytes=%zu\n", name.c_str(), payload.size());
    std::fwrite(payload.data(), 1, payload.size(), f);
  }
  std::fprintf(f, "crc32=%08x\n", crc);
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

namespace {

struct RawContainer {
  std::string manifest;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> blobs;
};

RawContainer read_container(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open: " + path);
  struct Closer {
    std::FILE* f;
    ~Closer() { std::fclose(f); }
  } closer{f};

  if (read_line(f, path) != kMagic) throw BadMagicError("not a model container: " + path);
  const std::uint64_t version = parse_field(read_line(f, path), "version", path);
  if (version != 1)
    throw IoError("unsupported container version " + std::to_string(version));

  RawContainer raw;
  const std::uint64_t manifest_bytes =
      parse_field(read_line(f, path), "manifest_bytes", path);
  raw.manifest.resize(manifest_bytes);
  if (std::fread(raw.manifest.data(), 1, manifest_bytes, f) != manifest_bytes)
    throw IoError("truncated manifest: " + path);

  const std::uint64_t n_blobs = parse_field(read_line(f, path), "blobs", path);
  std::uint32_t crc = crc32(reinterpret_cast<const std::uint8_t*>(raw.manifest.data()),
                            raw.manifest.size());
  for (std::uint64_t i = 0; i < n_blobs; ++i) {
    const std::string line = read_line(f, path);
    const std::size_t comma = line.find(',');
    if (line.rfind("blob=", 0) != 0 || comma == std::string::npos)
      throw IoError("malformed blob header '" + line + "' in " + path);
    const std::string name = line.substr(5, comma - 5);
    const std::uint64_t bytes = parse_field(line.substr(comma + 1), "bytes", path);
    std::vector<std::uint8_t> payload(bytes);
    if (bytes > 0 && std::fread(payload.data(), 1, bytes, f) != bytes)
      throw IoError("truncated blob " + name + ": " + path);
    crc = crc32(payload.data(), payload.size(), crc);
    raw.blobs.emplace_back(name, std::move(payload));
  }

  const std::string crc_line = read_line(f, path);
  char expect[16];
  std::snprintf(expect, sizeof(expect), "crc32=%08x", crc);
  if (crc_line != expect)
    throw BadChecksumError("checksum mismatch in " + path + " (" + crc_line +
                           ", computed " + (expect + 6) + ")");
  return raw;
}

}  // namespace

EnsembleModel load_ensemble(const std::string& path) {
  RawContainer raw = read_container(path);
  EnsembleModel ens;
  bool have_pipeline = false;
  for (auto& [name, payload] : raw.blobs) {
    BlobReader r{payload.data(), payload.data() + payload.size(), name};
    if (name == "pipeline") {
      ens.pipeline = decode_pipeline(r);
      have_pipeline = true;
    } else if (name.rfind("member", 0) == 0) {
      ens.members.push_back(decode_member(r));
      ens.member_seeds.push_back(ens.members.back().spec.seed);
    } else {
      throw IoError("unknown blob '" + name + "' in " + path);
    }
  }
  if (!have_pipeline) throw IoError("container has no pipeline blob: " + path);
  if (ens.members.empty()) throw IoError("container has no members: " + path);
  return ens;
}

Manifest read_manifest(const std::string& path) {
  RawContainer raw = read_container(path);
  Manifest out;
  std::size_t start = 0;
  while (start < raw.manifest.size()) {
    std::size_t nl = raw.manifest.find('\n', start);
    if (nl == std::string::npos) nl = raw.manifest.size();
    const std::string line = raw.manifest.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw IoError("malformed manifest line: " + line);
    out.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return out;
}

}  // namespace snne
