#include <cmath>
#include <fstream>
#include <sstream>

#include "driftplan/error.hpp"
#include "driftplan/esm/manifold.hpp"
#include "driftplan/text.hpp"

namespace driftplan::esm {

namespace {

constexpr const char* kMagic = "driftplan-esm 1";

// Line-oriented reader that remembers the line number for error messages.
class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  std::string next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      return line;
    }
    throw ParseError(std::string("manifold file: unexpected end of file, expected ") + what, line_no_);
  }

  std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    for (auto f : text::split(line, ' ')) {
      if (!f.empty()) out.emplace_back(f);
    }
    return out;
  }

  double number(std::string_view f) {
    const auto x = text::parse_double(f);
    if (!x) throw ParseError("manifold file: bad number '" + std::string(f) + "'", line_no_);
    return *x;
  }

  std::string expect_key(const std::string& line, const std::string& key) {
    if (line.rfind(key + " ", 0) != 0) throw ParseError("manifold file: expected '" + key + "'", line_no_);
    return line.substr(key.size() + 1);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::string serialize_manifold(const Manifold& m) {
  using text::exact;
  std::ostringstream out;
  const DomainFilter& f = m.filter();
  out << kMagic << '\n';
  out << "param_hash " << text::hex64(m.param_hash()) << '\n';
  out << "sense ccw\n";
  out << "filter " << exact(f.r_min) << ' ' << exact(f.r_max) << ' ' << exact(f.v_max) << ' '
      << exact(f.beta_margin) << ' ' << exact(f.max_edge) << '\n';
  out << "samples " << m.samples().size() << '\n';
  out << "# beta psidot v delta lambda radius unstable\n";
  for (const auto& s : m.samples()) {
    out << exact(s.beta) << ' ' << exact(s.psidot) << ' ' << exact(s.v) << ' ' << exact(s.delta) << ' '
        << exact(s.lambda) << ' ' << exact(s.radius) << ' ' << (s.unstable ? 1 : 0) << '\n';
  }
  out << "triangles " << m.triangles().size() << '\n';
  for (const auto& t : m.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "end\n";
  return out.str();
}

void save_manifold(const Manifold& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << serialize_manifold(m);
  if (!out) throw IoError("write failed: " + path.string());
}

LoadResult parse_manifold(const std::string& content, std::optional<std::uint64_t> expected_hash) {
  Reader r(content);
  if (r.next("header") != kMagic) throw ParseError("manifold file: bad header", r.line_no());

  const std::string hash_text = r.expect_key(r.next("param_hash"), "param_hash");
  if (hash_text.size() != 16) throw ParseError("manifold file: bad parameter hash", r.line_no());
  std::uint64_t hash = 0;
  for (char c : hash_text) {
    const int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
    if (d < 0) throw ParseError("manifold file: bad parameter hash", r.line_no());
    hash = (hash << 4) | static_cast<std::uint64_t>(d);
  }
  if (r.expect_key(r.next("sense"), "sense") != "ccw") throw ParseError("manifold file: unknown sense", r.line_no());

  const auto ff = r.fields(r.expect_key(r.next("filter"), "filter"));
  if (ff.size() != 5) throw ParseError("manifold file: filter needs 5 values", r.line_no());
  DomainFilter filter{r.number(ff[0]), r.number(ff[1]), r.number(ff[2]), r.number(ff[3]), r.number(ff[4])};

  const double n_samples = r.number(r.expect_key(r.next("samples"), "samples"));
  std::vector<ManifoldSample> samples;
  for (long i = 0; i < static_cast<long>(n_samples); ++i) {
    const auto f = r.fields(r.next("sample"));
    if (f.size() != 7) throw ParseError("manifold file: sample needs 7 fields", r.line_no());
    ManifoldSample s{r.number(f[0]), r.number(f[1]), r.number(f[2]), r.number(f[3]),
                     r.number(f[4]), r.number(f[5]), r.number(f[6]) != 0.0};
    samples.push_back(s);
  }

  const double n_tris = r.number(r.expect_key(r.next("triangles"), "triangles"));
  std::vector<Triangle> tris;
  for (long i = 0; i < static_cast<long>(n_tris); ++i) {
    const auto f = r.fields(r.next("triangle"));
    if (f.size() != 3) throw ParseError("manifold file: triangle needs 3 indices", r.line_no());
    Triangle t{};
    for (int k = 0; k < 3; ++k) {
      const double idx = r.number(f[k]);
      if (idx < 0 || idx >= static_cast<double>(samples.size()) || idx != std::floor(idx)) {
        throw ParseError("manifold file: triangle index out of range", r.line_no());
      }
      t[k] = static_cast<int>(idx);
    }
    tris.push_back(t);
  }
  if (r.next("end") != "end") throw ParseError("manifold file: missing end marker", r.line_no());

  LoadResult result{Manifold(std::move(samples), std::move(tris), filter, hash), {}};
  if (expected_hash && *expected_hash != hash) {
    result.warnings.push_back("manifold parameter hash " + text::hex64(hash) +
                              " does not match the current parameters (" + text::hex64(*expected_hash) + ")");
  }
  return result;
}

LoadResult load_manifold(const std::filesystem::path& path, std::optional<std::uint64_t> expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifold file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifold(buf.str(), expected_hash);
}

}  // namespace driftplan::esm
