#include "fbmcalc/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fbmcalc {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename Int>
bool parse_integer(std::string_view s, Int& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& file, std::string_view content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace

std::string path_to_csv(const SamplePath& path) {
  std::string out;
  out += "#hurst=" + format_double(path.hurst) + "\n";
  out += "#seed=" + std::to_string(path.seed.root) + "\n";
  out += "#stream=" + std::to_string(path.seed.stream) + "\n";
  out += "#generator=" + std::string(to_string(path.generator)) + "\n";
  out += "t,value\n";
  for (Eigen::Index k = 0; k < path.values.size(); ++k)
    out += format_double(path.times[k]) + "," + format_double(path.values[k]) + "\n";
  return out;
}

void write_path_csv(const std::filesystem::path& file, const SamplePath& path) { write_file(file, path_to_csv(path)); }

ImportedSeries parse_series_csv(std::string_view text) {
  ImportedSeries s;
  std::vector<double> t, v;
  bool header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string_view::npos)
        s.metadata[std::string(trim(line.substr(1, eq - 1)))] = std::string(trim(line.substr(eq + 1)));
      continue;
    }
    if (!header) {
      if (line != "t,value") throw ParseError("expected header 't,value'", line_no);
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    double a = 0, b = 0;
    if (comma == std::string_view::npos || !parse_double(line.substr(0, comma), a) ||
        !parse_double(line.substr(comma + 1), b))
      throw ParseError("expected two numeric columns", line_no);
    if (!std::isfinite(a) || !std::isfinite(b)) throw ParseError("non-finite value", line_no);
    t.push_back(a);
    v.push_back(b);
  }
  if (!header) throw ParseError("missing header 't,value'", 0);
  s.times = Eigen::Map<Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

ImportedSeries read_series_csv(const std::filesystem::path& file) { return parse_series_csv(read_file(file)); }

SamplePath ImportedSeries::to_path() const {
  if (values.size() < 2) throw std::invalid_argument("series needs at least 2 rows");
  if (times[0] != 0.0) throw std::invalid_argument("series times must start at 0");
  SamplePath p;
  p.times = times;
  p.values = values.array() - values[0];
  const Eigen::Index n = values.size() - 1;
  p.grid = GridSpec{times[n], n};
  // Snap to the exact uniform grid when the file holds one (as written by path_to_csv).
  bool uniform = true;
  for (Eigen::Index k = 0; k <= n && uniform; ++k)
    uniform = std::abs(times[k] - p.grid.time(k)) <= 1e-12 * std::abs(p.grid.t_max);
  if (uniform) p.times = p.grid.times();
  if (auto it = metadata.find("hurst"); it != metadata.end()) {
    double h = 0;
    if (!parse_double(it->second, h)) throw std::invalid_argument("bad #hurst metadata");
    p.hurst = h;
  }
  if (auto it = metadata.find("seed"); it != metadata.end()) parse_integer(it->second, p.seed.root);
  if (auto it = metadata.find("stream"); it != metadata.end()) parse_integer(it->second, p.seed.stream);
  p.generator = Generator::Imported;
  p.validate();
  return p;
}

GridFunction ImportedSeries::to_grid_function() const {
  const Eigen::Index n = values.size() - 1;
  if (n < 2) throw std::invalid_argument("grid function needs at least 3 rows");
  const double a = times[0], b = times[n];
  const double h = (b - a) / static_cast<double>(n);
  for (Eigen::Index k = 0; k <= n; ++k)
    if (std::abs(times[k] - (a + static_cast<double>(k) * h)) > 1e-9 * std::max(std::abs(b - a), 1.0))
      throw std::invalid_argument("grid function times are not uniform");
  return GridFunction(a, b, values);
}

std::string grid_function_to_csv(const GridFunction& f) {
  std::string out = "t,value\n";
  const Eigen::VectorXd v = f.evaluated();
  for (Eigen::Index k = 0; k < v.size(); ++k) out += format_double(f.node(k)) + "," + format_double(v[k]) + "\n";
  return out;
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{"hurst",       "t_max", "steps",     "seed",       "replicates", "generator",
                                          "truncation",  "kernel_mesh", "eps", "tolerance", "output_dir"};
  return k;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  auto bad = [&] { return std::invalid_argument("config: bad value '" + std::string(value) + "' for " + std::string(key)); };
  if (key == "hurst") {
    if (!parse_double(value, hurst)) throw bad();
  } else if (key == "t_max") {
    if (!parse_double(value, t_max)) throw bad();
  } else if (key == "steps") {
    if (!parse_integer(value, steps)) throw bad();
  } else if (key == "seed") {
    if (!parse_integer(value, seed)) throw bad();
  } else if (key == "replicates") {
    if (!parse_integer(value, replicates)) throw bad();
  } else if (key == "generator") {
    generator = std::string(value);
  } else if (key == "truncation") {
    if (!parse_double(value, truncation)) throw bad();
  } else if (key == "kernel_mesh") {
    if (!parse_integer(value, kernel_mesh)) throw bad();
  } else if (key == "eps") {
    eps_multiples.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const auto item = value.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      Eigen::Index m = 0;
      if (!parse_integer(item, m)) throw bad();
      eps_multiples.push_back(m);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  } else if (key == "tolerance") {
    if (!parse_double(value, tolerance)) throw bad();
  } else if (key == "output_dir") {
    output_dir = std::string(value);
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
}

std::string RunConfig::get(std::string_view key) const {
  if (key == "hurst") return format_double(hurst);
  if (key == "t_max") return format_double(t_max);
  if (key == "steps") return std::to_string(steps);
  if (key == "seed") return std::to_string(seed);
  if (key == "replicates") return std::to_string(replicates);
  if (key == "generator") return generator;
  if (key == "truncation") return format_double(truncation);
  if (key == "kernel_mesh") return std::to_string(kernel_mesh);
  if (key == "eps") {
    std::string s;
    for (std::size_t i = 0; i < eps_multiples.size(); ++i) s += (i ? "," : "") + std::to_string(eps_multiples[i]);
    return s;
  }
  if (key == "tolerance") return format_double(tolerance);
  if (key == "output_dir") return output_dir;
  throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  check_hurst(hurst);
  GridSpec{t_max, steps}.validate();
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (generator != "auto") generator_from_string(generator);
  if (truncation < 0.0 || !std::isfinite(truncation)) throw std::invalid_argument("config: truncation must be >= 0");
  if (kernel_mesh < 1) throw std::invalid_argument("config: kernel_mesh must be >= 1");
  if (eps_multiples.size() < 3) throw std::invalid_argument("config: eps needs at least 3 levels");
  for (std::size_t i = 0; i < eps_multiples.size(); ++i)
    if (eps_multiples[i] < 1 || (i > 0 && eps_multiples[i] >= eps_multiples[i - 1]))
      throw std::invalid_argument("config: eps multiples must be positive and strictly decreasing");
  if (!(tolerance > 0.0)) throw std::invalid_argument("config: tolerance must be > 0");
  if (output_dir.empty()) throw std::invalid_argument("config: output_dir must not be empty");
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& k : keys()) out += k + "=" + get(k) + "\n";
  return out;
}

RunConfig RunConfig::parse(std::string_view text, RunConfig base) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line =
        trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    try {
      base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return base;
}

RunConfig RunConfig::parse(std::string_view text) { return parse(text, RunConfig{}); }

RunConfig RunConfig::load(const std::filesystem::path& file, RunConfig base) { return parse(read_file(file), base); }

RunConfig RunConfig::load(const std::filesystem::path& file) { return load(file, RunConfig{}); }

Json RunConfig::to_json() const {
  Json j;
  j["hurst"] = hurst;
  j["t_max"] = t_max;
  j["steps"] = steps;
  j["seed"] = seed;
  j["replicates"] = replicates;
  j["generator"] = generator;
  j["truncation"] = truncation;
  j["kernel_mesh"] = kernel_mesh;
  j["eps"] = eps_multiples;
  j["tolerance"] = tolerance;
  j["output_dir"] = output_dir;
  return j;
}

Json to_json(const GridSpec& grid) { return Json{{"t_max", grid.t_max}, {"n_steps", grid.n_steps}}; }

Json to_json(const EnsembleStats& s) {
  return Json{{"mean", s.mean}, {"variance", s.variance}, {"replicates", s.replicates}, {"std_error", s.std_error()}};
}

namespace {

Json pairs(const std::vector<std::pair<double, double>>& v) {
  Json a = Json::array();
  for (const auto& [x, y] : v) a.push_back(Json::array({x, y}));
  return a;
}

}  // namespace

Json to_json(const VariationEstimate& v) {
  return Json{{"p", v.p}, {"mesh_levels", pairs(v.mesh_levels)}, {"slope", v.slope}, {"verdict", to_string(v.verdict)}};
}

Json to_json(const HurstEstimate& h) {
  return Json{{"estimator", to_string(h.method)},
              {"h_hat", h.h_hat},
              {"stderr", h.std_error},
              {"in_model", h.in_model},
              {"block_data", pairs(h.block_data)}};
}

Json to_json(const IntegralResult& r) {
  return Json{{"value", r.value},
              {"levels", pairs(r.levels)},
              {"converged", r.converged},
              {"tolerance", r.tolerance},
              {"diagnostic", r.diagnostic}};
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& file) { return sha256_hex(read_file(file)); }

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec || !std::filesystem::is_directory(root_))
    throw std::runtime_error("cannot create output directory " + root_.string());
}

void RunDirectory::write(const std::string& relative, std::string_view content) {
  if (relative == "manifest.json") throw std::invalid_argument("manifest.json is reserved");
  const auto target = root_ / relative;
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  write_file(target, content);
  const std::string hash = sha256_hex(content);
  auto it = std::find_if(artifacts_.begin(), artifacts_.end(), [&](const auto& a) { return a.first == relative; });
  if (it != artifacts_.end()) {
    it->second = hash;
    sizes_[static_cast<std::size_t>(it - artifacts_.begin())] = content.size();
  } else {
    artifacts_.emplace_back(relative, hash);
    sizes_.push_back(content.size());
  }
}

void RunDirectory::write_manifest(Json header) const {
  Json list = Json::array();
  for (std::size_t i = 0; i < artifacts_.size(); ++i)
    list.push_back(Json{{"path", artifacts_[i].first}, {"sha256", artifacts_[i].second}, {"bytes", sizes_[i]}});
  header["artifacts"] = std::move(list);
  write_file(root_ / "manifest.json", header.dump(2) + "\n");
}

}  // namespace fbmcalc
