#pragma once

#include "fbmcalc/ensemble.hpp"
#include "fbmcalc/fbm_integrate.hpp"
#include "fbmcalc/gaussian_paths.hpp"
#include "fbmcalc/grid_function.hpp"
#include "fbmcalc/path_stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fbmcalc {

using Json = nlohmann::ordered_json;

/// Malformed input file; `line` is 1-based (0 when not tied to a line).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double x);

/// Path CSV:
///   #hurst=<H>
///   #seed=<root>
///   #stream=<stream>
///   #generator=<name>
///   t,value
///   <t>,<value>    (17 significant digits)
std::string path_to_csv(const SamplePath& path);
void write_path_csv(const std::filesystem::path& file, const SamplePath& path);

/// Two-column series read from CSV.  Comment lines starting with '#' may carry
/// key=value metadata; the first non-comment line must be the header `t,value`.
struct ImportedSeries {
  Eigen::VectorXd times;
  Eigen::VectorXd values;
  std::map<std::string, std::string> metadata;

  /// As a SamplePath: values shifted to start at 0, H and seed from metadata
  /// when present (H defaults to 1/2).  Times must start at 0 and increase.
  SamplePath to_path() const;
  /// As a GridFunction; times must be uniform.
  GridFunction to_grid_function() const;
};

ImportedSeries parse_series_csv(std::string_view text);
ImportedSeries read_series_csv(const std::filesystem::path& file);

/// `t,value` CSV of a grid function (weight applied).
std::string grid_function_to_csv(const GridFunction& f);

/// Flat key=value configuration.  Blank lines and lines starting with '#' are
/// ignored; keys are those listed in RunConfig::keys().
struct RunConfig {
  double hurst = 0.5;
  double t_max = 1.0;
  Eigen::Index steps = 1024;
  std::uint64_t seed = 42;
  std::uint64_t replicates = 1;
  std::string generator = "auto";  // auto | bm-increments | fbm-cholesky | fbm-moving-average | fbm-circulant
  double truncation = 0.0;         // moving-average L, 0 = 50 t_max
  Eigen::Index kernel_mesh = 1024;
  std::vector<Eigen::Index> eps_multiples{32, 16, 8, 4, 2};
  double tolerance = 0.05;  // Cauchy tolerance for eps integrals
  std::string output_dir = "out";

  static const std::vector<std::string>& keys();
  /// Sets one key from text; throws std::invalid_argument on unknown keys or bad values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  void validate() const;

  std::string serialize() const;
  /// Applies the file's keys on top of `base`.
  static RunConfig parse(std::string_view text, RunConfig base);
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& file, RunConfig base);
  static RunConfig load(const std::filesystem::path& file);

  Json to_json() const;
  bool operator==(const RunConfig&) const = default;
};

Json to_json(const GridSpec& grid);
Json to_json(const EnsembleStats& s);
Json to_json(const VariationEstimate& v);
Json to_json(const HurstEstimate& h);
Json to_json(const IntegralResult& r);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

/// Writes text files into a run directory and records each in the manifest.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  /// Writes `relative` under the run directory and records its hash.
  void write(const std::string& relative, std::string_view content);
  /// Writes manifest.json listing every artifact written so far.
  void write_manifest(Json header) const;

 private:
  std::filesystem::path root_;
  std::vector<std::pair<std::string, std::string>> artifacts_;  // (relative path, sha256)
  std::vector<std::size_t> sizes_;
};

}  // namespace fbmcalc
