#pragma once

// Acceptance experiments E1..E12, shared by the `verify` subcommand and the
// acceptance test binary.

#include "fbmcalc/io.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fbmcalc {

struct ExperimentOptions {
  std::uint64_t root_seed = 42;
  /// 0 keeps the built-in sizes.  Otherwise ensembles use exactly this many
  /// replicates and seed sweeps use min(built-in, replicates) seeds.
  std::size_t replicates = 0;
  unsigned workers = 0;
};

enum class Relation { Near, AtMost, AtLeast, Above, Below };
std::string_view to_string(Relation r);

/// One numeric criterion.  Near: |estimate - target| <= tolerance.
/// AtMost / AtLeast: estimate <= target / estimate >= target.  Above / Below: strict.
struct Check {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::Near;
  bool pass = false;
};

Check near_check(std::string name, double target, double estimate, double tolerance);
Check at_most_check(std::string name, double bound, double estimate);
Check at_least_check(std::string name, double bound, double estimate);
Check above_check(std::string name, double bound, double estimate);
Check below_check(std::string name, double bound, double estimate);

enum class Verdict { Pass, Fail, Error };
std::string_view to_string(Verdict v);

struct ExperimentRecord {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  Json details = Json::object();
  Verdict verdict = Verdict::Error;
  std::string error;
  double seconds = 0.0;

  /// Wall time is left out so records depend only on the inputs.
  Json to_json() const;
};

/// "E1".."E12".
const std::vector<std::string>& experiment_ids();

/// "all" or a comma-separated list of ids; throws std::invalid_argument on
/// unknown ids or an empty suite.
std::vector<std::string> parse_suite(std::string_view suite);

/// Runs one experiment.  Exceptions from the experiment body are recorded as
/// verdict Error; an unknown id throws std::invalid_argument.
ExperimentRecord run_experiment(const std::string& id, const ExperimentOptions& options = {});

/// experiment,check,target,estimate,tolerance,relation,verdict
std::string summary_csv(const std::vector<ExperimentRecord>& records);

}  // namespace fbmcalc
