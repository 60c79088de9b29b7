#pragma once

#include <ocokit/ocokit.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace ocokit::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct ExperimentConfig {
  std::string command;  // oco | ro | jeo | verify
  fs::path instance;
  std::string regime;
  std::string scheme;
  std::string domain;  // oco without an instance: simplex | ball
  int horizon = 0;
  double eps = 0.0;
  double tau = 0.5;
  std::uint64_t seed = 1;
  fs::path out;
  bool dump_iterates = false;
  bool bound_check = false;
  bool rate_table = false;
  bool doubling = true;
  std::string stream = "from-g";  // jeo: from-g | file
  fs::path stream_file;
};

/// Referenced paths exist, numeric parameters are positive; throws ConfigError.
void validate(const ExperimentConfig& config);

/// The fields that determine the result (the output directory is excluded).
nlohmann::json to_json(const ExperimentConfig& config);

/// Runs one command, writing trace.csv, report.json and summary.txt into the
/// output directory. Returns the process exit status.
int run_experiment(const ExperimentConfig& config, std::ostream& log);

struct RateRow {
  int T = 0;
  double realized = 0.0;
  double bound = 0.0;
  double ratio_to_prev = 0.0;  // NaN on the first row
};

/// Evaluates `run(T)` -> (realized, bound) for every horizon concurrently and
/// writes `T,realized,bound,ratio_to_prev` to `file` (skipped when empty).
std::vector<RateRow> emit_rate_table(const std::function<std::pair<double, double>(int)>& run,
                                     const std::vector<int>& horizons, const fs::path& file);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyResult {
  std::vector<Check> checks;
  std::string trace_hash;
  bool ok() const;
};

/// The invariant suite behind `ocokit verify`. Deterministic in the seed.
VerifyResult run_verify(std::uint64_t seed);

/// Fingerprint of a run trace (records and iterates).
void hash_trace(Fnv1a& h, const RunTrace& trace);

}  // namespace ocokit::cli
