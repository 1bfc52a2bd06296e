#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rotor/fits.hpp"
#include "rotor/model.hpp"
#include "rotor/svd.hpp"

namespace rotor {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExperimentKind {
  free_boson_scan,    // K(ej) from finite-chain vertex correlators
  sg_scaling,         // vertex order parameter against ej2 -> beta^2
  correlator_profile, // uniform-state correlators and both length scales
  string_tension,     // T(d) on a finite chain plus the leading-order line
  mass_scaling,       // meson binding energy against eta -> exponent alpha
  validate            // DMRG-vs-ED cross-check on a small chain
};

const char* to_string(ExperimentKind kind);

// A fully-resolved experiment description: the parsed config file with all
// defaults applied.  `resolved` echoes every key/value actually in effect
// and `defaulted` lists the keys that fell back to a default.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::validate;
  ModelParams model;               // base parameters of the run
  std::vector<double> scan_ej;     // free-boson-scan points
  std::vector<double> scan_ej1;    // mass-scaling points
  std::vector<double> scan_ej2;    // sg-scaling points
  std::vector<int> scan_L;         // optional size scan (free-boson-scan):
                                   // finite-size velocity fit at scan_ej[0]
  TruncationSpec trunc;
  int max_sweeps = 24;             // finite DMRG
  double e_tol = -1.0;
  int max_steps = 600;             // infinite DMRG
  double idmrg_tol = 1e-9;
  FitWindow r_window{4.0, 0.0};    // power-law window; hi 0 = L/3 default
  FitWindow d_window{4.0, 12.0};   // string-tension window
  double beta_sq = 0.0;            // eta map input for mass-scaling
  double k_reference = 0.0;        // optional K cross-check for sg-scaling
  std::string out_dir = ".";
  std::uint64_t seed = 5;

  std::map<std::string, std::string> resolved;
  std::vector<std::string> defaulted;
};

// What a run leaves behind besides the data files.  The manifest is written
// even when the pipeline fails partway; `artifacts` then still matches the
// directory contents exactly (including the manifest itself).
struct RunManifest {
  std::string kind;
  std::string version;
  bool ok = false;
  std::string error;               // empty on success
  double wall_seconds = 0.0;
  std::map<std::string, std::string> config_echo;
  std::vector<std::string> defaults_applied;
  std::vector<std::string> artifacts;  // file names relative to out_dir
  std::vector<std::string> notes;      // per-point convergence summaries
};

// Parse and validate a sectioned key = value config file.  All problems are
// collected and thrown together as one std::invalid_argument whose message
// names every offending key or line; unknown keys are rejected outright.
// `kind_override` (from a CLI subcommand) wins over an absent config kind
// and must agree with a present one.
ExperimentConfig validate_config(const std::string& path,
                                 const std::string& kind_override = "");

// Execute the configured pipeline.  Series land in CSV files (columns
// x, y, y_err under a '#' metadata header), scalars and fits in
// summary.json, and the run record in manifest.json, all inside
// config.out_dir.  Scan points fail independently: a diverged or
// non-convergent point is recorded in the notes and the scan moves on.
RunManifest run(const ExperimentConfig& config);

}  // namespace rotor
