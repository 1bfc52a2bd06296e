#include "rotor/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "rotor/dmrg.hpp"
#include "rotor/ed.hpp"
#include "rotor/idmrg.hpp"
#include "rotor/observables.hpp"
#include "rotor/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rotor {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::free_boson_scan: return "free-boson-scan";
    case ExperimentKind::sg_scaling: return "sg-scaling";
    case ExperimentKind::correlator_profile: return "correlator-profile";
    case ExperimentKind::string_tension: return "string-tension";
    case ExperimentKind::mass_scaling: return "mass-scaling";
    case ExperimentKind::validate: return "validate";
  }
  return "?";
}

namespace {

bool kind_from_string(const std::string& s, ExperimentKind& out) {
  static const std::map<std::string, ExperimentKind> table = {
      {"free-boson-scan", ExperimentKind::free_boson_scan},
      {"sg-scaling", ExperimentKind::sg_scaling},
      {"correlator-profile", ExperimentKind::correlator_profile},
      {"string-tension", ExperimentKind::string_tension},
      {"mass-scaling", ExperimentKind::mass_scaling},
      {"validate", ExperimentKind::validate},
  };
  const auto it = table.find(s);
  if (it == table.end()) return false;
  out = it->second;
  return true;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct ConfigEntry {
  std::string value;
  int line = 0;
};

// Sectioned key = value text -> flat "section.key" map.
std::map<std::string, ConfigEntry> parse_config_text(
    std::istream& in, std::vector<std::string>& errors) {
  std::map<std::string, ConfigEntry> kv;
  std::string line, section;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back("line " + std::to_string(ln) +
                         ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(ln) +
                       ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(ln) + ": empty key");
      continue;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) {
      errors.push_back("duplicate key '" + full + "' (line " +
                       std::to_string(ln) + ")");
      continue;
    }
    kv[full] = {value, ln};
  }
  return kv;
}

// Pulls typed values out of the flat map, tracking which keys were consumed
// and which fell back to defaults.
struct ConfigReader {
  std::map<std::string, ConfigEntry>& kv;
  std::vector<std::string>& errors;
  ExperimentConfig& cfg;
  std::set<std::string> consumed;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  std::string take(const std::string& key) {
    consumed.insert(key);
    return kv.at(key).value;
  }

  void record(const std::string& key, const std::string& value,
              bool is_default) {
    cfg.resolved[key] = value;
    if (is_default) cfg.defaulted.push_back(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) {
      std::ostringstream os;
      os << fallback;
      record(key, os.str(), true);
      return fallback;
    }
    const std::string raw = take(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument("");
      record(key, raw, false);
      return v;
    } catch (...) {
      errors.push_back("key '" + key + "': not a number ('" + raw + "')");
      return fallback;
    }
  }

  long integer(const std::string& key, long fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v)) {
      errors.push_back("key '" + key + "': expected an integer");
      return fallback;
    }
    return static_cast<long>(v);
  }

  std::vector<double> list(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const std::string raw = take(key);
    std::istringstream is(raw);
    std::string tok;
    bool bad = false;
    while (is >> tok) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw std::invalid_argument("");
      } catch (...) {
        bad = true;
      }
    }
    if (bad) {
      errors.push_back("key '" + key + "': not a list of numbers");
      out.clear();
    } else if (out.empty()) {
      errors.push_back("key '" + key + "': range has zero points");
    } else {
      record(key, raw, false);
    }
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) {
      record(key, fallback, true);
      return fallback;
    }
    const std::string raw = take(key);
    record(key, raw, false);
    return raw;
  }
};

// Keys each kind is allowed to see; anything else in the file is an error.
std::set<std::string> allowed_keys(ExperimentKind kind) {
  std::set<std::string> keys = {"experiment.kind", "experiment.seed",
                                "output.dir",      "dmrg.chi_max",
                                "dmrg.cutoff",     "model.n_max",
                                "model.eps",       "model.eg",
                                "model.bc"};
  const auto add = [&](std::initializer_list<const char*> more) {
    for (const char* k : more) keys.insert(k);
  };
  const auto finite = [&] { add({"model.L", "dmrg.max_sweeps", "dmrg.e_tol"}); };
  const auto infinite = [&] { add({"idmrg.max_steps", "idmrg.tol"}); };
  switch (kind) {
    case ExperimentKind::free_boson_scan:
      finite();
      add({"scan.ej", "scan.L", "fit.r_lo", "fit.r_hi"});
      break;
    case ExperimentKind::sg_scaling:
      infinite();
      add({"model.ej", "scan.ej2", "experiment.k_reference"});
      break;
    case ExperimentKind::correlator_profile:
      infinite();
      add({"model.ej", "model.ej1", "model.ej2"});
      break;
    case ExperimentKind::string_tension:
      finite();
      infinite();
      add({"model.ej", "model.ej1", "model.ej2", "fit.d_lo", "fit.d_hi"});
      break;
    case ExperimentKind::mass_scaling:
      infinite();
      add({"model.ej", "model.ej2", "scan.ej1", "experiment.beta_sq"});
      break;
    case ExperimentKind::validate:
      finite();
      add({"model.ej", "model.ej1", "model.ej2"});
      break;
  }
  return keys;
}

const std::set<std::string>& all_known_keys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k;
    for (ExperimentKind kind :
         {ExperimentKind::free_boson_scan, ExperimentKind::sg_scaling,
          ExperimentKind::correlator_profile, ExperimentKind::string_tension,
          ExperimentKind::mass_scaling, ExperimentKind::validate}) {
      const auto a = allowed_keys(kind);
      k.insert(a.begin(), a.end());
    }
    return k;
  }();
  return keys;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ExperimentConfig validate_config(const std::string& path,
                                 const std::string& kind_override) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  std::vector<std::string> errors;
  auto kv = parse_config_text(in, errors);

  ExperimentConfig cfg;
  ConfigReader r{kv, errors, cfg, {}};

  // Resolve the kind first: the CLI subcommand wins over an absent config
  // entry and must agree with a present one.
  std::string kind_name = kind_override;
  const bool kind_in_file = r.has("experiment.kind");
  if (kind_in_file) {
    const std::string from_file = r.take("experiment.kind");
    if (!kind_name.empty() && from_file != kind_name)
      errors.push_back("key 'experiment.kind': config says '" + from_file +
                       "' but the subcommand is '" + kind_name + "'");
    kind_name = from_file;
  }
  if (kind_name.empty()) {
    errors.push_back("key 'experiment.kind': missing");
  } else if (!kind_from_string(kind_name, cfg.kind)) {
    errors.push_back("key 'experiment.kind': unknown kind '" + kind_name +
                     "'");
  }
  if (!errors.empty() && kind_name.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  r.record("experiment.kind", kind_name, !kind_in_file);

  const ExperimentKind kind = cfg.kind;
  const bool finite = kind == ExperimentKind::free_boson_scan ||
                      kind == ExperimentKind::string_tension ||
                      kind == ExperimentKind::validate;
  const bool infinite = kind != ExperimentKind::free_boson_scan &&
                        kind != ExperimentKind::validate;

  cfg.seed = static_cast<std::uint64_t>(r.integer("experiment.seed", 5));
  cfg.out_dir = r.text("output.dir", ".");
  cfg.trunc.chi_max = r.integer("dmrg.chi_max", cfg.trunc.chi_max);
  cfg.trunc.cutoff = r.number("dmrg.cutoff", cfg.trunc.cutoff);
  if (cfg.trunc.chi_max < 2)
    errors.push_back("key 'dmrg.chi_max': must be >= 2");

  cfg.model.n_max = static_cast<int>(r.integer("model.n_max", 4));
  if (cfg.model.n_max < 1 || cfg.model.n_max > 10)
    errors.push_back("key 'model.n_max': must be in [1,10]");
  cfg.model.eps = r.number("model.eps", 0.0);
  cfg.model.eg = r.number("model.eg", 0.0);
  const std::string bc = r.text("model.bc", "open");
  if (bc == "open") {
    cfg.model.bc = Boundary::open;
  } else if (bc == "periodic") {
    cfg.model.bc = Boundary::periodic;
  } else {
    errors.push_back("key 'model.bc': must be 'open' or 'periodic'");
  }

  if (finite) {
    cfg.model.L = static_cast<int>(r.integer("model.L", 0));
    if (cfg.model.L < 4)
      errors.push_back("key 'model.L': required, must be >= 4");
    cfg.max_sweeps = static_cast<int>(r.integer("dmrg.max_sweeps", 24));
    if (cfg.max_sweeps < 1)
      errors.push_back("key 'dmrg.max_sweeps': must be >= 1");
    cfg.e_tol = r.number("dmrg.e_tol", -1.0);
  }
  if (infinite) {
    cfg.max_steps = static_cast<int>(r.integer("idmrg.max_steps", 600));
    if (cfg.max_steps < 1)
      errors.push_back("key 'idmrg.max_steps': must be >= 1");
    cfg.idmrg_tol = r.number("idmrg.tol", 1e-9);
  }

  const auto coupling = [&](const char* key, double fallback,
                            bool required) -> double {
    if (required && !r.has(key)) {
      errors.push_back(std::string("key '") + key + "': required");
      return fallback;
    }
    const double v = r.number(key, fallback);
    if (v < 0.0)
      errors.push_back(std::string("key '") + key + "': must be >= 0");
    return v;
  };

  switch (kind) {
    case ExperimentKind::free_boson_scan: {
      cfg.scan_ej = r.list("scan.ej");
      if (!r.consumed.count("scan.ej"))
        errors.push_back("key 'scan.ej': required");
      for (double v : cfg.scan_ej)
        if (v <= 0.0) errors.push_back("key 'scan.ej': entries must be > 0");
      cfg.r_window.lo = r.number("fit.r_lo", 4.0);
      const double default_hi =
          cfg.model.L > 0 ? cfg.model.L / 3.0 : 12.0;
      cfg.r_window.hi = r.number("fit.r_hi", default_hi);
      if (cfg.r_window.hi <= cfg.r_window.lo)
        errors.push_back("key 'fit.r_hi': window is empty");
      if (r.has("scan.L")) {
        bool ok = true;
        for (double v : r.list("scan.L")) {
          if (v != std::floor(v) || v < 4.0 ||
              (!cfg.scan_L.empty() && v <= cfg.scan_L.back())) {
            ok = false;
            break;
          }
          cfg.scan_L.push_back(static_cast<int>(v));
        }
        if (!ok || cfg.scan_L.size() < 4) {
          errors.push_back(
              "key 'scan.L': needs at least 4 strictly increasing integer "
              "sizes >= 4");
          cfg.scan_L.clear();
        }
      }
      break;
    }
    case ExperimentKind::sg_scaling: {
      cfg.model.ej = coupling("model.ej", 0.0, true);
      cfg.scan_ej2 = r.list("scan.ej2");
      if (!r.consumed.count("scan.ej2"))
        errors.push_back("key 'scan.ej2': required");
      for (double v : cfg.scan_ej2)
        if (v <= 0.0) errors.push_back("key 'scan.ej2': entries must be > 0");
      cfg.k_reference = r.number("experiment.k_reference", 0.0);
      if (cfg.k_reference < 0.0 || cfg.k_reference >= 2.0)
        errors.push_back("key 'experiment.k_reference': must be in [0,2)");
      break;
    }
    case ExperimentKind::correlator_profile: {
      cfg.model.ej = coupling("model.ej", 0.0, true);
      cfg.model.ej1 = coupling("model.ej1", 0.0, false);
      cfg.model.ej2 = coupling("model.ej2", 0.0, false);
      break;
    }
    case ExperimentKind::string_tension: {
      cfg.model.ej = coupling("model.ej", 0.0, true);
      cfg.model.ej1 = coupling("model.ej1", 0.0, false);
      cfg.model.ej2 = coupling("model.ej2", 0.0, true);
      if (cfg.model.ej2 <= 0.0)
        errors.push_back("key 'model.ej2': must be > 0 for string-tension");
      cfg.d_window.lo = r.number("fit.d_lo", 4.0);
      cfg.d_window.hi = r.number("fit.d_hi", 12.0);
      if (cfg.d_window.hi <= cfg.d_window.lo)
        errors.push_back("key 'fit.d_hi': window is empty");
      if (cfg.model.L >= 4) {
        const int margin = cfg.model.L / 4;
        const int d_max = cfg.model.L - 1 - 2 * margin;
        if (static_cast<int>(cfg.d_window.hi) > d_max)
          errors.push_back(
              "key 'fit.d_hi': string would overrun the L/4 edge margin");
      }
      break;
    }
    case ExperimentKind::mass_scaling: {
      cfg.model.ej = coupling("model.ej", 0.0, true);
      cfg.model.ej2 = coupling("model.ej2", 0.0, true);
      if (cfg.model.ej2 <= 0.0)
        errors.push_back("key 'model.ej2': must be > 0 for mass-scaling");
      cfg.scan_ej1 = r.list("scan.ej1");
      if (!r.consumed.count("scan.ej1"))
        errors.push_back("key 'scan.ej1': required");
      for (double v : cfg.scan_ej1)
        if (v <= 0.0) errors.push_back("key 'scan.ej1': entries must be > 0");
      if (!r.has("experiment.beta_sq")) {
        errors.push_back("key 'experiment.beta_sq': required (eta map)");
      } else {
        cfg.beta_sq = r.number("experiment.beta_sq", 0.0);
        if (!(cfg.beta_sq > 0.0 && cfg.beta_sq < 1.0))
          errors.push_back("key 'experiment.beta_sq': must be in (0,1)");
      }
      break;
    }
    case ExperimentKind::validate: {
      cfg.model.ej = coupling("model.ej", 0.0, false);
      cfg.model.ej1 = coupling("model.ej1", 0.0, false);
      cfg.model.ej2 = coupling("model.ej2", 0.0, false);
      break;
    }
  }

  // Anything in the file we did not consume is either a typo or a key that
  // belongs to a different kind.
  const auto& allowed = allowed_keys(kind);
  for (const auto& [key, entry] : kv) {
    if (r.consumed.count(key)) continue;
    if (!all_known_keys().count(key)) {
      errors.push_back("unknown key '" + key + "' (line " +
                       std::to_string(entry.line) + ")");
    } else if (!allowed.count(key)) {
      errors.push_back("key '" + key + "' is not used by kind '" +
                       std::string(to_string(kind)) + "' (line " +
                       std::to_string(entry.line) + ")");
    }
  }

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return cfg;
}

namespace {

// --- output helpers ------------------------------------------------------

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void write_series_csv(const fs::path& dir, const std::string& name,
                      const std::vector<std::string>& metadata,
                      const std::string& columns,
                      const std::vector<std::array<double, 3>>& rows,
                      RunManifest& manifest) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + name);
  for (const auto& m : metadata) out << "# " << m << "\n";
  out << "# columns: " << columns << "\n";
  for (const auto& row : rows)
    out << num(row[0]) << "," << num(row[1]) << "," << num(row[2]) << "\n";
  manifest.artifacts.push_back(name);
}

void write_json_file(const fs::path& dir, const std::string& name,
                     const json& j, RunManifest& manifest) {
  std::ofstream out(dir / name);
  if (!out) throw std::runtime_error("cannot write " + name);
  out << j.dump(2) << "\n";
  manifest.artifacts.push_back(name);
}

json fit_json(const FitResult& f) {
  json cov = json::array();
  for (long i = 0; i < f.covariance.rows(); ++i) {
    json row = json::array();
    for (long k = 0; k < f.covariance.cols(); ++k)
      row.push_back(f.covariance(i, k));
    cov.push_back(row);
  }
  return {{"slope", f.slope},       {"intercept", f.intercept},
          {"value", f.value},       {"r_squared", f.r_squared},
          {"window", {f.window_lo, f.window_hi}},
          {"flagged", f.flagged},   {"note", f.note},
          {"covariance", cov}};
}

json model_json(const ModelParams& p) {
  return {{"L", p.L},     {"n_max", p.n_max}, {"ej", p.ej},
          {"ej1", p.ej1}, {"ej2", p.ej2},     {"eps", p.eps},
          {"eg", p.eg},
          {"bc", p.bc == Boundary::open ? "open" : "periodic"}};
}

DmrgOptions dmrg_options(const ExperimentConfig& cfg) {
  DmrgOptions opt;
  opt.trunc = cfg.trunc;
  opt.max_sweeps = cfg.max_sweeps;
  opt.e_tol = cfg.e_tol;
  opt.seed = cfg.seed;
  return opt;
}

IdmrgOptions idmrg_options(const ExperimentConfig& cfg) {
  IdmrgOptions opt;
  opt.trunc = cfg.trunc;
  opt.max_steps = cfg.max_steps;
  opt.tol = cfg.idmrg_tol;
  return opt;
}

std::vector<std::string> csv_metadata(const ExperimentConfig& cfg,
                                      const ModelParams& p) {
  return {std::string("experiment = ") + to_string(cfg.kind),
          "model = " + p.describe(),
          "chi_max = " + std::to_string(cfg.trunc.chi_max),
          "seed = " + std::to_string(cfg.seed)};
}

// --- kind pipelines ------------------------------------------------------

void run_free_boson_scan(const ExperimentConfig& cfg, const fs::path& dir,
                         RunManifest& manifest, json& summary) {
  json points = json::array();
  for (std::size_t i = 0; i < cfg.scan_ej.size(); ++i) {
    ModelParams p = cfg.model;
    p.ej = cfg.scan_ej[i];
    p.ej1 = p.ej2 = 0.0;
    json point = {{"ej", p.ej}};
    try {
      const GroundStateResult gs =
          ground_state(build_hamiltonian(p), dmrg_options(cfg));
      std::vector<int> rs;
      const int r_cap = std::min(
          p.L / 2, static_cast<int>(std::ceil(cfg.r_window.hi)) + 4);
      for (int r = 1; r <= r_cap; ++r) rs.push_back(r);
      const CorrelatorSeries c = centered_two_point(gs.psi, 1, rs);

      std::vector<std::array<double, 3>> rows;
      for (std::size_t k = 0; k < c.r.size(); ++k)
        rows.push_back({c.r[k], c.values[k].real(), 0.0});
      auto meta = csv_metadata(cfg, p);
      meta.push_back("series = vertex two-point correlator, a = 1");
      char name[48];
      std::snprintf(name, sizeof name, "correlator_%02zu.csv", i);
      write_series_csv(dir, name, meta, "r, correlator, err", rows, manifest);

      const FitResult fit = fit_power_law(c, cfg.r_window);
      point["energy"] = gs.energy;
      point["converged"] = gs.report.converged;
      point["sweeps"] = gs.report.sweeps;
      point["energy_variance"] = gs.report.energy_variance;
      point["K"] = fit.value;
      point["beta_sq"] = beta_sq_from_K(fit.value);
      point["fit"] = fit_json(fit);
      point["series"] = name;
      manifest.notes.push_back(
          std::string(name) + ": ej = " + format_g(p.ej) +
          (gs.report.converged ? ", converged in " : ", NOT converged after ") +
          std::to_string(gs.report.sweeps) + " sweeps, K = " +
          format_g(fit.value));
    } catch (const std::exception& e) {
      point["error"] = e.what();
      manifest.notes.push_back("point ej = " + format_g(p.ej) +
                               " failed: " + e.what());
    }
    points.push_back(point);
  }
  summary["points"] = points;

  // Optional finite-size velocity: ground energies across the configured
  // sizes at the first scan coupling, Casimir fit for u.
  if (!cfg.scan_L.empty()) {
    std::vector<int> sizes;
    std::vector<double> energies;
    std::vector<std::array<double, 3>> rows;
    for (int L : cfg.scan_L) {
      ModelParams p = cfg.model;
      p.L = L;
      p.ej = cfg.scan_ej.front();
      p.ej1 = p.ej2 = 0.0;
      try {
        const GroundStateResult gs =
            ground_state(build_hamiltonian(p), dmrg_options(cfg));
        sizes.push_back(L);
        energies.push_back(gs.energy);
        rows.push_back({static_cast<double>(L), gs.energy, 0.0});
      } catch (const std::exception& e) {
        manifest.notes.push_back("size L = " + std::to_string(L) +
                                 " failed: " + e.what());
      }
    }
    auto meta = csv_metadata(cfg, cfg.model);
    meta.push_back("series = ground energy against size, ej = " +
                   format_g(cfg.scan_ej.front()));
    write_series_csv(dir, "casimir.csv", meta, "L, energy, err", rows,
                     manifest);
    if (sizes.size() >= 4) {
      const FitResult fit = fit_casimir(sizes, energies, cfg.model.bc);
      summary["casimir"] = fit_json(fit);
      summary["velocity"] = fit.value;
      manifest.notes.push_back("finite-size velocity u = " +
                               format_g(fit.value));
    } else {
      manifest.notes.push_back(
          "velocity fit skipped: fewer than 4 usable sizes");
    }
  }
}

void run_sg_scaling(const ExperimentConfig& cfg, const fs::path& dir,
                    RunManifest& manifest, json& summary) {
  json points = json::array();
  std::vector<double> xs, vs;
  for (double ej2 : cfg.scan_ej2) {
    ModelParams p = cfg.model;
    p.ej1 = 0.0;
    p.ej2 = ej2;
    json point = {{"ej2", ej2}};
    try {
      const UniformMps u = idmrg_fixed_point(p, idmrg_options(cfg));
      const double v = vertex_expectation(u);
      point["vertex"] = v;
      point["converged"] = u.converged;
      point["steps"] = u.steps;
      point["energy_density"] = u.energy_density;
      if (u.converged && v > 0.0) {
        xs.push_back(ej2);
        vs.push_back(v);
      }
      manifest.notes.push_back(
          "ej2 = " + format_g(ej2) + ": vertex = " + format_g(v) +
          (u.converged ? "" : " (fixed point NOT converged)"));
    } catch (const std::exception& e) {
      point["error"] = e.what();
      manifest.notes.push_back("point ej2 = " + format_g(ej2) +
                               " failed: " + e.what());
    }
    points.push_back(point);
  }
  summary["points"] = points;

  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < xs.size(); ++i)
    rows.push_back({xs[i], vs[i], 0.0});
  auto meta = csv_metadata(cfg, cfg.model);
  meta.push_back("series = vertex expectation against ej2 (ej1 = 0)");
  write_series_csv(dir, "vertex_scaling.csv", meta, "ej2, vertex, err", rows,
                   manifest);

  if (xs.size() >= 4) {
    const FitResult fit = fit_vertex_scaling(xs, vs);
    summary["fit"] = fit_json(fit);
    summary["beta_sq"] = fit.value;
    if (cfg.k_reference > 0.0) {
      const double from_k = beta_sq_from_K(cfg.k_reference);
      summary["k_reference"] = {
          {"K", cfg.k_reference},
          {"beta_sq", from_k},
          {"relative_difference", std::abs(fit.value - from_k) / from_k}};
    }
  } else {
    manifest.notes.push_back(
        "vertex-scaling fit skipped: fewer than 4 usable points");
  }
}

void run_correlator_profile(const ExperimentConfig& cfg, const fs::path& dir,
                            RunManifest& manifest, json& summary) {
  const ModelParams& p = cfg.model;
  const UniformMps u = idmrg_fixed_point(p, idmrg_options(cfg));
  summary["converged"] = u.converged;
  summary["steps"] = u.steps;
  summary["energy_density"] = u.energy_density;
  manifest.notes.push_back(
      std::string("fixed point ") +
      (u.converged ? "converged in " : "NOT converged after ") +
      std::to_string(u.steps) + " steps");
  if (!u.converged) return;  // nothing downstream is meaningful

  const CorrelatorSeries c = uniform_two_point(u, 1, 60);
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < c.r.size(); ++i)
    rows.push_back({c.r[i], c.values[i].real(), 0.0});
  auto meta = csv_metadata(cfg, p);
  meta.push_back("series = vertex two-point correlator, a = 1");
  write_series_csv(dir, "correlator.csv", meta, "r, correlator, err", rows,
                   manifest);

  try {
    const double v = vertex_expectation(u);
    summary["vertex"] = v;
    if (v > 0.0) {
      const CorrelatorSeries conn = connected_normalized(u);
      rows.clear();
      for (std::size_t i = 0; i < conn.r.size(); ++i)
        rows.push_back({conn.r[i], conn.values[i].real(), 0.0});
      meta = csv_metadata(cfg, p);
      meta.push_back("series = normalized connected correlator");
      write_series_csv(dir, "connected.csv", meta, "r, connected, err", rows,
                       manifest);
    }
  } catch (const std::exception& e) {
    summary["vertex_error"] = e.what();
    manifest.notes.push_back(std::string("vertex expectation: ") + e.what());
  }

  std::string note_n, note_t;
  const double xi_n = correlation_length(u, Twist::none, &note_n);
  const double xi_t = correlation_length(u, Twist::parity_string, &note_t);
  summary["xi_neutral"] = xi_n;
  summary["xi_topological"] = xi_t;
  if (!note_n.empty()) summary["xi_neutral_note"] = note_n;
  if (!note_t.empty()) summary["xi_topological_note"] = note_t;
  if (std::isfinite(xi_n) && std::isfinite(xi_t) && xi_n > 0.0 && xi_t > 0.0) {
    // Inverse lengths are the masses in units of the velocity, so this is
    // the neutral-to-topological mass ratio.
    summary["mu_neutral"] = 1.0 / xi_n;
    summary["mu_topological"] = 1.0 / xi_t;
    summary["mass_ratio"] = xi_t / xi_n;
  }
}

void run_string_tension(const ExperimentConfig& cfg, const fs::path& dir,
                        RunManifest& manifest, json& summary) {
  const ModelParams& p = cfg.model;
  const Mpo h = build_hamiltonian(p);
  const GroundStateResult gs = ground_state(h, dmrg_options(cfg));
  summary["ground"] = {{"energy", gs.energy},
                       {"converged", gs.report.converged},
                       {"sweeps", gs.report.sweeps},
                       {"energy_variance", gs.report.energy_variance}};
  manifest.notes.push_back(
      std::string("ground state ") +
      (gs.report.converged ? "converged in " : "NOT converged after ") +
      std::to_string(gs.report.sweeps) + " sweeps");

  const int j = p.L / 4;
  const int d_cap = std::min(p.L - 1 - 2 * (p.L / 4),
                             static_cast<int>(std::ceil(cfg.d_window.hi)) + 2);
  std::vector<int> ds;
  for (int d = 0; d <= d_cap; ++d) ds.push_back(d);
  const CorrelatorSeries t =
      string_tension_curve(gs.psi, h, gs.energy, j, ds);
  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < t.r.size(); ++i)
    rows.push_back({t.r[i], t.values[i].real(), 0.0});
  auto meta = csv_metadata(cfg, p);
  meta.push_back("series = soliton-pair energy cost T(d)");
  write_series_csv(dir, "tension.csv", meta, "d, T, err", rows, manifest);

  const FitResult fit = fit_string_tension(t, cfg.d_window);
  summary["fit"] = fit_json(fit);
  summary["sigma"] = fit.value;

  // Leading-order reference: the order parameter of the same model with the
  // string-inducing coupling switched off.
  try {
    ModelParams p0 = p;
    p0.ej1 = 0.0;
    const UniformMps u0 = idmrg_fixed_point(p0, idmrg_options(cfg));
    const double v0 = vertex_expectation(u0);
    const double sigma_lo = string_tension_lo(v0, p.ej1);
    summary["vertex_at_ej1_zero"] = v0;
    summary["sigma_lo"] = sigma_lo;
    if (sigma_lo > 0.0) summary["sigma_over_lo"] = fit.value / sigma_lo;
    rows.clear();
    for (int d : ds)
      rows.push_back({static_cast<double>(d), sigma_lo * d, 0.0});
    meta = csv_metadata(cfg, p);
    meta.push_back("series = leading-order line sigma_LO * d");
    write_series_csv(dir, "tension_lo.csv", meta, "d, T_lo, err", rows,
                     manifest);
  } catch (const std::exception& e) {
    summary["sigma_lo_error"] = e.what();
    manifest.notes.push_back(std::string("leading-order reference failed: ") +
                             e.what());
  }
}

void run_mass_scaling(const ExperimentConfig& cfg, const fs::path& dir,
                      RunManifest& manifest, json& summary) {
  // Baseline: soliton mass from the string-dressed correlation length of
  // the unperturbed (ej1 = 0) model.
  ModelParams p0 = cfg.model;
  p0.ej1 = 0.0;
  const UniformMps u0 = idmrg_fixed_point(p0, idmrg_options(cfg));
  std::string note_t0;
  const double xi_t0 = correlation_length(u0, Twist::parity_string, &note_t0);
  if (!u0.converged || !std::isfinite(xi_t0) || xi_t0 <= 0.0)
    throw std::runtime_error(
        "mass-scaling baseline failed: no finite topological length at "
        "ej1 = 0" +
        (note_t0.empty() ? "" : " (" + note_t0 + ")"));
  const double soliton_mass = 1.0 / xi_t0;
  summary["baseline"] = {{"xi_topological", xi_t0},
                         {"soliton_mass", soliton_mass},
                         {"steps", u0.steps}};
  manifest.notes.push_back("baseline soliton mass Mu = " +
                           format_g(soliton_mass));

  json points = json::array();
  std::vector<double> etas, masses;
  for (double ej1 : cfg.scan_ej1) {
    ModelParams p = cfg.model;
    p.ej1 = ej1;
    const double eta = eta_parameter(ej1, p.ej2, cfg.beta_sq);
    json point = {{"ej1", ej1}, {"eta", eta}};
    try {
      const UniformMps u = idmrg_fixed_point(p, idmrg_options(cfg));
      std::string nn, nt;
      const double xi_n = correlation_length(u, Twist::none, &nn);
      const double xi_t = correlation_length(u, Twist::parity_string, &nt);
      point["converged"] = u.converged;
      point["steps"] = u.steps;
      point["xi_neutral"] = xi_n;
      point["xi_topological"] = xi_t;
      if (!u.converged) throw std::runtime_error("fixed point not converged");
      if (!std::isfinite(xi_n) || xi_n <= 0.0)
        throw std::runtime_error("no finite neutral length" +
                                 (nn.empty() ? "" : " (" + nn + ")"));
      const double meson = 1.0 / xi_n;
      point["meson_mass"] = meson;
      point["gap_ratio"] = (meson - 2.0 * soliton_mass) / soliton_mass;
      etas.push_back(eta);
      masses.push_back(meson);
      manifest.notes.push_back("ej1 = " + format_g(ej1) + ": eta = " +
                               format_g(eta) + ", meson Mu = " +
                               format_g(meson));
    } catch (const std::exception& e) {
      point["error"] = e.what();
      manifest.notes.push_back("point ej1 = " + format_g(ej1) +
                               " failed: " + e.what());
    }
    points.push_back(point);
  }
  summary["points"] = points;

  std::vector<std::array<double, 3>> rows;
  for (std::size_t i = 0; i < etas.size(); ++i)
    rows.push_back(
        {etas[i], (masses[i] - 2.0 * soliton_mass) / soliton_mass, 0.0});
  auto meta = csv_metadata(cfg, cfg.model);
  meta.push_back("series = meson binding (m - 2M)/M against eta");
  write_series_csv(dir, "mass_scaling.csv", meta, "eta, gap_ratio, err", rows,
                   manifest);

  if (etas.size() >= 3) {
    try {
      const FitResult fit = fit_meson_scaling(etas, masses, soliton_mass);
      summary["fit"] = fit_json(fit);
      summary["alpha"] = fit.value;
    } catch (const std::exception& e) {
      summary["fit_error"] = e.what();
      manifest.notes.push_back(std::string("meson-scaling fit failed: ") +
                               e.what());
    }
  } else {
    manifest.notes.push_back(
        "meson-scaling fit skipped: fewer than 3 usable points");
  }
}

void run_validate(const ExperimentConfig& cfg, const fs::path& dir,
                  RunManifest& manifest, json& summary) {
  (void)dir;
  const ModelParams& p = cfg.model;
  const EdResult ed = lowest_k(p, EdOptions{});
  const GroundStateResult gs =
      ground_state(build_hamiltonian(p), dmrg_options(cfg));
  const double rel =
      std::abs(gs.energy - ed.values[0]) / std::abs(ed.values[0]);
  summary["energy_ed"] = ed.values[0];
  summary["energy_dmrg"] = gs.energy;
  summary["relative_error"] = rel;
  summary["ed_method"] = ed.method;
  summary["ed_converged"] = ed.converged;
  summary["dmrg"] = {{"converged", gs.report.converged},
                     {"sweeps", gs.report.sweeps},
                     {"energy_variance", gs.report.energy_variance}};
  manifest.notes.push_back("DMRG vs ED relative error = " + format_g(rel));
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.kind = to_string(config.kind);
  manifest.version = kToolVersion;
  manifest.config_echo = config.resolved;
  manifest.defaults_applied = config.defaulted;

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);

  json summary;
  summary["kind"] = to_string(config.kind);
  summary["model"] = model_json(config.model);
  try {
    switch (config.kind) {
      case ExperimentKind::free_boson_scan:
        run_free_boson_scan(config, dir, manifest, summary);
        break;
      case ExperimentKind::sg_scaling:
        run_sg_scaling(config, dir, manifest, summary);
        break;
      case ExperimentKind::correlator_profile:
        run_correlator_profile(config, dir, manifest, summary);
        break;
      case ExperimentKind::string_tension:
        run_string_tension(config, dir, manifest, summary);
        break;
      case ExperimentKind::mass_scaling:
        run_mass_scaling(config, dir, manifest, summary);
        break;
      case ExperimentKind::validate:
        run_validate(config, dir, manifest, summary);
        break;
    }
    manifest.ok = true;
  } catch (const std::exception& e) {
    manifest.ok = false;
    manifest.error = e.what();
    summary["error"] = e.what();
  }

  // Summary and manifest are written even when the pipeline stopped early,
  // so a partial run still leaves a machine-readable trace.
  try {
    write_json_file(dir, "summary.json", summary, manifest);
  } catch (const std::exception& e) {
    manifest.ok = false;
    if (manifest.error.empty()) manifest.error = e.what();
  }

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json mj;
  mj["kind"] = manifest.kind;
  mj["version"] = manifest.version;
  mj["ok"] = manifest.ok;
  if (!manifest.error.empty()) mj["error"] = manifest.error;
  mj["wall_seconds"] = manifest.wall_seconds;
  mj["config"] = manifest.config_echo;
  mj["defaults_applied"] = manifest.defaults_applied;
  manifest.artifacts.push_back("manifest.json");
  mj["artifacts"] = manifest.artifacts;
  mj["notes"] = manifest.notes;
  std::ofstream out(dir / "manifest.json");
  out << mj.dump(2) << "\n";

  return manifest;
}

}  // namespace rotor
