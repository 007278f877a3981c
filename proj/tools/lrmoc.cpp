// Command-line front end: one subcommand per experiment, writing CSV plus a JSON sidecar.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lrmoc/ensemble.hpp"
#include "lrmoc/oracle.hpp"

namespace {

using lrmoc::SweepKind;
using lrmoc::SweepSpec;

double parse_double(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument(flag + ": '" + text + "' is not a number");
  return v;
}

std::size_t parse_size(const std::string& text, const std::string& flag) {
  std::size_t v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument(flag + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

/// "v", "a,b,c" or "min:max:count" (inclusive, linear).
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
  if (text.find(':') != std::string::npos) {
    auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument(flag + ": grid '" + text + "' is not min:max:count");
    const double lo = parse_double(parts[0], flag);
    const double hi = parse_double(parts[1], flag);
    const std::size_t count = parse_size(parts[2], flag);
    if (count < 1) throw std::invalid_argument(flag + ": grid count must be >= 1");
    if (count == 1 && lo != hi) throw std::invalid_argument(flag + ": a one-point grid needs min == max");
    if (hi < lo) throw std::invalid_argument(flag + ": grid max is below min");
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
      grid[k] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    grid.back() = hi;
    return grid;
  }
  std::vector<double> grid;
  for (const auto& part : split(text, ',')) grid.push_back(parse_double(part, flag));
  if (grid.empty()) throw std::invalid_argument(flag + ": empty grid");
  return grid;
}

std::vector<std::size_t> parse_size_grid(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> grid;
  for (double v : parse_grid(text, flag)) {
    if (v < 0 || v != std::floor(v)) throw std::invalid_argument(flag + ": '" + text + "' must list integers");
    grid.push_back(static_cast<std::size_t>(v));
  }
  return grid;
}

struct Defaults {
  std::string L;
  std::string p_zz;
  std::string alpha;
  std::string inv_alpha;
  std::string p_b;
  std::string out;
};

Defaults defaults_for(SweepKind kind) {
  switch (kind) {
    case SweepKind::phase_diagram: return {"64", "0:1:11", "", "0.1:1:10", "", "phase_diagram.csv"};
    case SweepKind::purification: return {"32", "0,0.1,0.5", "1,3", "", "", "purification.csv"};
    case SweepKind::edge_probe: return {"32", "0.05,1", "3", "", "0.02,0.1,0.5", "edge_probe.csv"};
    case SweepKind::ee_map: return {"64", "0:1:11", "", "0.1:1:10", "", "ee_map.csv"};
    case SweepKind::ee_scaling: return {"16,32,64", "0.3", "1,2,3,4", "", "", "ee_scaling.csv"};
    case SweepKind::correlations: return {"64", "0.35", "6", "", "", "correlations.csv"};
    case SweepKind::stopo: return {"64", "0:1:21", "6,2.5", "", "", "stopo.csv"};
    case SweepKind::size_scan: return {"16,32,64", "0:1:11", "1,3,6", "", "", "size_scan.csv"};
  }
  return {};
}

struct SweepFlags {
  SweepKind kind;
  std::string L, p_zz, alpha, inv_alpha, p_b, fit_window, centers = "interior", out;
  std::size_t traj = 1000;
  double steps_mult = 4.0;
  std::uint64_t sample_every = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool progress = false;
};

void add_common(CLI::App* sub, SweepFlags& f) {
  const Defaults d = defaults_for(f.kind);
  f.L = d.L;
  f.p_zz = d.p_zz;
  f.out = d.out;
  sub->add_option("--L", f.L, "chain length(s): value, list or min:max:count")->capture_default_str();
  sub->add_option("--p-zz", f.p_zz, "ZZ measurement probability grid")->capture_default_str();
  auto* alpha = sub->add_option("--alpha", f.alpha, "power-law exponent grid");
  auto* inv = sub->add_option("--inv-alpha", f.inv_alpha, "grid over 1/alpha instead of alpha");
  alpha->excludes(inv);
  inv->excludes(alpha);
  alpha->description("power-law exponent grid (default " + (d.alpha.empty() ? "1/alpha " + d.inv_alpha : d.alpha) +
                     ")");
  sub->add_option("--traj", f.traj, "trajectories per parameter point")->capture_default_str();
  sub->add_option("--steps-mult", f.steps_mult, "steps per trajectory in units of L^2")->capture_default_str();
  sub->add_option("--seed", f.seed, "base seed")->capture_default_str();
  sub->add_option("--out", f.out, "output CSV path")->capture_default_str();
  sub->add_option("--threads", f.threads, "worker threads (0 = all cores)")->envname("LRMOC_THREADS");
  sub->add_option("--centers", f.centers, "ZXZ center rule: interior or edge_noop")->capture_default_str();
  sub->add_flag("--progress", f.progress, "print a progress counter on stderr");
  if (f.kind == SweepKind::edge_probe) {
    f.p_b = d.p_b;
    sub->add_option("--p-b", f.p_b, "boundary measurement probability grid")->capture_default_str();
  }
  if (f.kind == SweepKind::correlations) {
    f.fit_window = "4:auto";
    sub->add_option("--fit-window", f.fit_window, "fit C(r) = A r^-Delta over r_min:r_max ('auto' = L/4, 'off' = no fits)")
        ->capture_default_str();
  }
  if (f.kind == SweepKind::purification) {
    sub->add_option("--sample-every", f.sample_every, "steps between entropy samples (0 = L)")->capture_default_str();
  }
}

SweepSpec build_spec(const SweepFlags& f) {
  const Defaults d = defaults_for(f.kind);
  SweepSpec spec;
  spec.kind = f.kind;
  spec.L = parse_size_grid(f.L, "--L");
  spec.p_zz = parse_grid(f.p_zz, "--p-zz");
  if (!f.inv_alpha.empty()) {
    spec.alpha_axis = lrmoc::AlphaAxis::inv_alpha;
    spec.alpha_values = parse_grid(f.inv_alpha, "--inv-alpha");
  } else if (!f.alpha.empty()) {
    spec.alpha_values = parse_grid(f.alpha, "--alpha");
  } else if (!d.alpha.empty()) {
    spec.alpha_values = parse_grid(d.alpha, "--alpha");
  } else {
    spec.alpha_axis = lrmoc::AlphaAxis::inv_alpha;
    spec.alpha_values = parse_grid(d.inv_alpha, "--inv-alpha");
  }
  if (f.kind == SweepKind::edge_probe) spec.p_b = parse_grid(f.p_b, "--p-b");
  spec.trajectories = f.traj;
  spec.steps_mult = f.steps_mult;
  spec.sample_every = f.sample_every;
  if (f.centers == "interior") {
    spec.centers = lrmoc::CenterRule::interior;
  } else if (f.centers == "edge_noop") {
    spec.centers = lrmoc::CenterRule::edge_noop;
  } else {
    throw std::invalid_argument("--centers: expected interior or edge_noop, got '" + f.centers + "'");
  }
  if (!f.fit_window.empty() && f.fit_window != "off") {
    auto parts = split(f.fit_window, ':');
    if (parts.size() != 2) throw std::invalid_argument("--fit-window: expected r_min:r_max");
    const double r_max = parts[1] == "auto" ? 0.0 : parse_double(parts[1], "--fit-window");
    spec.fit_window = lrmoc::FitWindow{parse_double(parts[0], "--fit-window"), r_max};
  }
  spec.seed = f.seed;
  spec.out = f.out;
  spec.validate();
  return spec;
}

lrmoc::RunOptions run_options(unsigned threads, bool progress) {
  lrmoc::RunOptions opts;
  opts.threads = threads;
  if (progress) {
    opts.progress = [](std::size_t done, std::size_t total) {
      if (done == total || done % 64 == 0) {
        std::cerr << "\r" << done << "/" << total << (done == total ? "\n" : "") << std::flush;
      }
    };
  }
  return opts;
}

int report_written(const SweepSpec& spec, std::size_t rows) {
  std::cout << "wrote " << rows << " rows to " << spec.out << " (sidecar " << lrmoc::sidecar_path(spec.out);
  if (spec.fit_window) std::cout << ", fits " << lrmoc::fits_path(spec.out);
  std::cout << ")\n";
  return 0;
}

/// Flat "key = value" lines (or "key value"), '#' comments; keys are flag
/// names without the leading dashes. Returned as argv tokens.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find_first_of(" \t");
    std::string key = trim(line.substr(0, sep));
    std::string value = sep == std::string::npos ? "" : trim(line.substr(sep + 1));
    if (key.starts_with("--")) key.erase(0, 2);
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing key");
    tokens.push_back("--" + key);
    if (!value.empty()) tokens.push_back(value);
  }
  return tokens;
}

/// Inserts config-file tokens right after the subcommand name so that flags
/// given on the command line, which come later, take precedence.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::string path;
    std::size_t width = 0;
    if (args[k] == "--config" && k + 1 < args.size()) {
      path = args[k + 1];
      width = 2;
    } else if (args[k].starts_with("--config=")) {
      path = args[k].substr(9);
      width = 1;
    } else {
      continue;
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + width));
    auto tokens = read_config(path);
    const std::size_t at = args.empty() || args[0].starts_with("-") ? 0 : 1;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
    break;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-only circuits with power-law ZZ and cluster measurements"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lrmoc::code_version()));
  app.add_option("--config", "flat key = value file of flag defaults; command-line flags win");

  const std::vector<std::pair<SweepKind, std::string>> experiments = {
      {SweepKind::phase_diagram, "order parameters over a p_zz x 1/alpha grid"},
      {SweepKind::purification, "entropy of an initially mixed state over time"},
      {SweepKind::edge_probe, "edge polarization M_b over a p_b grid"},
      {SweepKind::ee_map, "half-chain entanglement over a p_zz x 1/alpha grid"},
      {SweepKind::ee_scaling, "half-chain entanglement versus L, normalized by the smallest L"},
      {SweepKind::correlations, "position-averaged ZZ and string correlators versus distance"},
      {SweepKind::stopo, "topological entanglement entropy versus p_zz"},
      {SweepKind::size_scan, "order parameters and entropies over a grid of system sizes"},
  };
  std::vector<SweepFlags> flags(experiments.size());
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < experiments.size(); ++k) {
    flags[k].kind = experiments[k].first;
    auto* sub = app.add_subcommand(std::string(lrmoc::to_string(experiments[k].first)), experiments[k].second);
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(sub, flags[k]);
    subs.push_back(sub);
  }

  lrmoc::oracle::OracleCheckConfig oracle_config;
  bool random_paulis = false;
  auto* oracle = app.add_subcommand("oracle-check", "randomized equivalence check against the dense simulator");
  oracle->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  oracle->add_option("--n", oracle_config.n, "qubits (3..12)")->capture_default_str();
  oracle->add_option("--cases", oracle_config.cases, "random measurement sequences")->capture_default_str();
  oracle->add_option("--steps", oracle_config.steps, "measurements per sequence")->capture_default_str();
  oracle->add_option("--seed", oracle_config.seed, "base seed")->capture_default_str();
  oracle->add_option("--threads", oracle_config.threads, "worker threads (0 = all cores)")->envname("LRMOC_THREADS");
  oracle->add_flag("--random-paulis", random_paulis, "also measure random Pauli strings");

  std::string sidecar;
  std::string rerun_out;
  unsigned rerun_threads = 0;
  auto* rerun = app.add_subcommand("rerun", "rerun an experiment from its JSON sidecar");
  rerun->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  rerun->add_option("sidecar", sidecar, "JSON sidecar written by a previous run")->required();
  rerun->add_option("--out", rerun_out, "output CSV path (default: the recorded one)");
  rerun->add_option("--threads", rerun_threads, "worker threads (0 = all cores)")->envname("LRMOC_THREADS");

  try {
    auto args = expand_config(argc, argv);
    std::vector<char*> expanded{argv[0]};
    for (auto& a : args) expanded.push_back(a.data());
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "lrmoc: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  } catch (const std::exception& e) {
    std::cerr << "lrmoc: " << e.what() << "\n";
    return 2;
  }

  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (!subs[k]->parsed()) continue;
      const SweepSpec spec = build_spec(flags[k]);
      const std::size_t rows = lrmoc::run_and_write(spec, run_options(flags[k].threads, flags[k].progress));
      return report_written(spec, rows);
    }
    if (oracle->parsed()) {
      if (random_paulis) oracle_config.operators = lrmoc::oracle::ProbeSet::circuit_and_random_paulis;
      const auto report = lrmoc::oracle::run_oracle_check(oracle_config);
      std::cout << "oracle-check n=" << oracle_config.n << ": " << report.passed << "/" << report.cases
                << " cases pass (" << report.measurements << " measurements, " << report.expectation_checks
                << " expectations, " << report.entropy_checks << " entropies)\n";
      for (const auto& f : report.failures) std::cout << "  FAIL " << f << "\n";
      return report.ok() ? 0 : 1;
    }
    if (rerun->parsed()) {
      std::ifstream f(sidecar);
      if (!f) throw std::runtime_error("cannot read sidecar '" + sidecar + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("sidecar '" + sidecar + "' is not valid JSON");
      }
      if (!j.contains("spec")) throw std::runtime_error("sidecar '" + sidecar + "' has no spec");
      SweepSpec spec = lrmoc::spec_from_json(j.at("spec"));
      if (!rerun_out.empty()) spec.out = rerun_out;
      const std::size_t rows = lrmoc::run_and_write(spec, run_options(rerun_threads, false));
      return report_written(spec, rows);
    }
  } catch (const std::exception& e) {
    std::cerr << "lrmoc: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
