#include "lrmoc/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#ifndef LRMOC_VERSION
#define LRMOC_VERSION "unknown"
#endif

namespace lrmoc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KindName {
  SweepKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {SweepKind::phase_diagram, "phase-diagram"}, {SweepKind::purification, "purify"},
    {SweepKind::edge_probe, "edge-probe"},       {SweepKind::ee_map, "ee-map"},
    {SweepKind::ee_scaling, "ee-scaling"},       {SweepKind::correlations, "correlations"},
    {SweepKind::stopo, "stopo"},                 {SweepKind::size_scan, "size-scan"},
};

void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

std::string_view to_string(SweepKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view text) {
  for (const auto& k : kKindNames) {
    if (k.name == text) return k.kind;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(text) + "'");
}

std::string_view code_version() { return LRMOC_VERSION; }

// ---------------------------------------------------------------------------
// SweepSpec

Protocol SweepSpec::protocol() const noexcept {
  switch (kind) {
    case SweepKind::purification: return Protocol::purification;
    case SweepKind::edge_probe: return Protocol::edge_probe;
    default: return Protocol::steady_state;
  }
}

double SweepSpec::alpha_at(std::size_t index) const {
  const double v = alpha_values.at(index);
  return alpha_axis == AlphaAxis::alpha ? v : 1.0 / v;
}

double SweepSpec::inv_alpha_at(std::size_t index) const {
  const double v = alpha_values.at(index);
  return alpha_axis == AlphaAxis::inv_alpha ? v : 1.0 / v;
}

std::uint64_t SweepSpec::steps_for(std::size_t size) const {
  const double steps = std::round(steps_mult * static_cast<double>(size) * static_cast<double>(size));
  return steps < 1.0 ? 1 : static_cast<std::uint64_t>(steps);
}

void SweepSpec::validate() const {
  if (p_zz.empty()) fail("p_zz grid is empty");
  if (alpha_values.empty()) fail("alpha grid is empty");
  if (L.empty()) fail("L grid is empty");
  if (trajectories < 1) fail("trajectories must be >= 1");
  if (!(steps_mult > 0.0) || !std::isfinite(steps_mult)) fail("steps multiplier must be positive");
  if (kind == SweepKind::edge_probe) {
    if (p_b.empty()) fail("edge-probe needs a p_b grid");
  } else if (!p_b.empty()) {
    fail("p_b is only used by edge-probe");
  }
  if (fit_window) {
    if (kind != SweepKind::correlations) fail("fit window is only used by correlations");
    if (!(fit_window->r_min >= 1.0) || !(fit_window->r_max == 0.0 || fit_window->r_max > fit_window->r_min)) {
      fail("fit window must satisfy 1 <= r_min < r_max");
    }
  }
  for (std::size_t a = 0; a < alpha_values.size(); ++a) {
    if (!(alpha_values[a] > 0.0) || !std::isfinite(alpha_values[a])) {
      fail(std::string(alpha_axis == AlphaAxis::alpha ? "alpha" : "1/alpha") + " values must be positive and finite");
    }
  }
  for (std::size_t size : L) {
    if (kind == SweepKind::correlations && size < 8) fail("correlations need L >= 8");
    for (std::size_t a = 0; a < alpha_values.size(); ++a) {
      for (double p : p_zz) {
        CircuitParams params{.L = size, .p_zz = p, .alpha = alpha_at(a), .steps = steps_for(size),
                             .p_b = p_b.empty() ? 0.0 : p_b.front(), .protocol = protocol(), .centers = centers};
        params.validate();
      }
    }
  }
  for (double b : p_b) {
    if (!(b >= 0.0 && b <= 1.0)) fail("p_b must lie in [0, 1], got " + std::to_string(b));
  }
}

nlohmann::json spec_to_json(const SweepSpec& spec) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["p_zz"] = spec.p_zz;
  j["alpha_axis"] = spec.alpha_axis == AlphaAxis::alpha ? "alpha" : "inv_alpha";
  j["alpha_values"] = spec.alpha_values;
  j["L"] = spec.L;
  j["p_b"] = spec.p_b;
  j["trajectories"] = spec.trajectories;
  j["steps_mult"] = spec.steps_mult;
  j["sample_every"] = spec.sample_every;
  j["centers"] = spec.centers == CenterRule::interior ? "interior" : "edge_noop";
  if (spec.fit_window) {
    j["fit_window"] = {spec.fit_window->r_min, spec.fit_window->r_max};
  } else {
    j["fit_window"] = nullptr;
  }
  j["seed"] = spec.seed;
  j["out"] = spec.out;
  return j;
}

SweepSpec spec_from_json(const nlohmann::json& j) {
  SweepSpec spec;
  try {
    spec.kind = parse_sweep_kind(j.at("kind").get<std::string>());
    spec.p_zz = j.at("p_zz").get<std::vector<double>>();
    const auto axis = j.at("alpha_axis").get<std::string>();
    if (axis == "alpha") {
      spec.alpha_axis = AlphaAxis::alpha;
    } else if (axis == "inv_alpha") {
      spec.alpha_axis = AlphaAxis::inv_alpha;
    } else {
      fail("unknown alpha_axis '" + axis + "'");
    }
    spec.alpha_values = j.at("alpha_values").get<std::vector<double>>();
    spec.L = j.at("L").get<std::vector<std::size_t>>();
    spec.p_b = j.at("p_b").get<std::vector<double>>();
    spec.trajectories = j.at("trajectories").get<std::size_t>();
    spec.steps_mult = j.at("steps_mult").get<double>();
    spec.sample_every = j.at("sample_every").get<std::uint64_t>();
    const auto centers = j.at("centers").get<std::string>();
    if (centers == "interior") {
      spec.centers = CenterRule::interior;
    } else if (centers == "edge_noop") {
      spec.centers = CenterRule::edge_noop;
    } else {
      fail("unknown centers rule '" + centers + "'");
    }
    const auto& fw = j.at("fit_window");
    if (!fw.is_null()) spec.fit_window = FitWindow{fw.at(0).get<double>(), fw.at(1).get<double>()};
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.out = j.at("out").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed sweep spec: ") + e.what());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Scheduling

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const RunOptions& options, const std::function<void(std::size_t)>& task) {
  if (count == 0) return;
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(resolve_threads(options.threads), count));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex mu;

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        stop = true;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(mu);
        options.progress(finished, count);
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Aggregation

double IntegerMoments::mean(double scale) const noexcept {
  if (count == 0) return kNaN;
  return static_cast<double>(sum) / static_cast<double>(count) / scale;
}

double IntegerMoments::sem(double scale) const noexcept {
  if (count < 2) return count == 0 ? kNaN : 0.0;
  const auto n = static_cast<__int128>(count);
  // n * sum_sq - sum^2 is exact, so a constant series gives exactly zero.
  const __int128 spread = n * static_cast<__int128>(sum_sq) - static_cast<__int128>(sum) * sum;
  const double variance = static_cast<double>(spread) / (static_cast<double>(count) * static_cast<double>(count - 1));
  return std::sqrt(variance / static_cast<double>(count)) / scale;
}

double PointStats::max_order() const noexcept {
  const double a = o_ssb.mean();
  const double b = o_spt.mean();
  if (std::isnan(a)) return b;
  if (std::isnan(b)) return a;
  return std::max(a, b);
}

namespace {

double reference_count(std::size_t L, std::size_t r, bool spt) {
  if (L < 8 || r < 1 || r > max_correlation_distance(L)) return 0.0;
  return static_cast<double>((spt ? spt_references(L, r) : zz_references(L, r)).count());
}

double moments_mean(const std::vector<IntegerMoments>& v, std::size_t r, double refs) {
  if (r < 1 || r > v.size() || refs == 0.0) return kNaN;
  return v[r - 1].mean(refs);
}

double moments_sem(const std::vector<IntegerMoments>& v, std::size_t r, double refs) {
  if (r < 1 || r > v.size() || refs == 0.0) return kNaN;
  return v[r - 1].sem(refs);
}

}  // namespace

double PointStats::c_zz_mean(std::size_t r) const {
  return moments_mean(c_zz_hits, r, reference_count(params.L, r, false));
}
double PointStats::c_zz_sem(std::size_t r) const {
  return moments_sem(c_zz_hits, r, reference_count(params.L, r, false));
}
double PointStats::c_spt_mean(std::size_t r) const {
  return moments_mean(c_spt_hits, r, reference_count(params.L, r, true));
}
double PointStats::c_spt_sem(std::size_t r) const {
  return moments_sem(c_spt_hits, r, reference_count(params.L, r, true));
}

PointStats aggregate(const CircuitParams& params, const std::vector<TrajectoryRecord>& records) {
  PointStats st;
  st.params = params;
  st.params.trajectory = 0;
  st.n_traj = records.size();
  for (const auto& rec : records) {
    if (rec.o_ssb) st.o_ssb.add(*rec.o_ssb);
    if (rec.o_spt) st.o_spt.add(*rec.o_spt);
    st.s_half.add(static_cast<std::int64_t>(rec.s_half));
    if (rec.s_topo) st.s_topo.add(*rec.s_topo);
    st.m_b_halves.add(rec.m_b_halves);
    if (st.c_zz_hits.size() < rec.c_zz_hits.size()) st.c_zz_hits.resize(rec.c_zz_hits.size());
    if (st.c_spt_hits.size() < rec.c_spt_hits.size()) st.c_spt_hits.resize(rec.c_spt_hits.size());
    for (std::size_t k = 0; k < rec.c_zz_hits.size(); ++k) st.c_zz_hits[k].add(rec.c_zz_hits[k]);
    for (std::size_t k = 0; k < rec.c_spt_hits.size(); ++k) st.c_spt_hits[k].add(rec.c_spt_hits[k]);
  }
  return st;
}

std::vector<TrajectoryRecord> run_trajectories(const CircuitParams& params, std::size_t n_traj,
                                               const ObservableSet& which, const RunOptions& options) {
  params.validate();
  std::vector<TrajectoryRecord> records(n_traj);
  parallel_for(n_traj, options, [&](std::size_t t) {
    CircuitParams p = params;
    p.trajectory = t;
    records[t] = run_steady_state(p, which).record;
  });
  return records;
}

PointStats run_ensemble(const CircuitParams& params, std::size_t n_traj, const ObservableSet& which,
                        const RunOptions& options) {
  return aggregate(params, run_trajectories(params, n_traj, which, options));
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<GridPoint> grid_points(const SweepSpec& spec) {
  const std::vector<double> p_b = spec.p_b.empty() ? std::vector<double>{0.0} : spec.p_b;
  std::vector<GridPoint> points;
  for (std::size_t size : spec.L) {
    for (std::size_t a = 0; a < spec.alpha_values.size(); ++a) {
      for (double b : p_b) {
        for (double p : spec.p_zz) {
          CircuitParams params{.L = size, .p_zz = p, .alpha = spec.alpha_at(a), .steps = spec.steps_for(size),
                               .p_b = b, .protocol = spec.protocol(), .centers = spec.centers, .seed = spec.seed};
          points.push_back({params, a});
        }
      }
    }
  }
  return points;
}

SweepTable run_sweep(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  if (spec.kind == SweepKind::purification) throw std::invalid_argument("run_sweep: use run_purification_sweep");
  SweepTable table{spec, grid_points(spec), {}};
  const ObservableSet which{.correlations = spec.kind == SweepKind::correlations};
  const std::size_t per_point = spec.trajectories;
  std::vector<std::vector<TrajectoryRecord>> records(table.points.size(), std::vector<TrajectoryRecord>(per_point));
  parallel_for(table.points.size() * per_point, options, [&](std::size_t task) {
    const std::size_t point = task / per_point;
    const std::size_t t = task % per_point;
    CircuitParams p = table.points[point].params;
    p.trajectory = t;
    records[point][t] = run_steady_state(p, which).record;
  });
  table.stats.reserve(table.points.size());
  for (std::size_t k = 0; k < table.points.size(); ++k) {
    table.stats.push_back(aggregate(table.points[k].params, records[k]));
  }
  return table;
}

SweepTable run_phase_diagram(const SweepSpec& spec, const RunOptions& options) { return run_sweep(spec, options); }

SweepTable run_edge_probe_sweep(const SweepSpec& spec, const RunOptions& options) {
  if (spec.kind != SweepKind::edge_probe) throw std::invalid_argument("run_edge_probe_sweep needs an edge-probe spec");
  return run_sweep(spec, options);
}

std::vector<ScalingRow> scaling_rows(const SweepTable& table) {
  const SweepSpec& spec = table.spec;
  const std::size_t n_alpha = spec.alpha_values.size();
  const std::size_t n_p = spec.p_zz.size();
  const std::size_t n_b = spec.p_b.empty() ? 1 : spec.p_b.size();
  auto index = [&](std::size_t li, std::size_t ai, std::size_t pi) { return ((li * n_alpha + ai) * n_b) * n_p + pi; };
  const auto smallest = static_cast<std::size_t>(std::min_element(spec.L.begin(), spec.L.end()) - spec.L.begin());

  std::vector<std::size_t> order(spec.L.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return spec.L[x] < spec.L[y]; });

  std::vector<ScalingRow> rows;
  for (std::size_t ai = 0; ai < n_alpha; ++ai) {
    for (std::size_t pi = 0; pi < n_p; ++pi) {
      const double base = table.stats[index(smallest, ai, pi)].s_half.mean();
      for (std::size_t li : order) {
        const auto& st = table.stats[index(li, ai, pi)];
        const double mean = st.s_half.mean();
        rows.push_back({spec.p_zz[pi], spec.alpha_at(ai), spec.L[li], mean, st.s_half.sem(),
                        base > 0.0 ? mean / base : kNaN});
      }
    }
  }
  return rows;
}

std::vector<ScalingRow> run_scaling(const SweepSpec& spec, const RunOptions& options) {
  return scaling_rows(run_sweep(spec, options));
}

std::vector<PurificationRow> run_purification_sweep(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  if (spec.kind != SweepKind::purification) throw std::invalid_argument("run_purification_sweep needs a purify spec");
  const auto points = grid_points(spec);
  const std::size_t per_point = spec.trajectories;
  std::vector<std::vector<EntropySample>> series(points.size() * per_point);
  parallel_for(series.size(), options, [&](std::size_t task) {
    CircuitParams p = points[task / per_point].params;
    p.trajectory = task % per_point;
    const std::uint64_t every = spec.sample_every != 0 ? spec.sample_every : p.L;
    const std::uint64_t total = p.total_steps();
    std::vector<std::uint64_t> times;
    for (std::uint64_t t = every; t < total; t += every) times.push_back(t);
    times.push_back(total);
    series[task] = run_purification(p, times);
  });
  std::vector<PurificationRow> rows;
  for (std::size_t task = 0; task < series.size(); ++task) {
    const auto& p = points[task / per_point].params;
    for (const auto& s : series[task]) {
      rows.push_back({p.p_zz, p.alpha, p.L, task % per_point, s.step, s.entropy});
    }
  }
  return rows;
}

std::vector<FitRow> correlation_fits(const SweepTable& table, FitWindow window) {
  std::vector<FitRow> rows;
  for (const auto& st : table.stats) {
    const std::size_t rmax = max_correlation_distance(st.params.L);
    for (bool spt : {false, true}) {
      std::vector<CorrelationPoint> pts;
      for (std::size_t r = 1; r <= rmax; ++r) {
        pts.push_back({static_cast<double>(r), spt ? st.c_spt_mean(r) : st.c_zz_mean(r)});
      }
      const double r_min = window.r_min;
      const double r_max = window.upper_for(st.params.L);
      FitRow row{st.params.p_zz, st.params.alpha, st.params.L, spt ? "c_spt" : "c_zz", {}, r_min, r_max};
      if (auto fit = fit_power_law(pts, r_min, r_max)) {
        row.fit = *fit;
      } else {
        row.fit = {kNaN, kNaN, kNaN, 0, 0};
        for (const auto& q : pts) {
          if (q.r >= r_min && q.r <= r_max) {
            if (q.value > 0.0) ++row.fit.used;
            else if (q.value == 0.0) ++row.fit.zeros_excluded;
          }
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

const char* const kPhaseDiagramHeader =
    "p_zz,inv_alpha,L,n_traj,o_ssb_mean,o_ssb_sem,o_spt_mean,o_spt_sem,max_order,s_half_mean,s_half_sem,s_topo_mean,"
    "s_topo_sem";
const char* const kPurificationHeader = "p_zz,alpha,L,traj,step,S";
const char* const kCorrelationsHeader = "p_zz,alpha,L,r,c_zz_mean,c_zz_sem,c_spt_mean,c_spt_sem";
const char* const kEdgeProbeHeader = "p_zz,alpha,L,p_b,m_b_mean,m_b_sem";
const char* const kScalingHeader = "p_zz,alpha,L,s_half_mean,s_half_sem,s_half_normalized";
const char* const kFitsHeader = "p_zz,alpha,L,observable,A,delta,residual,r_min,r_max,n_used,n_zero";

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

class CsvLine {
 public:
  explicit CsvLine(std::ostream& os) : os_(os) {}
  ~CsvLine() { os_ << '\n'; }
  CsvLine& operator<<(double v) { return put(format_number(v)); }
  CsvLine& operator<<(std::uint64_t v) { return put(std::to_string(v)); }
  CsvLine& operator<<(std::string_view v) { return put(v); }

 private:
  CsvLine& put(std::string_view s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << s;
    return *this;
  }
  std::ostream& os_;
  bool first_ = true;
};

std::uint64_t u(std::size_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

void write_phase_diagram_csv(std::ostream& os, const SweepTable& table) {
  os << kPhaseDiagramHeader << '\n';
  for (std::size_t k = 0; k < table.points.size(); ++k) {
    const auto& st = table.stats[k];
    CsvLine(os) << st.params.p_zz << table.spec.inv_alpha_at(table.points[k].alpha_index) << u(st.params.L)
                << u(st.n_traj) << st.o_ssb.mean() << st.o_ssb.sem() << st.o_spt.mean() << st.o_spt.sem()
                << st.max_order() << st.s_half.mean() << st.s_half.sem() << st.s_topo.mean() << st.s_topo.sem();
  }
}

void write_edge_probe_csv(std::ostream& os, const SweepTable& table) {
  os << kEdgeProbeHeader << '\n';
  for (const auto& st : table.stats) {
    CsvLine(os) << st.params.p_zz << st.params.alpha << u(st.params.L) << st.params.p_b << st.m_b_mean()
                << st.m_b_sem();
  }
}

void write_correlations_csv(std::ostream& os, const SweepTable& table) {
  os << kCorrelationsHeader << '\n';
  for (const auto& st : table.stats) {
    for (std::size_t r = 1; r <= max_correlation_distance(st.params.L); ++r) {
      CsvLine(os) << st.params.p_zz << st.params.alpha << u(st.params.L) << u(r) << st.c_zz_mean(r)
                  << st.c_zz_sem(r) << st.c_spt_mean(r) << st.c_spt_sem(r);
    }
  }
}

void write_scaling_csv(std::ostream& os, const std::vector<ScalingRow>& rows) {
  os << kScalingHeader << '\n';
  for (const auto& r : rows) {
    CsvLine(os) << r.p_zz << r.alpha << u(r.L) << r.s_half_mean << r.s_half_sem << r.s_half_normalized;
  }
}

void write_purification_csv(std::ostream& os, const std::vector<PurificationRow>& rows) {
  os << kPurificationHeader << '\n';
  for (const auto& r : rows) {
    CsvLine(os) << r.p_zz << r.alpha << u(r.L) << r.trajectory << r.step << u(r.entropy);
  }
}

void write_fits_csv(std::ostream& os, const std::vector<FitRow>& rows) {
  os << kFitsHeader << '\n';
  for (const auto& r : rows) {
    CsvLine(os) << r.p_zz << r.alpha << u(r.L) << r.observable << r.fit.amplitude << r.fit.exponent
                << r.fit.residual << r.r_min << r.r_max << u(r.fit.used) << u(r.fit.zeros_excluded);
  }
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  if (p.extension() == ".csv") return p.replace_extension(".json").string();
  return csv_path + ".json";
}

std::string fits_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  if (p.extension() == ".csv") return p.replace_extension(".fits.csv").string();
  return csv_path + ".fits.csv";
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << contents;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::size_t count_rows(const std::string& csv) {
  const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  return lines == 0 ? 0 : lines - 1;
}

}  // namespace

std::size_t run_and_write(const SweepSpec& spec, const RunOptions& options) {
  spec.validate();
  if (spec.out.empty()) throw std::invalid_argument("no output path given");
  const auto parent = std::filesystem::path(spec.out).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw std::runtime_error("output directory '" + parent.string() + "' does not exist");
  }

  std::ostringstream csv;
  std::ostringstream fits;
  bool with_fits = false;
  switch (spec.kind) {
    case SweepKind::purification:
      write_purification_csv(csv, run_purification_sweep(spec, options));
      break;
    case SweepKind::edge_probe:
      write_edge_probe_csv(csv, run_edge_probe_sweep(spec, options));
      break;
    case SweepKind::ee_scaling:
      write_scaling_csv(csv, run_scaling(spec, options));
      break;
    case SweepKind::correlations: {
      auto table = run_sweep(spec, options);
      write_correlations_csv(csv, table);
      if (spec.fit_window) {
        write_fits_csv(fits, correlation_fits(table, *spec.fit_window));
        with_fits = true;
      }
      break;
    }
    case SweepKind::phase_diagram:
    case SweepKind::ee_map:
    case SweepKind::stopo:
    case SweepKind::size_scan:
      write_phase_diagram_csv(csv, run_phase_diagram(spec, options));
      break;
  }

  const std::string text = csv.str();
  const std::size_t rows = count_rows(text);
  write_file(spec.out, text);
  if (with_fits) write_file(fits_path(spec.out), fits.str());

  nlohmann::json sidecar;
  sidecar["spec"] = spec_to_json(spec);
  sidecar["code_version"] = std::string(code_version());
  sidecar["base_seed"] = spec.seed;
  sidecar["rows"] = rows;
  if (with_fits) sidecar["fits"] = std::filesystem::path(fits_path(spec.out)).filename().string();
  write_file(sidecar_path(spec.out), sidecar.dump(2) + "\n");
  return rows;
}

}  // namespace lrmoc
