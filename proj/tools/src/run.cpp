#include "cavityband/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cavityband/band.hpp"
#include "cavityband/bistability.hpp"
#include "cavityband/catastrophe.hpp"
#include "cavityband/cli/output.hpp"
#include "cavityband/photon.hpp"
#include "cavityband/stability.hpp"

#ifndef CAVITYBAND_VERSION
#define CAVITYBAND_VERSION "0.0.0"
#endif

namespace cavityband::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Cells = std::vector<CsvTable::Cell>;

long long ll(std::size_t x) { return static_cast<long long>(x); }

void add_plot(Artifacts& a, const RunConfig& cfg, const std::string& title, const std::string& xl,
              const std::string& yl, const std::vector<PlotSeries>& s) {
  if (cfg.plots) a.files.emplace_back(cfg.command + ".svg", svg_plot(title, xl, yl, s));
}

int final_truncation(double q, const std::vector<double>& depths, int band, int R) {
  int out = 0;
  for (double v : depths) out = std::max(out, solve_bloch(q, v, band, R).truncation);
  return out;
}

// ---- lineshape ----
Artifacts do_lineshape(const RunConfig& cfg, const Execution& ex) {
  Lineshape ls;
  ls.delta_c = cfg.delta_grid;
  ls.sets = parallel_map(cfg.delta_grid.size(), ex, [&](std::size_t i) {
    SystemParams p = cfg.params;
    p.delta_c = cfg.delta_grid[i];
    return cfg.red_detuned ? find_branches_red_detuned(cfg.q, p, cfg.band) : find_branches(cfg.q, p, cfg.band);
  });
  hysteresis_traces(ls);

  CsvTable t({"delta_c[omega_R]", "count[1]", "branch[1]", "n_ph[1]", "v[E_R]", "f[1]", "mu[E_R]", "energy[E_R]",
              "trace_up_n_ph[1]", "trace_down_n_ph[1]"});
  PlotSeries all{"branches", {}, true}, up{"sweep up", {}, false}, down{"sweep down", {}, false};
  std::size_t max_count = 0;
  std::vector<double> depths;
  for (std::size_t i = 0; i < ls.sets.size(); ++i) {
    const auto& s = ls.sets[i];
    max_count = std::max(max_count, s.count());
    for (std::size_t k = 0; k < s.count(); ++k) {
      const auto& b = s.branches[k];
      t.add_row(Cells{ls.delta_c[i], ll(s.count()), ll(k), b.n_ph, b.v, b.f, b.mu, b.energy_total, ls.trace_up[i],
                      ls.trace_down[i]});
      all.points.emplace_back(ls.delta_c[i], b.n_ph);
      depths.push_back(b.v);
    }
    up.points.emplace_back(ls.delta_c[i], ls.trace_up[i]);
    down.points.emplace_back(ls.delta_c[i], ls.trace_down[i]);
  }
  Artifacts a;
  a.files.emplace_back("lineshape.csv", t.str());
  add_plot(a, cfg, "lineshape q=" + format_double(cfg.q), "delta_c [omega_R]", "n_ph", {all, up, down});
  a.diagnostics["max_branch_count"] = max_count;
  a.diagnostics["final_R"] = final_truncation(cfg.q, depths, cfg.band, cfg.R);
  return a;
}

// ---- band ----
Artifacts do_band(const RunConfig& cfg, const Execution& ex) {
  Artifacts a;
  CsvTable t({"q[1]", "branch[label]", "track[1]", "detached[1]", "energy[E_R]", "energy_per_atom[E_R]", "n_ph[1]",
              "v[E_R]", "mu[E_R]"});
  std::vector<PlotSeries> plots;
  int final_R = 0;

  if (cfg.method == "method1") {
    auto per_q = parallel_map(cfg.q_grid.size(), ex, [&](std::size_t i) {
      Method1Options mo;
      mo.band = cfg.band;
      return method1_extremize(cfg.q_grid[i], cfg.params, cfg.R, mo);
    });
    PlotSeries pts{"extrema", {}, true};
    for (std::size_t i = 0; i < per_q.size(); ++i) {
      auto ext = per_q[i];
      std::sort(ext.begin(), ext.end(), [](const Extremum& x, const Extremum& y) { return x.n_ph < y.n_ph; });
      std::vector<double> order;
      for (const auto& e : ext) order.push_back(e.energy);
      std::sort(order.begin(), order.end());
      for (const auto& e : ext) {
        const auto rank = std::find(order.begin(), order.end(), e.energy) - order.begin();
        const BranchLabel lab = ext.size() == 1 ? BranchLabel::lower
                                : rank == 0     ? BranchLabel::lower
                                : rank + 1 == static_cast<long>(ext.size()) ? BranchLabel::upper
                                                                             : BranchLabel::middle;
        t.add_row(Cells{cfg.q_grid[i], std::string(to_string(lab)), -1LL, 0LL, e.energy,
                        e.energy / cfg.params.n_atoms, e.n_ph, e.v, e.mu});
        pts.points.emplace_back(cfg.q_grid[i], e.energy / cfg.params.n_atoms);
        final_R = std::max(final_R, e.state.truncation);
      }
    }
    plots.push_back(pts);
  } else {
    const BandDiagram d = band_sweep(cfg.params, cfg.band, cfg.q_grid, ex);
    for (const auto& p : d.points) {
      t.add_row(Cells{p.q, std::string(to_string(p.label)), static_cast<long long>(p.track),
                      static_cast<long long>(p.detached), p.energy_total, p.energy_per_atom, p.n_ph, p.v, p.mu});
      final_R = std::max(final_R, solve_bloch(p.q, p.v, cfg.band, cfg.R).truncation);
    }
    for (std::size_t k = 0; k < d.tracks.size(); ++k) {
      PlotSeries s{"track " + std::to_string(k) + (d.tracks[k].reaches_edge ? "" : " (loop)"), {}, false};
      for (auto idx : d.tracks[k].points) s.points.emplace_back(d.points[idx].q, d.points[idx].energy_per_atom);
      plots.push_back(std::move(s));
    }
    json eps = json::array();
    for (const auto& e : d.endpoints) eps.push_back({{"q", e.q}, {"n_ph", e.n_ph}, {"gap", e.gap}});
    a.diagnostics["loop_endpoints"] = eps;
    a.diagnostics["tracks"] = d.tracks.size();
  }
  if (cfg.method == "both") {
    const CrossValidation cv = cross_validate(cfg.q_grid, cfg.params, cfg.band, ex);
    a.diagnostics["method_agreement"] = {{"max_rel_discrepancy", cv.max_rel_discrepancy}, {"worst_q", cv.worst_q}};
  }
  a.diagnostics["final_R"] = final_R;
  a.files.emplace_back("band.csv", t.str());
  add_plot(a, cfg, "band structure", "q", "E/N [E_R]", plots);
  return a;
}

// ---- scurve ----
Artifacts do_scurve(const RunConfig& cfg, const Execution& ex) {
  BlochOverlap model(cfg.q, cfg.band);
  auto pts = parallel_map(cfg.nph_grid.size(), ex, [&](std::size_t i) {
    return input_output_curve(cfg.params, model, {cfg.nph_grid[i]}).front();
  });
  CsvTable t({"n_ph[1]", "n_max[1]", "f[1]"});
  PlotSeries s{"n_ph(n_max)", {}, false};
  int turns = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t.add_row(Cells{pts[i].n_ph, pts[i].n_max, pts[i].f});
    s.points.emplace_back(pts[i].n_max, pts[i].n_ph);
    if (i >= 2 && (pts[i].n_max - pts[i - 1].n_max) * (pts[i - 1].n_max - pts[i - 2].n_max) < 0) ++turns;
  }
  Artifacts a;
  a.files.emplace_back("scurve.csv", t.str());
  add_plot(a, cfg, "input-output curve", "n_max", "n_ph", {s});
  a.diagnostics["turning_points"] = turns;
  return a;
}

// ---- bifmap ----
Artifacts do_bifmap(const RunConfig& cfg, const Execution& ex) {
  const BifurcationMap m = bifurcation_map(cfg.q, cfg.params, cfg.eta_grid, cfg.delta_grid, cfg.band, ex);
  CsvTable t({"eta[omega_R]", "delta_c[omega_R]", "count[1]"});
  std::set<int> counts;
  for (std::size_t i = 0; i < m.eta_grid.size(); ++i)
    for (std::size_t j = 0; j < m.delta_grid.size(); ++j) {
      t.add_row(Cells{m.eta_grid[i], m.delta_grid[j], static_cast<long long>(m.counts[i][j])});
      counts.insert(m.counts[i][j]);
    }
  std::vector<PlotSeries> plots;
  for (const auto& f : m.folds) {
    PlotSeries s{"fold " + format_double(f.level), {}, false};
    for (auto [d, e] : f.points) s.points.emplace_back(d, e);
    plots.push_back(std::move(s));
  }
  json markers = json::array();
  PlotSeries cusps{"cusp", {}, true};
  for (const auto& mk : m.markers) {
    markers.push_back({{"kind", mk.kind}, {"delta_c", mk.delta_c}, {"eta", mk.eta}, {"v", mk.v}});
    cusps.points.emplace_back(mk.delta_c, mk.eta);
  }
  plots.push_back(cusps);
  Artifacts a;
  a.files.emplace_back("bifmap.csv", t.str());
  add_plot(a, cfg, "solution count q=" + format_double(cfg.q), "delta_c [omega_R]", "eta [omega_R]", plots);
  a.diagnostics["counts_present"] = counts;
  a.diagnostics["markers"] = markers;
  a.diagnostics["fold_polylines"] = m.folds.size();
  return a;
}

// ---- critical ----
Artifacts do_critical(const RunConfig& cfg, const Execution&) {
  const SystemParams& p = cfg.params;
  CriticalSearch s;
  s.delta_lo = cfg.delta_lo.value_or(std::max(0.0, 0.5 * p.nu0() - 8.0 * p.kappa));
  s.delta_hi = cfg.delta_hi.value_or(0.5 * p.nu0() + 2.0 * p.kappa);
  const CriticalPoint c = critical_point_numeric(cfg.q, p, s, cfg.band);
  const double shallow = eta_cr_analytic_shallow(cfg.q, p, cfg.analytic);
  CsvTable t({"q[1]", "delta_0[omega_R]", "eta_cr[omega_R]", "n_0[1]", "v_0[E_R]", "eta_cr_shallow[omega_R]"});
  t.add_row(Cells{c.q, c.delta_0, c.eta_cr, c.n_0, c.v_0, shallow});
  Artifacts a;
  a.files.emplace_back("critical.csv", t.str());
  a.diagnostics["residual"] = c.residual;
  a.diagnostics["residual_dv"] = c.residual_dv;
  a.diagnostics["newton_iterations"] = c.iterations;
  a.diagnostics["search_window"] = {s.delta_lo, s.delta_hi};
  a.diagnostics["final_R"] = solve_bloch(cfg.q, c.v_0, cfg.band, cfg.R).truncation;
  return a;
}

// ---- swallowtail ----
Artifacts do_swallowtail(const RunConfig& cfg, const Execution& ex) {
  SwallowtailScanOptions o;
  o.v_lo = cfg.swallowtail.v_lo;
  o.v_hi = cfg.swallowtail.v_hi;
  o.v_points = cfg.swallowtail.v_points;
  o.n_atoms = cfg.params.n_atoms;
  o.kappa = cfg.params.kappa;
  o.band = cfg.band;
  const std::vector<double> qs = cfg.q_grid.empty() ? std::vector<double>{cfg.q} : cfg.q_grid;

  CsvTable t({"q[1]", "v[E_R]", "delta_over_NU0[1]", "kappa2_over_NU0_2[1]", "delta_c[omega_R]", "eta[kappa]",
              "u0[omega_R]", "n_ph[1]", "residual4[1]", "residual4_err[1]", "butterfly[verdict]", "rank[1]",
              "inconclusive[1]"});
  PlotSeries s1{"delta_c/kappa", {}, true}, s2{"eta/kappa", {}, true};
  std::size_t found = 0;
  double worst_err = 0;
  for (double q : qs) {
    for (const auto& p : swallowtail_scan(q, o, ex)) {
      const BlochOverlap model(q, cfg.band);
      const ButterflyResult b = butterfly_check(p, model);
      const TransversalityResult tr = transversality_rank_check(p, model);
      t.add_row(Cells{q, p.v, p.delta_over_NU0, p.inv_NU0_sq, p.delta_c, p.eta, p.u0, p.n_ph, b.residual4.value,
                      b.residual4.error, std::string(to_string(b.verdict)), static_cast<long long>(tr.rank),
                      static_cast<long long>(p.inconclusive)});
      s1.points.emplace_back(q, p.delta_c / p.kappa);
      s2.points.emplace_back(q, p.eta);
      worst_err = std::max({worst_err, p.residual3.error, b.residual4.error});
      ++found;
    }
  }
  Artifacts a;
  a.files.emplace_back("swallowtail.csv", t.str());
  add_plot(a, cfg, "swallowtail points", "q", "kappa units", {s1, s2});
  a.diagnostics["points"] = found;
  a.diagnostics["max_derivative_error"] = worst_err;
  if (cfg.swallowtail.find_q_sw) {
    try {
      a.diagnostics["q_sw"] = find_q_sw(cfg.swallowtail.q_lo, cfg.swallowtail.q_hi, cfg.swallowtail.q_tol, o, ex);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::not_found) throw;
      a.diagnostics["q_sw"] = nullptr;
      a.diagnostics["q_sw_message"] = e.what();
      a.inconclusive = true;
    }
  }
  if (found == 0) a.inconclusive = true;
  return a;
}

// ---- stability ----
Artifacts do_stability(const RunConfig& cfg, const Execution& ex) {
  CsvTable t({"q[1]", "branch[1]", "n_ph[1]", "energy[E_R]", "min_eig_A[omega_R]", "min_eig_A_full[omega_R]",
              "max_abs_imag_sigmaA[omega_R]", "energetically_stable[1]", "dynamically_stable[1]", "J[1]"});
  std::vector<StabilityReport> reports;
  Artifacts a;
  if (cfg.q_grid.empty()) {
    const BranchStability bs = classify_branches(find_branches(cfg.q, cfg.params, cfg.band), cfg.J, ex, cfg.R);
    reports = bs.reports;
    if (!bs.note.empty()) a.diagnostics["note"] = bs.note;
  } else {
    const BandDiagram d = band_sweep(cfg.params, cfg.band, cfg.q_grid, ex);
    reports = classify_band(d, cfg.J, ex, cfg.R);
    for (std::size_t i = 0; i + 1 < d.q_offsets.size(); ++i)
      if (d.q_offsets[i + 1] - d.q_offsets[i] == 5) a.diagnostics["note"] = "paper-anticipated";
  }
  PlotSeries st{"stable", {}, true}, un{"unstable", {}, true};
  std::size_t unstable = 0, flagged = 0;
  for (const auto& r : reports) {
    t.add_row(Cells{r.q, ll(r.branch), r.n_ph, r.energy_total, r.min_eig_A, r.min_eig_A_full, r.max_abs_imag,
                    static_cast<long long>(r.energetically_stable), static_cast<long long>(r.dynamically_stable),
                    static_cast<long long>(r.J)});
    const bool ok = r.energetically_stable && r.dynamically_stable;
    (ok ? st : un).points.emplace_back(r.q, r.energy_total / cfg.params.n_atoms);
    if (!ok) ++unstable;
    if (r.stable_energy_unstable_dynamics) ++flagged;
  }
  a.files.emplace_back("stability.csv", t.str());
  if (!cfg.q_grid.empty()) add_plot(a, cfg, "branch stability", "q", "E/N [E_R]", {st, un});
  a.diagnostics["unstable"] = unstable;
  a.diagnostics["stable_energy_unstable_dynamics"] = flagged;
  return a;
}

// ---- validate ----
Artifacts do_validate(const RunConfig& cfg, const Execution& ex) {
  CsvTable t({"check[name]", "value[1]", "tolerance[1]", "pass[1]"});
  bool all = true;
  auto check = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    all = all && ok;
    t.add_row(Cells{name, value, tol, static_cast<long long>(ok)});
  };

  const CrossValidation cv = cross_validate(cfg.q_grid, cfg.params, cfg.band, ex);
  check("method_agreement", cv.max_rel_discrepancy, 1e-6);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uq(-1.0, 1.0), uv(0.0, 20.0);
  double sym = 0, flip = 0;
  for (int i = 0; i < 50; ++i) {
    const double q = uq(rng), v = uv(rng);
    sym = std::max(sym, std::abs(overlap_value(q, v, cfg.band) - overlap_value(-q, v, cfg.band)));
    flip = std::max(flip, std::abs(overlap_value(q, -v, 0) - (1.0 - overlap_value(q, v, 0))));
  }
  check("f_symmetry_q", sym, 1e-10);
  check("f_sign_flip", flip, 1e-10);
  check("f_free_limit", std::abs(overlap_value(0.5, 0.0, 0) - 0.5), 1e-12);

  Artifacts a;
  a.files.emplace_back("validate.csv", t.str());
  a.diagnostics["all_passed"] = all;
  a.inconclusive = !all;
  return a;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::internal, "cannot write " + p.string());
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<Artifacts> cache_load(const fs::path& dir, std::ostream& log) {
  if (!fs::exists(dir / "entry.json")) return std::nullopt;
  try {
    const json entry = json::parse(read_file(dir / "entry.json").value());
    Artifacts a;
    for (const auto& f : entry.at("files")) {
      const std::string name = f.at("file").get<std::string>();
      auto bytes = read_file(dir / name);
      if (!bytes || sha256_hex(*bytes) != f.at("sha256").get<std::string>())
        throw std::runtime_error("checksum mismatch for " + name);
      a.files.emplace_back(name, std::move(*bytes));
    }
    a.diagnostics = entry.at("diagnostics");
    a.inconclusive = entry.at("inconclusive").get<bool>();
    return a;
  } catch (const std::exception& e) {
    log << "warning: corrupted cache entry " << dir.string() << " (" << e.what() << "), recomputing\n";
    return std::nullopt;
  }
}

void cache_store(const fs::path& dir, const Artifacts& a) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return;
  json files = json::array();
  for (const auto& [name, bytes] : a.files) {
    write_file(dir / name, bytes);
    files.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}});
  }
  write_file(dir / "entry.json",
             json{{"files", files}, {"diagnostics", a.diagnostics}, {"inconclusive", a.inconclusive}}.dump(2));
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_params:
    case ErrorKind::inconsistent_sign: return exit_config;
    case ErrorKind::not_found:
    case ErrorKind::degenerate_window:
    case ErrorKind::inconclusive: return exit_inconclusive;
    default: return exit_internal;
  }
}

}  // namespace

Artifacts compute(const RunConfig& cfg, const Execution& ex) {
  if (cfg.command == "lineshape") return do_lineshape(cfg, ex);
  if (cfg.command == "band") return do_band(cfg, ex);
  if (cfg.command == "scurve") return do_scurve(cfg, ex);
  if (cfg.command == "bifmap") return do_bifmap(cfg, ex);
  if (cfg.command == "critical") return do_critical(cfg, ex);
  if (cfg.command == "swallowtail") return do_swallowtail(cfg, ex);
  if (cfg.command == "stability") return do_stability(cfg, ex);
  if (cfg.command == "validate") return do_validate(cfg, ex);
  throw Error(ErrorKind::invalid_params, "unknown command " + cfg.command);
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.canonical().dump()); }

int run(RunConfig cfg, const RunOptions& opt, std::ostream& log) {
  if (opt.workers) cfg.workers = *opt.workers;
  if (opt.no_plots) cfg.plots = false;
  const Execution ex{cfg.workers};
  const std::string hash = config_hash(cfg);
  const fs::path out = opt.out_dir;
  const fs::path cache = (cfg.cache_dir.empty() ? out / ".cache" : fs::path(cfg.cache_dir)) / hash;

  json manifest;
  manifest["tool"] = "cavityband";
  manifest["version"] = CAVITYBAND_VERSION;
  manifest["command"] = cfg.command;
  manifest["config_hash"] = hash;
  manifest["config"] = cfg.canonical();
  manifest["workers"] = ex.resolved();
  manifest["started"] = iso_now();
  manifest["units"] = {{"energy", units::energy}, {"frequency", units::frequency}};

  int code = exit_ok;
  Artifacts art;
  bool cached = false;
  try {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::internal, "cannot create output directory " + out.string());
    if (!opt.no_cache) {
      if (auto hit = cache_load(cache, log)) {
        art = std::move(*hit);
        cached = true;
      }
    }
    if (!cached) {
      art = compute(cfg, ex);
      if (!opt.no_cache) cache_store(cache, art);
    }
    code = art.inconclusive ? exit_inconclusive : exit_ok;
    manifest["status"] = art.inconclusive ? "inconclusive" : "ok";
  } catch (const Error& e) {
    code = exit_for(e.kind());
    manifest["status"] = code == exit_inconclusive ? "inconclusive" : "error";
    manifest["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
    log << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    art.files.clear();
  } catch (const std::exception& e) {
    code = exit_internal;
    manifest["status"] = "error";
    manifest["error"] = {{"kind", "internal"}, {"message", e.what()}};
    log << "error: " << e.what() << "\n";
    art.files.clear();
  }

  json outputs = json::array();
  try {
    for (const auto& [name, bytes] : art.files) {
      write_file(out / name, bytes);
      outputs.push_back({{"file", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    }
    manifest["outputs"] = outputs;
    manifest["diagnostics"] = art.diagnostics;
    manifest["cached"] = cached;
    manifest["finished"] = iso_now();
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return exit_internal;
  }
  return code;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cavityband: Bloch bands, multistability and stability of atoms in a driven cavity"};
  app.set_version_flag("--version", std::string(CAVITYBAND_VERSION));
  std::string command, config_path;
  RunOptions opt;
  unsigned workers = 0;
  app.add_option("command", command, "lineshape | band | scurve | bifmap | critical | swallowtail | stability | validate")
      ->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  auto* wopt = app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_flag("--no-plots", opt.no_plots, "skip SVG output");
  app.add_flag("--no-cache", opt.no_cache, "always recompute");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << CAVITYBAND_VERSION << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return exit_config;
  }
  if (*wopt) opt.workers = workers;

  RunConfig cfg;
  try {
    cfg = load_config(config_path, command);
  } catch (const ConfigError& e) {
    for (const auto& fe : e.errors()) err << "config error: " << fe.field << ": " << fe.message << "\n";
    return exit_config;
  }
  const int code = run(std::move(cfg), opt, err);
  if (code == exit_ok) out << "wrote " << opt.out_dir << "/" << command << ".csv\n";
  return code;
}

}  // namespace cavityband::cli
