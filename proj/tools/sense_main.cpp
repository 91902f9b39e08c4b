// sense: noise spectral density sweeps for the OPA + coupled-oscillator
// cavity optomechanical force sensor.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sense/sense.hpp"

namespace {

using namespace sense;

struct CommonArgs {
  std::string preset_name;
  std::string config_path;
  std::vector<std::string> sets;
  std::string grid_text;
  std::string out_path = "-";
  std::string format = "csv";
  std::string thermal = "high-t";
  double omega = 1.07;   // fixed probe frequency, omega_m units
  double phi_override = std::numeric_limits<double>::quiet_NaN();
  int refine_rounds = 1;
  std::string bracket_text = "1.0,1.15";
  int coarse_count = 2001;
  std::string gains_text;
  bool self_consistent = false;
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_grid = true) {
  cmd->add_option("--preset", a.preset_name, "named operating point (fig2..fig10)");
  cmd->add_option("--config", a.config_path, "flat key=value config file, SI units");
  cmd->add_option("--set", a.sets, "override single keys, e.g. --set lambda=9.4e5")->take_all();
  if (with_grid) cmd->add_option("--grid", a.grid_text, "start,stop,count[,log]");
  cmd->add_option("--out", a.out_path, "output path ('-' = stdout)");
  cmd->add_option("--format", a.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--thermal", a.thermal, "thermal correlator convention: high-t | symmetrized")
      ->check(CLI::IsMember({"high-t", "symmetrized"}));
  cmd->add_option("--jobs", a.jobs, "worker threads (0 = hardware)");
  cmd->add_flag("--self-consistent", a.self_consistent,
                "solve the detuning self-consistently instead of the Delta'=0 figure mode");
}

GridSpec parse_grid(const std::string& text, const GridSpec& fallback) {
  if (text.empty()) return fallback;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) parts.push_back(tok);
  if (parts.size() < 3 || parts.size() > 4) {
    fail(errc::config_error, "--grid expects start,stop,count[,log]");
  }
  GridSpec g;
  try {
    g.start = std::stod(parts[0]);
    g.stop = std::stod(parts[1]);
    g.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    fail(errc::config_error, "--grid: cannot parse '" + text + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] != "log" && parts[3] != "linear") {
      fail(errc::config_error, "--grid spacing must be 'linear' or 'log'");
    }
    g.log = parts[3] == "log";
  }
  return g;
}

struct Resolved {
  SystemParams params;       // nondimensionalized, omega_m1 = 1
  SteadyState steady;
  ThermalConvention conv;
  std::string preset_note;
  std::string preset_name;
  std::vector<double> gains;  // G/kappa list for photon curves
};

Resolved resolve(const CommonArgs& a) {
  SystemParams p;
  Resolved r;
  if (!a.preset_name.empty()) {
    Preset pr = preset(a.preset_name);
    p = pr.params;
    r.preset_note = pr.note;
    r.preset_name = pr.name;
    r.gains = pr.G_over_kappa_list;
  }
  if (!a.config_path.empty()) p = parse_config_file(a.config_path, p);
  for (const auto& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(errc::config_error, "--set expects key=value, got '" + s + "'");
    set_param(p, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!a.gains_text.empty()) {
    r.gains.clear();
    std::stringstream ss(a.gains_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) r.gains.push_back(std::stod(tok));
  }

  Validation v = validate(p);
  if (!v.ok()) fail(errc::config_error, v.describe());
  for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";

  r.params = nondimensionalize(p);
  r.steady = solve_steady_state(r.params, {.figure_mode = !a.self_consistent});
  r.conv = a.thermal == "high-t" ? ThermalConvention::high_temperature
                                : ThermalConvention::bose_symmetrized;
  return r;
}

void fill_meta(Table& t, const Resolved& r, const CommonArgs& a, const std::string& subcommand) {
  t.meta["subcommand"] = subcommand;
  if (!r.preset_name.empty()) t.meta["preset"] = r.preset_name;
  if (!r.preset_note.empty()) t.meta["preset_note"] = r.preset_note;
  t.meta["thermal_convention"] = a.thermal;
  t.meta["figure_mode"] = a.self_consistent ? "off" : "Delta_eff=0,phi=0";
  std::string cfg;
  for (const auto& [k, v] : to_key_values(redimensionalize(r.params))) {
    if (!cfg.empty()) cfg += " ";
    cfg += k + "=" + format_number(v);
  }
  t.meta["resolved_config_si"] = cfg;
  t.meta["g_lin_over_omega_m"] = format_number(r.steady.g_lin);
  t.meta["N_ave"] = format_number(r.steady.N_ave);
}

const std::vector<std::string> kSpectrumCols = {"omega_over_omega_m", "S_total", "S_th1",
                                                "S_th2", "S_ba", "S_shot"};

void push_spectrum_row(Table& t, const SweptPoint& sp) {
  const auto& q = sp.point;
  t.rows.push_back({q.omega, q.S_total, q.S_th1, q.S_th2, q.S_ba, q.S_shot});
  t.flags.push_back(sp.ok ? "" : sp.error);
}

// spectrum: PSD over omega with local refinement around detected minima.
Table run_spectrum(const Resolved& r, const CommonArgs& a) {
  const GridSpec gs = parse_grid(a.grid_text, {0.8, 1.3, 2001, false});
  std::vector<double> grid = make_grid(gs);
  std::vector<SweptPoint> pts(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    pts[i] = sweep_grid(std::span(&grid[i], 1),
                        [&](double w) { return noise_psd(w, r.params, r.steady, r.params.Phi, r.conv); })[0];
  }, a.jobs);

  for (int round = 0; round < a.refine_rounds; ++round) {
    std::set<double> extra;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      if (!pts[i].ok || !pts[i - 1].ok || !pts[i + 1].ok) continue;
      if (pts[i].point.S_total < pts[i - 1].point.S_total &&
          pts[i].point.S_total < pts[i + 1].point.S_total) {
        for (int k = 1; k < 10; ++k) {
          extra.insert(grid[i - 1] + (grid[i] - grid[i - 1]) * k / 10.0);
          extra.insert(grid[i] + (grid[i + 1] - grid[i]) * k / 10.0);
        }
      }
    }
    if (extra.empty()) break;
    std::vector<double> nx(extra.begin(), extra.end());
    std::vector<SweptPoint> np(nx.size());
    parallel_for(nx.size(), [&](std::size_t i) {
      np[i] = sweep_grid(std::span(&nx[i], 1),
                         [&](double w) { return noise_psd(w, r.params, r.steady, r.params.Phi, r.conv); })[0];
    }, a.jobs);
    std::vector<double> mg;
    std::vector<SweptPoint> mp;
    std::size_t i = 0, j = 0;
    while (i < grid.size() || j < nx.size()) {
      if (j == nx.size() || (i < grid.size() && grid[i] <= nx[j])) {
        mg.push_back(grid[i]);
        mp.push_back(pts[i]);
        ++i;
      } else {
        mg.push_back(nx[j]);
        mp.push_back(np[j]);
        ++j;
      }
    }
    grid = std::move(mg);
    pts = std::move(mp);
  }

  Table t;
  t.columns = kSpectrumCols;
  for (const auto& sp : pts) push_spectrum_row(t, sp);
  fill_meta(t, r, a, "spectrum");
  t.meta["grid"] = format_number(gs.start) + "," + format_number(gs.stop) + "," +
                   std::to_string(gs.count) + (gs.log ? ",log" : ",linear");
  t.meta["refine_rounds"] = std::to_string(a.refine_rounds);
  return t;
}

// phase: PSD versus homodyne angle at fixed omega.
Table run_phase(const Resolved& r, const CommonArgs& a) {
  const double pi = constants::pi;
  // default: the 181 interior nodes of a symmetric division of (-pi/2, pi/2)
  const GridSpec gs = parse_grid(a.grid_text, {-pi / 2 + pi / 182.0, pi / 2 - pi / 182.0, 181, false});
  std::vector<double> grid = make_grid(gs);
  Table t;
  t.columns = {"Phi", "S_total", "S_th1", "S_th2", "S_ba", "S_shot"};
  std::vector<SweptPoint> pts(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    pts[i] = sweep_grid(std::span(&grid[i], 1),
                        [&](double) { return noise_psd(a.omega, r.params, r.steady, grid[i], r.conv); })[0];
  }, a.jobs);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& q = pts[i].point;
    t.rows.push_back({grid[i], q.S_total, q.S_th1, q.S_th2, q.S_ba, q.S_shot});
    t.flags.push_back(pts[i].ok ? "" : pts[i].error);
  }
  fill_meta(t, r, a, "phase");
  t.meta["omega_over_omega_m"] = format_number(a.omega);
  return t;
}

// gain / coupling / gsweep: PSD at fixed omega versus one swept knob.
Table run_knob_sweep(const Resolved& r, const CommonArgs& a, const std::string& knob) {
  GridSpec fallback{0.0, 0.24, 49, false};
  std::string col = "G_over_kappa";
  if (knob == "coupling") {
    fallback = {0.0, 0.3, 61, false};
    col = "lambda_over_omega_m";
  } else if (knob == "gsweep") {
    fallback = {1e-3, 1.0, 25, true};
    col = "g_over_omega_m";
  }
  const GridSpec gs = parse_grid(a.grid_text, fallback);
  std::vector<double> grid = make_grid(gs);

  Table t;
  t.columns = {col, "S_total", "S_th1", "S_th2", "S_ba", "S_shot"};
  std::vector<SweptPoint> pts(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    try {
      SystemParams q = r.params;
      SteadyState ss = r.steady;
      if (knob == "gain") {
        q.G = grid[i] * q.kappa;
        ss = solve_steady_state(q, {.figure_mode = !a.self_consistent});
      } else if (knob == "coupling") {
        q.lambda = grid[i];
        ss = solve_steady_state(q, {.figure_mode = !a.self_consistent});
      } else {
        ss.g_lin = grid[i];  // forced linearized coupling, per the g-axis figure
      }
      pts[i].point = noise_psd(a.omega, q, ss, q.Phi, r.conv);
    } catch (const Error& e) {
      pts[i].ok = false;
      pts[i].error = e.what();
      pts[i].point.omega = a.omega;
    }
  }, a.jobs);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& q = pts[i].point;
    t.rows.push_back({grid[i], q.S_total, q.S_th1, q.S_th2, q.S_ba, q.S_shot});
    t.flags.push_back(pts[i].ok ? "" : pts[i].error);
  }
  fill_meta(t, r, a, knob);
  t.meta["omega_over_omega_m"] = format_number(a.omega);
  return t;
}

// photons: intracavity photon number versus drive, one column per G value.
Table run_photons(const Resolved& r, const CommonArgs& a) {
  const GridSpec gs = parse_grid(a.grid_text, {0.0, 2000.0 * std::sqrt(2.0), 101, false});
  // 0 is a legal drive here even though make_grid wants start < stop
  std::vector<double> grid = make_grid({gs.start, gs.stop, gs.count, gs.log});
  std::vector<double> gains = r.gains.empty() ? std::vector<double>{r.params.G / r.params.kappa}
                                              : r.gains;
  Table t;
  t.columns = {"E_L_over_omega_m"};
  for (std::size_t gi = 0; gi < gains.size(); ++gi) t.columns.push_back("N_ave_" + std::to_string(gi));

  std::vector<std::vector<PhotonPoint>> curves(gains.size());
  for (std::size_t gi = 0; gi < gains.size(); ++gi) {
    SystemParams q = r.params;
    q.G = gains[gi] * q.kappa;
    curves[gi] = photon_number_curve(q, grid);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    std::string flag;
    for (std::size_t gi = 0; gi < gains.size(); ++gi) {
      row.push_back(curves[gi][i].N_ave);
      if (!curves[gi][i].ok) flag += (flag.empty() ? "" : ";") + curves[gi][i].error;
    }
    t.rows.push_back(std::move(row));
    t.flags.push_back(flag);
  }
  fill_meta(t, r, a, "photons");
  std::string gl;
  for (double g : gains) gl += (gl.empty() ? "" : ",") + format_number(g);
  t.meta["G_over_kappa_list"] = gl;
  return t;
}

// squeeze: steady covariance versus OPA gain.
Table run_squeeze(const Resolved& r, const CommonArgs& a) {
  const GridSpec gs = parse_grid(a.grid_text, {0.0, 0.24, 49, false});
  std::vector<double> grid = make_grid(gs);
  Table t;
  t.columns = {"G_over_kappa", "var_pa", "var_xa"};
  for (double x : grid) {
    std::string flag;
    double vp = 0.0, vx = 0.0;
    try {
      SystemParams q = r.params;
      q.G = x * q.kappa;
      const SteadyState ss = solve_steady_state(q, {.figure_mode = !a.self_consistent});
      const CovarianceResult cv = steady_covariance(build_drift(q, ss));
      vp = cv.var_pa;
      vx = cv.var_xa;
    } catch (const Error& e) {
      flag = e.what();
    }
    t.rows.push_back({x, vp, vx});
    t.flags.push_back(flag);
  }
  fill_meta(t, r, a, "squeeze");
  return t;
}

// stability: spectral abscissa versus OPA gain, plus the bisected onset.
Table run_stability(const Resolved& r, const CommonArgs& a) {
  const GridSpec gs = parse_grid(a.grid_text, {0.0, 0.3, 61, false});
  std::vector<double> grid = make_grid(gs);
  Table t;
  t.columns = {"G_over_kappa", "max_real_eigenvalue", "margin", "stable"};
  for (double x : grid) {
    std::string flag;
    StabilityReport st{};
    try {
      SystemParams q = r.params;
      q.G = x * q.kappa;
      st = is_stable(build_drift(q, r.steady));
    } catch (const Error& e) {
      flag = e.what();
    }
    t.rows.push_back({x, st.max_real_eigenvalue, st.margin, st.stable ? 1.0 : 0.0});
    t.flags.push_back(flag);
  }
  fill_meta(t, r, a, "stability");
  try {
    const double gb = stability_boundary_in_G(r.params, r.steady, grid.front() * r.params.kappa,
                                              grid.back() * r.params.kappa);
    t.meta["boundary_G_over_kappa"] = format_number(gb / r.params.kappa);
  } catch (const Error&) {
    t.meta["boundary_G_over_kappa"] = "not in range";
  }
  return t;
}

// crosscheck: main-route vs normal-mode-route spectra plus a summary.
Table run_crosscheck(const Resolved& r, const CommonArgs& a) {
  const GridSpec gs = parse_grid(a.grid_text, {0.8, 1.3, 2001, false});
  std::vector<double> grid = make_grid(gs);
  Table t;
  t.columns = {"omega_over_omega_m", "S_main", "S_appendix"};
  for (double w : grid) {
    std::string flag;
    double sm = 0.0, sa = 0.0;
    try {
      sm = noise_psd(w, r.params, r.steady, r.params.Phi, r.conv).S_total;
      sa = appendix_psd(w, r.params, r.steady, r.conv).S_total;
    } catch (const Error& e) {
      flag = e.what();
    }
    t.rows.push_back({w, sm, sa});
    t.flags.push_back(flag);
  }
  const CrossCheckReport rep = cross_check(grid, r.params, r.steady, r.params.Phi, r.conv);
  fill_meta(t, r, a, "crosscheck");
  t.meta["dip_main"] = format_number(rep.dip_main);
  t.meta["dip_appendix"] = format_number(rep.dip_appendix);
  t.meta["dip_offset"] = format_number(rep.dip_offset);
  t.meta["peak_offset"] = format_number(rep.peak_offset);
  t.meta["max_rel_dev_at_modes"] = format_number(rep.max_rel_dev_at_modes);
  t.meta["pointwise_max_rel_dev"] = format_number(rep.pointwise_max_rel_dev);
  t.meta["mode_labeling"] = rep.note;
  std::cerr << "crosscheck: dip offset " << rep.dip_offset << ", peak offset " << rep.peak_offset
            << ", max rel dev at modes " << rep.max_rel_dev_at_modes << "\n";
  return t;
}

// minimize: golden-section refinement of the PSD minimum inside a bracket.
Table run_minimize(const Resolved& r, const CommonArgs& a) {
  double lo = 1.0, hi = 1.15;
  {
    std::stringstream ss(a.bracket_text);
    std::string tok;
    std::vector<double> v;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() != 2) fail(errc::config_error, "--bracket expects lo,hi");
    lo = v[0];
    hi = v[1];
  }
  const MinimumReport rep = minimize_scalar(
      [&](double w) { return noise_psd(w, r.params, r.steady, r.params.Phi, r.conv).S_total; },
      lo, hi, a.coarse_count);
  Table t;
  t.columns = {"omega_star_over_omega_m", "S_star", "refinement_iterations", "bracket_width"};
  t.rows.push_back({rep.omega_star, rep.S_star, static_cast<double>(rep.refinement_iterations),
                    rep.bracket_width});
  t.flags.push_back("");
  fill_meta(t, r, a, "minimize");
  t.meta["bracket"] = format_number(lo) + "," + format_number(hi);
  return t;
}

int dispatch(const std::string& name, const CommonArgs& a) {
  const Resolved r = resolve(a);
  Table t;
  if (name == "spectrum") t = run_spectrum(r, a);
  else if (name == "phase") t = run_phase(r, a);
  else if (name == "gain" || name == "coupling" || name == "gsweep") t = run_knob_sweep(r, a, name);
  else if (name == "photons") t = run_photons(r, a);
  else if (name == "squeeze") t = run_squeeze(r, a);
  else if (name == "stability") t = run_stability(r, a);
  else if (name == "crosscheck") t = run_crosscheck(r, a);
  else if (name == "minimize") t = run_minimize(r, a);
  else fail(errc::config_error, "unknown subcommand " + name);

  write_artifact(a.out_path, a.format == "csv" ? to_csv(t) : to_json(t));
  if (!t.rows.empty() && t.rows_flagged() == t.rows.size()) {
    std::cerr << "error: all " << t.rows.size() << " sweep points failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum + thermal noise spectral density of an OPA-assisted "
               "two-oscillator optomechanical force sensor"};
  app.set_version_flag("--version", sense::version);
  app.require_subcommand(1);

  const std::vector<std::string> names = {"spectrum", "phase", "gain", "coupling", "gsweep",
                                          "photons", "squeeze", "stability", "crosscheck",
                                          "minimize"};
  const std::map<std::string, std::string> help = {
      {"spectrum", "PSD versus omega/omega_m with refinement around minima"},
      {"phase", "PSD versus homodyne angle Phi at fixed omega"},
      {"gain", "PSD versus G/kappa at fixed omega"},
      {"coupling", "PSD versus lambda/omega_m at fixed omega"},
      {"gsweep", "PSD versus forced linearized coupling g at fixed omega"},
      {"photons", "intracavity photon number versus drive amplitude"},
      {"squeeze", "steady-state quadrature variances versus G/kappa"},
      {"stability", "drift-matrix spectral abscissa versus G/kappa"},
      {"crosscheck", "main-route vs normal-mode-route spectra"},
      {"minimize", "golden-section PSD minimum inside a bracket"},
  };

  std::map<std::string, CommonArgs> args;
  for (const auto& n : names) {
    CLI::App* cmd = app.add_subcommand(n, help.at(n));
    CommonArgs& a = args[n];
    add_common(cmd, a);
    if (n == "phase" || n == "gain" || n == "coupling" || n == "gsweep") {
      cmd->add_option("--omega", a.omega, "probe frequency in omega_m units (default 1.07)");
    }
    if (n == "spectrum") {
      cmd->add_option("--refine", a.refine_rounds, "refinement rounds around detected minima");
    }
    if (n == "photons") {
      cmd->add_option("--gains", a.gains_text, "comma list of G/kappa values, one column each");
    }
    if (n == "minimize") {
      cmd->add_option("--bracket", a.bracket_text, "lo,hi bracket in omega_m units");
      cmd->add_option("--coarse", a.coarse_count, "coarse grid count before golden section");
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& n : names) {
      if (app.got_subcommand(n)) return dispatch(n, args[n]);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const sense::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case sense::errc::config_error:
      case sense::errc::non_positive_rate:
      case sense::errc::static_instability:
        return 1;
      case sense::errc::io_error:
        return 3;
      default:
        return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
