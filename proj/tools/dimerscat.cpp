// dimerscat: command-line front end for single solves, parameter sweeps,
// convergence studies, Born comparisons and analytic limits.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimerscat/dimerscat.hpp"

using namespace dimerscat;

namespace {

struct Options {
  std::optional<double> m1, m2;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::optional<double> omega, k0;
  int l = 0;
  std::optional<int> nmodes;
  double tol = 1e-6;
  bool paper_defaults = false;

  std::string param;
  std::optional<double> from, to;
  int steps = 21;
  std::string scale = "linear";
  std::string csv, svg;
  bool markers = false;
};

RunConfig make_config(const Options& o) {
  if (o.paper_defaults && (o.m1 || o.m2)) throw UsageError("--paper-defaults pins m1 = m2 = 1; drop --m1/--m2");
  if (!o.paper_defaults && !(o.m1 && o.m2)) throw UsageError("--m1 and --m2 are required (or --paper-defaults)");
  if (!o.omega) throw UsageError("--omega is required");
  if (!o.k0) throw UsageError("--k0 is required");
  const double m1 = o.paper_defaults ? 1.0 : *o.m1;
  const double m2 = o.paper_defaults ? 1.0 : *o.m2;
  RunConfig cfg{SystemParams(m1, m2, o.gamma1, o.gamma2, *o.omega), IncidentSpec{*o.k0, o.l}, o.nmodes};
  cfg.conservation_tol = o.tol;
  cfg.validate();
  return cfg;
}

void print_table(const CoefficientTable& t) {
  std::printf("%4s %22s %22s\n", "n", "j_re", "j_tr");
  for (int n = 0; n <= t.n_c; ++n) std::printf("%4d %22.15e %22.15e\n", n, t.j_re[n], t.j_tr[n]);
  std::printf("j_total = %.15f\n", t.j_total);
}

int cmd_solve(const Options& o) {
  const RunConfig cfg = make_config(o);
  const auto rep = run_single(cfg);
  std::printf("N = %d, n_c = %d, E = %.12g\n", rep.n_modes, rep.channels.n_c, rep.channels.total_energy);
  for (const Channel& c : rep.channels.channels) {
    std::printf("  K_%d = %s%.12g%s\n", c.n, c.open() ? "" : "i*", c.open() ? c.k.real() : c.k.imag(),
                c.open() ? "" : "  (evanescent)");
  }
  print_table(rep.table);
  std::printf("residual = %.6e, status = %s\n", rep.amplitudes.residual_norm, to_string(rep.status));
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

SweepScale parse_scale(const std::string& s) {
  if (s == "linear") return SweepScale::linear;
  if (s == "log") return SweepScale::log;
  throw UsageError("--scale must be linear or log");
}

void write_outputs(const std::vector<SweepRow>& rows, const Options& o, const PlotSpec& plot) {
  if (o.csv.empty()) {
    std::cout << sweep_csv(rows);
  } else {
    emit_csv(rows, o.csv);
  }
  if (!o.svg.empty()) emit_svg(rows, o.svg, plot);
}

int cmd_sweep(const Options& o) {
  const RunConfig cfg = make_config(o);
  if (o.param.empty() || !o.from || !o.to) throw UsageError("sweep needs --param, --from and --to");
  const auto parameter = parse_sweep_parameter(o.param);
  if (!parameter) throw UsageError("unknown sweep parameter '" + o.param + "'");
  const SweepSpec spec{*parameter, *o.from, *o.to, o.steps, parse_scale(o.scale)};
  const auto rows = run_sweep(cfg, spec);

  PlotSpec plot;
  plot.x_label = to_string(*parameter);
  plot.x_scale = spec.scale;
  plot.title = "sweep over " + plot.x_label;
  if (o.markers) plot.markers = threshold_markers(cfg, spec);
  write_outputs(rows, o, plot);

  int unconverged = 0;
  for (const auto& r : rows) {
    if (r.status == RowStatus::converged) continue;
    ++unconverged;
    if (!r.note.empty()) std::fprintf(stderr, "warning: %s = %g: %s\n", plot.x_label.c_str(), r.param, r.note.c_str());
  }
  if (unconverged > 0) std::fprintf(stderr, "%d of %zu rows unconverged\n", unconverged, rows.size());
  return 0;
}

int cmd_converge(Options o) {
  // --nmodes names the largest truncation of the study here.
  const std::optional<int> n_max = o.nmodes;
  o.nmodes.reset();
  const RunConfig cfg = make_config(o);
  const int n_c = cutoff_index(cfg.system, cfg.incident);
  const auto rep = run_convergence(cfg, n_max.value_or(n_c + 12));

  std::printf("%4s %14s %14s %14s %12s\n", "N", "j_total-1", "max|d amp|", "max|d j|", "residual");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    std::printf("%4d %14.6e %14.6e %14.6e %12.4e%s\n", static_cast<int>(r.param), r.j_total - 1.0,
                rep.amplitude_change[i], rep.coefficient_change[i], r.residual,
                r.note.empty() ? "" : ("  " + r.note).c_str());
  }
  if (!o.csv.empty() || !o.svg.empty()) {
    PlotSpec plot;
    plot.title = "convergence in N";
    plot.x_label = "N";
    Options files = o;
    if (files.csv.empty()) files.csv = "/dev/null";
    write_outputs(rep.rows, files, plot);
  }
  return 0;
}

int cmd_born(const Options& o) {
  const RunConfig cfg = make_config(o);
  const auto rep = run_single(cfg);
  const auto born = born_coefficients(cfg.system, cfg.incident, rep.channels);
  std::printf("%4s %16s %16s %16s %16s\n", "n", "Born j_re", "MM j_re", "Born j_tr", "MM j_tr");
  for (int n = 0; n <= rep.table.n_c; ++n) {
    std::printf("%4d %16.8e %16.8e %16.8e %16.8e\n", n, born.re(n), rep.table.j_re[n], born.tr(n), rep.table.j_tr[n]);
  }
  if (born.near_threshold) std::fprintf(stderr, "warning: %s\n", born.warning.c_str());
  for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return 0;
}

int cmd_limits(const Options& o) {
  const RunConfig cfg = make_config(o);
  const SystemParams& s = cfg.system;
  const double M = s.total_mass();
  const auto rt1 = single_particle_RT(M, s.gamma1(), cfg.incident.k0, s.hbar());
  const auto rt2 = single_particle_RT(M, s.gamma2(), cfg.incident.k0, s.hbar());
  std::printf("single particle of mass %g on gamma1 = %g: R = %.12f, T = %.12f\n", M, s.gamma1(), rt1.r, rt1.t);
  std::printf("single particle of mass %g on gamma2 = %g: R = %.12f, T = %.12f\n", M, s.gamma2(), rt2.r, rt2.t);
  for (int n = cfg.incident.l + 1; n <= cfg.incident.l + 3; ++n) {
    std::printf("K0c(%d) = %.12g, omega_c(%d) = %.12g\n", n, critical_momentum(s, cfg.incident.l, n), n,
                critical_omega(s, cfg.incident, n));
  }
  const auto rep = run_single(cfg);
  const int l = cfg.incident.l;
  std::printf("mode matching: j_%d^re = %.12f, j_%d^tr = %.12f (status %s)\n", l, rep.table.j_re[l], l,
              rep.table.j_tr[l], to_string(rep.status));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering of a harmonically bound pair on two delta barriers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");

  Options o;
  app.add_option("--m1", o.m1, "mass of particle 1");
  app.add_option("--m2", o.m2, "mass of particle 2");
  app.add_option("--gamma1", o.gamma1, "strength of the barrier seen by particle 1");
  app.add_option("--gamma2", o.gamma2, "strength of the barrier seen by particle 2");
  app.add_option("--omega", o.omega, "binding frequency");
  app.add_option("--k0", o.k0, "incident centre-of-mass momentum");
  app.add_option("--l", o.l, "incident internal mode");
  app.add_option("--nmodes", o.nmodes, "mode truncation N (converge: largest N)");
  app.add_option("--tol", o.tol, "conservation tolerance for the converged status");
  app.add_flag("--paper-defaults", o.paper_defaults, "use m1 = m2 = 1");
  app.add_option("--param", o.param, "sweep parameter: gamma1 gamma2 gamma_both K0 omega mass_ratio n_modes");
  app.add_option("--from", o.from, "sweep start");
  app.add_option("--to", o.to, "sweep end");
  app.add_option("--steps", o.steps, "number of sweep points");
  app.add_option("--scale", o.scale, "linear or log");
  app.add_option("--csv", o.csv, "CSV output path (sweep default: stdout)");
  app.add_option("--svg", o.svg, "SVG output path");
  app.add_flag("--markers", o.markers, "draw channel thresholds on sweep plots");

  std::string command;
  for (const char* name : {"solve", "sweep", "converge", "born", "limits"}) {
    app.add_subcommand(name)->fallthrough()->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (command == "solve") return cmd_solve(o);
    if (command == "sweep") return cmd_sweep(o);
    if (command == "converge") return cmd_converge(o);
    if (command == "born") return cmd_born(o);
    return cmd_limits(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 3;
  }
}
