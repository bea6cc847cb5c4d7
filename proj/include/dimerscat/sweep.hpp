#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dimerscat/boundary_matching.hpp"
#include "dimerscat/channel_kinematics.hpp"
#include "dimerscat/errors.hpp"
#include "dimerscat/observables.hpp"

namespace dimerscat {

struct RunConfig {
  SystemParams system;
  IncidentSpec incident;
  std::optional<int> n_modes;  // unset: n_c + extra_modes
  int extra_modes = 8;
  double conservation_tol = 1e-6;
  double quadrature_tol = 1e-10;

  void validate() const {
    incident.validate();
    if (!(conservation_tol > 0.0) || !(quadrature_tol > 0.0)) throw UsageError("tolerances must be positive");
    if (extra_modes < 1) throw UsageError("at least one mode above n_c is required");
    const int n_c = cutoff_index(system, incident);
    if (n_modes && *n_modes <= n_c) {
      throw UsageError("n_modes=" + std::to_string(*n_modes) + " must exceed n_c=" + std::to_string(n_c));
    }
  }

  int resolved_modes() const {
    validate();
    return n_modes ? *n_modes : cutoff_index(system, incident) + extra_modes;
  }
};

enum class RowStatus { converged, unconverged };

inline const char* to_string(RowStatus s) { return s == RowStatus::converged ? "converged" : "unconverged"; }

struct SingleReport {
  ChannelSet channels;
  AmplitudeSet amplitudes;
  CoefficientTable table;
  ConservationResult conservation;
  RowStatus status = RowStatus::unconverged;
  int n_modes = 0;
  std::vector<std::string> warnings;
};

namespace detail {

[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const SingularSystemError& e) {
    throw SingularSystemError(context + ": " + e.what(), e.rank(), e.columns());
  } catch (const QuadratureError& e) {
    throw QuadratureError(context + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  }
}

inline std::string describe(const RunConfig& cfg, int n_modes) {
  const auto& s = cfg.system;
  char buf[256];
  std::snprintf(buf, sizeof buf, "solve at m1=%g m2=%g gamma1=%g gamma2=%g omega=%g K0=%g l=%d N=%d", s.m1(), s.m2(),
                s.gamma1(), s.gamma2(), s.omega(), cfg.incident.k0, cfg.incident.l, n_modes);
  return buf;
}

}  // namespace detail

inline SingleReport run_single(const RunConfig& cfg) {
  const int n_modes = cfg.resolved_modes();
  SingleReport rep;
  rep.n_modes = n_modes;
  QuadratureOptions quad;
  quad.tol = cfg.quadrature_tol;
  quad.fail_tol = std::max(1e-9, 10.0 * cfg.quadrature_tol);
  try {
    auto sol = scattering_solution(cfg.system, cfg.incident, n_modes, quad);
    rep.channels = std::move(sol.channels);
    rep.amplitudes = std::move(sol.amplitudes);
  } catch (const NumericalError&) {
    detail::rethrow_with_context(detail::describe(cfg, n_modes));
  }
  if (rep.channels.at_threshold) {
    rep.warnings.push_back("a channel sits exactly at threshold (K_n = 0); it is treated as closed");
  }
  rep.table = coefficients(rep.channels, rep.amplitudes);
  rep.conservation = conservation_check(rep.table, cfg.conservation_tol);
  rep.status = rep.conservation.passed ? RowStatus::converged : RowStatus::unconverged;
  if (!rep.conservation.passed) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "probability conservation off by %.3e (tolerance %.1e)", rep.conservation.deviation,
                  cfg.conservation_tol);
    rep.warnings.emplace_back(buf);
  }
  return rep;
}

enum class SweepParameter { gamma1, gamma2, gamma_both, k0, omega, mass_ratio, n_modes };
enum class SweepScale { linear, log };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::gamma1: return "gamma1";
    case SweepParameter::gamma2: return "gamma2";
    case SweepParameter::gamma_both: return "gamma_both";
    case SweepParameter::k0: return "K0";
    case SweepParameter::omega: return "omega";
    case SweepParameter::mass_ratio: return "mass_ratio";
    case SweepParameter::n_modes: return "n_modes";
  }
  return "?";
}

inline std::optional<SweepParameter> parse_sweep_parameter(const std::string& name) {
  for (auto p : {SweepParameter::gamma1, SweepParameter::gamma2, SweepParameter::gamma_both, SweepParameter::k0,
                 SweepParameter::omega, SweepParameter::mass_ratio, SweepParameter::n_modes}) {
    std::string canonical = to_string(p);
    std::string lowered = canonical;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    if (name == canonical || name == lowered) return p;
  }
  return std::nullopt;
}

struct SweepSpec {
  SweepParameter parameter = SweepParameter::k0;
  double from = 0.0;
  double to = 1.0;
  int steps = 2;
  SweepScale scale = SweepScale::linear;

  void validate() const {
    if (!(from < to)) throw UsageError("sweep needs from < to");
    if (steps < 2) throw UsageError("sweep needs at least two steps");
    if (scale == SweepScale::log && !(from > 0.0)) throw UsageError("log sweep needs from > 0");
    if (parameter == SweepParameter::mass_ratio && !(from > 0.0 && to < 1.0)) {
      throw UsageError("mass-ratio sweep must stay inside (0, 1)");
    }
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
      const double f = double(i) / (steps - 1);
      v[i] = scale == SweepScale::linear ? from + f * (to - from) : from * std::pow(to / from, f);
    }
    v.back() = to;
    return v;
  }
};

/// cfg with the swept parameter set to `value`. mass_ratio moves m1/M at fixed M.
inline RunConfig apply_parameter(const RunConfig& cfg, SweepParameter parameter, double value) {
  const SystemParams& s = cfg.system;
  RunConfig out = cfg;
  switch (parameter) {
    case SweepParameter::gamma1:
      out.system = SystemParams(s.m1(), s.m2(), value, s.gamma2(), s.omega(), s.hbar());
      break;
    case SweepParameter::gamma2:
      out.system = SystemParams(s.m1(), s.m2(), s.gamma1(), value, s.omega(), s.hbar());
      break;
    case SweepParameter::gamma_both:
      out.system = SystemParams(s.m1(), s.m2(), value, value, s.omega(), s.hbar());
      break;
    case SweepParameter::k0:
      out.incident.k0 = value;
      break;
    case SweepParameter::omega:
      out.system = SystemParams(s.m1(), s.m2(), s.gamma1(), s.gamma2(), value, s.hbar());
      break;
    case SweepParameter::mass_ratio: {
      const double M = s.total_mass();
      out.system = SystemParams(value * M, (1.0 - value) * M, s.gamma1(), s.gamma2(), s.omega(), s.hbar());
      break;
    }
    case SweepParameter::n_modes:
      out.n_modes = static_cast<int>(std::lround(value));
      break;
  }
  return out;
}

struct SweepRow {
  double param = 0.0;
  std::vector<double> j_re;
  std::vector<double> j_tr;
  double j_total = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  int n_c = -1;
  RowStatus status = RowStatus::unconverged;
  std::string note;
};

inline SweepRow make_row(double param, const SingleReport& rep) {
  SweepRow row;
  row.param = param;
  row.j_re = rep.table.j_re;
  row.j_tr = rep.table.j_tr;
  row.j_total = rep.table.j_total;
  row.residual = rep.amplitudes.residual_norm;
  row.n_c = rep.table.n_c;
  row.status = rep.status;
  return row;
}

/// Solves one point; numerical or parameter failures become an unconverged row.
inline SweepRow evaluate_row(const RunConfig& cfg, double param) {
  try {
    return make_row(param, run_single(cfg));
  } catch (const std::exception& e) {
    SweepRow row;
    row.param = param;
    row.note = e.what();
    try {
      row.n_c = cutoff_index(cfg.system, cfg.incident);
    } catch (const std::exception&) {
    }
    return row;
  }
}

/// Runs f(i) for i in [0, count) over `threads` workers (0: hardware concurrency).
template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) f(i);
    });
  }
}

inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepSpec& spec, unsigned threads = 0) {
  const auto values = spec.values();
  std::vector<SweepRow> rows(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    SweepRow row;
    try {
      row = evaluate_row(apply_parameter(cfg, spec.parameter, values[i]), values[i]);
    } catch (const std::exception& e) {
      row.param = values[i];
      row.note = e.what();
    }
    rows[i] = std::move(row);
  });
  return rows;
}

struct ConvergenceReport {
  std::vector<SweepRow> rows;                // param = N
  std::vector<double> amplitude_change;      // max |delta alpha_n|, |delta beta_n| over open channels
  std::vector<double> coefficient_change;    // max |delta j_n|
};

inline ConvergenceReport run_convergence(const RunConfig& cfg, int n_max) {
  cfg.incident.validate();
  const int n_c = cutoff_index(cfg.system, cfg.incident);
  if (n_max <= n_c + 1) throw UsageError("convergence study needs n_max > n_c + 1");
  if (n_max > kMaxModes) throw UsageError("n_max must not exceed 64");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ConvergenceReport rep;
  std::optional<SingleReport> previous;
  for (int N = n_c + 1; N <= n_max; ++N) {
    RunConfig point = cfg;
    point.n_modes = N;
    std::optional<SingleReport> current;
    try {
      current = run_single(point);
      rep.rows.push_back(make_row(N, *current));
    } catch (const NumericalError& e) {
      SweepRow row;
      row.param = N;
      row.n_c = n_c;
      row.note = e.what();
      rep.rows.push_back(std::move(row));
    }
    double amp = nan, coef = nan;
    if (previous && current) {
      amp = coef = 0.0;
      for (int n = 0; n <= current->channels.n_c; ++n) {
        amp = std::max({amp, std::abs(current->amplitudes.alpha(n) - previous->amplitudes.alpha(n)),
                        std::abs(current->amplitudes.beta(n) - previous->amplitudes.beta(n))});
        coef = std::max({coef, std::abs(current->table.j_re[n] - previous->table.j_re[n]),
                         std::abs(current->table.j_tr[n] - previous->table.j_tr[n])});
      }
    }
    rep.amplitude_change.push_back(amp);
    rep.coefficient_change.push_back(coef);
    previous = std::move(current);
  }
  return rep;
}

/// Channel-opening thresholds inside the sweep range (K0 or omega sweeps).
inline std::vector<double> threshold_markers(const RunConfig& cfg, const SweepSpec& spec) {
  std::vector<double> marks;
  const int l = cfg.incident.l;
  for (int n = l + 1; n <= l + kMaxModes; ++n) {
    double v = 0.0;
    if (spec.parameter == SweepParameter::k0) {
      v = critical_momentum(cfg.system, l, n);
      if (v > spec.to) break;
    } else if (spec.parameter == SweepParameter::omega) {
      v = critical_omega(cfg.system, cfg.incident, n);
      if (v < spec.from) break;
    } else {
      break;
    }
    if (v >= spec.from && v <= spec.to) marks.push_back(v);
  }
  std::sort(marks.begin(), marks.end());
  return marks;
}

}  // namespace dimerscat
