#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dimerscat/boundary_matching.hpp"
#include "dimerscat/channel_kinematics.hpp"
#include "dimerscat/errors.hpp"

namespace dimerscat {

/// Probability currents of one open channel. `incident` is the same for
/// every channel; `reflected` is negative (flows to the left).
struct ChannelCurrents {
  int n = 0;
  double incident = 0.0;
  double reflected = 0.0;
  double transmitted = 0.0;
};

/// Reflection/transmission coefficients of the open channels n = 0..n_c.
struct CoefficientTable {
  std::vector<double> j_re;
  std::vector<double> j_tr;
  double j_total = 0.0;
  int n_c = 0;
};

struct ConservationResult {
  bool passed = false;
  double deviation = 0.0;  // j_total - 1
};

namespace detail {

inline void check_shapes(const ChannelSet& ch, const AmplitudeSet& amps) {
  if (amps.n_modes != ch.size() || amps.alpha.size() != ch.size() || amps.beta.size() != ch.size()) {
    throw UsageError("channel set and amplitudes disagree on the truncation");
  }
}

}  // namespace detail

inline ChannelCurrents channel_current(const ChannelSet& ch, const AmplitudeSet& amps, double total_mass, int n,
                                       double hbar = 1.0) {
  detail::check_shapes(ch, amps);
  if (n < 0 || n >= ch.size()) throw UsageError("channel index out of range");
  if (!ch[n].open()) throw UsageError("channel " + std::to_string(n) + " is evanescent and carries no current");
  const double flux = hbar / (2.0 * std::numbers::pi * total_mass);
  const double kn = ch[n].k.real();
  ChannelCurrents j;
  j.n = n;
  j.incident = flux * ch.k0;
  j.reflected = -std::norm(amps.alpha(n)) * flux * kn;
  j.transmitted = std::norm(amps.beta(n)) * flux * kn;
  return j;
}

inline std::vector<ChannelCurrents> currents(const ChannelSet& ch, const AmplitudeSet& amps, double total_mass,
                                             double hbar = 1.0) {
  std::vector<ChannelCurrents> out;
  for (int n = 0; n <= ch.n_c; ++n) out.push_back(channel_current(ch, amps, total_mass, n, hbar));
  return out;
}

/// j_n^re = |alpha_n|^2 K_n/K0 and j_n^tr = |beta_n|^2 K_n/K0 over open channels.
inline CoefficientTable coefficients(const ChannelSet& ch, const AmplitudeSet& amps) {
  detail::check_shapes(ch, amps);
  CoefficientTable t;
  t.n_c = ch.n_c;
  for (int n = 0; n <= ch.n_c; ++n) {
    const double ratio = ch[n].k.real() / ch.k0;
    t.j_re.push_back(std::norm(amps.alpha(n)) * ratio);
    t.j_tr.push_back(std::norm(amps.beta(n)) * ratio);
    t.j_total += t.j_re.back() + t.j_tr.back();
  }
  return t;
}

inline ConservationResult conservation_check(const CoefficientTable& table, double tol) {
  if (!(tol > 0.0)) throw UsageError("conservation tolerance must be positive");
  const double dev = table.j_total - 1.0;
  return {std::abs(dev) <= tol, dev};
}

}  // namespace dimerscat
