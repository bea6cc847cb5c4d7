#pragma once

// Analytic cross-checks: first-order Born coefficients for an incident
// ground-state pair (with the second-order elastic transmission term), and
// the exact single-particle delta-barrier result.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "dimerscat/channel_kinematics.hpp"
#include "dimerscat/errors.hpp"

namespace dimerscat {

struct BornTable {
  double j0_re = 0.0;
  double j0_tr = 1.0;
  std::vector<double> jn_re;  // n = 1..n_c, stored at n - 1
  std::vector<double> jn_tr;
  int n_c = 0;
  bool near_threshold = false;
  std::string warning;

  double re(int n) const { return n == 0 ? j0_re : jn_re[static_cast<std::size_t>(n - 1)]; }
  double tr(int n) const { return n == 0 ? j0_tr : jn_tr[static_cast<std::size_t>(n - 1)]; }
};

struct ReflectionTransmission {
  double r = 0.0;
  double t = 1.0;
};

namespace detail {

/// <n| e^{ikx} |0> for the relative oscillator: e^{-k^2/4a^2} (ik/(sqrt2 a))^n / sqrt(n!).
inline cplx displaced_overlap(int n, double k, double a) {
  const cplx z(0.0, k / (std::numbers::sqrt2 * a));
  cplx power = 1.0;
  for (int j = 1; j <= n; ++j) power *= z / std::sqrt(double(j));
  return std::exp(-k * k / (4.0 * a * a)) * power;
}

}  // namespace detail

/// <phi_{sign*Kn, n}| V |phi_{K0, 0}> with V = gamma1 delta(X - r2 x) + gamma2 delta(X + r1 x).
inline cplx born_element(const SystemParams& p, int n, int sign, double k0, double kn) {
  if (n < 0) throw UsageError("mode index must be non-negative");
  if (sign != 1 && sign != -1) throw UsageError("sign must be +1 or -1");
  const double a = p.oscillator().a();
  const double kf = sign * kn;
  const double prefactor = 1.0 / (2.0 * std::numbers::pi);
  return prefactor * (p.gamma1() * detail::displaced_overlap(n, (k0 - kf) * p.r2(), a) +
                      p.gamma2() * detail::displaced_overlap(n, (kf - k0) * p.r1(), a));
}

inline BornTable born_coefficients(const SystemParams& p, const IncidentSpec& inc, const ChannelSet& ch,
                                   double guard = 0.1) {
  inc.validate();
  if (inc.l != 0) throw UsageError("Born reference is defined for an incident ground state (l = 0) only");
  if (ch.l != 0 || ch.k0 != inc.k0) throw UsageError("channel set does not match the incident wave");
  const double M = p.total_mass();
  const double h4 = std::pow(p.hbar(), 4);
  const double k0 = inc.k0;
  const double pref = 4.0 * std::numbers::pi * std::numbers::pi * M * M / h4;

  BornTable t;
  t.n_c = ch.n_c;
  for (int n = 1; n <= ch.n_c + 1; ++n) {
    const double kc = critical_momentum(p, 0, n);
    if (std::abs(k0 - kc) < guard) {
      t.near_threshold = true;
      t.warning = "K0 = " + std::to_string(k0) + " lies within " + std::to_string(guard) +
                  " of the channel-" + std::to_string(n) + " threshold " + std::to_string(kc) +
                  "; Born coefficients diverge there";
    }
  }

  double loss = 0.0;
  for (int n = 0; n <= ch.n_c; ++n) {
    const double kn = ch[n].k.real();
    const double back = std::norm(born_element(p, n, -1, k0, kn));
    const double fwd = std::norm(born_element(p, n, +1, k0, kn));
    loss += (back + fwd) / kn;
    if (n == 0) {
      t.j0_re = pref / (k0 * kn) * back;
    } else {
      t.jn_re.push_back(pref / (k0 * kn) * back);
      t.jn_tr.push_back(pref / (k0 * kn) * fwd);
    }
  }
  const double elastic = std::norm(born_element(p, 0, +1, k0, k0));
  t.j0_tr = 1.0 + pref / (k0 * k0) * elastic - pref / k0 * loss;
  return t;
}

/// Exact reflection/transmission of a mass-M particle on gamma*delta(X).
/// The smaller of the two is formed directly so that R + T == 1.
inline ReflectionTransmission single_particle_RT(double total_mass, double gamma, double k0, double hbar = 1.0) {
  if (!(gamma >= 0.0) || !(k0 > 0.0) || !(total_mass > 0.0) || !(hbar > 0.0)) {
    throw UsageError("single-particle limit needs gamma >= 0, K0 > 0, M > 0, hbar > 0");
  }
  const double kinetic = std::pow(hbar, 4) * k0 * k0;
  const double barrier = total_mass * total_mass * gamma * gamma;
  const double sum = kinetic + barrier;
  ReflectionTransmission rt;
  if (barrier <= kinetic) {
    rt.r = barrier / sum;
    rt.t = 1.0 - rt.r;
  } else {
    rt.t = kinetic / sum;
    rt.r = 1.0 - rt.t;
  }
  return rt;
}

}  // namespace dimerscat
