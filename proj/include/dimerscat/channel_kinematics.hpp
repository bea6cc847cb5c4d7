#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dimerscat/errors.hpp"
#include "dimerscat/oscillator_basis.hpp"

namespace dimerscat {

/// Two harmonically bound particles hitting gamma1*delta(x1) + gamma2*delta(x2).
class SystemParams {
 public:
  SystemParams(double m1, double m2, double gamma1, double gamma2, double omega, double hbar = 1.0)
      : m1_(m1), m2_(m2), gamma1_(gamma1), gamma2_(gamma2), omega_(omega), hbar_(hbar) {
    const bool finite = std::isfinite(m1) && std::isfinite(m2) && std::isfinite(gamma1) &&
                        std::isfinite(gamma2) && std::isfinite(omega) && std::isfinite(hbar);
    if (!finite) throw UsageError("system parameters must be finite");
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw UsageError("masses must be positive");
    if (!(omega > 0.0)) throw UsageError("binding frequency omega must be positive");
    if (!(hbar > 0.0)) throw UsageError("hbar must be positive");
    if (gamma1 < 0.0 || gamma2 < 0.0) throw UsageError("potential strengths must be non-negative");
  }

  double m1() const noexcept { return m1_; }
  double m2() const noexcept { return m2_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }
  double omega() const noexcept { return omega_; }
  double hbar() const noexcept { return hbar_; }

  double total_mass() const noexcept { return m1_ + m2_; }
  double reduced_mass() const noexcept { return m1_ * m2_ / (m1_ + m2_); }
  double r1() const noexcept { return m1_ / (m1_ + m2_); }
  double r2() const noexcept { return m2_ / (m1_ + m2_); }

  OscillatorParams oscillator() const { return OscillatorParams(reduced_mass(), omega_, hbar_); }

  /// Particle relabeling (m1, gamma1) <-> (m2, gamma2).
  SystemParams swapped() const { return SystemParams(m2_, m1_, gamma2_, gamma1_, omega_, hbar_); }

 private:
  double m1_;
  double m2_;
  double gamma1_;
  double gamma2_;
  double omega_;
  double hbar_;
};

/// Incident center-of-mass momentum K0 > 0 with the pair in internal mode l.
struct IncidentSpec {
  double k0 = 1.0;
  int l = 0;

  void validate() const {
    if (!(k0 > 0.0) || !std::isfinite(k0)) throw UsageError("incident momentum K0 must be positive");
    if (l < 0 || l >= kMaxModes) throw UsageError("incident mode l must be in [0, 63]");
  }
};

enum class ChannelKind { propagating, evanescent };

struct Channel {
  int n = 0;
  cplx k{};
  ChannelKind kind = ChannelKind::propagating;

  bool open() const noexcept { return kind == ChannelKind::propagating; }
};

struct ChannelSet {
  std::vector<Channel> channels;
  double total_energy = 0.0;
  double k0 = 0.0;
  int l = 0;
  int n_c = 0;                // highest propagating index
  bool at_threshold = false;  // some K_n is exactly zero

  int size() const noexcept { return static_cast<int>(channels.size()); }
  const Channel& operator[](int n) const { return channels[static_cast<std::size_t>(n)]; }
};

inline double total_energy(const SystemParams& p, const IncidentSpec& inc) {
  inc.validate();
  const double hbar = p.hbar();
  return hbar * hbar * inc.k0 * inc.k0 / (2.0 * p.total_mass()) + (inc.l + 0.5) * hbar * p.omega();
}

/// Highest energetically open internal level, floor(hbar K0^2 / (2 M omega)) + l.
inline int cutoff_index(const SystemParams& p, const IncidentSpec& inc) {
  inc.validate();
  const double excess = p.hbar() * inc.k0 * inc.k0 / (2.0 * p.total_mass() * p.omega());
  return static_cast<int>(std::floor(excess)) + inc.l;
}

/// K_n^2 = K0^2 - 2 M omega (n - l) / hbar.
inline double channel_k_squared(const SystemParams& p, const IncidentSpec& inc, int n) {
  return inc.k0 * inc.k0 - 2.0 * p.total_mass() * p.omega() * (n - inc.l) / p.hbar();
}

inline ChannelSet channel_momenta(const SystemParams& p, const IncidentSpec& inc, int n_modes) {
  const int cutoff = cutoff_index(p, inc);
  if (n_modes <= cutoff) {
    throw UsageError("mode truncation N=" + std::to_string(n_modes) + " must exceed the cutoff index n_c=" +
                     std::to_string(cutoff));
  }
  if (n_modes > kMaxModes) throw UsageError("mode truncation N must not exceed 64");

  ChannelSet set;
  set.total_energy = total_energy(p, inc);
  set.k0 = inc.k0;
  set.l = inc.l;
  set.n_c = -1;
  set.channels.reserve(static_cast<std::size_t>(n_modes));
  for (int n = 0; n < n_modes; ++n) {
    const double k2 = channel_k_squared(p, inc, n);
    Channel ch;
    ch.n = n;
    if (n == inc.l) {
      ch.k = inc.k0;
    } else if (k2 > 0.0) {
      ch.k = std::sqrt(k2);
    } else {
      ch.k = cplx(0.0, std::sqrt(-k2));
      ch.kind = ChannelKind::evanescent;
      if (k2 == 0.0) set.at_threshold = true;
    }
    if (ch.open()) set.n_c = n;
    set.channels.push_back(ch);
  }
  return set;
}

/// K0 at which channel n opens: sqrt(2 (n - l) M omega / hbar).
inline double critical_momentum(const SystemParams& p, int l, int n) {
  if (n <= l) throw UsageError("critical momentum needs n > l");
  return std::sqrt(2.0 * (n - l) * p.total_mass() * p.omega() / p.hbar());
}

/// omega below which channel n is open: hbar K0^2 / (2 (n - l) M).
inline double critical_omega(const SystemParams& p, const IncidentSpec& inc, int n) {
  inc.validate();
  if (n <= inc.l) throw UsageError("critical omega needs n > l");
  return p.hbar() * inc.k0 * inc.k0 / (2.0 * (n - inc.l) * p.total_mass());
}

}  // namespace dimerscat
