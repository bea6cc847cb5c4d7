#pragma once

// Harmonic-oscillator eigenfunctions of the relative coordinate and the
// half-line exponential moments
//
//   c(q) = \int psi_m(x) e^{q x} psi_n(x) dx,
//   d(q) = \int psi_m(x) e^{q x} psi_n'(x) dx,
//
// taken over x < 0 (HalfLine::negative) or x > 0 (HalfLine::positive).

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "dimerscat/errors.hpp"

namespace dimerscat {

using cplx = std::complex<double>;

/// Largest internal-mode truncation accepted anywhere in the library.
inline constexpr int kMaxModes = 64;

/// Reduced mass, angular frequency and action quantum of the relative
/// oscillator. The inverse length scale a = sqrt(mu*omega/hbar) is derived.
class OscillatorParams {
 public:
  OscillatorParams(double mu, double omega, double hbar = 1.0)
      : mu_(mu), omega_(omega), hbar_(hbar) {
    if (!(mu > 0.0) || !(omega > 0.0) || !(hbar > 0.0) || !std::isfinite(mu) ||
        !std::isfinite(omega) || !std::isfinite(hbar)) {
      throw UsageError("oscillator parameters must be finite and positive");
    }
    a_ = std::sqrt(mu_ * omega_ / hbar_);
  }

  double mu() const noexcept { return mu_; }
  double omega() const noexcept { return omega_; }
  double hbar() const noexcept { return hbar_; }
  double a() const noexcept { return a_; }

 private:
  double mu_;
  double omega_;
  double hbar_;
  double a_;
};

/// psi_0(x) .. psi_nmax(x), by the normalized Hermite-function recurrence
/// (the Gaussian is folded into the seed, so no factorials appear).
inline std::vector<double> eval_psi_all(int nmax, double x, const OscillatorParams& p) {
  if (nmax < 0) throw UsageError("mode index must be non-negative");
  std::vector<double> psi(static_cast<std::size_t>(nmax) + 1);
  const double t = p.a() * x;
  psi[0] = std::sqrt(p.a()) * std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t * t);
  if (nmax >= 1) psi[1] = std::numbers::sqrt2 * t * psi[0];
  for (int k = 1; k < nmax; ++k) {
    psi[k + 1] = std::sqrt(2.0 / (k + 1)) * t * psi[k] - std::sqrt(double(k) / (k + 1)) * psi[k - 1];
  }
  return psi;
}

inline double eval_psi(int n, double x, const OscillatorParams& p) {
  return eval_psi_all(n, x, p)[static_cast<std::size_t>(n)];
}

/// psi_n' = a (sqrt(n/2) psi_{n-1} - sqrt((n+1)/2) psi_{n+1}).
inline double eval_psi_prime(int n, double x, const OscillatorParams& p) {
  const auto psi = eval_psi_all(n + 1, x, p);
  const double lower = n > 0 ? std::sqrt(n / 2.0) * psi[n - 1] : 0.0;
  return p.a() * (lower - std::sqrt((n + 1) / 2.0) * psi[n + 1]);
}

enum class HalfLine { negative, positive };
enum class MomentKind { c, d };

inline const char* to_string(HalfLine side) {
  return side == HalfLine::positive ? "positive-half" : "negative-half";
}

struct MomentKey {
  int m = 0;
  int n = 0;
  cplx q{};
  HalfLine side = HalfLine::positive;
  MomentKind kind = MomentKind::c;
};

/// The integral is value * exp(log_scale). log_scale is non-zero only when
/// e^{qx} grows along the half-line, where the raw integral can overflow.
struct MomentValue {
  cplx value{};
  double log_scale = 0.0;

  cplx unscaled() const { return value * std::exp(log_scale); }
};

struct QuadratureOptions {
  double tol = 1e-10;       // agreement required between successive refinements
  double fail_tol = 1e-9;   // disagreement beyond this after the last doubling is an error
  int max_doublings = 4;
  int support_modes = 0;    // basis size used to size the integration window; 0 = from the key
};

namespace detail {

inline double growth_rate(cplx q, HalfLine side) {
  return side == HalfLine::positive ? q.real() : -q.real();
}

/// Peak of the log-envelope Re(q)x - a^2 x^2 over the half-line.
inline double moment_log_scale(cplx q, HalfLine side, double a) {
  const double g = std::max(growth_rate(q, side), 0.0);
  return g * g / (4.0 * a * a);
}

/// Scaled c-moments for all m, n < size at a single (q, side), row-major.
struct MomentBlock {
  int size = 0;
  double log_scale = 0.0;
  std::vector<cplx> c;

  cplx at(int m, int n) const { return c[static_cast<std::size_t>(m) * size + n]; }
};

inline const std::array<std::pair<double, double>, 20>& gauss_legendre_20() {
  static const auto rule = [] {
    using gauss = boost::math::quadrature::gauss<double, 20>;
    std::array<std::pair<double, double>, 20> nodes{};
    const auto& x = gauss::abscissa();
    const auto& w = gauss::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes[2 * i] = {-x[i], w[i]};
      nodes[2 * i + 1] = {x[i], w[i]};
    }
    return nodes;
  }();
  return rule;
}

class BlockIntegrator {
 public:
  BlockIntegrator(int size, int support_modes, cplx q, HalfLine side, const OscillatorParams& p)
      : size_(size), q_(q), a_(p.a()), sign_(side == HalfLine::positive ? 1.0 : -1.0) {
    const double g = growth_rate(q, side);
    const double peak = std::max(g, 0.0) / (2.0 * a_ * a_);
    const int top = std::max(size, support_modes) - 1;
    const double half_width = (std::sqrt(2.0 * top + 1.0) + 12.0) / a_;
    lo_ = std::max(0.0, peak - half_width);
    hi_ = peak + half_width;
    log_scale_ = moment_log_scale(q, side, a_);
    double panel = 1.0 / a_;
    if (q.imag() != 0.0) panel = std::min(panel, 2.0 / std::abs(q.imag()));
    base_panels_ = std::max(4, static_cast<int>(std::ceil((hi_ - lo_) / panel)));
    rec_up_.resize(static_cast<std::size_t>(std::max(size_, 2)));
    rec_down_.resize(rec_up_.size());
    for (int k = 1; k < size_; ++k) {
      rec_up_[k] = std::sqrt(2.0 / (k + 1));
      rec_down_[k] = std::sqrt(double(k) / (k + 1));
    }
  }

  double log_scale() const { return log_scale_; }
  int base_panels() const { return base_panels_; }

  std::vector<cplx> integrate(int panels) const {
    const auto& rule = gauss_legendre_20();
    const double width = (hi_ - lo_) / panels;
    const double h0 = std::pow(std::numbers::pi, -0.25);
    std::vector<cplx> acc(static_cast<std::size_t>(size_) * size_);
    std::vector<double> h(static_cast<std::size_t>(size_));
    for (int k = 0; k < panels; ++k) {
      const double mid = lo_ + (k + 0.5) * width;
      for (const auto& [node, weight] : rule) {
        const double u = mid + 0.5 * width * node;
        const double x = sign_ * u;
        const double t = a_ * x;
        h[0] = h0;
        if (size_ > 1) h[1] = std::numbers::sqrt2 * t * h0;
        for (int j = 1; j + 1 < size_; ++j) h[j + 1] = rec_up_[j] * t * h[j] - rec_down_[j] * h[j - 1];
        const cplx f = (0.5 * width * weight * a_) * std::exp(q_ * x - cplx(t * t + log_scale_, 0.0));
        for (int m = 0; m < size_; ++m) {
          const cplx fm = f * h[m];
          cplx* row = acc.data() + static_cast<std::size_t>(m) * size_;
          for (int n = 0; n <= m; ++n) row[n] += fm * h[n];
        }
      }
    }
    for (int m = 0; m < size_; ++m)
      for (int n = m + 1; n < size_; ++n)
        acc[static_cast<std::size_t>(m) * size_ + n] = acc[static_cast<std::size_t>(n) * size_ + m];
    return acc;
  }

 private:
  int size_;
  cplx q_;
  double a_;
  double sign_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double log_scale_ = 0.0;
  int base_panels_ = 4;
  std::vector<double> rec_up_;
  std::vector<double> rec_down_;
};

inline std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

inline std::string describe_q(cplx q) {
  return "(" + std::to_string(q.real()) + (q.imag() < 0 ? "" : "+") + std::to_string(q.imag()) + "i)";
}

/// Composite Gauss-Legendre with the panel count doubled until two
/// successive refinements agree (relative to max(1, |c|)).
inline MomentBlock integrate_block(int size, cplx q, HalfLine side, const OscillatorParams& p,
                                   const QuadratureOptions& opts) {
  if (size < 1 || size > kMaxModes + 2) throw UsageError("moment block size out of range");
  if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) throw UsageError("moment argument must be finite");
  const BlockIntegrator integrator(size, opts.support_modes, q, side, p);
  int panels = integrator.base_panels();
  auto previous = integrator.integrate(panels);
  double deviation = 0.0;
  for (int k = 0; k < opts.max_doublings; ++k) {
    panels *= 2;
    auto current = integrator.integrate(panels);
    double magnitude = 1.0;
    deviation = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      magnitude = std::max(magnitude, std::abs(current[i]));
      deviation = std::max(deviation, std::abs(current[i] - previous[i]));
    }
    deviation /= magnitude;
    previous = std::move(current);
    if (deviation <= opts.tol) return {size, integrator.log_scale(), std::move(previous)};
  }
  if (deviation > opts.fail_tol) {
    throw QuadratureError("moment quadrature did not converge at q=" + describe_q(q) + " on the " +
                          to_string(side) + " (deviation " + detail::scientific(deviation) + ")");
  }
  return {size, integrator.log_scale(), std::move(previous)};
}

/// d_{mn} = a (sqrt(n/2) c_{m,n-1} - sqrt((n+1)/2) c_{m,n+1}); needs n+1 < block.size.
inline cplx ladder_d(const MomentBlock& block, int m, int n, double a) {
  const cplx lower = n > 0 ? std::sqrt(n / 2.0) * block.at(m, n - 1) : cplx{};
  return a * (lower - std::sqrt((n + 1) / 2.0) * block.at(m, n + 1));
}

}  // namespace detail

inline MomentValue moment_c(const MomentKey& key, const OscillatorParams& p, const QuadratureOptions& opts = {}) {
  if (key.kind != MomentKind::c) throw UsageError("moment_c called with a d key");
  if (key.m < 0 || key.n < 0 || key.m > kMaxModes || key.n > kMaxModes) throw UsageError("moment index out of range");
  QuadratureOptions o = opts;
  const int size = std::max(key.m, key.n) + 2;
  if (o.support_modes == 0) o.support_modes = size;
  const auto block = detail::integrate_block(size, key.q, key.side, p, o);
  return {block.at(key.m, key.n), block.log_scale};
}

inline MomentValue moment_d(const MomentKey& key, const OscillatorParams& p, const QuadratureOptions& opts = {}) {
  if (key.kind != MomentKind::d) throw UsageError("moment_d called with a c key");
  if (key.m < 0 || key.n < 0 || key.m > kMaxModes || key.n > kMaxModes) throw UsageError("moment index out of range");
  QuadratureOptions o = opts;
  const int size = std::max(key.m, key.n) + 2;
  if (o.support_modes == 0) o.support_modes = size;
  const auto block = detail::integrate_block(size, key.q, key.side, p, o);
  return {detail::ladder_d(block, key.m, key.n, p.a()), block.log_scale};
}

/// Every c and d moment for m, n < n_modes at each tabulated q, on both
/// half-lines. Immutable after construction.
class MomentTable {
 public:
  MomentTable(int n_modes, std::span<const cplx> q_list, const OscillatorParams& p, QuadratureOptions opts = {})
      : n_modes_(n_modes), params_(p), opts_(opts) {
    if (n_modes < 1 || n_modes > kMaxModes) throw UsageError("moment table size must be in [1, 64]");
    if (q_list.empty()) throw UsageError("moment table needs at least one q");
    opts_.support_modes = n_modes_ + 1;
    for (const cplx q : q_list) {
      for (const HalfLine side : {HalfLine::negative, HalfLine::positive}) {
        const auto key = make_key(q, side);
        if (entries_.count(key)) continue;
        Entry entry;
        try {
          entry.block = detail::integrate_block(n_modes_ + 1, q, side, params_, opts_);
        } catch (const QuadratureError& e) {
          throw QuadratureError(std::string(e.what()) + " while tabulating m,n < " + std::to_string(n_modes_));
        }
        entry.d.resize(static_cast<std::size_t>(n_modes_) * n_modes_);
        for (int m = 0; m < n_modes_; ++m)
          for (int n = 0; n < n_modes_; ++n)
            entry.d[static_cast<std::size_t>(m) * n_modes_ + n] = detail::ladder_d(entry.block, m, n, params_.a());
        entries_.emplace(key, std::move(entry));
      }
    }
  }

  int n_modes() const noexcept { return n_modes_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const OscillatorParams& params() const noexcept { return params_; }

  bool contains(cplx q, HalfLine side) const { return entries_.count(make_key(q, side)) != 0; }

  MomentValue lookup(const MomentKey& key) const {
    const Entry& e = find(key);
    if (key.kind == MomentKind::c) return {e.block.at(key.m, key.n), e.block.log_scale};
    return {e.d[static_cast<std::size_t>(key.m) * n_modes_ + key.n], e.block.log_scale};
  }

  cplx c(int m, int n, cplx q, HalfLine side) const { return lookup({m, n, q, side, MomentKind::c}).value; }
  cplx d(int m, int n, cplx q, HalfLine side) const { return lookup({m, n, q, side, MomentKind::d}).value; }
  double log_scale(cplx q, HalfLine side) const { return find({0, 0, q, side, MomentKind::c}).block.log_scale; }

  /// Re-integrates one entry with this table's quadrature settings.
  MomentValue recompute(const MomentKey& key) const {
    const auto block = detail::integrate_block(n_modes_ + 1, key.q, key.side, params_, opts_);
    if (key.kind == MomentKind::c) return {block.at(key.m, key.n), block.log_scale};
    return {detail::ladder_d(block, key.m, key.n, params_.a()), block.log_scale};
  }

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, int>;

  struct Entry {
    detail::MomentBlock block;
    std::vector<cplx> d;
  };

  static Key make_key(cplx q, HalfLine side) {
    // +0.0 folds the two signed zeros together.
    return {std::bit_cast<std::uint64_t>(q.real() + 0.0), std::bit_cast<std::uint64_t>(q.imag() + 0.0),
            side == HalfLine::positive ? 1 : 0};
  }

  const Entry& find(const MomentKey& key) const {
    auto it = entries_.find(make_key(key.q, key.side));
    if (it == entries_.end() || key.m < 0 || key.n < 0 || key.m >= n_modes_ || key.n >= n_modes_) {
      throw MissingMomentError("moment table has no entry for (m=" + std::to_string(key.m) +
                               ", n=" + std::to_string(key.n) + ", q=" + detail::describe_q(key.q) + ", " +
                               to_string(key.side) + ")");
    }
    return it->second;
  }

  int n_modes_;
  OscillatorParams params_;
  QuadratureOptions opts_;
  std::map<Key, Entry> entries_;
};

}  // namespace dimerscat
