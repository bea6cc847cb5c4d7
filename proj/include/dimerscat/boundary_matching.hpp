#pragma once

// Mode matching on the four half-lines where a particle crosses its delta
// potential. In the (X, x) plane the lines are
//
//   L1: x2 = 0, x > 0   (regions I | II)     L2: x1 = 0, x > 0   (II | IV)
//   L3: x1 = 0, x < 0   (I | III)            L4: x2 = 0, x < 0   (III | IV)
//
// Region I holds the incident wave plus sum alpha_n phi_{-K_n,n}; region II
// holds mu_n, nu_n; region III xi_n, eta_n; region IV beta_n. Each line
// contributes a continuity and a derivative-jump condition, projected onto
// psi_m over the half-line it lives on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimerscat/channel_kinematics.hpp"
#include "dimerscat/errors.hpp"
#include "dimerscat/oscillator_basis.hpp"

namespace dimerscat {

enum class AmplitudeBlock : int { alpha = 0, mu = 1, nu = 2, xi = 3, eta = 4, beta = 5 };

enum class ConditionBlock : int {
  l1_continuity = 0,
  l1_jump,
  l2_continuity,
  l2_jump,
  l3_continuity,
  l3_jump,
  l4_continuity,
  l4_jump,
};

/// The stacked projected conditions. Column j of `matrix` multiplies the
/// rescaled unknown y_j = x_j * exp(column_log_scale[j]).
struct MatchSystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
  Eigen::VectorXd column_log_scale;
  int n_modes = 0;
  int n_proj = 0;

  int column(AmplitudeBlock block, int n) const { return static_cast<int>(block) * n_modes + n; }
  int row(ConditionBlock block, int m) const { return static_cast<int>(block) * n_proj + m; }
};

struct AmplitudeSet {
  Eigen::VectorXcd alpha;
  Eigen::VectorXcd beta;
  Eigen::VectorXcd mu_amp;
  Eigen::VectorXcd nu;
  Eigen::VectorXcd xi;
  Eigen::VectorXcd eta;
  double residual_norm = 0.0;
  int rank = 0;
  int n_modes = 0;
};

struct SolveOptions {
  /// Pivots below rank_tol * |largest pivot| count as rank deficiency.
  /// Zero selects machine epsilon times the column count.
  double rank_tol = 0.0;
};

namespace detail {

inline cplx i_times(cplx k, double r) { return cplx(0.0, 1.0) * k * r; }

}  // namespace detail

/// Arguments q needed by `assemble`: +-i K_n r1 and +-i K_n r2 for every
/// channel (the incident ones coincide with channel l).
inline std::vector<cplx> required_moment_arguments(const SystemParams& p, const ChannelSet& ch) {
  std::vector<cplx> qs;
  qs.reserve(static_cast<std::size_t>(4 * ch.size()));
  for (const Channel& c : ch.channels) {
    const cplx qa = detail::i_times(c.k, p.r1());
    const cplx qb = detail::i_times(c.k, p.r2());
    qs.insert(qs.end(), {qa, -qa, qb, -qb});
  }
  return qs;
}

inline MatchSystem assemble(const SystemParams& p, const IncidentSpec& inc, const ChannelSet& ch,
                            const MomentTable& moments) {
  inc.validate();
  const int N = ch.size();
  if (N < 1) throw UsageError("empty channel set");
  if (moments.n_modes() < N) {
    throw MissingMomentError("moment table covers " + std::to_string(moments.n_modes()) + " modes, " +
                             std::to_string(N) + " needed");
  }
  if (inc.l >= N) throw UsageError("incident mode lies outside the truncation");

  const double hbar2 = p.hbar() * p.hbar();
  const double r1 = p.r1();
  const double r2 = p.r2();
  const double jump1 = 2.0 * p.m1() * p.gamma1() / hbar2;  // x1 = 0 lines (L2, L3)
  const double jump2 = 2.0 * p.m2() * p.gamma2() / hbar2;  // x2 = 0 lines (L1, L4)
  const double row_scale = 1.0 / std::max(1.0, std::max(jump1, jump2));
  const cplx I(0.0, 1.0);
  constexpr auto pos = HalfLine::positive;
  constexpr auto neg = HalfLine::negative;

  MatchSystem sys;
  sys.n_modes = N;
  sys.n_proj = N;
  sys.matrix = Eigen::MatrixXcd::Zero(8 * N, 6 * N);
  sys.rhs = Eigen::VectorXcd::Zero(8 * N);
  sys.column_log_scale = Eigen::VectorXd::Zero(6 * N);
  Eigen::MatrixXd entry_scale = Eigen::MatrixXd::Zero(8 * N, 6 * N);

  const auto put = [&](ConditionBlock rb, int m, AmplitudeBlock cb, int n, cplx value, cplx q, HalfLine side) {
    const int r = sys.row(rb, m);
    const int c = sys.column(cb, n);
    sys.matrix(r, c) += value;
    entry_scale(r, c) = moments.log_scale(q, side);
  };

  using A = AmplitudeBlock;
  using B = ConditionBlock;
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      const cplx k = ch[n].k;
      const cplx qa = detail::i_times(k, r1);
      const cplx qb = detail::i_times(k, r2);
      const cplx ikr1 = I * k * r1;
      const cplx ikr2 = I * k * r2;

      // L1 (x > 0): region I | region II, jump in d/dx2.
      {
        const cplx c_in = moments.c(m, n, qa, pos), d_in = moments.d(m, n, qa, pos);
        const cplx c_out = moments.c(m, n, -qa, pos), d_out = moments.d(m, n, -qa, pos);
        put(B::l1_continuity, m, A::alpha, n, c_in, qa, pos);
        put(B::l1_continuity, m, A::mu, n, -c_out, -qa, pos);
        put(B::l1_continuity, m, A::nu, n, -c_in, qa, pos);
        put(B::l1_jump, m, A::mu, n, row_scale * (jump2 * c_out - (ikr2 * c_out + d_out)), -qa, pos);
        put(B::l1_jump, m, A::nu, n, row_scale * (jump2 * c_in - (-ikr2 * c_in + d_in)), qa, pos);
        put(B::l1_jump, m, A::alpha, n, row_scale * (-ikr2 * c_in + d_in), qa, pos);
      }
      // L2 (x > 0): region II | region IV, jump in d/dx1.
      {
        const cplx c_p = moments.c(m, n, qb, pos), d_p = moments.d(m, n, qb, pos);
        const cplx c_m = moments.c(m, n, -qb, pos), d_m = moments.d(m, n, -qb, pos);
        put(B::l2_continuity, m, A::mu, n, c_p, qb, pos);
        put(B::l2_continuity, m, A::nu, n, c_m, -qb, pos);
        put(B::l2_continuity, m, A::beta, n, -c_p, qb, pos);
        put(B::l2_jump, m, A::beta, n, row_scale * (jump1 * c_p - (ikr1 * c_p - d_p)), qb, pos);
        put(B::l2_jump, m, A::mu, n, row_scale * (ikr1 * c_p - d_p), qb, pos);
        put(B::l2_jump, m, A::nu, n, row_scale * (-ikr1 * c_m - d_m), -qb, pos);
      }
      // L3 (x < 0): region I | region III, jump in d/dx1.
      {
        const cplx c_p = moments.c(m, n, qb, neg), d_p = moments.d(m, n, qb, neg);
        const cplx c_m = moments.c(m, n, -qb, neg), d_m = moments.d(m, n, -qb, neg);
        put(B::l3_continuity, m, A::alpha, n, c_m, -qb, neg);
        put(B::l3_continuity, m, A::xi, n, -c_p, qb, neg);
        put(B::l3_continuity, m, A::eta, n, -c_m, -qb, neg);
        put(B::l3_jump, m, A::xi, n, row_scale * (jump1 * c_p - (ikr1 * c_p - d_p)), qb, neg);
        put(B::l3_jump, m, A::eta, n, row_scale * (jump1 * c_m - (-ikr1 * c_m - d_m)), -qb, neg);
        put(B::l3_jump, m, A::alpha, n, row_scale * (-ikr1 * c_m - d_m), -qb, neg);
      }
      // L4 (x < 0): region III | region IV, jump in d/dx2.
      {
        const cplx c_out = moments.c(m, n, -qa, neg), d_out = moments.d(m, n, -qa, neg);
        const cplx c_in = moments.c(m, n, qa, neg), d_in = moments.d(m, n, qa, neg);
        put(B::l4_continuity, m, A::xi, n, c_out, -qa, neg);
        put(B::l4_continuity, m, A::eta, n, c_in, qa, neg);
        put(B::l4_continuity, m, A::beta, n, -c_out, -qa, neg);
        put(B::l4_jump, m, A::beta, n, row_scale * (jump2 * c_out - (ikr2 * c_out + d_out)), -qa, neg);
        put(B::l4_jump, m, A::xi, n, row_scale * (ikr2 * c_out + d_out), -qa, neg);
        put(B::l4_jump, m, A::eta, n, row_scale * (-ikr2 * c_in + d_in), qa, neg);
      }
    }

    // Incident wave phi_{K0,l}: present in region I only, moved to the rhs.
    const int l = inc.l;
    const cplx k0 = ch[l].k;
    const cplx qa0 = detail::i_times(k0, r1);
    const cplx qb0 = detail::i_times(k0, r2);
    const cplx c1_in = moments.lookup({m, l, -qa0, pos, MomentKind::c}).unscaled();
    const cplx d1_in = moments.lookup({m, l, -qa0, pos, MomentKind::d}).unscaled();
    sys.rhs(sys.row(B::l1_continuity, m)) = -c1_in;
    sys.rhs(sys.row(B::l1_jump, m)) = -row_scale * (I * k0 * r2 * c1_in + d1_in);
    const cplx c3_in = moments.lookup({m, l, qb0, neg, MomentKind::c}).unscaled();
    const cplx d3_in = moments.lookup({m, l, qb0, neg, MomentKind::d}).unscaled();
    sys.rhs(sys.row(B::l3_continuity, m)) = -c3_in;
    sys.rhs(sys.row(B::l3_jump, m)) = -row_scale * (I * k0 * r1 * c3_in - d3_in);
  }

  // Rescale each unknown so its largest-growth entry carries exp(0).
  for (int c = 0; c < 6 * N; ++c) {
    const double top = entry_scale.col(c).maxCoeff();
    sys.column_log_scale(c) = top;
    if (top == 0.0) continue;
    for (int r = 0; r < 8 * N; ++r) {
      if (sys.matrix(r, c) != cplx{}) sys.matrix(r, c) *= std::exp(entry_scale(r, c) - top);
    }
  }
  return sys;
}

/// Least squares by column-pivoted Householder QR on the column-equilibrated
/// matrix.
inline AmplitudeSet solve(const MatchSystem& sys, const SolveOptions& opts = {}) {
  const Eigen::Index cols = sys.matrix.cols();
  if (cols == 0 || sys.matrix.rows() < cols || sys.rhs.size() != sys.matrix.rows()) {
    throw UsageError("match system is not assembled");
  }
  Eigen::VectorXd norms = sys.matrix.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (!std::isfinite(norms(j))) throw NumericalError("match system contains non-finite entries");
    if (norms(j) == 0.0) norms(j) = 1.0;
  }
  const Eigen::MatrixXcd equilibrated = sys.matrix * norms.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(equilibrated);
  qr.setThreshold(opts.rank_tol > 0.0 ? opts.rank_tol
                                      : std::numeric_limits<double>::epsilon() * static_cast<double>(cols));
  const int rank = static_cast<int>(qr.rank());
  if (rank < cols) {
    throw SingularSystemError("match system is rank deficient: numerical rank " + std::to_string(rank) + " < " +
                                  std::to_string(cols),
                              rank, static_cast<int>(cols));
  }
  const Eigen::VectorXcd y = qr.solve(sys.rhs).cwiseQuotient(norms.cast<cplx>());

  AmplitudeSet out;
  out.n_modes = sys.n_modes;
  out.rank = rank;
  out.residual_norm = (sys.matrix * y - sys.rhs).norm();
  const int N = sys.n_modes;
  Eigen::VectorXcd x(cols);
  for (Eigen::Index j = 0; j < cols; ++j) x(j) = y(j) * std::exp(-sys.column_log_scale(j));
  const auto block = [&](AmplitudeBlock b) -> Eigen::VectorXcd { return x.segment(static_cast<int>(b) * N, N); };
  out.alpha = block(AmplitudeBlock::alpha);
  out.mu_amp = block(AmplitudeBlock::mu);
  out.nu = block(AmplitudeBlock::nu);
  out.xi = block(AmplitudeBlock::xi);
  out.eta = block(AmplitudeBlock::eta);
  out.beta = block(AmplitudeBlock::beta);
  return out;
}

struct ScatteringSolution {
  ChannelSet channels;
  AmplitudeSet amplitudes;
};

inline ScatteringSolution scattering_solution(const SystemParams& p, const IncidentSpec& inc, int n_modes,
                                              const QuadratureOptions& quad = {}, const SolveOptions& solver = {}) {
  ChannelSet ch = channel_momenta(p, inc, n_modes);
  const auto qs = required_moment_arguments(p, ch);
  const MomentTable table(n_modes, qs, p.oscillator(), quad);
  const MatchSystem sys = assemble(p, inc, ch, table);
  return {std::move(ch), solve(sys, solver)};
}

}  // namespace dimerscat
