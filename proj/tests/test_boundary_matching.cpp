#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "dimerscat/boundary_matching.hpp"
#include "dimerscat/observables.hpp"
#include "support/generators.hpp"

using namespace dimerscat;

namespace {

const SystemParams kFig2(1.0, 1.0, 1.0, 0.0, 3.0);
const IncidentSpec kFig2Inc{4.0, 0};

MatchSystem build(const SystemParams& p, const IncidentSpec& inc, int N) {
  const auto ch = channel_momenta(p, inc, N);
  const auto qs = required_moment_arguments(p, ch);
  const MomentTable table(N, qs, p.oscillator());
  return assemble(p, inc, ch, table);
}

}  // namespace

TEST(Assemble, Fig2ShapeAndFiniteness) {
  const auto sys = build(kFig2, kFig2Inc, 6);
  EXPECT_EQ(sys.matrix.rows(), 48);
  EXPECT_EQ(sys.matrix.cols(), 36);
  EXPECT_EQ(sys.rhs.size(), 48);
  EXPECT_TRUE(sys.matrix.allFinite());
  EXPECT_TRUE(sys.rhs.allFinite());
}

TEST(Assemble, FreePropagationSatisfiesSystemExactly) {
  gen::Source src(41);
  for (int i = 0; i < 10; ++i) {
    const SystemParams p(src.uniform(0.4, 1.6), src.uniform(0.4, 1.6), 0.0, 0.0, src.uniform(1.0, 5.0));
    const IncidentSpec inc{src.uniform(0.5, 6.0), src.integer(0, 2)};
    const int N = cutoff_index(p, inc) + src.integer(1, 6);
    const auto sys = build(p, inc, N);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(6 * N);
    for (const auto b : {AmplitudeBlock::mu, AmplitudeBlock::xi, AmplitudeBlock::beta}) {
      const int c = sys.column(b, inc.l);
      y(c) = std::exp(sys.column_log_scale(c));
    }
    EXPECT_LE((sys.matrix * y - sys.rhs).norm(), 1e-12);
  }
}

TEST(Assemble, SingleModeParityBetweenL1AndL4) {
  const SystemParams p(1.0, 1.0, 0.7, 0.7, 3.0);
  const auto sys = build(p, {1.5, 0}, 1);
  ASSERT_EQ(sys.matrix.rows(), 8);
  ASSERT_EQ(sys.matrix.cols(), 6);
  const int l1 = sys.row(ConditionBlock::l1_continuity, 0);
  const int l4 = sys.row(ConditionBlock::l4_continuity, 0);
  const auto at = [&](int r, AmplitudeBlock b) { return sys.matrix(r, sys.column(b, 0)); };
  // c^1_00(q) = c^2_00(-q): the two continuity rows carry the same moments.
  EXPECT_LE(std::abs(at(l1, AmplitudeBlock::alpha) - at(l4, AmplitudeBlock::xi)), 1e-13);
  EXPECT_LE(std::abs(at(l1, AmplitudeBlock::mu) + at(l4, AmplitudeBlock::eta)), 1e-13);
  EXPECT_LE(std::abs(at(l1, AmplitudeBlock::nu) - at(l4, AmplitudeBlock::beta)), 1e-13);
}

TEST(Assemble, MissingMomentsAreReported) {
  const auto ch = channel_momenta(kFig2, kFig2Inc, 4);
  const MomentTable small(3, required_moment_arguments(kFig2, ch), kFig2.oscillator());
  EXPECT_THROW(assemble(kFig2, kFig2Inc, ch, small), MissingMomentError);
  const MomentTable wrong_q(4, std::vector<cplx>{cplx(0.0, 0.3)}, kFig2.oscillator());
  EXPECT_THROW(assemble(kFig2, kFig2Inc, ch, wrong_q), MissingMomentError);
}

TEST(Solve, FreePropagation) {
  const SystemParams p(1.3, 0.7, 0.0, 0.0, 2.0);
  const auto sol = scattering_solution(p, {3.5, 0}, 8);
  const auto& a = sol.amplitudes;
  EXPECT_LE(a.residual_norm, 1e-10);
  for (int n = 0; n < 8; ++n) {
    const double delta = n == 0 ? 1.0 : 0.0;
    EXPECT_LE(std::abs(a.alpha(n)), 1e-10);
    EXPECT_LE(std::abs(a.nu(n)), 1e-10);
    EXPECT_LE(std::abs(a.eta(n)), 1e-10);
    EXPECT_LE(std::abs(a.beta(n) - delta), 1e-10);
    EXPECT_LE(std::abs(a.mu_amp(n) - delta), 1e-10);
    EXPECT_LE(std::abs(a.xi(n) - delta), 1e-10);
  }
}

TEST(Solve, StagedEqualsOneCall) {
  const int N = 9;
  const auto sys = build(kFig2, kFig2Inc, N);
  const auto staged = solve(sys);
  const auto one = scattering_solution(kFig2, kFig2Inc, N).amplitudes;
  EXPECT_EQ(staged.alpha, one.alpha);
  EXPECT_EQ(staged.beta, one.beta);
  EXPECT_EQ(staged.mu_amp, one.mu_amp);
  EXPECT_EQ(staged.nu, one.nu);
  EXPECT_EQ(staged.xi, one.xi);
  EXPECT_EQ(staged.eta, one.eta);
  EXPECT_EQ(staged.residual_norm, one.residual_norm);
}

TEST(Solve, MinimumTruncationHasLargerResidual) {
  const int n_c = cutoff_index(kFig2, kFig2Inc);
  const auto low = scattering_solution(kFig2, kFig2Inc, n_c + 1).amplitudes;
  const auto high = scattering_solution(kFig2, kFig2Inc, n_c + 8).amplitudes;
  EXPECT_GT(low.residual_norm, high.residual_norm);
}

TEST(Solve, SingleChannelUnitarity) {
  const SystemParams p(1.2, 0.8, 0.9, 0.4, 3.0);
  const IncidentSpec inc{2.0, 0};
  ASSERT_EQ(cutoff_index(p, inc), 0);
  const auto sol = scattering_solution(p, inc, 8);
  const double total = std::norm(sol.amplitudes.alpha(0)) + std::norm(sol.amplitudes.beta(0));
  EXPECT_NEAR(total, 1.0, 1e-6);
}

TEST(Solve, ExactThresholdIsSingular) {
  const SystemParams p(1.0, 1.0, 1.0, 1.0, 3.0);
  EXPECT_THROW(scattering_solution(p, {6.0, 0}, 11), SingularSystemError);
}

TEST(Solve, RejectsUnassembledSystem) { EXPECT_THROW(solve(MatchSystem{}), UsageError); }

TEST(SolveProperties, ParitySelection) {
  gen::Source src(42);
  for (int i = 0; i < 12; ++i) {
    const double m = src.uniform(0.5, 1.5), g = src.uniform(0.0, 3.0);
    const SystemParams p(m, m, g, g, src.uniform(1.0, 5.0));
    const int l = src.integer(0, 1);
    const IncidentSpec inc{src.momentum(p, l, 1.0, 6.0, 0.1), l};
    const auto sol = scattering_solution(p, inc, cutoff_index(p, inc) + 8);
    // x -> -x maps regions I and IV onto themselves and swaps II with III.
    // The II/III amplitudes are large and inherit the solve's conditioning.
    const auto& a = sol.amplitudes;
    for (int n = 0; n < a.n_modes; ++n) {
      const double parity = (n - l) % 2 == 0 ? 1.0 : -1.0;
      const double scale = std::max({1.0, std::abs(a.mu_amp(n)), std::abs(a.nu(n))});
      EXPECT_LE(std::abs(a.xi(n) - parity * a.mu_amp(n)), 1e-6 * scale) << "n=" << n;
      EXPECT_LE(std::abs(a.eta(n) - parity * a.nu(n)), 1e-6 * scale) << "n=" << n;
      if (parity > 0.0) continue;
      EXPECT_LE(std::abs(a.alpha(n)), 1e-8) << "n=" << n;
      EXPECT_LE(std::abs(a.beta(n)), 1e-8) << "n=" << n;
    }
  }
}

TEST(SolveProperties, ExchangeSymmetry) {
  gen::Source src(43);
  for (int i = 0; i < 10; ++i) {
    const SystemParams p = src.system();
    const IncidentSpec inc{src.momentum(p, 0, 1.0, 6.0, 0.1), 0};
    const int N = cutoff_index(p, inc) + 8;
    const auto a = scattering_solution(p, inc, N);
    const auto b = scattering_solution(p.swapped(), inc, N);
    const auto ta = coefficients(a.channels, a.amplitudes), tb = coefficients(b.channels, b.amplitudes);
    for (int n = 0; n <= ta.n_c; ++n) {
      EXPECT_LE(std::abs(ta.j_re[n] - tb.j_re[n]), 1e-9) << "set " << i << " n=" << n;
      EXPECT_LE(std::abs(ta.j_tr[n] - tb.j_tr[n]), 1e-9) << "set " << i << " n=" << n;
    }
  }
}

TEST(SolveProperties, ZeroPotentialIdentity) {
  gen::Source src(44);
  for (int i = 0; i < 10; ++i) {
    const SystemParams p(src.uniform(0.4, 1.6), src.uniform(0.4, 1.6), 0.0, 0.0, src.uniform(1.0, 5.0));
    const int l = src.integer(0, 2);
    const IncidentSpec inc{src.uniform(0.5, 6.0), l};
    const auto sol = scattering_solution(p, inc, cutoff_index(p, inc) + src.integer(1, 8));
    const auto t = coefficients(sol.channels, sol.amplitudes);
    for (int n = 0; n <= t.n_c; ++n) {
      EXPECT_NEAR(t.j_tr[n], n == l ? 1.0 : 0.0, 1e-10);
      EXPECT_NEAR(t.j_re[n], 0.0, 1e-10);
    }
  }
}

TEST(SolveProperties, ResidualDecreasesWithTruncation) {
  gen::Source src(45);
  const auto check = [](const SystemParams& p, const IncidentSpec& inc) {
    const int n_c = cutoff_index(p, inc);
    double previous = std::numeric_limits<double>::infinity();
    for (int N = n_c + 1; N <= n_c + 10; ++N) {
      const double r = scattering_solution(p, inc, N).amplitudes.residual_norm;
      EXPECT_LE(r, previous + 1e-12) << "N=" << N << " m1=" << p.m1() << " K0=" << inc.k0;
      previous = r;
    }
  };
  check(kFig2, kFig2Inc);
  for (int i = 0; i < 3; ++i) {
    const SystemParams p = src.system(2.0);
    check(p, {src.momentum(p, 0, 1.0, 4.0, 0.1), 0});
  }
}
