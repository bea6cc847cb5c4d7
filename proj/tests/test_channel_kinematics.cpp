#include <cmath>

#include <gtest/gtest.h>

#include "dimerscat/channel_kinematics.hpp"
#include "support/generators.hpp"

using namespace dimerscat;

namespace {
SystemParams pair_m2(double omega) { return SystemParams(1.0, 1.0, 1.0, 0.0, omega); }
}  // namespace

TEST(Kinematics, TotalEnergy) {
  EXPECT_DOUBLE_EQ(total_energy(pair_m2(3.0), {4.0, 0}), 5.5);
  EXPECT_DOUBLE_EQ(total_energy(pair_m2(2.0), {4.5, 1}), 8.0625);
  EXPECT_NEAR(total_energy(pair_m2(3.0), {1e-9, 0}), 1.5, 1e-15);
}

TEST(Kinematics, CutoffIndex) {
  EXPECT_EQ(cutoff_index(pair_m2(3.0), {4.0, 0}), 1);
  EXPECT_EQ(cutoff_index(pair_m2(2.0), {5.2, 0}), 3);
  EXPECT_EQ(cutoff_index(pair_m2(2.0), {4.5, 1}), 3);
}

TEST(Kinematics, ChannelMomenta) {
  const auto ch = channel_momenta(pair_m2(3.0), {4.0, 0}, 6);
  EXPECT_EQ(ch.n_c, 1);
  EXPECT_EQ(ch[0].k, cplx(4.0, 0.0));
  EXPECT_TRUE(ch[1].open());
  EXPECT_DOUBLE_EQ(ch[1].k.real(), 2.0);
  EXPECT_FALSE(ch[2].open());
  EXPECT_EQ(ch[2].k.real(), 0.0);
  EXPECT_NEAR(ch[2].k.imag(), 2.8284271247461903, 1e-15);
  EXPECT_FALSE(ch.at_threshold);

  const auto excited = channel_momenta(pair_m2(2.0), {4.5, 2}, 8);
  EXPECT_EQ(excited[2].k, cplx(4.5, 0.0));
}

TEST(Kinematics, PreconditionsAreEnforced) {
  EXPECT_THROW(channel_momenta(pair_m2(3.0), {4.0, 0}, 1), UsageError);
  EXPECT_THROW(channel_momenta(pair_m2(3.0), {4.0, 0}, 65), UsageError);
  EXPECT_THROW(channel_momenta(pair_m2(3.0), {-1.0, 0}, 4), UsageError);
  EXPECT_THROW(critical_momentum(pair_m2(2.0), 0, 0), UsageError);
  EXPECT_THROW(SystemParams(1.0, 1.0, -0.1, 0.0, 1.0), UsageError);
  EXPECT_THROW(SystemParams(1.0, 0.0, 0.1, 0.0, 1.0), UsageError);
}

TEST(Kinematics, Thresholds) {
  EXPECT_EQ(critical_momentum(pair_m2(2.0), 0, 2), 4.0);
  EXPECT_NEAR(critical_momentum(pair_m2(2.0), 0, 1), 2.8284271247461903, 1e-15);
  const IncidentSpec inc{5.0, 0};
  EXPECT_EQ(critical_omega(pair_m2(1.0), inc, 2), 3.125);
  EXPECT_EQ(critical_omega(pair_m2(1.0), inc, 1), 6.25);
}

TEST(Kinematics, ExactThresholdIsClosed) {
  const auto at = channel_momenta(pair_m2(2.0), {4.0, 0}, 6);
  EXPECT_FALSE(at[2].open());
  EXPECT_TRUE(at.at_threshold);
  EXPECT_EQ(at.n_c, 1);
  const auto above = channel_momenta(pair_m2(2.0), {std::nextafter(4.0, 5.0), 0}, 6);
  EXPECT_TRUE(above[2].open());
  EXPECT_EQ(above.n_c, 2);
}

TEST(KinematicsProperties, EnergyClosure) {
  gen::Source src(31);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p(src.uniform(0.2, 3.0), src.uniform(0.2, 3.0), 0.0, 0.0, src.uniform(0.3, 6.0),
                         src.uniform(0.5, 2.0));
    const IncidentSpec inc{src.uniform(0.1, 8.0), src.integer(0, 4)};
    const int n_c = cutoff_index(p, inc);
    if (n_c + 4 > kMaxModes) continue;
    const auto ch = channel_momenta(p, inc, n_c + 4);
    const double E = ch.total_energy;
    for (const Channel& c : ch.channels) {
      const cplx k2 = c.k * c.k;
      const double kinetic = p.hbar() * p.hbar() * k2.real() / (2.0 * p.total_mass());
      const double closure = kinetic + (c.n + 0.5) * p.hbar() * p.omega() - E;
      EXPECT_LE(std::abs(closure), 1e-12 * E) << "n=" << c.n;
      EXPECT_EQ(k2.imag() == 0.0 || std::abs(k2.imag()) < 1e-12 * std::abs(k2), true);
    }
  }
}

TEST(KinematicsProperties, Monotonicity) {
  gen::Source src(32);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p(src.uniform(0.2, 3.0), src.uniform(0.2, 3.0), 0.0, 0.0, src.uniform(0.3, 6.0));
    const IncidentSpec inc{src.uniform(0.1, 8.0), src.integer(0, 3)};
    const int n_c = cutoff_index(p, inc);
    if (n_c + 6 > kMaxModes) continue;
    const auto ch = channel_momenta(p, inc, n_c + 6);
    for (int n = 1; n < ch.size(); ++n) {
      if (ch[n].open() && ch[n - 1].open()) {
        EXPECT_LE(ch[n].k.real(), ch[n - 1].k.real());
      }
      if (!ch[n].open() && !ch[n - 1].open()) {
        EXPECT_GT(ch[n].k.imag(), ch[n - 1].k.imag());
      }
      if (ch[n].open()) {
        EXPECT_TRUE(ch[n - 1].open());
      }
    }
  }
}

TEST(KinematicsProperties, ThresholdConsistency) {
  gen::Source src(33);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p(src.uniform(0.2, 3.0), src.uniform(0.2, 3.0), 0.0, 0.0, src.uniform(0.3, 6.0));
    const int l = src.integer(0, 3);
    const int n = l + src.integer(1, 5);
    const double kc = critical_momentum(p, l, n);
    for (const double k0 : {kc, std::nextafter(kc, 0.0), std::nextafter(kc, 100.0), src.uniform(0.1, 2.0 * kc)}) {
      const IncidentSpec inc{k0, l};
      const auto ch = channel_momenta(p, inc, std::max(n, cutoff_index(p, inc)) + 2);
      EXPECT_EQ(ch[n].open(), channel_k_squared(p, inc, n) > 0.0);
      if (k0 < kc) {
        EXPECT_FALSE(ch[n].open());
      }
      if (k0 > kc) {
        EXPECT_EQ(ch[n].open(), channel_k_squared(p, inc, n) > 0.0);
      }
      // omega <= omega_c(n) <=> K0 >= K0c(n), checked away from rounding.
      if (std::abs(k0 - kc) > 1e-9 * kc) {
        EXPECT_EQ(p.omega() <= critical_omega(p, inc, n), k0 >= kc);
      }
    }
  }
}
