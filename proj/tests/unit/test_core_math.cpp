#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bldiff/core_math.hpp"
#include "bldiff/errors.hpp"
#include "oracles.hpp"

using namespace bldiff;

namespace {

struct ReferenceSetup {
  DegreeConfig degrees{3, -1.0, 0.2};
  WeightVectors w = compute_weights(degrees);
  InternalGains g = InternalGains::uniform(3, 1.0, 1.0);
  oracle::Config o{3, -1.0, 0.2, {1, 1, 1}, {1, 1, 1}};
};

void expect_rel(double actual, double expected, double rtol) {
  EXPECT_LE(std::fabs(actual - expected), rtol * std::fabs(expected))
      << "actual " << actual << " expected " << expected;
}

}  // namespace

TEST(Weights, ReferenceDegrees) {
  const auto w = compute_weights({3, -1.0, 0.2});
  const std::vector<double> r0{3, 2, 1, 0};
  const std::vector<double> rinf{0.6, 0.8, 1.0, 1.2};
  ASSERT_EQ(w.r0.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(w.r0[i], r0[i]);
    EXPECT_NEAR(w.rinf[i], rinf[i], 1e-15);
  }
}

TEST(Weights, DegreeZeroIsUnit) {
  const auto w = compute_weights({2, 0.0, 0.0});
  for (double r : w.r0) EXPECT_EQ(r, 1.0);
  for (double r : w.rinf) EXPECT_EQ(r, 1.0);
}

TEST(Weights, RejectsDegreeBounds) {
  EXPECT_THROW(compute_weights({3, 0.0, 0.5}), ConfigError);
  EXPECT_THROW(compute_weights({3, -1.5, 0.0}), ConfigError);
  EXPECT_THROW(compute_weights({3, 0.1, 0.0}), ConfigError);
  EXPECT_THROW(compute_weights({0, 0.0, 0.0}), ConfigError);
  try {
    compute_weights({3, 0.0, 0.5});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dinf"), std::string::npos) << e.what();
  }
}

TEST(InternalGains, Validation) {
  EXPECT_THROW(validate(InternalGains::uniform(3, 1.0, 0.0), 3), ConfigError);
  EXPECT_THROW(validate(InternalGains::uniform(2, 1.0, 1.0), 3), ConfigError);
  EXPECT_THROW(InternalGains::from_mu(3, 1.0), ConfigError);
  const auto g = InternalGains::from_mu(2, 0.25);
  EXPECT_EQ(g.kappa[1], 0.25);
  EXPECT_EQ(g.theta[1], 0.75);
}

TEST(Varphi, SpecValues) {
  ReferenceSetup p;
  EXPECT_DOUBLE_EQ(varphi_eval(0, 8.0, p.w, p.g), 20.0);
  EXPECT_EQ(varphi_eval(0, 0.0, p.w, p.g), 0.0);
  const double expected = static_cast<double>(oracle::varphi(p.o, 1, 4));
  expect_rel(varphi_eval(1, 4.0, p.w, p.g), expected, 1e-14);
  expect_rel(expected, 2.0 + 4.0 * std::sqrt(2.0), 1e-14);
}

TEST(Varphi, DiscontinuousStageUsesZeroSign) {
  ReferenceSetup p;
  EXPECT_EQ(varphi_eval(2, 0.0, p.w, p.g), 0.0);
  EXPECT_DOUBLE_EQ(varphi_eval(2, 1e-300, p.w, p.g), 1.0 + std::pow(1e-300, 1.2));
  EXPECT_DOUBLE_EQ(varphi_eval(2, -1e-12, p.w, p.g), -1.0 - std::pow(1e-12, 1.2));
  EXPECT_EQ(discontinuous_gain(p.w, p.g), 1.0);
}

TEST(Varphi, DiscontinuousGainCountsBothSignTerms) {
  const auto w = compute_weights({3, -1.0, -1.0});
  const auto g = InternalGains::from_mu(3, 0.3);
  EXPECT_DOUBLE_EQ(discontinuous_gain(w, g), 1.0);
  const auto wc = compute_weights({3, -0.5, 0.2});
  EXPECT_EQ(discontinuous_gain(wc, g), 0.0);
}

TEST(Varphi, OddAndMonotoneAcrossDecades) {
  ReferenceSetup p;
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20000; ++trial) {
    const int i = static_cast<int>(rng() % 3);
    const double a = oracle::signed_log_uniform(rng, -6, 6);
    double b = oracle::signed_log_uniform(rng, -6, 6);
    if (a == b) continue;
    EXPECT_EQ(varphi_eval(i, -a, p.w, p.g), -varphi_eval(i, a, p.w, p.g));
    const double lo = std::min(a, b), hi = std::max(a, b);
    EXPECT_LT(varphi_eval(i, lo, p.w, p.g), varphi_eval(i, hi, p.w, p.g)) << i << " " << lo << " " << hi;
  }
}

TEST(Varphi, MatchesHighPrecisionOracle) {
  oracle::Config o{4, -0.6, 0.15, {0.7, 1.3, 2.0, 0.4}, {1.1, 0.2, 0.9, 3.0}};
  const auto w = compute_weights({4, -0.6, 0.15});
  const InternalGains g{o.kappa, o.theta};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const int i = static_cast<int>(rng() % 4);
    const double s = oracle::signed_log_uniform(rng, -6, 6);
    expect_rel(varphi_eval(i, s, w, g), static_cast<double>(oracle::varphi(o, i, s)), 1e-13);
  }
}

TEST(Phi, SpecValues) {
  ReferenceSetup p;
  EXPECT_DOUBLE_EQ(phi_eval(0, 8.0, p.w, p.g), 20.0);
  const double expected = static_cast<double>(oracle::phi(p.o, 1, 1));
  expect_rel(phi_eval(1, 1.0, p.w, p.g), expected, 1e-14);
  expect_rel(expected, std::sqrt(2.0) + std::pow(2.0, 1.25), 1e-14);
  EXPECT_EQ(phi_eval(2, 0.0, p.w, p.g), 0.0);
}

TEST(Phi, AllMatchesComposition) {
  ReferenceSetup p;
  std::mt19937_64 rng(3);
  std::vector<double> out(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const double z = oracle::signed_log_uniform(rng, -4, 4);
    phi_all(z, p.w, p.g, out);
    for (int i = 0; i < 3; ++i) expect_rel(out[i], static_cast<double>(oracle::phi(p.o, i, z)), 1e-12);
  }
}

TEST(Phi, BoundaryLayerSaturatesSignStage) {
  ReferenceSetup p;
  std::vector<double> out(3), exact(3);
  const double z = 1e-15;
  phi_all(z, p.w, p.g, exact);
  phi_all(z, p.w, p.g, out, 1e-3);
  EXPECT_EQ(out[0], exact[0]);
  EXPECT_EQ(out[1], exact[1]);
  const double s = exact[1];
  EXPECT_NEAR(out[2], s / 1e-3 + std::pow(s, 1.2), 1e-15);
  phi_all(10.0, p.w, p.g, out, 1e-3);
  phi_all(10.0, p.w, p.g, exact);
  EXPECT_EQ(out[2], exact[2]);
}

TEST(Inverse, SpecValues) {
  ReferenceSetup p;
  expect_rel(varphi_inverse(0, 20.0, p.w, p.g), 8.0, 1e-12);
  EXPECT_EQ(varphi_inverse(0, 0.0, p.w, p.g), 0.0);
  expect_rel(varphi_inverse(0, 2.0, p.w, p.g), 1.0, 1e-12);
}

TEST(Inverse, MatchesBisectionOracle) {
  ReferenceSetup p;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int i = static_cast<int>(rng() % 2);
    const double y = oracle::signed_log_uniform(rng, -9, 9);
    expect_rel(varphi_inverse(i, y, p.w, p.g), static_cast<double>(oracle::inverse(p.o, i, y)), 1e-11);
  }
}

TEST(Inverse, RoundTripOnTenThousandPoints) {
  oracle::Config o{4, -1.0, 0.3, {0.5, 2.0, 1.0, 1.0}, {3.0, 0.1, 1.0, 1.0}};
  const auto w = compute_weights({4, -1.0, 0.3});
  const InternalGains g{o.kappa, o.theta};
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int i = static_cast<int>(rng() % 3);
    const double y = oracle::signed_log_uniform(rng, -9, 9);
    const double back = varphi_eval(i, varphi_inverse(i, y, w, g), w, g);
    worst = std::max(worst, std::fabs(back - y) / std::fabs(y));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(Inverse, OddInY) {
  ReferenceSetup p;
  for (double y : {1e-7, 0.3, 5.0, 1e6}) {
    EXPECT_EQ(varphi_inverse(1, -y, p.w, p.g), -varphi_inverse(1, y, p.w, p.g));
  }
}

TEST(HomogApprox, UnitGainsGiveUnitCoefficients) {
  ReferenceSetup p;
  const auto h = homog_approx(p.degrees, p.w, p.g);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(h.K0[i], 1.0);
    EXPECT_DOUBLE_EQ(h.Kinf[i], 1.0);
    EXPECT_DOUBLE_EQ(h.exponents0[i], p.w.r0[i + 1] / p.w.r0[0]);
  }
}

TEST(HomogApprox, ProductFormula) {
  const DegreeConfig d{2, -0.5, 0.2};
  const auto w = compute_weights(d);
  const InternalGains g{{2.0, 3.0}, {0.5, 4.0}};
  const auto h = homog_approx(d, w, g);
  // K for the second stage: kappa_2 * kappa_1^(r0[2]/r0[1]).
  EXPECT_DOUBLE_EQ(h.K0[1], 3.0 * std::pow(2.0, w.r0[2] / w.r0[1]));
  EXPECT_DOUBLE_EQ(h.Kinf[1], 4.0 * std::pow(0.5, w.rinf[2] / w.rinf[1]));
}

TEST(HomogApprox, BiLimitSandwich) {
  const DegreeConfig d{3, -1.0, 0.2};
  const auto w = compute_weights(d);
  for (const InternalGains& g : {InternalGains::uniform(3, 1.0, 1.0),
                                 InternalGains{{0.8, 1.2, 1.0}, {1.0, 0.9, 1.1}}}) {
    const auto h = homog_approx(d, w, g);
    for (double z : {-2.0, 0.3, 1.0, 5.0}) {
      for (int i = 0; i < 2; ++i) {
        const double s0 = std::pow(1e-6, w.r0[0]) * z;
        EXPECT_NEAR(phi_eval(i, s0, w, g) / h.phi0(i, s0), 1.0, 0.01) << i << " " << z;
      }
      // At lambda = 1e6 the infinity limit is within 1% only for |z| >= 1.
      for (int i = 0; i < 3 && std::fabs(z) >= 1.0; ++i) {
        const double sinf = std::pow(1e6, w.rinf[0]) * z;
        EXPECT_NEAR(phi_eval(i, sinf, w, g) / h.phiInf(i, sinf), 1.0, 0.01) << i << " " << z;
      }
    }
  }
}

TEST(HomogApprox, EqualDegreesAreExactlyHomogeneous) {
  const DegreeConfig d{3, -0.3, -0.3};
  const auto w = compute_weights(d);
  const InternalGains g{{0.7, 1.5, 2.0}, {1.2, 0.3, 0.8}};
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    const double z = oracle::signed_log_uniform(rng, -3, 3);
    const double lambda = std::pow(10.0, std::uniform_real_distribution<double>(-3, 3)(rng));
    for (int i = 0; i < 3; ++i) {
      expect_rel(phi_eval(i, std::pow(lambda, w.r0[0]) * z, w, g),
                 std::pow(lambda, w.r0[i + 1]) * phi_eval(i, z, w, g), 1e-12);
    }
  }
}
