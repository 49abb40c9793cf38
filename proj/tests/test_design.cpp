#include <gtest/gtest.h>

#include <cmath>

#include "dispersim/cpi.hpp"
#include "dispersim/design.hpp"
#include "dispersim/hom.hpp"

using namespace dispersim;

TEST(PumpBandwidth, Example) {
  const auto r = required_pump_bandwidth(1.0, 10.0, 1.01);
  EXPECT_NEAR(r.sigma_c_approx, std::sqrt(2.0 * 0.0201) / 10.0, 1e-15);
  EXPECT_NEAR(r.sigma_c_approx, 0.020050, 1e-6);
  EXPECT_NEAR(r.sigma_c, std::sqrt(2.0 * 0.0201 / (100.0 - 0.0201)), 1e-15);
  EXPECT_NEAR(r.sigma_c, 0.020052, 1e-6);
  EXPECT_FALSE(r.no_constraint_needed);
  EXPECT_FALSE(r.regime_warning);
}

TEST(PumpBandwidth, UncorrelatedBoundary) {
  const auto r = required_pump_bandwidth(1.0, 1.0, std::sqrt(2.0) * (1.0 + 1e-15));
  EXPECT_TRUE(r.no_constraint_needed);
  EXPECT_TRUE(std::isinf(r.sigma_c));
}

TEST(PumpBandwidth, TightBudgetNeedsPerfectCorrelation) {
  double prev = INFINITY;
  for (double r : {1.1, 1.01, 1e-3 + 1.0, 1e-6 + 1.0, 1e-10 + 1.0}) {
    const double s = required_pump_bandwidth(1.0, 10.0, r).sigma_c;
    EXPECT_LT(s, prev);
    prev = s;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(PumpBandwidth, RegimeWarning) {
  EXPECT_TRUE(required_pump_bandwidth(1.0, 2.0, 1.5).regime_warning);
}

TEST(PumpBandwidth, InvalidInputs) {
  EXPECT_THROW(required_pump_bandwidth(1.0, 10.0, 1.0), ParameterError);
  EXPECT_THROW(required_pump_bandwidth(1.0, 10.0, 0.5), ParameterError);
  EXPECT_THROW(required_pump_bandwidth(1.0, 0.0, 2.0), ParameterError);
  EXPECT_THROW(required_pump_bandwidth(-1.0, 1.0, 2.0), ParameterError);
}

TEST(PumpBandwidth, RoundTrip) {
  for (double sigma : {0.3, 1.0, 4.0})
    for (double e : {2.0, 10.0, -30.0})
      for (double r : {1.0001, 1.01, 1.3}) {
        const double eps = e / (sigma * sigma);
        const auto req = required_pump_bandwidth(sigma, eps, r);
        ASSERT_FALSE(req.no_constraint_needed);
        const auto w = hom_width(BiphotonSpec::correlated(1.0, sigma, req.sigma_c),
                                 SampleSpec{eps});
        EXPECT_NEAR(w.tau_hom * sigma / r, 1.0, 1e-9);
      }
}

TEST(PumpBandwidth, IncreasesWithBudget) {
  double prev = 0.0;
  for (double r = 1.001; r < 5.0; r *= 1.1) {
    const double s = required_pump_bandwidth(1.0, 10.0, r).sigma_c;
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Chirp, Examples) {
  EXPECT_NEAR(required_chirp(1.0, 10.0, 1.01).chirp_a, std::sqrt(1999999.0) / 2.0, 1e-9);
  EXPECT_NEAR(required_chirp(1.0, 10.0, 1.01).chirp_a, 707.107, 1e-3);
  const auto met = required_chirp(1.0, 0.1, 2.0);
  EXPECT_EQ(met.chirp_a, 0.0);
  EXPECT_TRUE(met.met_unchirped);
  EXPECT_NEAR(required_chirp(1.0, 1.0, 1.001).chirp_a, 27.37, 5e-3);
}

TEST(Chirp, RoundTripThroughLargeChirpRule) {
  for (double sigma : {0.5, 1.0, 3.0})
    for (double e : {0.5, 1.0, 10.0})
      for (double r : {1.0001, 1.001, 1.01}) {
        const double eps = e / (sigma * sigma);
        const auto req = required_chirp(sigma, eps, r);
        const auto w = cpi_width(ChirpedPulseSpec{1.0, sigma, req.chirp_a, 1.0},
                                 SampleSpec{eps});
        EXPECT_NEAR(w.tau_cpi_large_chirp * sigma / r, 1.0, 1e-9);
        const auto wx = cpi_width(ChirpedPulseSpec{1.0, sigma, req.chirp_a_exact, 1.0},
                                  SampleSpec{eps});
        EXPECT_NEAR(wx.tau_cpi * sigma / r, 1.0, 1e-9);
      }
}

TEST(Chirp, DecreasesWithBudget) {
  double prev = INFINITY;
  for (double r = 1.0001; r < 1.5; r *= 1.01) {
    const double a = required_chirp(1.0, 3.0, r).chirp_a;
    EXPECT_LT(a, prev);
    prev = a;
  }
}

TEST(Chirp, InvalidInputs) {
  EXPECT_THROW(required_chirp(1.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(required_chirp(1.0, 0.0, 1.5), ParameterError);
}

TEST(EffectiveDispersion, Hom) {
  const auto tiny = effective_dispersion(BiphotonSpec::correlated(1.0, 1.0, 1e-6),
                                         SampleSpec{3.0});
  EXPECT_LT(tiny.ratio, 1e-6);
  const auto perfect = effective_dispersion(BiphotonSpec::correlated(1.0, 1.0, 0.0),
                                            SampleSpec{3.0});
  EXPECT_EQ(perfect.ratio, 0.0);
  EXPECT_EQ(perfect.eps_eff, 0.0);
  const auto s = effective_dispersion(BiphotonSpec::correlated(1.0, 1.0, 0.1),
                                      SampleSpec{3.0});
  EXPECT_NEAR(s.eps_eff, 3.0 * 0.1 / std::sqrt(2.0), 1e-15);
}

TEST(EffectiveDispersion, Cpi) {
  const auto r = effective_dispersion(ChirpedPulseSpec{1.0, 1.0, 500.0, 1.0},
                                      SampleSpec{1.0});
  EXPECT_NEAR(r.ratio, std::sqrt(6.0 / 1000001.0), 1e-15);
  EXPECT_NEAR(r.ratio, 2.449e-3, 1e-6);
}
