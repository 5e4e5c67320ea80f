#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <random>

#include "wrsn/physics.hpp"

using namespace wrsn;
using namespace wrsn::physics;

namespace {

using HighPrecision = boost::multiprecision::cpp_dec_float_50;

// Independent 50-digit evaluation of p0 * alpha / (d + beta)^2.
double reference_received_power(const ChargingParams& p, double d) {
  const HighPrecision denom = HighPrecision(d) + HighPrecision(p.beta_offset);
  const HighPrecision value = HighPrecision(p.p0) * HighPrecision(p.alpha_lumped) / (denom * denom);
  return value.convert_to<double>();
}

double relative_error(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(ChargingEfficiency, HandEvaluatedValues) {
  const ChargingParams p;
  EXPECT_DOUBLE_EQ(charging_efficiency(p, 0.0), 0.04);
  EXPECT_NEAR(charging_efficiency(p, 6.0), 36.0 / 1296.0, 1e-15);
  EXPECT_GT(charging_efficiency(p, 0.0), charging_efficiency(p, 6.0));
  EXPECT_GT(charging_efficiency(p, 6.0), charging_efficiency(p, 100.0));
}

TEST(ChargingEfficiency, NoCutoffBeyondRadius) {
  const ChargingParams p;
  EXPECT_GT(charging_efficiency(p, 50.0), 0.0);
}

TEST(ChargingEfficiency, NegativeDistanceIsDomainError) {
  EXPECT_THROW(charging_efficiency(ChargingParams{}, -0.1), DomainError);
  EXPECT_THROW(received_power(ChargingParams{}, -1e-12), DomainError);
  EXPECT_THROW(received_power(ChargingParams{}, std::nan("")), DomainError);
}

TEST(ReceivedPower, HandEvaluatedValues) {
  const ChargingParams p;
  EXPECT_LT(relative_error(received_power(p, 0.0), 0.12), 1e-12);
  EXPECT_LT(relative_error(received_power(p, 6.0), 3.0 * 36.0 / 1296.0), 1e-12);
  EXPECT_EQ(received_power(p, 6.000001), 0.0);
  EXPECT_EQ(received_power(p, 1e6), 0.0);
}

TEST(ReceivedPower, BoundaryIsInclusive) {
  ChargingParams p;
  p.d_max = 4.25;
  EXPECT_GT(received_power(p, 4.25), 0.0);
  EXPECT_EQ(received_power(p, std::nextafter(4.25, 5.0)), 0.0);
}

TEST(ReceivedPower, MatchesHighPrecisionOracle) {
  std::mt19937_64 gen(1234);
  std::uniform_real_distribution<double> dist(0.0, 6.0);
  std::uniform_real_distribution<double> positive(0.5, 50.0);
  for (int i = 0; i < 2000; ++i) {
    ChargingParams p;
    p.alpha_lumped = positive(gen);
    p.beta_offset = positive(gen);
    p.p0 = positive(gen) / 10.0;
    const double d = dist(gen);
    EXPECT_LT(relative_error(received_power(p, d), reference_received_power(p, d)), 1e-12)
        << "d=" << d;
  }
}

TEST(ReceivedPower, NonIncreasingThenZero) {
  const ChargingParams p;
  double previous = received_power(p, 0.0);
  for (int i = 1; i <= 6000; ++i) {
    const double d = i * 1e-3;
    const double current = received_power(p, d);
    EXPECT_LE(current, previous);
    previous = current;
  }
  for (double d = 6.0001; d < 200.0; d += 0.37) EXPECT_EQ(received_power(p, d), 0.0);
}

TEST(AavMotionPower, HoverIsBladePlusInduced) {
  const AavPowerParams p;
  EXPECT_EQ(aav_motion_power(p, 0.0), p.blade_power + p.induced_power);
  EXPECT_NEAR(aav_motion_power(p, 0.0), 168.49, 1e-12);

  AavPowerParams q;
  q.blade_power = 12.5;
  q.induced_power = 7.25;
  EXPECT_EQ(aav_motion_power(q, 0.0), 19.75);
}

TEST(AavMotionPower, ReferenceValueAtCruise) {
  // 40-digit evaluation of the rotary-wing model with the default parameters.
  EXPECT_NEAR(aav_motion_power(AavPowerParams{}, 5.0), 143.61349030755997, 1e-10);
  EXPECT_NEAR(aav_motion_power(AavPowerParams{}, 30.0), 356.28865091975042, 1e-9);
}

TEST(AavMotionPower, LowerBounds) {
  const AavPowerParams p;
  for (double v = 0.0; v <= 80.0; v += 0.25) {
    const double parasite =
        0.5 * p.drag_coeff * p.air_density * p.rotor_solidity * p.rotor_area * v * v * v;
    const double power = aav_motion_power(p, v);
    EXPECT_GE(power, parasite);
    EXPECT_GE(power, p.blade_power);
  }
}

TEST(AavMotionPower, NegativeSpeedIsDomainError) {
  EXPECT_THROW(aav_motion_power(AavPowerParams{}, -1.0), DomainError);
}

TEST(SvMotionPower, Examples) {
  const SvPowerParams p;
  EXPECT_EQ(sv_motion_power(p, 0.0), 10.0);
  EXPECT_NEAR(sv_motion_power(p, 2.0), 11.28, 1e-12);

  const SvPowerParams quadratic{0.7, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(sv_motion_power(quadratic, 6.0), 4.0 * sv_motion_power(quadratic, 3.0));
  EXPECT_THROW(sv_motion_power(p, -0.5), DomainError);
}

TEST(SvMotionPower, MatchesHorner) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> coeff(0.0, 5.0);
  std::uniform_real_distribution<double> speed(0.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const SvPowerParams p{coeff(gen), coeff(gen), coeff(gen) + 0.1};
    const double v = speed(gen);
    const double horner = (p.k1 * v + p.k2) * v + p.k3;
    EXPECT_LE(relative_error(sv_motion_power(p, v), horner), 1e-15);
  }
}

TEST(Physics, PureFunctions) {
  const ChargingParams c;
  const AavPowerParams a;
  const SvPowerParams s;
  for (double x : {0.0, 1.5, 5.999, 12.0}) {
    EXPECT_EQ(received_power(c, x), received_power(c, x));
    EXPECT_EQ(aav_motion_power(a, x), aav_motion_power(a, x));
    EXPECT_EQ(sv_motion_power(s, x), sv_motion_power(s, x));
  }
}
