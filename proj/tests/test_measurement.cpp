#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qfm/errors.hpp"
#include "qfm/measurement.hpp"

using qfm::CountConvention;
using qfm::MeasurementConfig;

namespace {
MeasurementConfig cfg(double k, CountConvention c = CountConvention::kLastAbove) {
  return {k, c, false};
}
}  // namespace

TEST(QFromCount, ReferenceValues) {
  EXPECT_NEAR(qfm::q_from_count(171, 6), 299.8, 0.05);
  EXPECT_NEAR(qfm::q_from_count(1, std::numbers::e), std::sqrt(0.25 + std::numbers::pi * std::numbers::pi), 1e-12);
  const double approx = std::numbers::pi * 150 / std::log(6.0);
  EXPECT_NEAR(qfm::q_from_count(150, 6), approx, approx * 1e-4);
}

TEST(QFromCount, AgreesWithImplicitForm) {
  for (std::int64_t n : {1, 2, 5, 17, 171, 1000, 54321}) {
    for (double k : {1.5, 2.0, 4.81, 6.0, 20.0}) {
      const double q = qfm::q_from_count(n, k);
      EXPECT_NEAR(q, oracle::implicit_q_from_count(n, k), q * 1e-12) << n << " " << k;
    }
  }
}

TEST(QFromCount, StrictlyIncreasingInN) {
  double prev = 0;
  for (std::int64_t n = 1; n <= 100000; ++n) {
    const double q = qfm::q_from_count(n, 6);
    ASSERT_GT(q, prev) << n;
    prev = q;
  }
}

TEST(QFromCount, RejectsBadInputs) {
  EXPECT_THROW(qfm::q_from_count(0, 6), qfm::ConfigError);
  EXPECT_THROW(qfm::q_from_count(-3, 6), qfm::ConfigError);
  EXPECT_THROW(qfm::q_from_count(10, 1.0), qfm::ConfigError);
  EXPECT_THROW(qfm::q_from_count(10, 0.5), qfm::ConfigError);
  EXPECT_THROW(qfm::q_from_count_shortcut(0), qfm::ConfigError);
}

TEST(Shortcut, DoublesTheCount) {
  EXPECT_EQ(qfm::q_from_count_shortcut(150), 300.0);
  EXPECT_EQ(qfm::q_from_count_shortcut(1), 2.0);
  const auto r = qfm::ideal_measurement({50e3, 300, 1}, {4.81, CountConvention::kLastAbove, true});
  EXPECT_EQ(r.q_measured, 2.0 * r.n);
  EXPECT_LT(std::abs(r.q_measured - qfm::q_from_count(r.n, 4.81)) / qfm::q_from_count(r.n, 4.81), 2e-3);
}

TEST(Shortcut, WithinTwoPerMilleFromTwentyFiveCounts) {
  for (std::int64_t n = 25; n <= 200000; ++n) {
    const double q = qfm::q_from_count(n, 4.81);
    ASSERT_LT(std::abs(2.0 * n - q) / q, 2e-3) << n;
  }
}

TEST(Count, ReferenceCase) {
  const qfm::ResonatorParams p{50e3, 300, 1};
  EXPECT_EQ(qfm::count_pseudo_periods(p, cfg(6, CountConvention::kFirstAtOrBelow)), 172);
  EXPECT_EQ(qfm::count_pseudo_periods(p, cfg(6)), 171);
  EXPECT_EQ(qfm::count_pseudo_periods(p, cfg(1 + 1e-6, CountConvention::kFirstAtOrBelow)), 1);
}

TEST(Count, MatchesBruteForceScan) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uq(0.6, 5000), uk(1.05, 50);
  for (int i = 0; i < 1000; ++i) {
    const double q = uq(rng), k = uk(rng);
    const std::int64_t first = oracle::brute_force_first_below(q, k);
    const qfm::ResonatorParams p{1e4, q, 1};
    ASSERT_EQ(qfm::count_pseudo_periods(p, cfg(k, CountConvention::kFirstAtOrBelow)), first)
        << "q=" << q << " k=" << k;
    ASSERT_EQ(qfm::count_pseudo_periods(p, cfg(k)), first - 1);
  }
}

TEST(Count, NonDecreasingInKAndQ) {
  std::int64_t prev = 0;
  for (double k = 1.1; k < 40; k += 0.05) {
    const auto n = qfm::count_pseudo_periods({1, 100, 1}, cfg(k, CountConvention::kFirstAtOrBelow));
    EXPECT_GE(n, prev);
    prev = n;
  }
  prev = 0;
  for (double q = 1; q < 2000; q += 0.7) {
    const auto n = qfm::count_pseudo_periods({1, q, 1}, cfg(6, CountConvention::kFirstAtOrBelow));
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Count, IndependentOfFrequencyAndAmplitude) {
  for (double f0 : {100.0, 5e4, 4e6}) {
    for (double v0 : {1e-3, 1.0, 12.0}) {
      EXPECT_EQ(qfm::count_pseudo_periods({f0, 300, v0}, cfg(6)), 171);
    }
  }
}

TEST(IdealMeasurement, ReferenceRecord) {
  const auto r = qfm::ideal_measurement({50e3, 300, 1}, cfg(6));
  EXPECT_EQ(r.n, 171);
  EXPECT_NEAR(r.q_measured, 299.8243, 1e-4);
  ASSERT_TRUE(r.relative_error.has_value());
  EXPECT_NEAR(*r.relative_error, -5.86e-4, 1e-6);
  ASSERT_TRUE(r.t_measure.has_value());
  EXPECT_NEAR(*r.t_measure, 171 * 2e-5, 1e-8);
  EXPECT_DOUBLE_EQ(r.threshold_used, 1.0 / 6.0);
}

TEST(IdealMeasurement, ZeroCountIsRejected) {
  // Q so low that the first maximum is already below V0/k.
  EXPECT_THROW(qfm::ideal_measurement({1e3, 0.6, 1}, cfg(1.5)), qfm::ConfigError);
}

TEST(TheoreticalError, ConventionsBracketTheTruth) {
  EXPECT_NEAR(qfm::theoretical_error(300, cfg(6)), -6.5e-4, 1e-4);
  EXPECT_NEAR(qfm::theoretical_error(300, cfg(6, CountConvention::kFirstAtOrBelow)), 5.2e-3, 2e-4);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uq(2, 3000), uk(1.2, 30);
  for (int i = 0; i < 2000; ++i) {
    const double q = uq(rng), k = uk(rng);
    const double last = qfm::theoretical_error(q, cfg(k));
    const double first = qfm::theoretical_error(q, cfg(k, CountConvention::kFirstAtOrBelow));
    ASSERT_LE(last, 1e-12);
    ASSERT_GE(first, -1e-12);
  }
}

TEST(TheoreticalError, BoundedByOneCountQuantum) {
  for (double k : {2.0, 4.0, 6.0, 8.0, 16.0}) {
    for (double q = 20; q <= 3000; q += 0.37) {
      const qfm::ResonatorParams p{1, q, 1};
      const auto n = qfm::count_pseudo_periods(p, cfg(k));
      const double quantum = qfm::q_from_count(n + 1, k) - qfm::q_from_count(n, k);
      ASSERT_LE(std::abs(qfm::theoretical_error(q, cfg(k))) * q, quantum * (1 + 1e-12))
          << "q=" << q << " k=" << k;
    }
  }
}

TEST(TheoreticalError, BelowOnePercentOnceCountReachesOneHundred) {
  for (double k : {6.0, 8.0, 16.0}) {
    for (double q = 100; q <= 1000; q += 0.5) {
      const auto n = qfm::count_pseudo_periods({1, q, 1}, cfg(k));
      if (n >= 100) {
        EXPECT_LT(std::abs(qfm::theoretical_error(q, cfg(k))), 0.01);
      }
    }
  }
}

TEST(TheoreticalError, ShrinksWithLargerK) {
  // Envelope maximum of |error| over a Q window falls as k grows.
  auto worst = [](double k) {
    double w = 0;
    for (double q = 100; q <= 1000; q += 0.25) w = std::max(w, std::abs(qfm::theoretical_error(q, cfg(k))));
    return w;
  };
  EXPECT_GT(worst(2), worst(6));
  EXPECT_GT(worst(6), worst(16));
}

TEST(Sweep, RowOrderAndSawtooth) {
  const auto t = qfm::theoretical_error_sweep({6, 8}, {100, 200, 0.5}, CountConvention::kLastAbove);
  ASSERT_EQ(t.rows.size(), 2u * 201u);
  EXPECT_EQ(t.rows.front().k, 6);
  EXPECT_EQ(t.rows.back().k, 8);
  // Within one k, the error jumps up exactly where n increments and otherwise decreases.
  for (std::size_t i = 1; i < 201; ++i) {
    const auto& a = t.rows[i - 1];
    const auto& b = t.rows[i];
    if (b.n == a.n) {
      EXPECT_LT(b.rel_error, a.rel_error);
    } else {
      EXPECT_EQ(b.n, a.n + 1);
      EXPECT_GT(b.rel_error, a.rel_error);
    }
  }
}

TEST(Sweep, FailedRowsAreKept) {
  const auto t = qfm::theoretical_error_sweep({1.5}, {0.6, 10, 0.2}, CountConvention::kLastAbove);
  bool any_failed = false, any_ok = false;
  for (const auto& r : t.rows) (r.failed() ? any_failed : any_ok) = true;
  EXPECT_TRUE(any_failed);
  EXPECT_TRUE(any_ok);
}

TEST(Range, InclusiveValues) {
  EXPECT_EQ((qfm::Range{10, 1000, 1}.values().size()), 991u);
  EXPECT_EQ((qfm::Range{0, 1, 0.1}.values().size()), 11u);
  EXPECT_EQ((qfm::Range{5, 5, 1}.values()), std::vector<double>{5});
}

TEST(Convention, ParseAndPrint) {
  EXPECT_EQ(qfm::parse_convention("last_above"), CountConvention::kLastAbove);
  EXPECT_EQ(qfm::parse_convention("first"), CountConvention::kFirstAtOrBelow);
  EXPECT_EQ(qfm::to_string(CountConvention::kFirstAtOrBelow), "first_at_or_below");
  EXPECT_THROW(qfm::parse_convention("middle"), qfm::ConfigError);
}
