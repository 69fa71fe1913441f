#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qfm/errors.hpp"
#include "qfm/waveform_io.hpp"

using qfm::CountConvention;
using qfm::ResonatorParams;

namespace {

qfm::Waveform round_trip(const qfm::Waveform& w) {
  std::stringstream s;
  qfm::write_waveform_csv(s, w);
  return qfm::load_waveform(s);
}

qfm::Waveform load_text(const std::string& text) {
  std::istringstream in(text);
  return qfm::load_waveform(in);
}

// Record long enough for the counting threshold and a few extra cycles.
qfm::Waveform record_for(const ResonatorParams& p, double k, double spp = 100) {
  const double cycles = std::log(k) / qfm::log_decrement(p) + 6;
  return qfm::synth_waveform(p, spp * p.f0, cycles * qfm::derive_dynamics(p).pseudo_period);
}

}  // namespace

TEST(WaveformCsv, RoundTripIsBitExact) {
  const auto w = qfm::synth_waveform({50e3, 300, 1}, 5e6, 1e-3, 1e-3, 4);
  const auto back = round_trip(w);
  EXPECT_EQ(back.samples, w.samples);
  EXPECT_NEAR(back.sample_rate, w.sample_rate, w.sample_rate * 1e-9);
  std::stringstream a, b;
  qfm::write_waveform_csv(a, w);
  qfm::write_waveform_csv(b, back);
  EXPECT_EQ(a.str().substr(0, 200), b.str().substr(0, 200));
}

TEST(WaveformCsv, RejectsMalformedInput) {
  EXPECT_THROW(load_text(""), qfm::ParseError);
  EXPECT_THROW(load_text("t,v\n"), qfm::ParseError);
  EXPECT_THROW(load_text("time,value\n0,1\n1,2\n2,3\n"), qfm::ParseError);
  try {
    load_text("t,v\n0,1\n1e-6,0.5\nabc,0.2\n");
    FAIL();
  } catch (const qfm::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(WaveformCsv, RejectsNonUniformTimestamps) {
  std::ostringstream s;
  s << "t,v\n";
  std::vector<int> order(50);
  for (int i = 0; i < 50; ++i) order[i] = i;
  std::swap(order[20], order[21]);
  for (int i : order) s << i * 1e-6 << ',' << 0.5 << '\n';
  EXPECT_THROW(load_text(s.str()), qfm::ParseError);
}

TEST(WaveformCsv, AcceptsCrLfAndBlankLines) {
  const auto w = load_text("t,v\r\n0,1\r\n\r\n1e-6,0.5\r\n2e-6,0.25\r\n");
  EXPECT_EQ(w.samples.size(), 3u);
  EXPECT_NEAR(w.sample_rate, 1e6, 1e-3);
}

TEST(Peaks, LocatedWithinHalfSampleOnCleanRecord) {
  const ResonatorParams p{50e3, 300, 1};
  const auto w = qfm::synth_waveform(p, 5e6, 3e-3);
  const auto peaks = qfm::extract_peaks(w, 0.0);
  EXPECT_FALSE(peaks.quality_warning);
  ASSERT_GT(peaks.peaks.size(), 140u);
  const double dt = 1 / w.sample_rate;
  const auto idx = peaks.indices();
  for (std::size_t i = 0; i < peaks.peaks.size(); ++i) {
    EXPECT_EQ(idx[i], static_cast<std::int64_t>(i));
    EXPECT_NEAR(peaks.peaks[i].time, qfm::peak_time(p, idx[i]), 0.5 * dt);
    EXPECT_NEAR(peaks.peaks[i].value, qfm::peak_value(p, idx[i]), 1e-4);
  }
}

TEST(Peaks, HysteresisDoesNotChangeCleanResult) {
  const auto w = qfm::synth_waveform({50e3, 300, 1}, 5e6, 3e-3);
  const auto a = qfm::extract_peaks(w, 0.0);
  const auto b = qfm::extract_peaks(w, 0.01);
  ASSERT_EQ(a.peaks.size(), b.peaks.size());
  for (std::size_t i = 0; i < a.peaks.size(); ++i) EXPECT_EQ(a.peaks[i].value, b.peaks[i].value);
}

TEST(Peaks, HysteresisRejectsNoise) {
  const ResonatorParams p{50e3, 300, 1};
  const auto clean = qfm::extract_peaks(qfm::synth_waveform(p, 5e6, 2e-3), 0.0);
  const auto noisy = qfm::extract_peaks(qfm::synth_waveform(p, 5e6, 2e-3, 1e-3, 3), 0.01);
  EXPECT_EQ(noisy.peaks.size(), clean.peaks.size());
  EXPECT_FALSE(noisy.quality_warning);
}

TEST(Peaks, NeverMoreThanHalfCycles) {
  const ResonatorParams p{50e3, 30, 1};
  const auto w = qfm::synth_waveform(p, 2.5e6, 1e-3, 5e-3, 8);
  const auto peaks = qfm::extract_peaks(w, 0.02);
  const double half_cycles = 2 * w.duration() / qfm::derive_dynamics(p).pseudo_period;
  EXPECT_LE(static_cast<double>(peaks.peaks.size()), half_cycles);
}

TEST(Peaks, LeadingPartialCycleIsTrimmed) {
  const ResonatorParams p{50e3, 300, 1};
  auto w = qfm::synth_waveform(p, 5e6, 2e-3);
  w.samples.erase(w.samples.begin(), w.samples.begin() + 30);
  w.start_time = 30 / w.sample_rate;
  const auto peaks = qfm::extract_peaks(w, 0.0);
  EXPECT_NEAR(peaks.peaks.front().time, qfm::peak_time(p, 1), 0.5 / w.sample_rate);
  EXPECT_NEAR(peaks.peaks.front().value, qfm::peak_value(p, 1), 1e-4);
}

TEST(Peaks, AmplitudeFloorDropsSmallPeaks) {
  const auto w = qfm::synth_waveform({50e3, 100, 1}, 5e6, 3e-3);
  const auto peaks = qfm::extract_peaks(w, {0.0, 0.3});
  for (const auto& pk : peaks.peaks) EXPECT_GE(pk.value, 0.3);
  EXPECT_THROW(qfm::extract_peaks(w, {0.0, 2.0}), qfm::AnalysisError);
}

TEST(Counting, ReferenceRecord) {
  const ResonatorParams p{50e3, 300, 1};
  const auto peaks = qfm::extract_peaks(qfm::synth_waveform(p, 5e6, 5e-3), 0.0);
  const auto r = qfm::measure_q_counting(peaks, {});
  EXPECT_EQ(r.n, 171);
  EXPECT_NEAR(r.q_measured, 299.8, 0.1);
}

TEST(Counting, TwoPeaksAtExactRatio) {
  qfm::PeakList peaks;
  peaks.peaks = {{0.0, 1.0}, {1e-5, 1.0 / 6.0}};
  EXPECT_EQ(qfm::measure_q_counting(peaks, {6, CountConvention::kFirstAtOrBelow, false}).n, 1);
  EXPECT_THROW(qfm::measure_q_counting(peaks, {6, CountConvention::kLastAbove, false}),
               qfm::AnalysisError);
}

TEST(Counting, TruncatedRecordReportsMissingDuration) {
  const ResonatorParams p{50e3, 300, 1};
  const auto peaks = qfm::extract_peaks(qfm::synth_waveform(p, 5e6, 1e-3), 0.0);
  try {
    qfm::measure_q_counting(peaks, {});
    FAIL();
  } catch (const qfm::InsufficientRecordError& e) {
    EXPECT_GT(e.missing_duration(), 2e-3);
    EXPECT_LT(e.missing_duration(), 3e-3);
  }
}

TEST(Fit, RecoversQ) {
  for (double q : {2.0, 5.0, 50.0, 300.0, 2000.0}) {
    const ResonatorParams p{50e3, q, 1};
    const auto peaks = qfm::extract_peaks(record_for(p, q < 10 ? 1e3 : 6), 0.0);
    EXPECT_NEAR(qfm::fit_q_log_decrement(peaks), q, q * 1e-3) << q;
  }
  EXPECT_NEAR(qfm::q_from_log_decrement(qfm::log_decrement({1, 300, 1})), 300, 1e-9);
}

TEST(Fit, DegenerateInputs) {
  qfm::PeakList flat;
  for (int i = 0; i < 8; ++i) flat.peaks.push_back({i * 1e-5, 0.5});
  EXPECT_THROW(qfm::fit_q_log_decrement(flat), qfm::AnalysisError);
  qfm::PeakList few;
  few.peaks = {{0, 1}, {1e-5, 0.9}, {2e-5, 0.81}};
  EXPECT_THROW(qfm::fit_q_log_decrement(few), qfm::AnalysisError);
}

TEST(RoundTrip, CountingAndFitAgreeWithinOneCount) {
  for (double q : {5.0, 50.0, 300.0, 2000.0}) {
    const ResonatorParams p{50e3, q, 1};
    const auto peaks = qfm::extract_peaks(round_trip(record_for(p, 6)), 0.0);
    const double fitted = qfm::fit_q_log_decrement(peaks);
    EXPECT_NEAR(fitted, q, q * 1e-3);
    const auto counted = qfm::measure_q_counting(peaks, {});
    const double quantum = qfm::q_from_count(counted.n + 1, 6) - qfm::q_from_count(counted.n, 6);
    EXPECT_LE(std::abs(counted.q_measured - fitted), quantum) << q;
  }
}

TEST(ResultRecord, ContainsFields) {
  const auto r = qfm::ideal_measurement({50e3, 300, 1}, {});
  const std::string s = qfm::format_result_record(r);
  EXPECT_NE(s.find("n=171"), std::string::npos);
  EXPECT_NE(s.find("convention=last_above"), std::string::npos);
  EXPECT_NE(s.find("error="), std::string::npos);
}
