#pragma once

// Reference computations for the tests. Each one reaches its answer by a
// different route from the library (direct formula transcription,
// bisection, golden-section search, linear scans) and must not call into qfm.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>

namespace oracle {

// Damped step response transcribed term by term.
inline double ring_down(double f0, double q, double v0, double t) {
  const double w0 = 2.0 * std::numbers::pi * f0;
  const double arg = w0 * t * std::sqrt(1.0 - 1.0 / (4.0 * q * q));
  return v0 * std::exp(-w0 / (2.0 * q) * t) *
         (std::cos(arg) + std::sin(arg) / std::sqrt(4.0 * q * q - 1.0));
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 300; ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

// Pseudo-period from two consecutive falling zero crossings of ring_down,
// located by a dense scan followed by bisection.
inline double numeric_pseudo_period(double f0, double q) {
  auto v = [&](double t) { return ring_down(f0, q, 1.0, t); };
  const double dt = 1.0 / (f0 * 2000.0);
  double crossings[2];
  int found = 0;
  double prev = v(0.0);
  for (int i = 1; found < 2; ++i) {
    const double t = i * dt;
    const double cur = v(t);
    if (prev >= 0.0 && cur < 0.0) {
      crossings[found++] = bisect(v, t - dt, t);
    }
    prev = cur;
  }
  return crossings[1] - crossings[0];
}

// Peak envelope at the m-th maximum from the rate alpha and the period,
// each computed from first principles.
inline double envelope_at_peak(double q, double v0, std::int64_t m) {
  const double w0 = 1.0;  // ratio is frequency independent
  const double alpha = w0 / (2.0 * q);
  const double period = 2.0 * std::numbers::pi / (w0 * std::sqrt(1.0 - 1.0 / (4.0 * q * q)));
  return v0 * std::exp(-alpha * period * static_cast<double>(m));
}

// Smallest m >= 1 whose maximum is at or below v0/k, by linear scan.
inline std::int64_t brute_force_first_below(double q, double k) {
  std::int64_t m = 1;
  while (envelope_at_peak(q, 1.0, m) > 1.0 / k) ++m;
  return m;
}

// Q from n by the implicit form Q = pi f0 Tm / ln k with Tm = n T'0(Q),
// solved by fixed-point iteration instead of the closed form.
inline double implicit_q_from_count(std::int64_t n, double k) {
  double q = std::numbers::pi * static_cast<double>(n) / std::log(k);
  for (int i = 0; i < 200; ++i) {
    const double f0 = 1.0;
    const double period = 1.0 / (f0 * std::sqrt(1.0 - 1.0 / (4.0 * q * q)));
    q = std::numbers::pi * f0 * static_cast<double>(n) * period / std::log(k);
  }
  return q;
}

}  // namespace oracle
