#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace relichoice::numeric {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double m, double fm, double b,
                    double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;  // Richardson correction
  }
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, m, fm, b, fb, whole, abs_tol, 48);
}

/// Integrates over [a, b], splitting at the given interior breakpoints so the
/// integrand is smooth on every sub-interval. Breakpoints need not be sorted
/// or in range.
template <class F>
double integrate_piecewise(F&& f, double a, double b,
                           std::vector<double> breakpoints, double abs_tol) {
  breakpoints.push_back(b);
  std::sort(breakpoints.begin(), breakpoints.end());
  double total = 0.0;
  double lo = a;
  for (double cut : breakpoints) {
    if (cut <= lo || cut > b) continue;
    total += adaptive_simpson(f, lo, cut, abs_tol);
    lo = cut;
  }
  if (lo < b) total += adaptive_simpson(f, lo, b, abs_tol);
  return total;
}

/// Largest t in [lo, hi] (to absolute tolerance tol) where pred holds, given
/// pred(lo) true and pred monotone true-then-false. Returns the true side.
template <class Pred>
double bisect_last_true(Pred&& pred, double lo, double hi, double tol) {
  if (pred(hi)) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // exhausted double resolution
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace relichoice::numeric
