#pragma once

// One-dimensional root finding and minimization used by both optimizers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "stratoctl/error.hpp"

namespace stratoctl {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Brent's method on a sign-changing bracket [a, b]. Terminates when the
// bracket is narrower than rel_tol*|x| (plus a tiny absolute floor) or when
// f hits zero exactly.
template <class F>
RootResult brent_root(F&& f, double a, double b, double rel_tol = 1e-12, int max_iter = 500) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    throw ConvergenceError("brent_root: interval [" + std::to_string(a) + ", " +
                           std::to_string(b) + "] does not bracket a root");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = b, fc = fb, d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * rel_tol * std::fabs(b) +
                       std::numeric_limits<double>::min();
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) return {b, fb, iter};
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = d;
      }
    } else {
      d = m;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("brent_root: no convergence after " + std::to_string(max_iter) +
                         " iterations");
}

struct MinResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Golden-section search for the minimum of a unimodal f on [a, b]. Stops when
// the bracket width falls below rel_tol*|x| + abs_tol.
template <class F>
MinResult golden_section_minimize(F&& f, double a, double b, double rel_tol = 1e-8,
                                  double abs_tol = 0.0, int max_iter = 500) {
  if (!(a < b)) throw InvalidArgument("golden_section_minimize: need a < b");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    const double mid = 0.5 * (a + b);
    if (b - a <= rel_tol * std::fabs(mid) + abs_tol) break;
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  if (iter == max_iter) {
    throw ConvergenceError("golden_section_minimize: bracket did not shrink below tolerance");
  }
  return (f1 < f2) ? MinResult{x1, f1, iter} : MinResult{x2, f2, iter};
}

struct Bracket {
  double lo = 0.0;
  double mid = 0.0;
  double hi = 0.0;
};

// Scans f on n+1 evenly spaced points of [a, b] and returns the three points
// around the smallest sample. Throws ConvergenceError when the minimum sits on
// either end of the scan, i.e. there is no interior minimum to refine.
template <class F>
Bracket scan_for_minimum(F&& f, double a, double b, int n = 64) {
  int best = 0;
  double best_f = std::numeric_limits<double>::infinity();
  const double step = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double v = f(a + step * i);
    if (v < best_f) {
      best_f = v;
      best = i;
    }
  }
  if (best == 0 || best == n) {
    throw ConvergenceError("no interior minimum found on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]");
  }
  return Bracket{a + step * (best - 1), a + step * best, a + step * (best + 1)};
}

}  // namespace stratoctl
