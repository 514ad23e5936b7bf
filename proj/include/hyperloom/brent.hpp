#pragma once

#include <cmath>
#include <limits>

namespace hyperloom {

struct BrentResult {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
  /// false if phi produced a non-finite value; argmin/value are then meaningless.
  bool ok = true;
};

/// Brent's derivative-free minimization of phi on [lo, hi]: golden-section
/// steps safeguarded with successive parabolic interpolation. Both endpoints
/// are evaluated last so that boundary minima are returned exactly.
template <class F>
BrentResult brent_minimize(F&& phi, double lo, double hi, double tol = 1e-10, int max_evals = 100) {
  constexpr double golden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
  const double rel = std::sqrt(std::numeric_limits<double>::epsilon());
  BrentResult res;

  auto eval = [&](double x) {
    ++res.evaluations;
    const double v = phi(x);
    if (!std::isfinite(v)) res.ok = false;
    return v;
  };

  double a = lo, b = hi;
  double x = a + golden * (b - a), w = x, v = x;
  double fx = eval(x), fw = fx, fv = fx;
  if (!res.ok) return res;
  double d = 0.0, e = 0.0;

  while (res.evaluations < max_evals - 2) {
    const double m = 0.5 * (a + b);
    const double tol1 = rel * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) break;

    bool golden_step = true;
    if (std::abs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x < m) ? b - x : a - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = eval(u);
    if (!res.ok) return res;

    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }

  res.argmin = x;
  res.value = fx;
  for (double end : {lo, hi}) {
    const double fe = eval(end);
    if (!res.ok) return res;
    if (fe < res.value) {
      res.argmin = end;
      res.value = fe;
    }
  }
  return res;
}

}  // namespace hyperloom
