#pragma once

// Globally adaptive Gauss-Kronrod (7/15-point) quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "armorsim/error.hpp"

namespace armorsim::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  int evaluations = 0;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <class F>
Interval gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double pair = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Integrates `f` over [a, b]. Endpoints are never evaluated, so integrable
/// endpoint singularities are admissible.
template <class F>
Result integrate(F f, double a, double b, const Options& opt = {}) {
  Result res;
  if (a == b) return res;
  std::priority_queue<detail::Interval> heap;
  auto first = detail::gk15(f, a, b);
  res.evaluations = 15;
  double total = first.value, err = first.error;
  heap.push(first);
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (static_cast<int>(heap.size()) >= opt.max_intervals)
      throw ConvergenceError("quadrature: interval budget exhausted (error estimate " + std::to_string(err) + ")");
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    res.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval cannot be split further
  }
  // Re-sum to drop accumulated cancellation in the running totals.
  total = 0.0;
  err = 0.0;
  res.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  return res;
}

}  // namespace armorsim::quad
