#pragma once

// Composite trapezoid quadrature with global node doubling.
//
// The integrands of interest are Gaussian-windowed and smooth, so the
// equally spaced rule converges geometrically once the oscillation is
// resolved; successive levels give the error estimate, and each doubling
// only evaluates the new midpoints.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <type_traits>
#include <vector>

#include "dispersim/error.hpp"

namespace dispersim {

struct QuadratureConfig {
  double half_width_k = 8.0;  // truncation, in RMS widths
  int base_nodes = 257;
  double rel_tol = 1e-9;
  int max_doublings = 12;

  void validate() const {
    if (!(half_width_k >= 4.0))
      throw ParameterError("quadrature: half_width_k must be >= 4");
    if (base_nodes < 33 || base_nodes % 2 == 0)
      throw ParameterError("quadrature: base_nodes must be odd and >= 33");
    if (!(rel_tol > 0.0 && rel_tol < 1e-3))
      throw ParameterError("quadrature: rel_tol must lie in (0, 1e-3)");
    if (max_doublings < 1)
      throw ParameterError("quadrature: max_doublings must be >= 1");
  }
};

// Integrals that cancel to far below the integrand's own magnitude are judged
// against this fraction of the integral of |f| instead of |I| alone.
inline constexpr double kCancellationFloor = 1e-4;

template <class V>
struct QuadratureResult {
  V value{};
  double est_rel_error = std::numeric_limits<double>::infinity();
  // Estimate from the doubling before the last one (inf if there was none).
  double prev_rel_error = std::numeric_limits<double>::infinity();
  std::int64_t nodes_used = 0;
  bool converged = false;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
template <class T, std::size_t N>
double magnitude(const std::array<T, N>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, magnitude(e));
  return m;
}

namespace detail {

template <class T>
void axpy_into(T& acc, double w, const T& v) {
  acc += w * v;
}
template <class T, std::size_t N>
void axpy_into(std::array<T, N>& acc, double w, const std::array<T, N>& v) {
  for (std::size_t i = 0; i < N; ++i) acc[i] += w * v[i];
}

template <class T>
T scaled(double s, T v) {
  if constexpr (std::is_arithmetic_v<T> ||
                std::is_same_v<T, std::complex<double>>) {
    return s * v;
  } else {
    for (auto& e : v) e = s * e;
    return v;
  }
}

template <class T>
T difference(const T& a, const T& b) {
  if constexpr (std::is_arithmetic_v<T> ||
                std::is_same_v<T, std::complex<double>>) {
    return a - b;
  } else {
    T out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return out;
  }
}

template <class T>
bool all_finite(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::isfinite(v);
  } else if constexpr (std::is_same_v<T, std::complex<double>>) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  } else {
    for (const auto& e : v)
      if (!all_finite(e)) return false;
    return true;
  }
}

// Pairwise accumulation of weighted samples keeps the rounding error
// O(log n) and the result independent of anything but the sample order.
template <class V>
struct PairwiseSum {
  std::vector<V> stack;
  std::vector<std::int64_t> counts;
  double l1 = 0.0;

  void add(const V& v) {
    stack.push_back(v);
    counts.push_back(1);
    l1 += magnitude(v);
    while (counts.size() >= 2 && counts[counts.size() - 1] ==
                                     counts[counts.size() - 2]) {
      V top = stack.back();
      stack.pop_back();
      counts.pop_back();
      axpy_into(stack.back(), 1.0, top);
      counts.back() *= 2;
    }
  }

  V total() const {
    V acc{};
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
      axpy_into(acc, 1.0, *it);
    return acc;
  }
};

inline double node(const Interval& d, std::int64_t i, std::int64_t n) {
  if (i == n - 1) return d.hi;
  return d.lo + d.width() * (static_cast<double>(i) /
                             static_cast<double>(n - 1));
}

inline double relative_error(double diff, double value, double l1) {
  const double denom = std::max(value, kCancellationFloor * l1);
  if (denom > 0.0) return diff / denom;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Odd node count resolving `max_phase_range` radians of oscillation with
// eight nodes per pi, never below cfg.base_nodes.
inline std::int64_t min_nodes_for_phase(double max_phase_range,
                                        const QuadratureConfig& cfg) {
  if (!(max_phase_range >= 0.0) || !std::isfinite(max_phase_range))
    throw ParameterError("min_nodes_for_phase: phase range must be >= 0");
  constexpr double kNodesPerPi = 8.0;
  const double want = std::ceil(kNodesPerPi * max_phase_range / std::numbers::pi);
  if (want > static_cast<double>(std::int64_t{1} << 40))
    throw ParameterError("min_nodes_for_phase: phase range too large");
  std::int64_t n = std::max<std::int64_t>(cfg.base_nodes,
                                          static_cast<std::int64_t>(want));
  if (n % 2 == 0) ++n;
  return n;
}

// Composite trapezoid on [domain.lo, domain.hi], doubling until
// |I_2N - I_N| <= rel_tol * max(|I_2N|, floor * int|f|).
template <class F>
auto integrate_1d(F&& f, Interval domain, const QuadratureConfig& cfg,
                  std::int64_t seed_nodes = 0) {
  using V = std::decay_t<decltype(f(0.0))>;
  cfg.validate();
  if (!(domain.hi > domain.lo))
    throw ParameterError("integrate_1d: empty domain");

  QuadratureResult<V> res;
  std::int64_t n = std::max<std::int64_t>(cfg.base_nodes, seed_nodes);
  if (n % 2 == 0) ++n;

  bool finite = true;
  detail::PairwiseSum<V> level;
  for (std::int64_t i = 0; i < n; ++i) {
    V v = f(detail::node(domain, i, n));
    finite = finite && detail::all_finite(v);
    level.add(detail::scaled((i == 0 || i == n - 1) ? 0.5 : 1.0, v));
  }
  double h = domain.width() / static_cast<double>(n - 1);
  V sum = level.total();
  double abs_sum = level.l1;
  V estimate = detail::scaled(h, sum);

  for (int d = 0; d < cfg.max_doublings && finite; ++d) {
    const std::int64_t m = 2 * n - 1;
    detail::PairwiseSum<V> mids;
    for (std::int64_t i = 1; i < m; i += 2) {
      V v = f(detail::node(domain, i, m));
      finite = finite && detail::all_finite(v);
      mids.add(v);
    }
    detail::axpy_into(sum, 1.0, mids.total());
    abs_sum += mids.l1;
    n = m;
    h *= 0.5;
    V refined = detail::scaled(h, sum);
    const double diff = magnitude(detail::difference(refined, estimate));
    res.prev_rel_error = res.est_rel_error;
    res.est_rel_error =
        detail::relative_error(diff, magnitude(refined), h * abs_sum);
    estimate = refined;
    if (res.est_rel_error <= cfg.rel_tol) {
      res.converged = true;
      break;
    }
  }
  if (!finite) {
    res.converged = false;
    res.est_rel_error = std::numeric_limits<double>::infinity();
  }
  res.value = estimate;
  res.nodes_used = n;
  return res;
}

// Tensor-product trapezoid; each round refines axis 1 and then axis 2, and
// convergence requires both refinements to pass the tolerance.
template <class F>
auto integrate_2d(F&& f, Interval d1, Interval d2, const QuadratureConfig& cfg,
                  std::int64_t seed1 = 0, std::int64_t seed2 = 0) {
  using V = std::decay_t<decltype(f(0.0, 0.0))>;
  cfg.validate();
  if (!(d1.hi > d1.lo) || !(d2.hi > d2.lo))
    throw ParameterError("integrate_2d: empty domain");

  auto odd_at_least = [&](std::int64_t s) {
    std::int64_t n = std::max<std::int64_t>(cfg.base_nodes, s);
    return n % 2 == 0 ? n + 1 : n;
  };
  std::int64_t n1 = odd_at_least(seed1);
  std::int64_t n2 = odd_at_least(seed2);
  auto end_weight = [](std::int64_t i, std::int64_t n) {
    return (i == 0 || i == n - 1) ? 0.5 : 1.0;
  };

  bool finite = true;
  // Sum over rows i1 (with weights) of sums over columns i2.
  auto block = [&](std::int64_t n1_, std::int64_t n2_, bool rows_odd_only,
                   bool cols_odd_only) {
    detail::PairwiseSum<V> outer;
    double l1 = 0.0;
    for (std::int64_t i = rows_odd_only ? 1 : 0; i < n1_;
         i += rows_odd_only ? 2 : 1) {
      const double x = detail::node(d1, i, n1_);
      detail::PairwiseSum<V> inner;
      for (std::int64_t j = cols_odd_only ? 1 : 0; j < n2_;
           j += cols_odd_only ? 2 : 1) {
        V v = f(x, detail::node(d2, j, n2_));
        finite = finite && detail::all_finite(v);
        inner.add(detail::scaled(cols_odd_only ? 1.0 : end_weight(j, n2_), v));
      }
      const double w = rows_odd_only ? 1.0 : end_weight(i, n1_);
      outer.add(detail::scaled(w, inner.total()));
      l1 += w * inner.l1;
    }
    return std::pair<V, double>{outer.total(), l1};
  };

  QuadratureResult<V> res;
  auto [sum, abs_sum] = block(n1, n2, false, false);
  double h1 = d1.width() / static_cast<double>(n1 - 1);
  double h2 = d2.width() / static_cast<double>(n2 - 1);
  V estimate = detail::scaled(h1 * h2, sum);

  for (int d = 0; d < cfg.max_doublings && finite; ++d) {
    // Refine axis 1: old rows keep their weights, new rows have weight 1.
    const std::int64_t m1 = 2 * n1 - 1;
    auto [rows, rows_l1] = block(m1, n2, true, false);
    detail::axpy_into(sum, 1.0, rows);
    abs_sum += rows_l1;
    n1 = m1;
    h1 *= 0.5;
    V after1 = detail::scaled(h1 * h2, sum);
    const double e1 = detail::relative_error(
        magnitude(detail::difference(after1, estimate)), magnitude(after1),
        h1 * h2 * abs_sum);

    const std::int64_t m2 = 2 * n2 - 1;
    auto [cols, cols_l1] = block(n1, m2, false, true);
    detail::axpy_into(sum, 1.0, cols);
    abs_sum += cols_l1;
    n2 = m2;
    h2 *= 0.5;
    V after2 = detail::scaled(h1 * h2, sum);
    const double e2 = detail::relative_error(
        magnitude(detail::difference(after2, after1)), magnitude(after2),
        h1 * h2 * abs_sum);

    res.prev_rel_error = res.est_rel_error;
    res.est_rel_error = std::max(e1, e2);
    estimate = after2;
    if (res.est_rel_error <= cfg.rel_tol) {
      res.converged = true;
      break;
    }
  }
  if (!finite) {
    res.converged = false;
    res.est_rel_error = std::numeric_limits<double>::infinity();
  }
  res.value = estimate;
  res.nodes_used = n1 * n2;
  return res;
}

}  // namespace dispersim
