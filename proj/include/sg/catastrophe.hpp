// Copyright 2026 The sg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sg {

// ---------------------------------------------------------------------------
// Deterministic cusp: stationary states of dx = (-x^3 + u1 x + u2) dt.
// ---------------------------------------------------------------------------

struct CuspControl {
  double u1 = 0.0;
  double u2 = 0.0;
};

// 4 u1^3 - 27 u2^2: positive inside the three-root region.
inline double cusp_discriminant(const CuspControl& c) {
  return 4.0 * c.u1 * c.u1 * c.u1 - 27.0 * c.u2 * c.u2;
}

enum class CuspRegion { A_three, B_one, boundary };

inline CuspRegion cusp_region(const CuspControl& c, double band = 1e-12) {
  const double d = cusp_discriminant(c);
  if (d > band) return CuspRegion::A_three;
  if (d < -band) return CuspRegion::B_one;
  return CuspRegion::boundary;
}

enum class RootStability { stable, unstable };

struct StationaryPoint {
  double x = 0.0;
  RootStability stability = RootStability::stable;
};

struct StationarySet {
  std::vector<StationaryPoint> roots;  // sorted ascending
  CuspControl control;
  double residual = 0.0;  // max |-x^3 + u1 x + u2| over roots
};

namespace detail {

inline double cusp_rhs(double x, const CuspControl& c) {
  return -x * x * x + c.u1 * x + c.u2;
}

inline double newton_polish_cubic(double x, const CuspControl& c) {
  const double fp = -3.0 * x * x + c.u1;
  if (std::abs(fp) < 1e-12) return x;  // double root; polishing would blow up
  return x - cusp_rhs(x, c) / fp;
}

}  // namespace detail

// All real roots of x^3 - u1 x - u2 = 0 by the trigonometric/Cardano
// closed forms, one Newton polish step each. Stability from the sign of
// G'' = 3x^2 - u1; a repeated boundary root counts as unstable.
inline StationarySet cusp_stationary_points(const CuspControl& c) {
  StationarySet set;
  set.control = c;
  const double p = -c.u1;  // depressed cubic t^3 + p t + q
  const double q = -c.u2;
  const double disc = cusp_discriminant(c);

  std::vector<double> roots;
  if (disc > 0.0) {
    // Three distinct real roots; p < 0 is guaranteed here.
    const double r = 2.0 * std::sqrt(-p / 3.0);
    double arg = (3.0 * q) / (2.0 * p) * std::sqrt(-3.0 / p);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      roots.push_back(r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  } else if (disc < 0.0) {
    double t;
    if (q == 0.0) {
      t = 0.0;  // x^3 + p x with p > 0
    } else {
      const double s = std::sqrt(-disc / 108.0);
      const double w = std::cbrt(-q / 2.0 - std::copysign(s, q));
      t = w - p / (3.0 * w);
    }
    roots.push_back(t);
  } else {
    if (p == 0.0) {
      roots.push_back(0.0);  // triple root
    } else {
      roots.push_back(3.0 * q / p);          // simple root
      roots.push_back(-3.0 * q / (2.0 * p));  // double root
    }
  }

  for (double& x : roots) x = detail::newton_polish_cubic(x, c);
  std::sort(roots.begin(), roots.end());

  for (double x : roots) {
    StationaryPoint pt;
    pt.x = x;
    pt.stability =
        (3.0 * x * x - c.u1 > 0.0) ? RootStability::stable : RootStability::unstable;
    set.roots.push_back(pt);
    set.residual = std::max(set.residual, std::abs(detail::cusp_rhs(x, c)));
  }
  return set;
}

struct CuspSurfaceRow {
  double u1 = 0.0;
  double u2 = 0.0;
  StationarySet set;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

inline std::vector<CuspSurfaceRow> sweep_cusp_surface(double u1_lo, double u1_hi, int n1,
                                                      double u2_lo, double u2_hi, int n2) {
  const auto g1 = linspace(u1_lo, u1_hi, n1);
  const auto g2 = linspace(u2_lo, u2_hi, n2);
  std::vector<CuspSurfaceRow> rows;
  rows.reserve(static_cast<std::size_t>(n1) * n2);
  for (double u1 : g1)
    for (double u2 : g2) {
      CuspSurfaceRow row;
      row.u1 = u1;
      row.u2 = u2;
      row.set = cusp_stationary_points({u1, u2});
      rows.push_back(std::move(row));
    }
  return rows;
}

// ---------------------------------------------------------------------------
// Thom's seven elementary catastrophes: germs and unfoldings as data.
// ---------------------------------------------------------------------------

enum class CatastropheName {
  fold,
  cusp,
  swallowtail,
  butterfly,
  hyperbolic_umbilic,
  elliptic_umbilic,
  parabolic_umbilic,
};

struct UnfoldingSpec {
  CatastropheName name;
  const char* display_name;
  int state_dim;    // 1 or 2
  int codimension;  // number of control parameters
  const char* germ;
  const char* unfolding;
};

inline const UnfoldingSpec& unfolding_spec(CatastropheName name) {
  static const UnfoldingSpec table[] = {
      {CatastropheName::fold, "fold", 1, 1, "x^3", "x^3 + a*x"},
      {CatastropheName::cusp, "cusp", 1, 2, "x^4", "x^4 + a*x^2 + b*x"},
      {CatastropheName::swallowtail, "swallowtail", 1, 3, "x^5", "x^5 + a*x^3 + b*x^2 + c*x"},
      {CatastropheName::butterfly, "butterfly", 1, 4, "x^6",
       "x^6 + a*x^4 + b*x^3 + c*x^2 + d*x"},
      {CatastropheName::hyperbolic_umbilic, "hyperbolic umbilic", 2, 3, "x^3 + y^3",
       "x^3 + y^3 + a*x*y + b*x + c*y"},
      {CatastropheName::elliptic_umbilic, "elliptic umbilic", 2, 3, "x^3 - 3*x*y^2",
       "x^3 - 3*x*y^2 + a*(x^2 + y^2) + b*x + c*y"},
      {CatastropheName::parabolic_umbilic, "parabolic umbilic", 2, 4, "x^2*y + y^4",
       "x^2*y + y^4 + a*x^2 + b*y^2 + c*x + d*y"},
  };
  return table[static_cast<int>(name)];
}

struct UnfoldingValue {
  double value = 0.0;
  int state_dim = 1;
  std::array<double, 2> gradient{0.0, 0.0};  // d/dx, d/dy (second unused in 1D)
};

inline UnfoldingValue evaluate_unfolding(CatastropheName name,
                                         const std::vector<double>& controls,
                                         const std::vector<double>& state) {
  const UnfoldingSpec& spec = unfolding_spec(name);
  if (static_cast<int>(controls.size()) != spec.codimension)
    throw std::invalid_argument(std::string("evaluate_unfolding: ") + spec.display_name +
                                " takes " + std::to_string(spec.codimension) + " controls");
  if (static_cast<int>(state.size()) != spec.state_dim)
    throw std::invalid_argument(std::string("evaluate_unfolding: ") + spec.display_name +
                                " has " + std::to_string(spec.state_dim) + " state variables");

  UnfoldingValue out;
  out.state_dim = spec.state_dim;
  const double x = state[0];
  const double y = spec.state_dim == 2 ? state[1] : 0.0;
  switch (name) {
    case CatastropheName::fold: {
      const double a = controls[0];
      out.value = x * x * x + a * x;
      out.gradient[0] = 3 * x * x + a;
      break;
    }
    case CatastropheName::cusp: {
      const double a = controls[0], b = controls[1];
      out.value = x * x * x * x + a * x * x + b * x;
      out.gradient[0] = 4 * x * x * x + 2 * a * x + b;
      break;
    }
    case CatastropheName::swallowtail: {
      const double a = controls[0], b = controls[1], cc = controls[2];
      out.value = std::pow(x, 5) + a * x * x * x + b * x * x + cc * x;
      out.gradient[0] = 5 * std::pow(x, 4) + 3 * a * x * x + 2 * b * x + cc;
      break;
    }
    case CatastropheName::butterfly: {
      const double a = controls[0], b = controls[1], cc = controls[2], d = controls[3];
      out.value = std::pow(x, 6) + a * std::pow(x, 4) + b * x * x * x + cc * x * x + d * x;
      out.gradient[0] =
          6 * std::pow(x, 5) + 4 * a * x * x * x + 3 * b * x * x + 2 * cc * x + d;
      break;
    }
    case CatastropheName::hyperbolic_umbilic: {
      const double a = controls[0], b = controls[1], cc = controls[2];
      out.value = x * x * x + y * y * y + a * x * y + b * x + cc * y;
      out.gradient[0] = 3 * x * x + a * y + b;
      out.gradient[1] = 3 * y * y + a * x + cc;
      break;
    }
    case CatastropheName::elliptic_umbilic: {
      const double a = controls[0], b = controls[1], cc = controls[2];
      out.value = x * x * x - 3 * x * y * y + a * (x * x + y * y) + b * x + cc * y;
      out.gradient[0] = 3 * x * x - 3 * y * y + 2 * a * x + b;
      out.gradient[1] = -6 * x * y + 2 * a * y + cc;
      break;
    }
    case CatastropheName::parabolic_umbilic: {
      const double a = controls[0], b = controls[1], cc = controls[2], d = controls[3];
      out.value = x * x * y + std::pow(y, 4) + a * x * x + b * y * y + cc * x + d * y;
      out.gradient[0] = 2 * x * y + 2 * a * x + cc;
      out.gradient[1] = x * x + 4 * y * y * y + 2 * b * y + d;
      break;
    }
  }
  return out;
}

inline UnfoldingValue evaluate_germ(CatastropheName name, const std::vector<double>& state) {
  return evaluate_unfolding(name, std::vector<double>(unfolding_spec(name).codimension, 0.0),
                            state);
}

// ---------------------------------------------------------------------------
// Stochastic catastrophe: stationary density of
//   dx = g(x) dt + sigma(x) dW.
// ---------------------------------------------------------------------------

namespace detail {

// Adaptive Simpson quadrature.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace detail

struct StationaryDensity {
  std::function<double(double)> drift;
  std::function<double(double)> sigma;
  double support_lo = 0.0;
  double support_hi = 0.0;
  std::vector<double> x;        // grid points
  std::vector<double> density;  // trapezoid-normalized to integrate to 1
  double log_normalizer = 0.0;  // log Z, where p = exp(Phi) / Z
  std::optional<double> xi;     // 2 / sigma^2 when sigma is constant

  double normalizer() const { return std::exp(log_normalizer); }

  // Trapezoid integral of the stored density (should be 1).
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
      s += 0.5 * (density[i] + density[i + 1]) * (x[i + 1] - x[i]);
    return s;
  }

  std::vector<double> modes() const {
    std::vector<double> out;
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
      if (density[i] > density[i - 1] && density[i] > density[i + 1]) out.push_back(x[i]);
    return out;
  }
};

// Exponent Phi(x) = 2 int_a^x (g(z) - (1/2) d_z sigma(z)^2) / sigma(z)^2 dz,
// accumulated across the grid by adaptive Simpson and normalized in the
// log domain so large exponents cannot overflow.
inline StationaryDensity stationary_density(const std::function<double(double)>& drift,
                                            const std::function<double(double)>& sigma,
                                            double lo, double hi, int grid_size = 1024) {
  if (!(hi > lo)) throw std::invalid_argument("stationary_density: empty support");
  if (grid_size < 3) throw std::invalid_argument("stationary_density: grid too small");

  const auto dsigma2 = [&sigma](double z) {
    const double h = 1e-6 * std::max(1.0, std::abs(z));
    const double sp = sigma(z + h), sm = sigma(z - h);
    return (sp * sp - sm * sm) / (2.0 * h);
  };
  const auto integrand = [&](double z) {
    const double s = sigma(z);
    if (!(s > 0.0))
      throw std::domain_error("stationary_density: sigma must be positive on the support");
    return 2.0 * (drift(z) - 0.5 * dsigma2(z)) / (s * s);
  };

  StationaryDensity d;
  d.drift = drift;
  d.sigma = sigma;
  d.support_lo = lo;
  d.support_hi = hi;
  d.x = linspace(lo, hi, grid_size);
  std::vector<double> phi(grid_size, 0.0);
  for (int i = 1; i < grid_size; ++i)
    phi[i] = phi[i - 1] + detail::adaptive_simpson(integrand, d.x[i - 1], d.x[i]);

  const double mx = *std::max_element(phi.begin(), phi.end());
  d.density.resize(grid_size);
  for (int i = 0; i < grid_size; ++i) d.density[i] = std::exp(phi[i] - mx);
  double z = 0.0;
  for (int i = 0; i + 1 < grid_size; ++i)
    z += 0.5 * (d.density[i] + d.density[i + 1]) * (d.x[i + 1] - d.x[i]);
  for (double& v : d.density) v /= z;
  d.log_normalizer = std::log(z) + mx;
  return d;
}

// Constant-sigma fast path: Phi(x) = xi int_a^x g(z) dz with xi = 2 / sigma^2.
inline StationaryDensity stationary_density_const_sigma(
    const std::function<double(double)>& drift, double sigma_const, double lo, double hi,
    int grid_size = 1024) {
  if (!(sigma_const > 0.0))
    throw std::domain_error("stationary_density: sigma must be positive");
  const double xi = 2.0 / (sigma_const * sigma_const);
  StationaryDensity d = stationary_density(
      drift, [sigma_const](double) { return sigma_const; }, lo, hi, grid_size);
  d.xi = xi;
  return d;
}

// ---------------------------------------------------------------------------
// Euler-Maruyama simulation with a counter-based generator, so a given
// (seed, dt, steps) always reproduces the same trajectory.
// ---------------------------------------------------------------------------

// SplitMix64 finalizer applied to seed + (counter+1) * golden gamma.
inline std::uint64_t counter_rng_u64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform draw in the open interval (0, 1).
inline double counter_rng_uniform(std::uint64_t seed, std::uint64_t counter) {
  return (static_cast<double>(counter_rng_u64(seed, counter) >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on counters (2k, 2k+1).
inline double counter_rng_normal(std::uint64_t seed, std::uint64_t k) {
  const double u1 = counter_rng_uniform(seed, 2 * k);
  const double u2 = counter_rng_uniform(seed, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> density;  // normalized: sum(density) * bin_width = 1

  double bin_width() const { return (hi - lo) / static_cast<double>(density.size()); }
  std::vector<double> centers() const {
    std::vector<double> c(density.size());
    const double w = bin_width();
    for (std::size_t i = 0; i < density.size(); ++i) c[i] = lo + (i + 0.5) * w;
    return c;
  }
};

inline Histogram make_histogram(const std::vector<double>& samples, int bins, double lo,
                                double hi) {
  if (bins < 1) throw std::invalid_argument("make_histogram: need at least one bin");
  if (!(hi > lo)) hi = lo + 1.0;
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.density.assign(bins, 0.0);
  std::size_t used = 0;
  for (double s : samples) {
    if (s < lo || s > hi) continue;
    int b = static_cast<int>((s - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    h.density[b] += 1.0;
    ++used;
  }
  const double w = h.bin_width();
  if (used > 0)
    for (double& v : h.density) v /= static_cast<double>(used) * w;
  return h;
}

struct SdeOptions {
  double guard_lo = -1e6;
  double guard_hi = 1e6;
  int histogram_bins = 64;
  bool keep_trajectory = true;
};

struct SdeResult {
  std::vector<double> trajectory;  // includes x0; empty when not kept
  Histogram histogram;             // over the visited range
  bool escaped = false;
  double escape_time = 0.0;
  long steps_taken = 0;
};

inline SdeResult simulate_sde(const std::function<double(double)>& drift,
                              const std::function<double(double)>& sigma, double x0, double dt,
                              long steps, std::uint64_t seed, const SdeOptions& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("simulate_sde: dt must be positive");
  if (steps < 1) throw std::invalid_argument("simulate_sde: need at least one step");

  SdeResult out;
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> visited;
  visited.reserve(static_cast<std::size_t>(steps) + 1);
  visited.push_back(x0);

  double x = x0;
  for (long k = 0; k < steps; ++k) {
    const double z = counter_rng_normal(seed, static_cast<std::uint64_t>(k));
    x += drift(x) * dt + sigma(x) * sqrt_dt * z;
    out.steps_taken = k + 1;
    if (x < opt.guard_lo || x > opt.guard_hi || !std::isfinite(x)) {
      out.escaped = true;
      out.escape_time = static_cast<double>(k + 1) * dt;
      break;
    }
    visited.push_back(x);
  }

  const auto [mn, mx] = std::minmax_element(visited.begin(), visited.end());
  out.histogram = make_histogram(visited, opt.histogram_bins, *mn, *mx);
  if (opt.keep_trajectory) out.trajectory = std::move(visited);
  return out;
}

}  // namespace sg
