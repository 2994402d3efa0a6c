#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smirnov/error.hpp"

namespace smirnov::poly {

using cplx = std::complex<double>;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dense polynomial with ascending coefficients. Exact trailing zeros are
// always trimmed, so degree() is well defined; the zero polynomial has
// degree 0 and is_zero() == true.
class ComplexPolynomial {
 public:
  ComplexPolynomial() = default;
  explicit ComplexPolynomial(std::vector<cplx> coefficients) : c_(std::move(coefficients)) { trim_exact(); }
  ComplexPolynomial(std::initializer_list<cplx> coefficients) : c_(coefficients) { trim_exact(); }

  static ComplexPolynomial constant(cplx value) { return ComplexPolynomial({value}); }

  static ComplexPolynomial monomial(int degree, cplx value = 1.0) {
    std::vector<cplx> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = value;
    return ComplexPolynomial(std::move(c));
  }

  static ComplexPolynomial from_roots(std::span<const cplx> roots, cplx leading = 1.0) {
    std::vector<cplx> c{leading};
    for (cplx r : roots) {
      c.push_back(0.0);
      for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
      c[0] = -r * c[0];
    }
    return ComplexPolynomial(std::move(c));
  }

  bool is_zero() const noexcept { return c_.empty(); }
  int degree() const noexcept { return c_.empty() ? 0 : static_cast<int>(c_.size()) - 1; }
  std::span<const cplx> coefficients() const noexcept { return c_; }
  cplx coefficient(int k) const noexcept {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(k)] : cplx(0.0);
  }
  cplx leading() const noexcept { return c_.empty() ? cplx(0.0) : c_.back(); }

  cplx operator()(cplx z) const noexcept {
    cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  // Value and first derivative in one Horner pass.
  std::pair<cplx, cplx> eval_with_derivative(cplx z) const noexcept {
    cplx p = 0.0, dp = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      dp = dp * z + p;
      p = p * z + *it;
    }
    return {p, dp};
  }

  // sum |a_k| r^k, the scale against which Horner rounding is measured.
  double magnitude_bound(double r) const noexcept {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  double norm1() const noexcept {
    double s = 0.0;
    for (cplx a : c_) s += std::abs(a);
    return s;
  }

  double max_abs_coefficient() const noexcept {
    double s = 0.0;
    for (cplx a : c_) s = std::max(s, std::abs(a));
    return s;
  }

  ComplexPolynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return ComplexPolynomial(std::move(d));
  }

  // Drops leading coefficients below rel_tol * max|a_k|.
  ComplexPolynomial trimmed(double rel_tol) const {
    std::vector<cplx> c = c_;
    const double cut = rel_tol * max_abs_coefficient();
    while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
    return ComplexPolynomial(std::move(c));
  }

  ComplexPolynomial conj_coefficients() const {
    std::vector<cplx> c(c_.size());
    for (std::size_t k = 0; k < c_.size(); ++k) c[k] = std::conj(c_[k]);
    return ComplexPolynomial(std::move(c));
  }

  ComplexPolynomial& operator+=(const ComplexPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim_exact();
    return *this;
  }
  ComplexPolynomial& operator-=(const ComplexPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim_exact();
    return *this;
  }
  ComplexPolynomial& operator*=(cplx s) {
    for (cplx& a : c_) a *= s;
    trim_exact();
    return *this;
  }

  friend ComplexPolynomial operator+(ComplexPolynomial a, const ComplexPolynomial& b) { return a += b; }
  friend ComplexPolynomial operator-(ComplexPolynomial a, const ComplexPolynomial& b) { return a -= b; }
  friend ComplexPolynomial operator-(ComplexPolynomial a) { return a *= -1.0; }
  friend ComplexPolynomial operator*(cplx s, ComplexPolynomial a) { return a *= s; }
  friend ComplexPolynomial operator*(ComplexPolynomial a, cplx s) { return a *= s; }
  friend ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return ComplexPolynomial(std::move(c));
  }
  friend bool operator==(const ComplexPolynomial&, const ComplexPolynomial&) = default;

 private:
  void trim_exact() {
    while (!c_.empty() && c_.back() == cplx(0.0)) c_.pop_back();
  }
  std::vector<cplx> c_;
};

inline ComplexPolynomial add(const ComplexPolynomial& a, const ComplexPolynomial& b) { return a + b; }
inline ComplexPolynomial mul(const ComplexPolynomial& a, const ComplexPolynomial& b) { return a * b; }
inline ComplexPolynomial scale(const ComplexPolynomial& a, cplx s) { return s * a; }

inline ComplexPolynomial pow(const ComplexPolynomial& p, int n) {
  ComplexPolynomial r = ComplexPolynomial::constant(1.0);
  for (int k = 0; k < n; ++k) r = r * p;
  return r;
}

struct RationalPair {
  ComplexPolynomial num;
  ComplexPolynomial den;
};

// sum_k p_k q^k r^(n-k): the numerator of p(q/r) after multiplying by r^n.
// n must be at least deg p.
inline ComplexPolynomial homogeneous_compose(const ComplexPolynomial& p, const ComplexPolynomial& q,
                                             const ComplexPolynomial& r, int n) {
  if (n < p.degree()) throw Error(ErrorCode::InvalidArgument, "complex_poly", "homogenizing degree below deg p");
  std::vector<ComplexPolynomial> qpow{ComplexPolynomial::constant(1.0)};
  std::vector<ComplexPolynomial> rpow{ComplexPolynomial::constant(1.0)};
  for (int k = 1; k <= n; ++k) {
    qpow.push_back(qpow.back() * q);
    rpow.push_back(rpow.back() * r);
  }
  ComplexPolynomial out;
  for (int k = 0; k <= p.degree(); ++k) {
    if (p.coefficient(k) == cplx(0.0)) continue;
    out += p.coefficient(k) * (qpow[static_cast<std::size_t>(k)] * rpow[static_cast<std::size_t>(n - k)]);
  }
  return out;
}

// p((a z + b)/(c z + d)) as a rational pair with denominator (c z + d)^n, n = deg p.
inline RationalPair compose_mobius(const ComplexPolynomial& p, cplx a, cplx b, cplx c, cplx d) {
  const ComplexPolynomial q({b, a});
  const ComplexPolynomial r({d, c});
  const int n = p.degree();
  return {homogeneous_compose(p, q, r, n), pow(r, n)};
}

// Synthetic division by (z - root); returns quotient and remainder.
inline std::pair<ComplexPolynomial, cplx> divide_linear(const ComplexPolynomial& p, cplx root) {
  auto c = p.coefficients();
  if (c.size() <= 1) return {ComplexPolynomial{}, p.coefficient(0)};
  std::vector<cplx> q(c.size() - 1);
  cplx acc = c.back();
  for (std::size_t k = c.size() - 1; k > 0; --k) {
    q[k - 1] = acc;
    acc = c[k - 1] + root * acc;
  }
  return {ComplexPolynomial(std::move(q)), acc};
}

// ---------------------------------------------------------------------------
// Root finding

struct Root {
  cplx value;
  int multiplicity = 1;
};

struct RootOptions {
  int max_iterations = 800;
  int max_restarts = 6;
  std::uint64_t seed = 0x5eedULL;
  double boundary_tolerance = 1e-9;
  double residual_tolerance = 1e-10;
};

struct RootReport {
  std::vector<Root> roots;
  double residual = 0.0;                // largest backward error over the roots
  std::vector<cplx> boundary_flags;     // roots within boundary_tolerance of |z| = 1

  int count() const {
    int n = 0;
    for (const Root& r : roots) n += r.multiplicity;
    return n;
  }
  std::vector<cplx> flattened() const {
    std::vector<cplx> out;
    for (const Root& r : roots)
      for (int k = 0; k < r.multiplicity; ++k) out.push_back(r.value);
    return out;
  }
};

namespace detail {

// Horner rounding bound for evaluating p at z.
inline double rounding_floor(const ComplexPolynomial& p, cplx z) {
  return 4.0 * (p.degree() + 1) * kEps * p.magnitude_bound(std::abs(z));
}

inline bool aberth(const ComplexPolynomial& p, std::vector<cplx>& z, int max_iterations) {
  const std::size_t n = z.size();
  std::vector<char> done(n, 0);
  for (int it = 0; it < max_iterations; ++it) {
    bool active = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      auto [pv, dv] = p.eval_with_derivative(z[i]);
      if (std::abs(pv) <= rounding_floor(p, z[i])) {
        done[i] = 1;
        continue;
      }
      active = true;
      cplx sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        cplx diff = z[i] - z[j];
        if (diff == cplx(0.0)) diff = cplx(kEps, kEps) * (1.0 + std::abs(z[i]));
        sum += 1.0 / diff;
      }
      cplx w;
      if (dv == cplx(0.0)) {
        w = cplx(1e-3, 1e-3) * (1.0 + std::abs(z[i]));
      } else {
        const cplx ratio = pv / dv;
        const cplx denom = 1.0 - ratio * sum;
        w = (denom == cplx(0.0)) ? ratio : ratio / denom;
      }
      z[i] -= w;
      if (!std::isfinite(z[i].real()) || !std::isfinite(z[i].imag())) return false;
      if (std::abs(w) <= 2.0 * kEps * std::abs(z[i])) done[i] = 1;
    }
    if (!active) return true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    // Accept slow stragglers whose residual is already tiny relative to scale.
    if (std::abs(p(z[i])) > 1e6 * rounding_floor(p, z[i])) return false;
  }
  return true;
}

inline void newton_polish(const ComplexPolynomial& p, cplx& z) {
  for (int k = 0; k < 3; ++k) {
    auto [pv, dv] = p.eval_with_derivative(z);
    if (dv == cplx(0.0)) return;
    const cplx cand = z - pv / dv;
    if (std::abs(p(cand)) < std::abs(pv)) z = cand;
    else return;
  }
}

// An m-fold root at c makes p, p', ..., p^(m-1) vanish there to working
// accuracy.
inline bool plausible_multiple_root(const ComplexPolynomial& p, cplx c, int m) {
  ComplexPolynomial q = p;
  for (int k = 0; k < m; ++k) {
    const double b = q.magnitude_bound(std::abs(c));
    if (b > 0.0 && std::abs(q(c)) > 1e-6 * b) return false;
    q = q.derivative();
  }
  return true;
}

// Groups approximations whose inclusion disks overlap. The disk around z_i
// has radius n * max(|p(z_i)|, rounding) / |a_n prod_{j != i}(z_i - z_j)|;
// a connected union of k disks holds exactly k roots. Near-collinear
// approximations of a multiple root inflate these radii, so a merged group
// that is not a plausible multiple root is regrouped with smaller disks.
inline std::vector<Root> cluster(const ComplexPolynomial& p, const std::vector<cplx>& z) {
  const std::size_t n = z.size();
  std::vector<double> rad(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx prod = p.leading();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) prod *= (z[i] - z[j]);
    const double num = static_cast<double>(n) * std::max(std::abs(p(z[i])), rounding_floor(p, z[i]));
    rad[i] = (std::abs(prod) == 0.0) ? std::numeric_limits<double>::infinity() : num / std::abs(prod);
  }
  std::vector<Root> out;
  auto group = [&](auto&& self, const std::vector<std::size_t>& idx, double scale) -> void {
    std::vector<std::size_t> parent(idx.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b)
        if (std::abs(z[idx[a]] - z[idx[b]]) <= scale * (rad[idx[a]] + rad[idx[b]])) parent[find(a)] = find(b);
    std::vector<char> used(idx.size(), 0);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (used[a]) continue;
      std::vector<std::size_t> members;
      for (std::size_t b = a; b < idx.size(); ++b)
        if (!used[b] && find(b) == find(a)) members.push_back(idx[b]);
      for (std::size_t b = a; b < idx.size(); ++b)
        if (find(b) == find(a)) used[b] = 1;
      if (members.size() == 1) {
        out.push_back({z[members[0]], 1});
        continue;
      }
      const int m = static_cast<int>(members.size());
      cplx center = 0.0;
      double spread = 0.0;
      for (std::size_t j : members) center += z[j];
      center /= static_cast<double>(m);
      for (std::size_t j : members) spread = std::max(spread, std::abs(z[j] - center) + scale * rad[j]);
      // The (m-1)-th derivative has a simple root at an m-fold root.
      ComplexPolynomial q = p;
      for (int k = 0; k < m - 1; ++k) q = q.derivative();
      cplx c = center;
      for (int k = 0; k < 30; ++k) {
        auto [qv, dq] = q.eval_with_derivative(c);
        if (dq == cplx(0.0)) break;
        const cplx step = qv / dq;
        c -= step;
        if (std::abs(step) <= 2.0 * kEps * std::max(1.0, std::abs(c))) break;
      }
      if (std::isfinite(c.real()) && std::isfinite(c.imag()) && std::abs(c - center) <= spread &&
          plausible_multiple_root(p, c, m)) {
        out.push_back({c, m});
      } else if (scale > 1e-8) {
        self(self, members, scale * 0.25);
      } else {
        for (std::size_t j : members) out.push_back({z[j], 1});
      }
    }
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  group(group, all, 1.0);
  return out;
}

}  // namespace detail

inline RootReport find_roots(const ComplexPolynomial& p_in, const RootOptions& options = {}) {
  if (p_in.is_zero()) throw Error(ErrorCode::InvalidArgument, "complex_poly", "roots of the zero polynomial");
  RootReport report;
  auto coeffs = p_in.coefficients();
  std::size_t zeros_at_origin = 0;
  while (zeros_at_origin < coeffs.size() && coeffs[zeros_at_origin] == cplx(0.0)) ++zeros_at_origin;
  if (zeros_at_origin > 0) report.roots.push_back({0.0, static_cast<int>(zeros_at_origin)});
  const ComplexPolynomial p(std::vector<cplx>(coeffs.begin() + static_cast<std::ptrdiff_t>(zeros_at_origin), coeffs.end()));
  const int n = p.degree();

  if (n == 1) {
    report.roots.push_back({-p.coefficient(0) / p.coefficient(1), 1});
  } else if (n >= 2) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double rho0 = std::pow(std::abs(p.coefficient(0)) / std::abs(p.leading()), 1.0 / n);
    std::vector<cplx> z(static_cast<std::size_t>(n));
    bool converged = false;
    for (int attempt = 0; attempt <= options.max_restarts && !converged; ++attempt) {
      const double rho = rho0 * (attempt == 0 ? 1.0 : 0.5 + 1.5 * unit(rng));
      const double offset = attempt == 0 ? 0.4 : 2.0 * std::numbers::pi * unit(rng);
      for (int k = 0; k < n; ++k) {
        const double jitter = attempt == 0 ? 0.0 : 0.3 * (unit(rng) - 0.5);
        z[static_cast<std::size_t>(k)] =
            std::polar(rho * (1.0 + jitter), 2.0 * std::numbers::pi * k / n + offset);
      }
      converged = detail::aberth(p, z, options.max_iterations);
    }
    if (!converged)
      throw Error(ErrorCode::NonConvergence, "complex_poly",
                  "root iteration did not converge for degree " + std::to_string(n));
    for (cplx& r : z) detail::newton_polish(p, r);
    for (const Root& r : detail::cluster(p, z)) report.roots.push_back(r);
  }

  for (const Root& r : report.roots) {
    const double scale = p_in.magnitude_bound(std::abs(r.value));
    const double backward = scale > 0.0 ? std::abs(p_in(r.value)) / scale : 0.0;
    report.residual = std::max(report.residual, backward);
    if (std::abs(std::abs(r.value) - 1.0) < options.boundary_tolerance) report.boundary_flags.push_back(r.value);
  }
  return report;
}

struct DiskCount {
  int count = 0;
  std::vector<cplx> near_boundary;  // roots within tol of the circle, counted as exterior
  std::vector<std::string> warnings;
};

// Roots strictly inside |z| < radius. Roots within tol of the circle are
// treated as exterior and reported as warnings.
inline DiskCount count_roots_in_disk(const ComplexPolynomial& p, double radius = 1.0, double tol = 1e-9,
                                     const RootOptions& options = {}) {
  if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "complex_poly", "counting roots of the zero polynomial");
  DiskCount out;
  if (p.degree() == 0) return out;
  const RootReport rep = find_roots(p, options);
  for (const Root& r : rep.roots) {
    const double m = std::abs(r.value);
    if (std::abs(m - radius) < tol) {
      out.near_boundary.push_back(r.value);
      out.warnings.push_back("root within tolerance of the circle at |z| = " + std::to_string(m));
    } else if (m < radius) {
      out.count += r.multiplicity;
    }
  }
  return out;
}

// Zeros minus poles of p/q inside |z| < radius by the argument principle,
// computed without root finding. Adaptive subdivision keeps every argument
// step below pi/4.
inline int winding_count(const ComplexPolynomial& p, const ComplexPolynomial& q, double radius, int n_samples,
                         double tol = 1e-9) {
  if (p.is_zero() || q.is_zero() || n_samples < 8)
    throw Error(ErrorCode::InvalidArgument, "complex_poly", "winding count needs nonzero p, q and >= 8 samples");
  const double sp = p.magnitude_bound(radius), sq = q.magnitude_bound(radius);
  auto at = [&](double t) {
    const cplx z = std::polar(radius, t);
    const cplx pv = p(z), qv = q(z);
    if (std::abs(pv) < tol * sp || std::abs(qv) < tol * sq)
      throw Error(ErrorCode::CircleTooClose, "complex_poly", "a root lies within tolerance of the contour");
    return std::pair{pv, qv};
  };
  double total = 0.0;
  auto segment = [&](auto&& self, double t0, std::pair<cplx, cplx> f0, double t1, std::pair<cplx, cplx> f1,
                     int depth) -> void {
    const double dp = std::arg(f1.first / f0.first);
    const double dq = std::arg(f1.second / f0.second);
    if (std::abs(dp) < std::numbers::pi / 4 && std::abs(dq) < std::numbers::pi / 4) {
      total += dp - dq;
      return;
    }
    if (depth > 40)
      throw Error(ErrorCode::CircleTooClose, "complex_poly", "argument not resolved near the contour");
    const double tm = 0.5 * (t0 + t1);
    const auto fm = at(tm);
    self(self, t0, f0, tm, fm, depth + 1);
    self(self, tm, fm, t1, f1, depth + 1);
  };
  const double step = 2.0 * std::numbers::pi / n_samples;
  auto prev = at(0.0);
  const auto first = prev;
  for (int k = 1; k <= n_samples; ++k) {
    const double t = k * step;
    const auto cur = (k == n_samples) ? first : at(t);
    segment(segment, t - step, prev, t, cur, 0);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

}  // namespace smirnov::poly
