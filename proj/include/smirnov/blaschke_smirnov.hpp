#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "smirnov/complex_poly.hpp"
#include "smirnov/error.hpp"

namespace smirnov {

using poly::cplx;
using poly::ComplexPolynomial;

inline constexpr int kDegreeCap = 12;
inline constexpr cplx kI{0.0, 1.0};

struct ExtendedComplex {
  cplx value{0.0};
  bool infinite = false;
};

// c * prod (a - z)/(1 - conj(a) z), with the factor z used for a = 0.
class FiniteBlaschkeProduct {
 public:
  FiniteBlaschkeProduct() = default;
  explicit FiniteBlaschkeProduct(std::vector<cplx> zeros, cplx constant = 1.0)
      : zeros_(std::move(zeros)), constant_(constant) {
    for (cplx a : zeros_)
      if (!(std::abs(a) < 1.0 - 1e-12))
        throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "Blaschke zero outside the open disk");
    const double m = std::abs(constant_);
    if (!(std::abs(m - 1.0) < 1e-9))
      throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "Blaschke constant is not unimodular");
    constant_ /= m;
  }

  static FiniteBlaschkeProduct monomial(int m, cplx constant = 1.0) {
    return FiniteBlaschkeProduct(std::vector<cplx>(static_cast<std::size_t>(m), cplx(0.0)), constant);
  }

  const std::vector<cplx>& zeros() const noexcept { return zeros_; }
  cplx constant() const noexcept { return constant_; }
  int degree() const noexcept { return static_cast<int>(zeros_.size()); }

  cplx operator()(cplx z) const {
    cplx v = constant_;
    for (cplx a : zeros_) v *= (a == cplx(0.0)) ? z : (a - z) / (1.0 - std::conj(a) * z);
    return v;
  }

  // c * prod (a - z), with z for a = 0.
  ComplexPolynomial numerator() const {
    ComplexPolynomial p = ComplexPolynomial::constant(constant_);
    for (cplx a : zeros_) p = p * (a == cplx(0.0) ? ComplexPolynomial({0.0, 1.0}) : ComplexPolynomial({a, -1.0}));
    return p;
  }

  // prod (1 - conj(a) z), with 1 for a = 0.
  ComplexPolynomial denominator() const {
    ComplexPolynomial q = ComplexPolynomial::constant(1.0);
    for (cplx a : zeros_)
      if (a != cplx(0.0)) q = q * ComplexPolynomial({1.0, -std::conj(a)});
    return q;
  }

 private:
  std::vector<cplx> zeros_;
  cplx constant_{1.0};
};

inline cplx eval_blaschke(const FiniteBlaschkeProduct& b, cplx z) { return b(z); }

struct HelsonPair {
  FiniteBlaschkeProduct b1;
  FiniteBlaschkeProduct b2;
};

struct ConstructionOptions {
  int degree_cap = kDegreeCap;
  double coprime_distance = 1e-8;
  double root_tolerance = 1e-9;
  double boundary_tolerance = 1e-8;
  int boundary_samples = 4096;
  std::uint64_t seed = 0x51ULL;
};

struct BoundaryValue {
  double value = 0.0;      // +-inf at a pole
  double imag_residual = 0.0;
  bool pole = false;
};

struct ValenceCount {
  int count = 0;
  std::vector<std::string> warnings;
};

class RationalRealSmirnov;

RationalRealSmirnov from_blaschke(const FiniteBlaschkeProduct& b1, const FiniteBlaschkeProduct& b2,
                                  const ConstructionOptions& options = {});
RationalRealSmirnov from_rational(const ComplexPolynomial& num, const ComplexPolynomial& den,
                                  const ConstructionOptions& options = {});

// phi = N/D, holomorphic on the disk with real boundary values.
class RationalRealSmirnov {
 public:
  const ComplexPolynomial& num() const noexcept { return num_; }
  const ComplexPolynomial& den() const noexcept { return den_; }
  const std::optional<HelsonPair>& helson_pair() const noexcept { return helson_; }
  int v_plus_nominal() const noexcept { return v_plus_; }
  int v_minus_nominal() const noexcept { return v_minus_; }
  int degree() const noexcept { return std::max(num_.degree(), den_.degree()); }

  // N'D - N D': its zeros are the critical points and the multiple poles.
  const ComplexPolynomial& critical_numerator() const noexcept { return crit_; }
  // Arguments of the poles on the unit circle.
  const std::vector<double>& circle_pole_angles() const noexcept { return pole_angles_; }

  ExtendedComplex eval(cplx z) const {
    const cplx d = den_(z);
    if (std::abs(d) < 1e-13 * den_.magnitude_bound(std::abs(z))) return {cplx(0.0), true};
    return {num_(z) / d, false};
  }

  // |phi(z)| from the factored form; keeps relative accuracy next to
  // multiple boundary poles, where the expanded denominator cancels.
  double abs_factored(cplx z) const {
    double v = std::abs(num_.leading()) / std::abs(den_.leading());
    for (cplx a : num_roots_) v *= std::abs(z - a);
    for (cplx b : den_roots_) v /= std::abs(z - b);
    return v;
  }

  std::pair<cplx, cplx> value_and_derivative(cplx z) const {
    auto [n, dn] = num_.eval_with_derivative(z);
    auto [d, dd] = den_.eval_with_derivative(z);
    return {n / d, (dn * d - n * dd) / (d * d)};
  }

  ComplexPolynomial level_polynomial(cplx lambda) const { return (num_ - lambda * den_).trimmed(1e-14); }

  // Boundary values through x = -cot(t/2), where phi(e^{it}) = Nc(x)/Dc(x)
  // with real polynomials Nc, Dc. This keeps relative accuracy next to the
  // poles, where direct evaluation at e^{it} loses all digits.
  BoundaryValue boundary_value(double t) const {
    const double tw = std::remainder(t, 2.0 * std::numbers::pi);
    const std::size_t d = cayley_num_.size() - 1;
    cplx nv = 0.0, dv = 0.0;
    double db = 0.0;
    if (std::abs(tw) >= std::numbers::pi / 2) {
      const double x = -1.0 / std::tan(tw / 2);
      for (std::size_t k = d + 1; k-- > 0;) {
        nv = nv * x + cayley_num_[k];
        dv = dv * x + cayley_den_[k];
        db = db * std::abs(x) + std::abs(cayley_den_[k]);
      }
    } else {
      const double y = -std::tan(tw / 2);
      for (std::size_t k = 0; k <= d; ++k) {
        nv = nv * y + cayley_num_[k];
        dv = dv * y + cayley_den_[k];
        db = db * std::abs(y) + std::abs(cayley_den_[k]);
      }
    }
    if (std::abs(dv) <= 1e-13 * db) return {std::copysign(INFINITY, (nv * std::conj(dv)).real()), 0.0, true};
    const cplx r = nv / dv;
    return {r.real(), r.imag(), false};
  }

  const std::vector<cplx>& cayley_numerator() const noexcept { return cayley_num_; }
  const std::vector<cplx>& cayley_denominator() const noexcept { return cayley_den_; }

 private:
  friend RationalRealSmirnov from_blaschke(const FiniteBlaschkeProduct&, const FiniteBlaschkeProduct&,
                                           const ConstructionOptions&);
  friend RationalRealSmirnov from_rational(const ComplexPolynomial&, const ComplexPolynomial&,
                                           const ConstructionOptions&);
  friend class SmirnovBuilder;

  RationalRealSmirnov(ComplexPolynomial num, ComplexPolynomial den) : num_(std::move(num)), den_(std::move(den)) {
    crit_ = num_.derivative() * den_ - num_ * den_.derivative();
    const int d = degree();
    const ComplexPolynomial xm({-kI, 1.0}), xp({kI, 1.0});
    const ComplexPolynomial nc = poly::homogeneous_compose(num_, xm, xp, d);
    const ComplexPolynomial dc = poly::homogeneous_compose(den_, xm, xp, d);
    cayley_num_.assign(static_cast<std::size_t>(d) + 1, 0.0);
    cayley_den_.assign(static_cast<std::size_t>(d) + 1, 0.0);
    cplx kappa = 0.0;
    for (int k = 0; k <= d; ++k)
      if (std::abs(dc.coefficient(k)) > std::abs(kappa)) kappa = dc.coefficient(k);
    for (int k = 0; k <= d; ++k) {
      cayley_num_[static_cast<std::size_t>(k)] = nc.coefficient(k) / kappa;
      cayley_den_[static_cast<std::size_t>(k)] = dc.coefficient(k) / kappa;
    }
    if (den_.degree() > 0) {
      den_roots_ = poly::find_roots(den_).flattened();
      for (cplx r : den_roots_)
        if (std::abs(std::abs(r) - 1.0) < 1e-6) pole_angles_.push_back(std::arg(r));
      std::sort(pole_angles_.begin(), pole_angles_.end());
      pole_angles_.erase(std::unique(pole_angles_.begin(), pole_angles_.end()), pole_angles_.end());
    }
    if (num_.degree() > 0) num_roots_ = poly::find_roots(num_).flattened();
  }

  ComplexPolynomial num_, den_, crit_;
  std::optional<HelsonPair> helson_;
  int v_plus_ = 0, v_minus_ = 0;
  std::vector<cplx> cayley_num_, cayley_den_;
  std::vector<double> pole_angles_;
  std::vector<cplx> num_roots_, den_roots_;
};

inline ExtendedComplex eval(const RationalRealSmirnov& phi, cplx z) { return phi.eval(z); }
inline BoundaryValue boundary_value(const RationalRealSmirnov& phi, double t) { return phi.boundary_value(t); }

inline ValenceCount valence_at(const RationalRealSmirnov& phi, cplx lambda, double tol = 1e-9) {
  const ComplexPolynomial p = phi.level_polynomial(lambda);
  if (p.is_zero()) throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "function is constant");
  const auto c = poly::count_roots_in_disk(p, 1.0, tol);
  return {c.count, c.warnings};
}

namespace detail {

inline cplx random_halfplane_point(std::mt19937_64& rng, int sign) {
  std::uniform_real_distribution<double> re(-4.0, 4.0), im(0.05, 4.0);
  return {re(rng), sign * im(rng)};
}

inline int sampled_valence(const RationalRealSmirnov& phi, int sign, int samples, std::mt19937_64& rng,
                           std::optional<int> expected) {
  std::optional<int> seen = expected;
  for (int k = 0; k < samples; ++k) {
    const cplx lambda = random_halfplane_point(rng, sign);
    const int v = valence_at(phi, lambda).count;
    if (seen && *seen != v)
      throw Error(ErrorCode::InconsistentValence, "blaschke_smirnov",
                  "valence " + std::to_string(v) + " at sampled point differs from " + std::to_string(*seen));
    seen = v;
  }
  return *seen;
}

// Zeros of N - cD lying in the disk, used to rebuild a Helson pair.
inline std::vector<cplx> interior_zeros(const ComplexPolynomial& p) {
  std::vector<cplx> out;
  if (p.is_zero() || p.degree() == 0) return out;
  for (const poly::Root& r : poly::find_roots(p).roots)
    if (std::abs(r.value) < 1.0 - 1e-9)
      for (int k = 0; k < r.multiplicity; ++k) out.push_back(std::abs(r.value) < 1e-15 ? cplx(0.0) : r.value);
  return out;
}

inline bool boundary_is_real(const RationalRealSmirnov& phi, const ConstructionOptions& options, double* worst,
                             double* worst_t) {
  const auto& poles = phi.circle_pole_angles();
  *worst = 0.0;
  *worst_t = 0.0;
  for (int k = 0; k < options.boundary_samples; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + 0.5) / options.boundary_samples;
    bool near_pole = false;
    for (double a : poles)
      if (std::abs(std::remainder(t - a, 2.0 * std::numbers::pi)) < 1e-4) near_pole = true;
    if (near_pole) continue;
    const BoundaryValue b = phi.boundary_value(t);
    if (b.pole) continue;
    const double rel = std::abs(b.imag_residual) / std::max(1.0, std::abs(b.value));
    if (rel > *worst) {
      *worst = rel;
      *worst_t = t;
    }
  }
  return *worst <= options.boundary_tolerance;
}

}  // namespace detail

// Helson pair (B1, B2) with (phi - i)/(phi + i) = B2/B1 rebuilt from N/D:
// the zeros of B2 are the zeros of N - iD in the disk, those of B1 the zeros
// of N + iD, and the relative phase is fixed by one evaluation.
inline HelsonPair to_helson(const RationalRealSmirnov& phi) {
  const ComplexPolynomial minus = (phi.num() - kI * phi.den()).trimmed(1e-14);
  const ComplexPolynomial plus = (phi.num() + kI * phi.den()).trimmed(1e-14);
  FiniteBlaschkeProduct b1(detail::interior_zeros(plus));
  FiniteBlaschkeProduct b2(detail::interior_zeros(minus));
  cplx ratio = 0.0;
  for (cplx z0 : {cplx(0.31, 0.17), cplx(-0.23, 0.41), cplx(0.05, -0.37)}) {
    const cplx g = minus(z0) / plus(z0);
    const cplx u1 = b1(z0), u2 = b2(z0);
    if (std::abs(u2) > 1e-6 && std::abs(plus(z0)) > 1e-12 * plus.magnitude_bound(1.0)) {
      ratio = g * u1 / u2;
      break;
    }
  }
  if (!(std::abs(std::abs(ratio) - 1.0) < 1e-6))
    throw Error(ErrorCode::InconsistentValence, "blaschke_smirnov", "Helson pair phase is not unimodular");
  return {b1, FiniteBlaschkeProduct(b2.zeros(), ratio / std::abs(ratio))};
}

class SmirnovBuilder {
 public:
  static RationalRealSmirnov make(ComplexPolynomial num, ComplexPolynomial den, std::optional<HelsonPair> helson,
                                  int v_plus, int v_minus) {
    RationalRealSmirnov f(std::move(num), std::move(den));
    f.helson_ = std::move(helson);
    f.v_plus_ = v_plus;
    f.v_minus_ = v_minus;
    return f;
  }
};

namespace detail {

inline void require_outer_denominator(const ComplexPolynomial& den, const ConstructionOptions& options) {
  if (den.is_zero()) throw Error(ErrorCode::DenominatorVanishesInDisk, "blaschke_smirnov", "denominator is zero");
  if (den.degree() == 0) return;
  const auto c = poly::count_roots_in_disk(den, 1.0, options.root_tolerance);
  if (c.count > 0)
    throw Error(ErrorCode::DenominatorVanishesInDisk, "blaschke_smirnov",
                std::to_string(c.count) + " denominator zero(s) inside the disk");
}

// Divides out zeros shared by num and den up to the clustering distance.
inline void cancel_common_factors(ComplexPolynomial& num, ComplexPolynomial& den, double distance) {
  bool changed = true;
  while (changed && num.degree() > 0 && den.degree() > 0) {
    changed = false;
    const auto rn = poly::find_roots(num).flattened();
    const auto rd = poly::find_roots(den).flattened();
    for (cplx a : rn) {
      for (cplx b : rd) {
        if (std::abs(a - b) < distance) {
          const cplx c = 0.5 * (a + b);
          num = poly::divide_linear(num, c).first;
          den = poly::divide_linear(den, c).first;
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
}

}  // namespace detail

inline RationalRealSmirnov from_blaschke(const FiniteBlaschkeProduct& b1, const FiniteBlaschkeProduct& b2,
                                         const ConstructionOptions& options) {
  if (b1.degree() > options.degree_cap || b2.degree() > options.degree_cap)
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov",
                "Blaschke degree above the cap of " + std::to_string(options.degree_cap));
  if (b1.degree() == 0 && b2.degree() == 0)
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "both products constant: phi would be constant");
  for (cplx a : b1.zeros())
    for (cplx b : b2.zeros())
      if (std::abs(a - b) < options.coprime_distance)
        throw Error(ErrorCode::NotRelativelyPrime, "blaschke_smirnov", "B1 and B2 share a zero");
  const ComplexPolynomial p1 = b1.numerator(), q1 = b1.denominator();
  const ComplexPolynomial p2 = b2.numerator(), q2 = b2.denominator();
  ComplexPolynomial num = kI * (p1 * q2 + p2 * q1);
  ComplexPolynomial den = p1 * q2 - p2 * q1;
  detail::require_outer_denominator(den, options);
  return SmirnovBuilder::make(std::move(num), std::move(den), HelsonPair{b1, b2}, b2.degree(), b1.degree());
}

inline RationalRealSmirnov from_rational(const ComplexPolynomial& num_in, const ComplexPolynomial& den_in,
                                         const ConstructionOptions& options) {
  ComplexPolynomial num = num_in, den = den_in;
  if (den.is_zero()) throw Error(ErrorCode::DenominatorVanishesInDisk, "blaschke_smirnov", "denominator is zero");
  detail::cancel_common_factors(num, den, options.coprime_distance);
  if (std::max(num.degree(), den.degree()) == 0)
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "phi is constant");
  if (std::max(num.degree(), den.degree()) > 2 * options.degree_cap)
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "rational degree above the cap");
  detail::require_outer_denominator(den, options);
  RationalRealSmirnov f = SmirnovBuilder::make(num, den, std::nullopt, 0, 0);
  double worst = 0.0, worst_t = 0.0;
  if (!detail::boundary_is_real(f, options, &worst, &worst_t))
    throw Error(ErrorCode::BoundaryNotReal, "blaschke_smirnov",
                "imaginary residual " + std::to_string(worst) + " at t = " + std::to_string(worst_t));
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);
  const int vp = valence_at(f, kI * (1.0 + jitter(rng))).count;
  const int vm = valence_at(f, -kI * (1.0 + jitter(rng))).count;
  return SmirnovBuilder::make(std::move(num), std::move(den), std::nullopt, vp, vm);
}

// Attaches a Helson pair rebuilt from the rational form.
inline RationalRealSmirnov with_helson(const RationalRealSmirnov& phi) {
  HelsonPair h = to_helson(phi);
  const int vp = h.b2.degree(), vm = h.b1.degree();
  return SmirnovBuilder::make(phi.num(), phi.den(), std::move(h), vp, vm);
}

// (v_plus, v_minus). With a Helson pair the degrees are the answer and the
// samples only confirm them; otherwise the samples must agree among themselves.
inline std::pair<int, int> halfplane_valences(const RationalRealSmirnov& phi, std::uint64_t seed = 7,
                                              int samples = 8) {
  std::mt19937_64 rng(seed);
  std::optional<int> ep, em;
  if (phi.helson_pair()) {
    ep = phi.helson_pair()->b2.degree();
    em = phi.helson_pair()->b1.degree();
  }
  const int vp = detail::sampled_valence(phi, +1, samples, rng, ep);
  const int vm = detail::sampled_valence(phi, -1, samples, rng, em);
  return {vp, vm};
}

inline std::pair<int, int> deficiency_indices(const RationalRealSmirnov& phi, std::uint64_t seed = 7) {
  return halfplane_valences(phi, seed);
}

struct QuadratureOptions {
  double rel_tol = 1e-10;
  int max_depth = 48;
  int initial_panels = 64;
  long max_evaluations = 20'000'000;
};

// M_p(r) = ((1/2pi) int |phi(r e^{it})|^p dt)^{1/p} by adaptive Simpson,
// with panel breaks at the arguments of the boundary poles.
inline double integral_means(const RationalRealSmirnov& phi, double p, double r, const QuadratureOptions& q = {}) {
  if (!(p > 0.0) || !(r >= 0.0 && r < 1.0))
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "integral means need p > 0 and 0 <= r < 1");
  const double two_pi = 2.0 * std::numbers::pi;
  auto f = [&](double t) {
    const double v = phi.abs_factored(std::polar(r, t));
    if (!std::isfinite(v)) throw Error(ErrorCode::QuadratureUnstable, "blaschke_smirnov", "pole on the integration circle");
    return std::pow(v, p);
  };
  if (r == 0.0) return std::abs(phi.eval(0.0).value);
  std::vector<double> cuts;
  for (int k = 0; k <= q.initial_panels; ++k) cuts.push_back(two_pi * k / q.initial_panels);
  for (double a : phi.circle_pole_angles()) cuts.push_back(a < 0 ? a + two_pi : a);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a < 1e-12; }), cuts.end());

  double coarse = 0.0;
  const int nc = 4096;
  for (int k = 0; k < nc; ++k) coarse += f(two_pi * (k + 0.5) / nc);
  coarse *= two_pi / nc;
  const double abs_tol = q.rel_tol * std::max(coarse, 1e-300);
  long evaluations = 0;

  auto simpson = [&](auto&& self, double a, double b, double fa, double fm, double fb, double whole, double tol,
                     int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (++evaluations > q.max_evaluations)
      throw Error(ErrorCode::QuadratureUnstable, "blaschke_smirnov", "evaluation budget exhausted");
    if (std::abs(diff) <= 15.0 * std::max(tol, q.rel_tol * std::abs(left + right)) || (b - a) < 1e-15)
      return left + right + diff / 15.0;
    if (depth >= q.max_depth)
      throw Error(ErrorCode::QuadratureUnstable, "blaschke_smirnov", "adaptive quadrature depth exhausted");
    return self(self, a, m, fa, flm, fm, left, tol / 2, depth + 1) +
           self(self, m, b, fm, frm, fb, right, tol / 2, depth + 1);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson(simpson, a, b, fa, fm, fb, whole, abs_tol * (b - a) / two_pi, 0);
  }
  if (!std::isfinite(total)) throw Error(ErrorCode::QuadratureUnstable, "blaschke_smirnov", "non-finite integral");
  return std::pow(total / two_pi, 1.0 / p);
}

// a * phi + b for real a != 0, b. A negative a swaps the half-plane valences.
inline RationalRealSmirnov real_affine(const RationalRealSmirnov& phi, double a, double b) {
  if (!(a != 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "affine map needs finite real a != 0 and b");
  ComplexPolynomial num = a * phi.num() + b * phi.den();
  const int vp = a > 0 ? phi.v_plus_nominal() : phi.v_minus_nominal();
  const int vm = a > 0 ? phi.v_minus_nominal() : phi.v_plus_nominal();
  RationalRealSmirnov out = SmirnovBuilder::make(std::move(num), phi.den(), std::nullopt, vp, vm);
  return phi.helson_pair() ? with_helson(out) : out;
}

// phi o C for a nonconstant finite Blaschke product C.
inline RationalRealSmirnov precompose_inner(const RationalRealSmirnov& phi, const FiniteBlaschkeProduct& c) {
  if (c.degree() < 1) throw Error(ErrorCode::InvalidArgument, "blaschke_smirnov", "inner factor must be nonconstant");
  const ComplexPolynomial pc = c.numerator(), qc = c.denominator();
  const int d = phi.degree();
  ComplexPolynomial num = poly::homogeneous_compose(phi.num(), pc, qc, d);
  ComplexPolynomial den = poly::homogeneous_compose(phi.den(), pc, qc, d);
  detail::require_outer_denominator(den, {});
  RationalRealSmirnov out = SmirnovBuilder::make(std::move(num), std::move(den), std::nullopt,
                                                 c.degree() * phi.v_plus_nominal(), c.degree() * phi.v_minus_nominal());
  return phi.helson_pair() ? with_helson(out) : out;
}

}  // namespace smirnov
