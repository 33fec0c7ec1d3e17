#pragma once

// Exact arithmetic in Z[beta] and Q(beta) for a Pisot number beta, together
// with certified enclosures of beta and its Galois conjugates.
//
// Elements are stored in the power basis 1, beta, ..., beta^(r-1), with
// arbitrary-size integer (BetaInt) or rational (QBeta) coordinates.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ball.hpp"
#include "error.hpp"

namespace measure_lab {

using BigInt = mpz_class;
using Rational = mpq_class;

inline constexpr mpfr_prec_t kDefaultPrecision = 128;
inline constexpr mpfr_prec_t kDefaultPrecisionCap = 4096;

/// Precision cap from MEASURE_LAB_PRECISION_CAP, or the default.
inline mpfr_prec_t precision_cap_from_env() {
  if (const char* env = std::getenv("MEASURE_LAB_PRECISION_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 64) return static_cast<mpfr_prec_t>(v);
  }
  return kDefaultPrecisionCap;
}

namespace detail {

// Polynomials over Q, constant term first, no trailing zeros.
using QPoly = std::vector<Rational>;

inline void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline QPoly poly_mod(QPoly a, const QPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

inline QPoly poly_gcd(QPoly a, QPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    QPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

inline BigInt eval_int(const std::vector<BigInt>& p, const BigInt& x) {
  BigInt acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// Positive divisors of |n| (n != 0); nullopt when |n| is too large to factor
// by trial division.
inline std::optional<std::vector<BigInt>> divisors(const BigInt& n) {
  BigInt m = abs(n);
  if (m > BigInt("1000000000000")) return std::nullopt;
  std::vector<BigInt> small, large;
  for (BigInt d = 1; d * d <= m; ++d) {
    if (m % d == 0) {
      small.push_back(d);
      if (d * d != m) large.push_back(m / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace detail

/// Certified enclosures of all roots of the minimal polynomial.
struct RootEnclosures {
  mpfr_prec_t precision = 0;
  Ball beta;
  std::vector<ComplexBall> conjugates;
};

class PisotNumber;
RootEnclosures compute_pisot_roots(const std::vector<BigInt>& minpoly, mpfr_prec_t precision, mpfr_prec_t cap);

/// A Pisot number given by its monic integer minimal polynomial.
class PisotNumber {
 public:
  const std::vector<BigInt>& minpoly() const { return minpoly_; }
  int degree() const { return static_cast<int>(minpoly_.size()) - 1; }
  const Ball& beta() const { return roots_.beta; }
  const std::vector<ComplexBall>& conjugates() const { return roots_.conjugates; }
  mpfr_prec_t precision() const { return roots_.precision; }
  mpfr_prec_t precision_cap() const { return cap_; }
  /// False when the degree is above 4 and only square-freeness and the
  /// rational-root test were run.
  bool irreducibility_verified() const { return irreducible_verified_; }

  double beta_double() const { return roots_.beta.mid_double(); }
  std::vector<std::complex<double>> conjugates_double() const {
    std::vector<std::complex<double>> out;
    for (const auto& c : roots_.conjugates) out.push_back(c.mid_double());
    return out;
  }

  const RootEnclosures& roots() const { return roots_; }
  /// Enclosures at a different precision; the stored ones are returned when
  /// `prec` does not exceed the stored precision.
  RootEnclosures roots_at(mpfr_prec_t prec) const {
    if (prec <= roots_.precision) return roots_;
    return compute_pisot_roots(minpoly_, prec, cap_);
  }

  /// Traces Tr(beta^i), i = 0..r-1 (exact integers).
  const std::vector<BigInt>& basis_traces() const { return traces_; }

  std::string minpoly_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < minpoly_.size(); ++i) os << (i ? "," : "") << minpoly_[i].get_str();
    return os.str();
  }

 private:
  friend PisotNumber make_pisot(const std::vector<BigInt>&, mpfr_prec_t, std::optional<mpfr_prec_t>);

  std::vector<BigInt> minpoly_;
  RootEnclosures roots_;
  std::vector<BigInt> traces_;
  mpfr_prec_t cap_ = kDefaultPrecisionCap;
  bool irreducible_verified_ = true;
};

// ---------------------------------------------------------------------------
// Root isolation

namespace detail {

inline std::vector<std::complex<long double>> aberth_roots(const std::vector<BigInt>& poly) {
  using C = std::complex<long double>;
  const int n = static_cast<int>(poly.size()) - 1;
  std::vector<long double> a(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) a[i] = static_cast<long double>(poly[i].get_d());
  long double bound = 0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::fabs(a[i]));
  bound += 1;
  std::vector<C> z(n);
  for (int i = 0; i < n; ++i) {
    long double ang = 2.0L * 3.14159265358979323846L * i / n + 0.4L;
    z[i] = std::polar(bound * 0.5L + 0.1L, ang);
  }
  auto eval = [&](C x, C& deriv) {
    C p = a[n], d = 0;
    for (int i = n - 1; i >= 0; --i) {
      d = d * x + p;
      p = p * x + a[i];
    }
    deriv = d;
    return p;
  };
  for (int iter = 0; iter < 1000; ++iter) {
    long double change = 0;
    for (int i = 0; i < n; ++i) {
      C d;
      C p = eval(z[i], d);
      if (p == C(0)) continue;
      C ratio = p / d;
      C s = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) s += C(1) / (z[i] - z[j]);
      C w = ratio / (C(1) - ratio * s);
      z[i] -= w;
      change = std::max(change, std::abs(w) / std::max<long double>(1, std::abs(z[i])));
    }
    if (change < 1e-18L) break;
  }
  return z;
}

inline ComplexBall horner(const std::vector<BigInt>& poly, const ComplexBall& x) {
  ComplexBall acc = ComplexBall::from_integer(poly.back(), x.prec());
  for (std::size_t i = poly.size() - 1; i-- > 0;) acc = acc * x + ComplexBall::from_integer(poly[i], x.prec());
  return acc;
}

// Weierstrass correction p(z_i) / prod_{j != i}(z_i - z_j) with the z's
// treated as exact points.
inline ComplexBall weierstrass(const std::vector<BigInt>& poly, const std::vector<ComplexBall>& z, std::size_t i) {
  ComplexBall num = horner(poly, z[i]);
  ComplexBall den = ComplexBall::from_integer(1, z[i].prec());
  for (std::size_t j = 0; j < z.size(); ++j)
    if (j != i) den *= (z[i] - z[j]);
  ComplexBall inv(z[i].prec());
  if (!den.inverse(inv)) return ComplexBall::from_integer(0, z[i].prec());
  return num * inv;
}

// Returns per-root isolating disks, or nullopt if the approximations are not
// separated at this precision. Uses the inclusion theorem: every root lies in
// the union of the disks D(z_i, n |w_i|), and a component of k disks holds k
// roots; pairwise disjoint disks therefore each isolate one root.
inline std::optional<std::vector<ComplexBall>> isolate_roots(const std::vector<BigInt>& poly, mpfr_prec_t prec) {
  const std::size_t n = poly.size() - 1;
  std::vector<ComplexBall> z;
  for (const auto& r : aberth_roots(poly)) z.push_back(ComplexBall::from_complex(r, prec));

  // Durand-Kerner refinement on midpoints.
  for (int iter = 0; iter < 200; ++iter) {
    bool converged = true;
    for (std::size_t i = 0; i < n; ++i) {
      ComplexBall w = weierstrass(poly, z, i).midpoint();
      z[i] = (z[i] - w).midpoint();
      Ball aw = w.abs();
      Ball az = z[i].abs();
      // |w| <= |z| 2^(-prec+8) or |w| tiny
      Real lim(detail::kRadiusPrec);
      mpfr_mul_2si(lim.get(), az.mid().get(), -static_cast<long>(prec) + 8, MPFR_RNDN);
      if (mpfr_cmp(aw.mid().get(), lim.get()) > 0 && mpfr_cmp_d(aw.mid().get(), std::ldexp(1.0, -static_cast<int>(std::min<mpfr_prec_t>(prec, 1000)))) > 0)
        converged = false;
    }
    if (converged) break;
  }

  std::vector<Real> radius;
  for (std::size_t i = 0; i < n; ++i) {
    Ball aw = weierstrass(poly, z, i).abs();
    Real r = aw.upper();
    mpfr_mul_ui(r.get(), r.get(), static_cast<unsigned long>(n), MPFR_RNDU);
    radius.push_back(r);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Ball d = (z[i] - z[j]).abs();
      Real lo = d.lower();
      Real sum(detail::kRadiusPrec);
      mpfr_add(sum.get(), radius[i].get(), radius[j].get(), MPFR_RNDU);
      if (mpfr_lessequal_p(lo.get(), sum.get())) return std::nullopt;
    }
  std::vector<ComplexBall> out;
  for (std::size_t i = 0; i < n; ++i) {
    ComplexBall d = z[i].midpoint();
    d.widen(radius[i]);
    out.push_back(std::move(d));
  }
  return out;
}

inline std::string describe(const ComplexBall& z) {
  std::ostringstream os;
  auto m = z.mid_double();
  os.precision(10);
  os << m.real();
  if (m.imag() != 0) os << (m.imag() < 0 ? " - " : " + ") << std::fabs(m.imag()) << "i";
  os << " (modulus " << std::abs(m) << ")";
  return os.str();
}

inline bool width_ok(const Real& rad, mpfr_prec_t prec) {
  // width 2 rad <= 2^(-prec/2)
  Real lim(detail::kRadiusPrec);
  mpfr_set_ui_2exp(lim.get(), 1, -static_cast<long>(prec / 2) - 1, MPFR_RNDD);
  return mpfr_lessequal_p(rad.get(), lim.get()) != 0;
}

}  // namespace detail

/// Isolates and classifies the roots; throws NotPisot when the modulus
/// condition fails and PrecisionExhausted when `cap` is reached first.
inline RootEnclosures compute_pisot_roots(const std::vector<BigInt>& minpoly, mpfr_prec_t precision, mpfr_prec_t cap) {
  const int r = static_cast<int>(minpoly.size()) - 1;
  if (r == 1) {
    RootEnclosures out;
    out.precision = precision;
    BigInt root = -minpoly[0];
    if (root <= 1)
      throw Error(ErrorKind::NotPisot, "root " + root.get_str() + " is not a real number > 1");
    out.beta = Ball::from_integer(root, precision);
    return out;
  }
  for (mpfr_prec_t prec = precision; prec <= cap; prec *= 2) {
    auto disks = detail::isolate_roots(minpoly, prec);
    if (!disks) continue;
    std::vector<int> outside, inside, undecided;
    for (int i = 0; i < r; ++i) {
      Ball m = (*disks)[i].abs();
      Ball one = Ball::from_integer(1, prec);
      if (definitely_less(one, m))
        outside.push_back(i);
      else if (definitely_less(m, one))
        inside.push_back(i);
      else
        undecided.push_back(i);
    }
    bool widths = std::all_of(disks->begin(), disks->end(),
                              [&](const ComplexBall& d) { return detail::width_ok(d.rad(), prec); });
    if (outside.size() > 1) {
      // Largest-modulus outside root is beta; name the next one.
      std::sort(outside.begin(), outside.end(), [&](int a, int b) {
        return std::abs((*disks)[a].mid_double()) > std::abs((*disks)[b].mid_double());
      });
      throw Error(ErrorKind::NotPisot,
                  "conjugate " + detail::describe((*disks)[outside[1]]) + " has modulus > 1");
    }
    if (!undecided.empty() || !widths) {
      if (prec * 2 > cap && !undecided.empty())
        throw Error(ErrorKind::NotPisot, "root " + detail::describe((*disks)[undecided[0]]) +
                                             " has modulus indistinguishable from 1");
      continue;
    }
    if (outside.empty()) throw Error(ErrorKind::NotPisot, "no root of modulus > 1");
    // The unique root outside the unit disk is real: its complex conjugate is
    // also a root of the same modulus.
    const ComplexBall& dom = (*disks)[outside[0]];
    Ball beta = dom.real_part();
    if (!beta.is_positive())
      throw Error(ErrorKind::NotPisot, "dominant root " + detail::describe(dom) + " is negative");
    RootEnclosures out;
    out.precision = prec;
    out.beta = beta;
    for (int i : inside) {
      ComplexBall c = (*disks)[i];
      // If the disk meets the real axis and its mirror image misses every
      // other disk, the conjugate of its root is the root itself: snap the
      // center to the axis.
      if (mpfr_cmpabs(c.im().get(), c.rad().get()) <= 0) {
        bool alone = true;
        for (int j = 0; j < r && alone; ++j) {
          if (j == i) continue;
          Ball d = (c.conj() - (*disks)[j].midpoint()).abs();
          Real lo = d.lower();
          Real sum(detail::kRadiusPrec);
          mpfr_add(sum.get(), c.rad().get(), (*disks)[j].rad().get(), MPFR_RNDU);
          if (mpfr_lessequal_p(lo.get(), sum.get())) alone = false;
        }
        if (alone) {
          Real zero(prec);
          Real rad(detail::kRadiusPrec);
          mpfr_abs(rad.get(), c.im().get(), MPFR_RNDU);
          mpfr_add(rad.get(), rad.get(), c.rad().get(), MPFR_RNDU);
          c = ComplexBall::from_parts(c.re(), zero, rad);
        }
      }
      out.conjugates.push_back(std::move(c));
    }
    // Deterministic conjugate order: decreasing modulus, then real part, then imaginary part.
    std::sort(out.conjugates.begin(), out.conjugates.end(), [](const ComplexBall& a, const ComplexBall& b) {
      auto x = a.mid_double(), y = b.mid_double();
      if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
      if (x.real() != y.real()) return x.real() > y.real();
      return x.imag() > y.imag();
    });
    return out;
  }
  throw Error(ErrorKind::PrecisionExhausted, "root isolation did not converge below the precision cap");
}

/// Validates a monic integer polynomial (constant term first) and builds the
/// Pisot number it defines.
inline PisotNumber make_pisot(const std::vector<BigInt>& minpoly, mpfr_prec_t precision = kDefaultPrecision,
                              std::optional<mpfr_prec_t> cap = std::nullopt) {
  if (minpoly.size() < 2) throw Error(ErrorKind::NotMonic, "degree must be at least 1");
  if (minpoly.back() != 1) throw Error(ErrorKind::NotMonic, "leading coefficient is " + minpoly.back().get_str());
  const int r = static_cast<int>(minpoly.size()) - 1;

  PisotNumber p;
  p.minpoly_ = minpoly;
  p.cap_ = cap.value_or(precision_cap_from_env());
  if (precision > p.cap_) precision = p.cap_;

  if (r > 1) {
    detail::QPoly f(minpoly.begin(), minpoly.end());
    detail::QPoly df;
    for (int i = 1; i <= r; ++i) df.push_back(Rational(minpoly[i] * i));
    if (detail::poly_gcd(f, df).size() > 1) throw Error(ErrorKind::Reducible, "polynomial has a repeated factor");

    if (minpoly[0] == 0) throw Error(ErrorKind::Reducible, "factor x");
    auto divs = detail::divisors(minpoly[0]);
    if (divs) {
      for (const auto& d : *divs)
        for (const BigInt& cand : {BigInt(d), BigInt(-d)})
          if (detail::eval_int(minpoly, cand) == 0)
            throw Error(ErrorKind::Reducible, "factor x - (" + cand.get_str() + ")");
    } else {
      p.irreducible_verified_ = false;
    }
    if (r == 4 && divs) {
      // (x^2 + a x + b)(x^2 + c x + d) with b d = a0
      const BigInt &a0 = minpoly[0], &a1 = minpoly[1], &a2 = minpoly[2], &a3 = minpoly[3];
      for (const auto& dv : *divs)
        for (const BigInt& b : {BigInt(dv), BigInt(-dv)}) {
          BigInt d = a0 / b;
          // a + c = a3, a c = a2 - b - d
          BigInt disc = a3 * a3 - 4 * (a2 - b - d);
          if (disc < 0) continue;
          BigInt s = sqrt(disc);
          if (s * s != disc) continue;
          for (const BigInt& sg : {BigInt(s), BigInt(-s)}) {
            BigInt twice_a = a3 + sg;
            if (twice_a % 2 != 0) continue;
            BigInt a = twice_a / 2, c = a3 - a;
            if (a * d + b * c == a1)
              throw Error(ErrorKind::Reducible,
                          "quadratic factor x^2 + (" + a.get_str() + ")x + (" + b.get_str() + ")");
          }
        }
    }
    if (r > 4) p.irreducible_verified_ = false;

    if (r > 2) {
      bool palin = true, anti = true;
      for (int i = 0; i <= r; ++i) {
        if (minpoly[i] != minpoly[r - i]) palin = false;
        if (minpoly[i] != -minpoly[r - i]) anti = false;
      }
      if (palin || anti)
        throw Error(ErrorKind::NotPisot, "reciprocal polynomial of degree > 2 has conjugates on the unit circle");
    }
  }

  p.roots_ = compute_pisot_roots(minpoly, precision, p.cap_);

  // Tr(beta^i) via the multiplication-by-beta matrix: power sums from
  // Newton's identities.
  p.traces_.assign(r, 0);
  p.traces_[0] = r;
  // monic: x^r + c_{r-1} x^{r-1} + ... ; e-coefficients c_{r-k}
  for (int k = 1; k < r; ++k) {
    BigInt s = -BigInt(k) * minpoly[r - k];
    for (int i = 1; i < k; ++i) s -= minpoly[r - i] * p.traces_[k - i];
    p.traces_[k] = s;
  }
  return p;
}

inline std::vector<BigInt> parse_integer_list(std::string_view text) {
  std::vector<BigInt> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    BigInt v;
    if (v.set_str(item, 10) != 0) throw Error(ErrorKind::SchemaError, "not an integer: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Z[beta] and Q(beta)

namespace detail {

template <typename T>
std::vector<T> reduce_product(std::vector<T> prod, const std::vector<BigInt>& minpoly) {
  const std::size_t r = minpoly.size() - 1;
  for (std::size_t k = prod.size(); k-- > r;) {
    if (prod[k] == 0) continue;
    T c = prod[k];
    for (std::size_t i = 0; i <= r; ++i) prod[k - r + i] -= c * minpoly[i];
  }
  prod.resize(r);
  return prod;
}

template <typename T>
std::vector<T> multiply(const std::vector<T>& x, const std::vector<T>& y, const std::vector<BigInt>& minpoly) {
  std::vector<T> prod(x.size() + y.size() - 1, T(0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) prod[i + j] += x[i] * y[j];
  }
  return reduce_product(std::move(prod), minpoly);
}

}  // namespace detail

/// Element m_0 + m_1 beta + ... + m_{r-1} beta^{r-1} of Z[beta].
class BetaInt {
 public:
  BetaInt() = default;
  explicit BetaInt(std::vector<BigInt> coords) : coords_(std::move(coords)) {}

  static BetaInt from_int(const BigInt& n, int r) {
    std::vector<BigInt> c(r, 0);
    c[0] = n;
    return BetaInt(std::move(c));
  }
  static BetaInt zero(int r) { return from_int(0, r); }
  static BetaInt one(int r) { return from_int(1, r); }
  /// beta itself (for r = 1 this is the integer beta).
  static BetaInt beta(const PisotNumber& p) {
    const int r = p.degree();
    if (r == 1) return from_int(-p.minpoly()[0], 1);
    std::vector<BigInt> c(r, 0);
    c[1] = 1;
    return BetaInt(std::move(c));
  }

  const std::vector<BigInt>& coords() const { return coords_; }
  int size() const { return static_cast<int>(coords_.size()); }
  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const BigInt& c) { return c == 0; });
  }
  /// True when the element is a rational integer.
  bool is_integer() const {
    return std::all_of(coords_.begin() + 1, coords_.end(), [](const BigInt& c) { return c == 0; });
  }

  friend bool operator==(const BetaInt& a, const BetaInt& b) { return a.coords_ == b.coords_; }
  friend bool operator<(const BetaInt& a, const BetaInt& b) { return a.coords_ < b.coords_; }

  friend BetaInt operator+(BetaInt a, const BetaInt& b) {
    for (std::size_t i = 0; i < a.coords_.size(); ++i) a.coords_[i] += b.coords_[i];
    return a;
  }
  friend BetaInt operator-(BetaInt a, const BetaInt& b) {
    for (std::size_t i = 0; i < a.coords_.size(); ++i) a.coords_[i] -= b.coords_[i];
    return a;
  }
  BetaInt operator-() const {
    BetaInt a = *this;
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend BetaInt operator*(const BigInt& s, BetaInt a) {
    for (auto& c : a.coords_) c *= s;
    return a;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) s += (i ? "," : "") + coords_[i].get_str();
    return s + ")";
  }

 private:
  std::vector<BigInt> coords_;
};

inline BetaInt bint_mul(const BetaInt& x, const BetaInt& y, const PisotNumber& p) {
  if (p.degree() == 1) return BetaInt::from_int(x.coords()[0] * y.coords()[0], 1);
  return BetaInt(detail::multiply(x.coords(), y.coords(), p.minpoly()));
}
inline BetaInt bint_add(const BetaInt& x, const BetaInt& y) { return x + y; }
inline BetaInt bint_sub(const BetaInt& x, const BetaInt& y) { return x - y; }
inline BetaInt bint_neg(const BetaInt& x) { return -x; }

/// x * beta, by shifting the coordinates and reducing once.
inline BetaInt times_beta(const BetaInt& x, const PisotNumber& p) {
  const auto& f = p.minpoly();
  const int r = p.degree();
  if (r == 1) return BetaInt::from_int(x.coords()[0] * -f[0], 1);
  std::vector<BigInt> c(r, 0);
  const BigInt& top = x.coords()[r - 1];
  for (int i = r - 1; i >= 1; --i) c[i] = x.coords()[i - 1] - top * f[i];
  c[0] = -top * f[0];
  return BetaInt(std::move(c));
}

inline BetaInt bint_pow(const BetaInt& x, unsigned long k, const PisotNumber& p) {
  BetaInt result = BetaInt::one(p.degree());
  BetaInt base = x;
  while (k > 0) {
    if (k & 1UL) result = bint_mul(result, base, p);
    k >>= 1;
    if (k > 0) base = bint_mul(base, base, p);
  }
  return result;
}

/// Exact trace Tr(x) = sum of all Galois embeddings of x.
inline BigInt bint_trace(const BetaInt& x, const PisotNumber& p) {
  BigInt t = 0;
  for (int i = 0; i < p.degree(); ++i) t += x.coords()[i] * p.basis_traces()[i];
  return t;
}

/// Element of Q(beta) in the power basis.
class QBeta {
 public:
  QBeta() = default;
  explicit QBeta(std::vector<Rational> coords) : coords_(std::move(coords)) {
    for (auto& c : coords_) c.canonicalize();
  }
  explicit QBeta(const BetaInt& x) {
    for (const auto& c : x.coords()) coords_.emplace_back(c);
  }
  static QBeta from_rational(const Rational& q, int r) {
    std::vector<Rational> c(r, 0);
    c[0] = q;
    return QBeta(std::move(c));
  }

  const std::vector<Rational>& coords() const { return coords_; }
  int size() const { return static_cast<int>(coords_.size()); }
  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const Rational& c) { return c == 0; });
  }

  friend bool operator==(const QBeta& a, const QBeta& b) { return a.coords_ == b.coords_; }
  friend bool operator<(const QBeta& a, const QBeta& b) { return a.coords_ < b.coords_; }

  friend QBeta operator+(QBeta a, const QBeta& b) {
    for (std::size_t i = 0; i < a.coords_.size(); ++i) a.coords_[i] += b.coords_[i];
    return a;
  }
  friend QBeta operator-(QBeta a, const QBeta& b) {
    for (std::size_t i = 0; i < a.coords_.size(); ++i) a.coords_[i] -= b.coords_[i];
    return a;
  }
  QBeta operator-() const {
    QBeta a = *this;
    for (auto& c : a.coords_) c = -c;
    return a;
  }
  friend QBeta operator*(const Rational& s, QBeta a) {
    for (auto& c : a.coords_) c *= s;
    return a;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) s += (i ? "," : "") + coords_[i].get_str();
    return s + ")";
  }

 private:
  std::vector<Rational> coords_;
};

inline QBeta qbeta_mul(const QBeta& x, const QBeta& y, const PisotNumber& p) {
  if (p.degree() == 1) return QBeta::from_rational(x.coords()[0] * y.coords()[0], 1);
  std::vector<Rational> c = detail::multiply(x.coords(), y.coords(), p.minpoly());
  return QBeta(std::move(c));
}

inline QBeta qbeta_times_beta(const QBeta& x, const PisotNumber& p) {
  std::vector<Rational> b(p.degree(), 0);
  if (p.degree() == 1)
    b[0] = Rational(-p.minpoly()[0]);
  else
    b[1] = 1;
  return qbeta_mul(x, QBeta(std::move(b)), p);
}

/// Exact quotient num/den by solving the rational linear system of the
/// multiplication-by-den map.
inline QBeta qbeta_div(const QBeta& num, const QBeta& den, const PisotNumber& p) {
  const int r = p.degree();
  if (den.is_zero()) throw Error(ErrorKind::DivisionByZero, "division by zero in Q(beta)");
  // column j = den * beta^j
  std::vector<std::vector<Rational>> a(r, std::vector<Rational>(r + 1));
  QBeta col = den;
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < r; ++i) a[i][j] = col.coords()[i];
    if (j + 1 < r) col = qbeta_times_beta(col, p);
  }
  for (int i = 0; i < r; ++i) a[i][r] = num.coords()[i];
  for (int c = 0; c < r; ++c) {
    int piv = -1;
    for (int i = c; i < r; ++i)
      if (a[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error(ErrorKind::DivisionByZero, "divisor is a zero divisor (reducible minimal polynomial?)");
    std::swap(a[c], a[piv]);
    for (int i = 0; i < r; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (int k = c; k <= r; ++k) a[i][k] -= f * a[c][k];
    }
  }
  std::vector<Rational> out(r);
  for (int i = 0; i < r; ++i) out[i] = a[i][r] / a[i][i];
  return QBeta(std::move(out));
}

// ---------------------------------------------------------------------------
// Embeddings

namespace detail {

inline ComplexBall root_of(const RootEnclosures& roots, int q) {
  return q == 1 ? ComplexBall::from_real(roots.beta) : roots.conjugates[q - 2];
}

template <typename CoordToBall>
ComplexBall embed_with(const RootEnclosures& roots, int q, std::size_t n, CoordToBall coord) {
  ComplexBall x = root_of(roots, q);
  ComplexBall acc = ComplexBall::from_real(coord(n - 1, roots.precision));
  for (std::size_t i = n - 1; i-- > 0;) acc = acc * x + ComplexBall::from_real(coord(i, roots.precision));
  return acc;
}

template <typename Eval>
auto with_escalation(const PisotNumber& p, Eval eval) {
  for (mpfr_prec_t prec = p.precision(); prec <= p.precision_cap(); prec *= 2) {
    RootEnclosures roots = p.roots_at(prec);
    auto v = eval(roots);
    if (width_ok(v.rad(), roots.precision)) return v;
  }
  throw Error(ErrorKind::PrecisionExhausted, "enclosure too wide at the precision cap");
}

}  // namespace detail

/// Enclosure of the q-th embedding of x (q = 1 is the real embedding at beta,
/// q >= 2 the conjugates in PisotNumber::conjugates() order).
inline ComplexBall bint_embed(const BetaInt& x, int q, const PisotNumber& p) {
  if (q < 1 || q > p.degree()) throw Error(ErrorKind::SchemaError, "embedding index out of range");
  return detail::with_escalation(p, [&](const RootEnclosures& roots) {
    return detail::embed_with(roots, q, x.coords().size(),
                              [&](std::size_t i, mpfr_prec_t prec) { return Ball::from_integer(x.coords()[i], prec); });
  });
}

inline ComplexBall qbeta_embed(const QBeta& x, int q, const PisotNumber& p) {
  if (q < 1 || q > p.degree()) throw Error(ErrorKind::SchemaError, "embedding index out of range");
  return detail::with_escalation(p, [&](const RootEnclosures& roots) {
    return detail::embed_with(roots, q, x.coords().size(),
                              [&](std::size_t i, mpfr_prec_t prec) { return Ball::from_rational(x.coords()[i], prec); });
  });
}

inline Ball bint_real(const BetaInt& x, const PisotNumber& p) { return bint_embed(x, 1, p).real_part(); }
inline Ball qbeta_real(const QBeta& x, const PisotNumber& p) { return qbeta_embed(x, 1, p).real_part(); }
inline double qbeta_to_double(const QBeta& x, const PisotNumber& p) { return qbeta_real(x, p).mid_double(); }

// ---------------------------------------------------------------------------
// Fractional parts of z beta^k

struct FracResult {
  double value = 0;  // in [0, 1)
  double error = 0;  // |value - frac(z beta^k)| <= error
  bool exact = false;
};

namespace detail {

// floor of a ball, if the ball does not contain an integer.
inline std::optional<BigInt> ball_floor(const Ball& b) {
  Real lo = b.lower(), hi = b.upper();
  mpz_class flo, fhi;
  mpfr_get_z(flo.get_mpz_t(), lo.get(), MPFR_RNDD);
  mpfr_get_z(fhi.get_mpz_t(), hi.get(), MPFR_RNDD);
  if (flo != fhi) return std::nullopt;
  if (mpfr_integer_p(lo.get())) return std::nullopt;
  return flo;
}

inline FracResult frac_of_ball(const Ball& v, const BigInt& fl) {
  Ball f = v - Ball::from_integer(fl, v.prec());
  FracResult res;
  res.value = f.mid_double();
  res.error = f.rad_double() + std::ldexp(1.0, -52);
  if (res.value >= 1.0) res.value = std::nextafter(1.0, 0.0);
  if (res.value < 0) res.value = 0;
  return res;
}

}  // namespace detail

/// frac(z beta^k) for every k in 0..kmax, via the trace identity: z beta^k +
/// sum_{q>=2} z_q beta_q^k is a rational integer, so the fractional part is
/// that of -sum_{q>=2} z_q beta_q^k, which is small and computed stably.
inline std::vector<FracResult> frac_beta_powers(const BetaInt& z, unsigned long kmax, const PisotNumber& p) {
  const int r = p.degree();
  std::vector<FracResult> out(kmax + 1);
  std::vector<bool> is_int(kmax + 1);
  {
    BetaInt y = z;
    for (unsigned long k = 0; k <= kmax; ++k) {
      is_int[k] = y.is_integer();
      if (k < kmax) y = times_beta(y, p);
    }
  }
  for (mpfr_prec_t prec = p.precision(); prec <= p.precision_cap(); prec *= 2) {
    RootEnclosures roots = p.roots_at(prec);
    std::vector<ComplexBall> zq, bq;
    for (int q = 2; q <= r; ++q) {
      zq.push_back(detail::embed_with(roots, q, z.coords().size(), [&](std::size_t i, mpfr_prec_t pr) {
        return Ball::from_integer(z.coords()[i], pr);
      }));
      bq.push_back(roots.conjugates[q - 2]);
    }
    bool ok = true;
    for (unsigned long k = 0; k <= kmax && ok; ++k) {
      if (is_int[k]) {
        out[k] = FracResult{0.0, 0.0, true};
      } else {
        ComplexBall s = ComplexBall::from_integer(0, roots.precision);
        for (auto& t : zq) s += t;
        Ball v = -s.real_part();
        auto fl = detail::ball_floor(v);
        if (!fl) {
          ok = false;
          break;
        }
        out[k] = detail::frac_of_ball(v, *fl);
      }
      for (std::size_t q = 0; q < zq.size(); ++q) zq[q] *= bq[q];
    }
    if (ok) return out;
  }
  throw Error(ErrorKind::PrecisionExhausted,
              "frac(z beta^k) cannot be separated from an integer for z = " + z.to_string());
}

inline FracResult frac_beta_power(const BetaInt& z, unsigned long k, const PisotNumber& p) {
  // Direct evaluation is fine for small k and serves as a fallback.
  if (k <= 8) {
    BetaInt y = z;
    for (unsigned long i = 0; i < k; ++i) y = times_beta(y, p);
    if (y.is_integer()) return FracResult{0.0, 0.0, true};
    try {
      Ball v = bint_real(y, p);
      if (auto fl = detail::ball_floor(v)) return detail::frac_of_ball(v, *fl);
    } catch (const Error&) {
    }
  }
  return frac_beta_powers(z, k, p).back();
}

}  // namespace measure_lab
