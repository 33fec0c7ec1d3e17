#pragma once

// Midpoint-radius ("ball") arithmetic on top of MPFR.
//
// A Ball stores a midpoint at working precision p and a radius rounded
// upward at 64 bits. Every operation returns a ball that contains the exact
// result of the operation applied to any points of the argument balls.
// ComplexBall is the analogous disk type.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <complex>
#include <string>
#include <utility>

namespace measure_lab {

/// Owning wrapper around mpfr_t.
class Real {
 public:
  explicit Real(mpfr_prec_t prec = 128) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

 private:
  mpfr_t v_;
};

namespace detail {

inline constexpr mpfr_prec_t kRadiusPrec = 64;

// rad += |x| * 2^(1 - prec(x)), i.e. one ulp of x, rounded up.
inline void add_ulp(Real& rad, const Real& x) {
  Real t(kRadiusPrec);
  mpfr_abs(t.get(), x.get(), MPFR_RNDU);
  mpfr_mul_2si(t.get(), t.get(), 1 - static_cast<long>(x.prec()), MPFR_RNDU);
  mpfr_add(rad.get(), rad.get(), t.get(), MPFR_RNDU);
}

inline Real abs_up(const Real& x) {
  Real t(kRadiusPrec);
  mpfr_abs(t.get(), x.get(), MPFR_RNDU);
  return t;
}

}  // namespace detail

class Ball {
 public:
  explicit Ball(mpfr_prec_t prec = 128) : mid_(prec), rad_(detail::kRadiusPrec) {}

  static Ball from_integer(const mpz_class& value, mpfr_prec_t prec) {
    Ball b(prec);
    if (mpfr_set_z(b.mid_.get(), value.get_mpz_t(), MPFR_RNDN) != 0) detail::add_ulp(b.rad_, b.mid_);
    return b;
  }

  static Ball from_rational(const mpq_class& value, mpfr_prec_t prec) {
    Ball b(prec);
    if (mpfr_set_q(b.mid_.get(), value.get_mpq_t(), MPFR_RNDN) != 0) detail::add_ulp(b.rad_, b.mid_);
    return b;
  }

  static Ball from_double(double value, mpfr_prec_t prec) {
    Ball b(prec);
    if (mpfr_set_d(b.mid_.get(), value, MPFR_RNDN) != 0) detail::add_ulp(b.rad_, b.mid_);
    return b;
  }

  static Ball from_mid_rad(const Real& mid, const Real& rad) {
    Ball b(mid.prec());
    mpfr_set(b.mid_.get(), mid.get(), MPFR_RNDN);
    mpfr_set(b.rad_.get(), rad.get(), MPFR_RNDU);
    return b;
  }

  mpfr_prec_t prec() const { return mid_.prec(); }
  const Real& mid() const { return mid_; }
  const Real& rad() const { return rad_; }
  double mid_double() const { return mid_.to_double(); }
  double rad_double() const { return rad_.to_double(MPFR_RNDU); }

  Real lower() const {
    Real r(prec());
    mpfr_sub(r.get(), mid_.get(), rad_.get(), MPFR_RNDD);
    return r;
  }
  Real upper() const {
    Real r(prec());
    mpfr_add(r.get(), mid_.get(), rad_.get(), MPFR_RNDU);
    return r;
  }

  bool contains_zero() const { return mpfr_cmpabs(mid_.get(), rad_.get()) <= 0; }
  bool is_positive() const { return mpfr_sgn(lower().get()) > 0; }
  bool is_negative() const { return mpfr_sgn(upper().get()) < 0; }

  /// Width 2*rad as a double rounded up.
  double width() const { return 2.0 * rad_double(); }

  Ball operator-() const {
    Ball r = *this;
    mpfr_neg(r.mid_.get(), r.mid_.get(), MPFR_RNDN);
    return r;
  }

  friend Ball operator+(const Ball& a, const Ball& b) {
    Ball r(std::max(a.prec(), b.prec()));
    if (mpfr_add(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN) != 0) detail::add_ulp(r.rad_, r.mid_);
    mpfr_add(r.rad_.get(), r.rad_.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), b.rad_.get(), MPFR_RNDU);
    return r;
  }

  friend Ball operator-(const Ball& a, const Ball& b) { return a + (-b); }

  friend Ball operator*(const Ball& a, const Ball& b) {
    Ball r(std::max(a.prec(), b.prec()));
    if (mpfr_mul(r.mid_.get(), a.mid_.get(), b.mid_.get(), MPFR_RNDN) != 0) detail::add_ulp(r.rad_, r.mid_);
    Real t(detail::kRadiusPrec);
    Real am = detail::abs_up(a.mid_);
    Real bm = detail::abs_up(b.mid_);
    mpfr_mul(t.get(), am.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), bm.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), t.get(), MPFR_RNDU);
    return r;
  }

  Ball& operator+=(const Ball& b) { return *this = *this + b; }
  Ball& operator-=(const Ball& b) { return *this = *this - b; }
  Ball& operator*=(const Ball& b) { return *this = *this * b; }

  /// Enclosure of 1/x. Returns false if the ball contains zero.
  bool inverse(Ball& out) const {
    if (contains_zero()) return false;
    Ball r(prec());
    if (mpfr_ui_div(r.mid_.get(), 1, mid_.get(), MPFR_RNDN) != 0) detail::add_ulp(r.rad_, r.mid_);
    // |1/x - 1/m| <= rad / (|m| (|m| - rad))
    Real am(prec());
    mpfr_abs(am.get(), mid_.get(), MPFR_RNDD);
    Real gap(prec());
    mpfr_sub(gap.get(), am.get(), rad_.get(), MPFR_RNDD);
    Real den(prec());
    mpfr_mul(den.get(), am.get(), gap.get(), MPFR_RNDD);
    Real t(detail::kRadiusPrec);
    mpfr_div(t.get(), rad_.get(), den.get(), MPFR_RNDU);
    mpfr_add(r.rad_.get(), r.rad_.get(), t.get(), MPFR_RNDU);
    out = std::move(r);
    return true;
  }

  Ball abs() const {
    Ball r = *this;
    mpfr_abs(r.mid_.get(), r.mid_.get(), MPFR_RNDN);
    return r;
  }

  /// Multiply by 2^e exactly.
  Ball scaled_pow2(long e) const {
    Ball r = *this;
    mpfr_mul_2si(r.mid_.get(), r.mid_.get(), e, MPFR_RNDN);
    mpfr_mul_2si(r.rad_.get(), r.rad_.get(), e, MPFR_RNDU);
    return r;
  }

  /// Enlarge the radius by `extra` (rounded up).
  void widen(const Real& extra) { mpfr_add(rad_.get(), rad_.get(), extra.get(), MPFR_RNDU); }
  void widen(double extra) {
    Real e(detail::kRadiusPrec);
    mpfr_set_d(e.get(), extra, MPFR_RNDU);
    widen(e);
  }

  std::string to_string(int digits = 17) const {
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg +/- %.3Rg", digits, mid_.get(), rad_.get());
    return buf;
  }

 private:
  Real mid_;
  Real rad_;
};

/// a < b for every pair of points of the two balls.
inline bool definitely_less(const Ball& a, const Ball& b) {
  return mpfr_less_p(a.upper().get(), b.lower().get()) != 0;
}

class ComplexBall {
 public:
  explicit ComplexBall(mpfr_prec_t prec = 128) : re_(prec), im_(prec), rad_(detail::kRadiusPrec) {}

  static ComplexBall from_real(const Ball& x) {
    ComplexBall z(x.prec());
    mpfr_set(z.re_.get(), x.mid().get(), MPFR_RNDN);
    mpfr_set(z.rad_.get(), x.rad().get(), MPFR_RNDU);
    return z;
  }

  static ComplexBall from_parts(const Real& re, const Real& im, const Real& rad) {
    ComplexBall z(std::max(re.prec(), im.prec()));
    mpfr_set(z.re_.get(), re.get(), MPFR_RNDN);
    mpfr_set(z.im_.get(), im.get(), MPFR_RNDN);
    mpfr_set(z.rad_.get(), rad.get(), MPFR_RNDU);
    return z;
  }

  static ComplexBall from_integer(const mpz_class& v, mpfr_prec_t prec) {
    return from_real(Ball::from_integer(v, prec));
  }

  static ComplexBall from_complex(std::complex<long double> v, mpfr_prec_t prec) {
    ComplexBall z(prec);
    mpfr_set_ld(z.re_.get(), v.real(), MPFR_RNDN);
    mpfr_set_ld(z.im_.get(), v.imag(), MPFR_RNDN);
    return z;
  }

  mpfr_prec_t prec() const { return re_.prec(); }
  const Real& re() const { return re_; }
  const Real& im() const { return im_; }
  const Real& rad() const { return rad_; }
  double rad_double() const { return rad_.to_double(MPFR_RNDU); }
  std::complex<double> mid_double() const { return {re_.to_double(), im_.to_double()}; }
  std::complex<long double> mid_long_double() const {
    return {mpfr_get_ld(re_.get(), MPFR_RNDN), mpfr_get_ld(im_.get(), MPFR_RNDN)};
  }

  Ball real_part() const { return Ball::from_mid_rad(re_, rad_); }
  Ball imag_part() const { return Ball::from_mid_rad(im_, rad_); }

  /// Enclosure of |z|.
  Ball abs() const {
    Real m(prec());
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDN);
    Real r = rad_;
    detail::add_ulp(r, m);
    return Ball::from_mid_rad(m, r);
  }

  ComplexBall conj() const {
    ComplexBall z = *this;
    mpfr_neg(z.im_.get(), z.im_.get(), MPFR_RNDN);
    return z;
  }

  ComplexBall operator-() const {
    ComplexBall z = *this;
    mpfr_neg(z.re_.get(), z.re_.get(), MPFR_RNDN);
    mpfr_neg(z.im_.get(), z.im_.get(), MPFR_RNDN);
    return z;
  }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall z(std::max(a.prec(), b.prec()));
    if (mpfr_add(z.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN) != 0) detail::add_ulp(z.rad_, z.re_);
    if (mpfr_add(z.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN) != 0) detail::add_ulp(z.rad_, z.im_);
    mpfr_add(z.rad_.get(), z.rad_.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(z.rad_.get(), z.rad_.get(), b.rad_.get(), MPFR_RNDU);
    return z;
  }

  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) { return a + (-b); }

  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall z(std::max(a.prec(), b.prec()));
    if (mpfr_fmms(z.re_.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN) != 0)
      detail::add_ulp(z.rad_, z.re_);
    if (mpfr_fmma(z.im_.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN) != 0)
      detail::add_ulp(z.rad_, z.im_);
    Real am = a.mid_abs_up();
    Real bm = b.mid_abs_up();
    Real t(detail::kRadiusPrec);
    mpfr_mul(t.get(), am.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(z.rad_.get(), z.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), bm.get(), a.rad_.get(), MPFR_RNDU);
    mpfr_add(z.rad_.get(), z.rad_.get(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    mpfr_add(z.rad_.get(), z.rad_.get(), t.get(), MPFR_RNDU);
    return z;
  }

  friend ComplexBall operator*(const ComplexBall& a, const Ball& b) { return a * from_real(b); }

  ComplexBall& operator+=(const ComplexBall& b) { return *this = *this + b; }
  ComplexBall& operator-=(const ComplexBall& b) { return *this = *this - b; }
  ComplexBall& operator*=(const ComplexBall& b) { return *this = *this * b; }

  bool contains_zero() const {
    Real m(detail::kRadiusPrec);
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDD);
    return mpfr_lessequal_p(m.get(), rad_.get()) != 0;
  }

  /// Enclosure of 1/z. Returns false if the disk contains zero.
  bool inverse(ComplexBall& out) const {
    if (contains_zero()) return false;
    ComplexBall z(prec());
    Real norm(prec());
    mpfr_fmma(norm.get(), re_.get(), re_.get(), im_.get(), im_.get(), MPFR_RNDN);
    mpfr_div(z.re_.get(), re_.get(), norm.get(), MPFR_RNDN);
    mpfr_div(z.im_.get(), im_.get(), norm.get(), MPFR_RNDN);
    mpfr_neg(z.im_.get(), z.im_.get(), MPFR_RNDN);
    // three roundings per component
    for (int i = 0; i < 3; ++i) {
      detail::add_ulp(z.rad_, z.re_);
      detail::add_ulp(z.rad_, z.im_);
    }
    // |1/w - 1/m| <= rad / (|m| (|m| - rad))
    Real am(prec());
    mpfr_hypot(am.get(), re_.get(), im_.get(), MPFR_RNDD);
    Real gap(prec());
    mpfr_sub(gap.get(), am.get(), rad_.get(), MPFR_RNDD);
    Real den(prec());
    mpfr_mul(den.get(), am.get(), gap.get(), MPFR_RNDD);
    Real t(detail::kRadiusPrec);
    mpfr_div(t.get(), rad_.get(), den.get(), MPFR_RNDU);
    mpfr_add(z.rad_.get(), z.rad_.get(), t.get(), MPFR_RNDU);
    out = std::move(z);
    return true;
  }

  ComplexBall pow(unsigned long k) const {
    ComplexBall result = from_integer(1, prec());
    ComplexBall base = *this;
    while (k > 0) {
      if (k & 1UL) result *= base;
      k >>= 1;
      if (k > 0) base *= base;
    }
    return result;
  }

  /// Drop the radius (used by iterative refinement, which only tracks midpoints).
  ComplexBall midpoint() const {
    ComplexBall z = *this;
    mpfr_set_zero(z.rad_.get(), 1);
    return z;
  }

  void widen(const Real& extra) { mpfr_add(rad_.get(), rad_.get(), extra.get(), MPFR_RNDU); }

  std::string to_string(int digits = 17) const {
    char buf[256];
    mpfr_snprintf(buf, sizeof buf, "(%.*Rg, %.*Rg) +/- %.3Rg", digits, re_.get(), digits, im_.get(), rad_.get());
    return buf;
  }

 private:
  Real mid_abs_up() const {
    Real m(detail::kRadiusPrec);
    mpfr_hypot(m.get(), re_.get(), im_.get(), MPFR_RNDU);
    return m;
  }

  Real re_;
  Real im_;
  Real rad_;
};

}  // namespace measure_lab
