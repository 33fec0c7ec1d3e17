#pragma once

// Fourier transforms of the pushed-forward Parry measures as infinite matrix
// products, the limits psi(z) = lim_k nu^(z beta^k), and the lattice scan.
//
// Error control works in the weighted norm |x|_R = sum_v |x_v| v_R(v) on row
// vectors: every W(t) is a contraction for it (W(0) v_R = v_R and all
// entries of W(t) are dominated by those of W(0)), |x (W(s) - W(0))|_R <=
// 2 pi max|a| |s| |x|_R, and |x v_R| <= |x|_R. The starting rows v_L and
// v_I / (v_I v_R) both have weighted norm exactly 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <thread>
#include <vector>

#include "algebraic.hpp"
#include "automaton.hpp"
#include "error.hpp"
#include "parry.hpp"

namespace measure_lab {

using Complex = std::complex<double>;

struct FourierValue {
  Complex value;
  double bound = 0;  // |value - true value| <= bound
  std::size_t head_factors = 0;
  std::size_t tail_factors = 0;
};

/// W(t) = (1/lambda) sum_a e(-a t) M_a applied to row vectors.
class WeightMatrixCache {
 public:
  WeightMatrixCache(const LabeledAutomaton& a, const PerronData& pd) : a_(a), pd_(pd) {
    for (const auto& e : a.edges()) {
      label_slot_.push_back(static_cast<std::size_t>(
          std::lower_bound(a.alphabet().begin(), a.alphabet().end(), e.label) - a.alphabet().begin()));
    }
    max_abs_ = a.max_abs_label();
  }

  const LabeledAutomaton& automaton() const { return a_; }
  const PerronData& perron() const { return pd_; }
  double lambda() const { return pd_.lambda; }
  Label max_abs_label() const { return max_abs_; }

  /// x <- x W(t).
  void apply(std::vector<Complex>& x, double t) const {
    const auto& alpha = a_.alphabet();
    std::vector<Complex> phase(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      // e(-a t), with a t reduced mod 1 first
      double arg = std::fmod(static_cast<double>(alpha[i]) * t, 1.0);
      double angle = -2 * std::numbers::pi * arg;
      phase[i] = Complex(std::cos(angle), std::sin(angle)) / pd_.lambda;
    }
    std::vector<Complex> y(x.size(), Complex(0, 0));
    const auto& edges = a_.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) y[edges[k].to] += x[edges[k].from] * phase[label_slot_[k]];
    x.swap(y);
  }

  Complex pair_right(const std::vector<Complex>& x) const {
    Complex s(0, 0);
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * pd_.right[i];
    return s;
  }

 private:
  const LabeledAutomaton& a_;
  const PerronData& pd_;
  std::vector<std::size_t> label_slot_;
  Label max_abs_ = 0;
};

namespace detail {

inline constexpr double kTwoPi = 2 * std::numbers::pi;
// Per-operation rounding allowance for the double-precision products.
inline constexpr double kRoundoff = 4e-16;

// Number of tail factors so that 2 pi M |t| beta^{-N} / (beta - 1) <= tol.
inline std::size_t tail_length(double beta, double max_abs, double abs_t, double tol) {
  if (max_abs == 0 || abs_t == 0) return 0;
  double need = kTwoPi * max_abs * abs_t / ((beta - 1) * tol);
  if (need <= 1) return 0;
  return static_cast<std::size_t>(std::ceil(std::log(need) / std::log(beta))) + 1;
}

inline double tail_bound(double beta, double max_abs, double abs_t, std::size_t n) {
  return kTwoPi * max_abs * abs_t * std::pow(beta, -static_cast<double>(n)) / (beta - 1);
}

// Applies W(t beta^{-n}) for n = 1..N to x and returns the truncation plus
// rounding bound.
inline double apply_tail(const WeightMatrixCache& w, std::vector<Complex>& x, double beta, double t, double tol,
                         std::size_t& factors) {
  const double m = static_cast<double>(w.max_abs_label());
  factors = tail_length(beta, m, std::fabs(t), tol);
  double s = t, rounding = 0;
  for (std::size_t n = 1; n <= factors; ++n) {
    s /= beta;
    w.apply(x, s);
    // relative error of s grows by one rounding per division
    rounding += kTwoPi * m * std::fabs(s) * kRoundoff * static_cast<double>(n + 1);
  }
  return tail_bound(beta, m, std::fabs(t), factors) + rounding;
}

inline double arithmetic_bound(const WeightMatrixCache& w, std::size_t factors) {
  const double edges = static_cast<double>(w.automaton().edges().size()) + 1;
  return kRoundoff * edges * static_cast<double>(factors + 2);
}

inline std::vector<Complex> complex_row(const std::vector<double>& v) { return {v.begin(), v.end()}; }

inline std::vector<Complex> initial_row(const LabeledAutomaton& a, const PerronData& pd) {
  if (a.initial().empty()) throw Error(ErrorKind::EmptyInitialSet, "automaton has no initial states");
  double norm = 0;
  for (auto v : a.initial()) norm += pd.right[v];
  std::vector<Complex> x(a.num_states(), Complex(0, 0));
  for (auto v : a.initial()) x[v] = 1.0 / norm;
  return x;
}

inline FourierValue product_from(const WeightMatrixCache& w, std::vector<Complex> x, double beta, double t,
                                 double tol) {
  FourierValue out;
  double bound = apply_tail(w, x, beta, t, tol, out.tail_factors);
  // with no factors applied the pairing is the total mass, 1 by normalisation
  out.value = out.tail_factors == 0 ? Complex(1, 0) : w.pair_right(x);
  out.bound = bound + arithmetic_bound(w, out.tail_factors);
  return out;
}

}  // namespace detail

/// nu^(t) = v_L^T prod_{n>=1} W(beta^{-n} t) v_R.
inline FourierValue nu_hat(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, double t,
                           double tol = 1e-8) {
  WeightMatrixCache w(a, pd);
  return detail::product_from(w, detail::complex_row(pd.left), p.beta_double(), t, tol);
}

/// nu_I^(t) = v_I^T prod_{n>=1} W(beta^{-n} t) v_R / (v_I^T v_R).
inline FourierValue nu_hat_initial(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, double t,
                                   double tol = 1e-8) {
  WeightMatrixCache w(a, pd);
  return detail::product_from(w, detail::initial_row(a, pd), p.beta_double(), t, tol);
}

namespace detail {

// Head product over j = J..0 of W(frac(z beta^j)), then the tail at t = z.
// Leading factors whose argument is exactly an integer are skipped: they act
// as the identity on v_L.
inline FourierValue head_then_tail(const WeightMatrixCache& w, const BetaInt& z, const PisotNumber& p,
                                   const std::vector<FracResult>& fracs, double head_truncation, double tol) {
  const double m = static_cast<double>(w.max_abs_label());
  std::vector<Complex> x = complex_row(w.perron().left);
  FourierValue out;
  double bound = head_truncation;
  bool leading = true;
  for (std::size_t idx = fracs.size(); idx-- > 0;) {
    const auto& f = fracs[idx];
    if (leading && f.exact) continue;
    leading = false;
    w.apply(x, f.value);
    bound += kTwoPi * m * f.error;
    ++out.head_factors;
  }
  const double tail_tol = out.head_factors == 0 && head_truncation == 0 ? tol : tol / 2;
  const double z_real = bint_real(z, p).mid_double();
  bound += apply_tail(w, x, p.beta_double(), z_real, tail_tol, out.tail_factors);
  out.value = out.head_factors + out.tail_factors == 0 ? Complex(1, 0) : w.pair_right(x);
  out.bound = bound + arithmetic_bound(w, out.head_factors + out.tail_factors);
  return out;
}

}  // namespace detail

/// nu^(z beta^k) with the large arguments reduced exactly mod 1.
inline FourierValue nu_hat_at_beta_power(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd,
                                         const BetaInt& z, unsigned long k, double tol = 1e-8) {
  WeightMatrixCache w(a, pd);
  std::vector<FracResult> fracs;
  if (k > 0) {
    fracs = frac_beta_powers(z, k - 1, p);
  }
  return detail::head_then_tail(w, z, p, fracs, 0.0, tol);
}

/// psi^(z) = lim_k nu^(z beta^k) for z in Z[beta] (power-basis coordinates).
inline FourierValue psi_hat(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, const BetaInt& z,
                            double tol = 1e-8) {
  if (z.size() != p.degree()) throw Error(ErrorKind::SchemaError, "z must have one coordinate per basis element");
  WeightMatrixCache w(a, pd);
  const double m = static_cast<double>(w.max_abs_label());
  // dist(z beta^j, Z) <= sum_q |z_q| |beta_q|^j, so the discarded head
  // factors j > J cost at most 2 pi M sum_q |z_q| |beta_q|^{J+1} / (1 - |beta_q|).
  std::vector<double> zq, bq;
  for (int q = 2; q <= p.degree(); ++q) {
    Ball az = bint_embed(z, q, p).abs();
    Ball ab = p.conjugates()[q - 2].abs();
    zq.push_back(az.upper().to_double(MPFR_RNDU));
    bq.push_back(ab.upper().to_double(MPFR_RNDU));
  }
  auto head_bound = [&](long J) {
    double s = 0;
    for (std::size_t i = 0; i < zq.size(); ++i)
      s += zq[i] * std::pow(bq[i], static_cast<double>(J + 1)) / (1 - bq[i]);
    return detail::kTwoPi * m * s;
  };
  long J = -1;
  if (m > 0 && !zq.empty()) {
    J = 0;
    while (head_bound(J) > tol / 2) ++J;
  }
  double truncation = J < 0 ? 0.0 : head_bound(J);
  std::vector<FracResult> fracs;
  if (J >= 0) fracs = frac_beta_powers(z, static_cast<unsigned long>(J), p);
  return detail::head_then_tail(w, z, p, fracs, truncation, tol);
}

struct ScanEntry {
  BetaInt z;
  FourierValue psi;
};

struct ScanReport {
  int height = 0;
  std::vector<ScanEntry> table;  // lexicographic in the coordinates
  double max_abs = 0;
  std::size_t argmax = 0;  // index into table
};

/// Lattice points with |m_i| <= H, z != 0, first nonzero coordinate positive
/// (psi(-z) is the complex conjugate of psi(z)), in lexicographic order.
inline std::vector<BetaInt> scan_points(int r, int height) {
  std::vector<BetaInt> out;
  std::vector<BigInt> c(r, -height);
  for (;;) {
    auto first = std::find_if(c.begin(), c.end(), [](const BigInt& v) { return v != 0; });
    if (first != c.end() && *first > 0) out.emplace_back(c);
    int i = r - 1;
    while (i >= 0 && c[i] == height) c[i--] = -height;
    if (i < 0) break;
    ++c[i];
  }
  return out;
}

inline ScanReport rajchman_scan(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, int height,
                                double tol = 1e-8, unsigned jobs = 1) {
  if (height < 1) throw Error(ErrorKind::SchemaError, "scan height must be at least 1");
  ScanReport report;
  report.height = height;
  auto points = scan_points(p.degree(), height);
  report.table.resize(points.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::exception_ptr> failures(jobs);
  auto work = [&](unsigned j) {
    try {
      for (std::size_t i = j; i < points.size(); i += jobs)
        report.table[i] = ScanEntry{points[i], psi_hat(a, p, pd, points[i], tol)};
    } catch (...) {
      failures[j] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work, j);
    for (auto& t : pool) t.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  for (std::size_t i = 0; i < report.table.size(); ++i) {
    double v = std::abs(report.table[i].psi.value);
    if (v > report.max_abs) report.max_abs = v, report.argmax = i;
  }
  return report;
}

}  // namespace measure_lab
