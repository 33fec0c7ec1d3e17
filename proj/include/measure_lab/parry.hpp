#pragma once

// Perron-Frobenius data and the Parry (maximal-entropy) measure on the
// one-sided shift of a primitive labelled automaton.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "automaton.hpp"
#include "error.hpp"

namespace measure_lab {

struct PerronData {
  double lambda = 0;
  /// Collatz-Wielandt bracket: lambda_lower <= lambda <= lambda_upper.
  double lambda_lower = 0;
  double lambda_upper = 0;
  std::vector<double> left;   // v_L, v_L^T v_R = 1
  std::vector<double> right;  // v_R, max entry 1
  double right_residual = 0;  // max |M v_R - lambda v_R|
  double left_residual = 0;   // max |v_L^T M - lambda v_L^T|
  double pairing_error = 0;   // |v_L^T v_R - 1|
  int iterations = 0;

  double lambda_error() const { return std::max(lambda_upper - lambda, lambda - lambda_lower); }
};

namespace detail {

// Power iteration x <- M x (or x <- M^T x) in long double.
inline std::vector<long double> power_iterate(const LabeledAutomaton& a, bool transpose, double tol, int& iterations) {
  const std::size_t n = a.num_states();
  std::vector<long double> x(n, 1.0L), y(n);
  const int max_iter = 2'000'000;
  for (iterations = 0; iterations < max_iter; ++iterations) {
    std::fill(y.begin(), y.end(), 0.0L);
    for (const auto& e : a.edges()) {
      if (transpose)
        y[e.to] += x[e.from];
      else
        y[e.from] += x[e.to];
    }
    long double mx = *std::max_element(y.begin(), y.end());
    long double change = 0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= mx;
      change = std::max(change, std::fabs(y[i] - x[i]));
    }
    x.swap(y);
    if (change < tol * 1e-3L && iterations > 2) break;
  }
  return x;
}

}  // namespace detail

/// Dominant eigenvalue and eigenvectors of M; requires a primitive automaton.
inline PerronData perron(const LabeledAutomaton& a, double tol = 1e-12) {
  auto prim = primitivity_check(a);
  if (!prim.primitive)
    throw Error(ErrorKind::NotPrimitive, prim.strongly_connected
                                             ? "automaton has period " + std::to_string(prim.period)
                                             : "automaton is not strongly connected");
  const std::size_t n = a.num_states();
  PerronData pd;
  int it_r = 0, it_l = 0;
  auto vr = detail::power_iterate(a, false, tol, it_r);
  auto vl = detail::power_iterate(a, true, tol, it_l);
  pd.iterations = std::max(it_r, it_l);

  std::vector<long double> mvr(n, 0.0L), vlm(n, 0.0L);
  for (const auto& e : a.edges()) {
    mvr[e.from] += vr[e.to];
    vlm[e.to] += vl[e.from];
  }
  long double lo = std::numeric_limits<long double>::infinity(), hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double ratio = mvr[i] / vr[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  // Rayleigh quotient
  long double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += vl[i] * mvr[i];
    den += vl[i] * vr[i];
  }
  long double lambda = num / den;
  long double scale = 1.0L / den;
  pd.lambda = static_cast<double>(lambda);
  pd.lambda_lower = static_cast<double>(lo);
  pd.lambda_upper = static_cast<double>(hi);
  pd.right.resize(n);
  pd.left.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pd.right[i] = static_cast<double>(vr[i]);
    pd.left[i] = static_cast<double>(vl[i] * scale);
  }
  long double pair = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pd.right_residual = std::max(pd.right_residual, static_cast<double>(std::fabs(mvr[i] - lambda * vr[i])));
    pd.left_residual = std::max(pd.left_residual, static_cast<double>(std::fabs(vlm[i] * scale - lambda * vl[i] * scale)));
    pair += static_cast<long double>(pd.left[i]) * pd.right[i];
  }
  pd.pairing_error = static_cast<double>(std::fabs(pair - 1.0L));
  return pd;
}

namespace detail {

// x <- x M_a / lambda, as a sparse row-vector update.
inline std::vector<double> step_row(const LabeledAutomaton& a, const std::vector<double>& x, Label label, double lambda) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (x[v] == 0.0) continue;
    for (auto k : a.out_edges(v)) {
      const auto& e = a.edges()[k];
      if (e.label == label) y[e.to] += x[v] / lambda;
    }
  }
  return y;
}

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
  return static_cast<double>(s);
}

}  // namespace detail

/// mu+([w]) = lambda^{-k} v_L^T M_{w_1} ... M_{w_k} v_R; 0 for words that
/// cannot be read.
inline double cylinder_measure(const PerronData& pd, const LabeledAutomaton& a, const Word& word) {
  std::vector<double> x = pd.left;
  for (Label l : word) x = detail::step_row(a, x, l, pd.lambda);
  return detail::dot(x, pd.right);
}

/// mu_I+([w]) = lambda^{-k} v_I^T M_w v_R / (v_I^T v_R).
inline double cylinder_measure_initial(const PerronData& pd, const LabeledAutomaton& a, const Word& word) {
  if (a.initial().empty()) throw Error(ErrorKind::EmptyInitialSet, "automaton has no initial states");
  std::vector<double> x(a.num_states(), 0.0);
  for (auto v : a.initial()) x[v] = 1.0;
  double norm = detail::dot(x, pd.right);
  for (Label l : word) x = detail::step_row(a, x, l, pd.lambda);
  return detail::dot(x, pd.right) / norm;
}

/// pi(v) = v_L(v) v_R(v), the stationary law of the Markov lift.
inline std::vector<double> start_distribution(const PerronData& pd) {
  std::vector<double> pi(pd.left.size());
  long double s = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    pi[i] = pd.left[i] * pd.right[i];
    s += pi[i];
  }
  for (auto& p : pi) p = static_cast<double>(p / s);
  return pi;
}

/// Per-edge transition probability v_R(to) / (lambda v_R(from)).
inline std::vector<double> edge_probabilities(const PerronData& pd, const LabeledAutomaton& a) {
  std::vector<double> w;
  w.reserve(a.edges().size());
  for (const auto& e : a.edges()) w.push_back(pd.right[e.to] / (pd.lambda * pd.right[e.from]));
  return w;
}

struct SampleRun {
  std::vector<std::size_t> states;  // length + 1 states
  Word word;                        // length labels
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t pick(const std::vector<double>& weights, double u) {
  double total = 0;
  for (double w : weights) total += w;
  double target = u * total, acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace detail

/// Draws a path of the Markov lift of mu+ using the caller's generator.
inline SampleRun sample_run(const PerronData& pd, const LabeledAutomaton& a, std::size_t length, std::mt19937_64& rng) {
  const auto pi = start_distribution(pd);
  const auto probs = edge_probabilities(pd, a);
  SampleRun run;
  std::size_t v = detail::pick(pi, detail::uniform01(rng));
  run.states.push_back(v);
  std::vector<double> w;
  for (std::size_t step = 0; step < length; ++step) {
    const auto& out = a.out_edges(v);
    w.clear();
    for (auto k : out) w.push_back(probs[k]);
    const auto& e = a.edges()[out[detail::pick(w, detail::uniform01(rng))]];
    run.word.push_back(e.label);
    v = e.to;
    run.states.push_back(v);
  }
  return run;
}

inline SampleRun sample_run(const PerronData& pd, const LabeledAutomaton& a, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_run(pd, a, length, rng);
}

}  // namespace measure_lab
