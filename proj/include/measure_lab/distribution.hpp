#pragma once

// Depth-n discretisations of the pushforward measure: weighted point clouds
// with certified intervals, CDF brackets and moments.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "algebraic.hpp"
#include "automaton.hpp"
#include "error.hpp"
#include "parry.hpp"

namespace measure_lab {

struct ValueBounds {
  std::vector<double> lower;  // min of phi+ over infinite paths from each state
  std::vector<double> upper;  // max of phi+ over infinite paths from each state
  double global_lower = 0;
  double global_upper = 0;
  int iterations = 0;
};

/// Bellman iteration m(v) <- min_e (a + m(to)) / beta (and max), a
/// contraction with factor 1/beta; the result is widened by the certified
/// distance residual / (beta - 1) to the fixed point.
inline ValueBounds value_bounds(const LabeledAutomaton& a, const PisotNumber& p, double tol = 1e-13) {
  const std::size_t n = a.num_states();
  for (std::size_t v = 0; v < n; ++v)
    if (a.out_edges(v).empty()) throw Error(ErrorKind::DeadState, "state '" + a.states()[v] + "' has no out-edge");
  const double beta = p.beta_double();
  ValueBounds out;
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  auto sweep = [&](std::vector<double>& m, bool minimum) {
    std::vector<double> next(n);
    double change = 0;
    for (std::size_t v = 0; v < n; ++v) {
      double best = minimum ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      for (auto k : a.out_edges(v)) {
        const auto& e = a.edges()[k];
        double c = (static_cast<double>(e.label) + m[e.to]) / beta;
        best = minimum ? std::min(best, c) : std::max(best, c);
      }
      change = std::max(change, std::fabs(best - m[v]));
      next[v] = best;
    }
    m.swap(next);
    return change;
  };
  double res_lo = 1, res_hi = 1;
  for (out.iterations = 0; out.iterations < 100000; ++out.iterations) {
    res_lo = sweep(lo, true);
    res_hi = sweep(hi, false);
    if (std::max(res_lo, res_hi) / (beta - 1) < tol) break;
  }
  // one more sweep measures the residual of the returned vectors
  res_lo = sweep(lo, true);
  res_hi = sweep(hi, false);
  double scale = 0;
  for (std::size_t v = 0; v < n; ++v) scale = std::max({scale, std::fabs(lo[v]), std::fabs(hi[v])});
  const double rounding = 4 * std::numeric_limits<double>::epsilon() * (1 + scale);
  const double widen_lo = res_lo / (beta - 1) + rounding, widen_hi = res_hi / (beta - 1) + rounding;
  out.lower.resize(n);
  out.upper.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    out.lower[v] = lo[v] - widen_lo;
    out.upper[v] = hi[v] + widen_hi;
  }
  out.global_lower = *std::min_element(out.lower.begin(), out.lower.end());
  out.global_upper = *std::max_element(out.upper.begin(), out.upper.end());
  return out;
}

struct CloudEntry {
  Word word;
  double value = 0;  // sum_{k<=n} x_k beta^{-k}
  double mass = 0;   // mu+ of the cylinder
  double lo = 0;     // phi+ over the cylinder lies in [lo, hi]
  double hi = 0;
};

struct DepthCloud {
  std::size_t depth = 0;
  std::vector<CloudEntry> entries;  // lexicographic word order
  ValueBounds bounds;
};

inline constexpr std::size_t kDefaultCloudCap = 1'000'000;

namespace detail {

// Depth-first walk over distinct label words; `visit` sees each prefix with
// its weighted row vector and returns false to prune the subtree.
struct WordNode {
  Word word;
  std::vector<double> row;  // lambda^{-k} x^T M_w for the start row x
  double value = 0;
  double scale = 1;  // beta^{-k}
};

inline double row_mass(const std::vector<double>& row, const PerronData& pd) { return dot(row, pd.right); }

inline std::pair<double, double> tail_range(const std::vector<double>& row, const ValueBounds& b) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t v = 0; v < row.size(); ++v)
    if (row[v] > 0) lo = std::min(lo, b.lower[v]), hi = std::max(hi, b.upper[v]);
  return {lo, hi};
}

inline double rounding_slack(const WordNode& node, const ValueBounds& b) {
  double m = std::max({std::fabs(b.global_lower), std::fabs(b.global_upper), 1.0});
  return 8 * std::numeric_limits<double>::epsilon() * m * static_cast<double>(node.word.size() + 1);
}

template <typename Visit>
void walk_words(const LabeledAutomaton& a, const PerronData& pd, double beta, WordNode& node, std::size_t depth,
                Visit& visit) {
  if (!visit(node) || node.word.size() == depth) return;
  for (auto l : a.alphabet()) {
    auto row = step_row(a, node.row, l, pd.lambda);
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) continue;
    WordNode child{node.word, std::move(row), 0, node.scale / beta};
    child.word.push_back(l);
    child.value = node.value + static_cast<double>(l) * child.scale;
    walk_words(a, pd, beta, child, depth, visit);
  }
}

inline DepthCloud depth_cloud_from(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd,
                                   const std::vector<double>& start, std::size_t n, std::size_t cap, unsigned jobs) {
  DepthCloud cloud;
  cloud.depth = n;
  cloud.bounds = value_bounds(a, p);
  const double beta = p.beta_double();
  const auto& alpha = a.alphabet();

  auto leaf = [&](const WordNode& node, std::vector<CloudEntry>& out) {
    auto [tlo, thi] = tail_range(node.row, cloud.bounds);
    double slack = rounding_slack(node, cloud.bounds);
    out.push_back(CloudEntry{node.word, node.value, row_mass(node.row, pd), node.value + node.scale * tlo - slack,
                             node.value + node.scale * thi + slack});
  };

  if (n == 0) {
    WordNode root{{}, start, 0, 1};
    leaf(root, cloud.entries);
    return cloud;
  }
  // one subtree per first letter, merged in alphabet order
  std::vector<std::vector<CloudEntry>> parts(alpha.size());
  std::atomic<std::size_t> total{0};
  std::atomic<bool> overflow{false};
  auto work = [&](std::size_t first) {
    auto row = step_row(a, start, alpha[first], pd.lambda);
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) return;
    WordNode node{{alpha[first]}, std::move(row), static_cast<double>(alpha[first]) / beta, 1 / beta};
    auto visit = [&](const WordNode& w) {
      if (overflow) return false;
      if (w.word.size() < n) return true;
      if (++total > cap) {
        overflow = true;
        return false;
      }
      leaf(w, parts[first]);
      return false;
    };
    walk_words(a, pd, beta, node, n, visit);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(alpha.size())));
  if (jobs == 1) {
    for (std::size_t f = 0; f < alpha.size(); ++f) work(f);
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t f = j; f < alpha.size(); f += jobs) work(f);
      });
    for (auto& t : pool) t.join();
  }
  if (overflow)
    throw Error(ErrorKind::CapExceeded,
                "depth " + std::to_string(n) + " cloud has more than " + std::to_string(cap) + " entries");
  for (auto& part : parts)
    for (auto& e : part) cloud.entries.push_back(std::move(e));
  return cloud;
}

}  // namespace detail

/// One entry per admissible label word of length n, for the measure nu.
inline DepthCloud depth_cloud(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, std::size_t n,
                              std::size_t cap = kDefaultCloudCap, unsigned jobs = 1) {
  return detail::depth_cloud_from(a, p, pd, pd.left, n, cap, jobs);
}

/// The same for nu_I: words read from the initial states, start row
/// v_I / (v_I^T v_R).
inline DepthCloud depth_cloud_initial(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd,
                                      std::size_t n, std::size_t cap = kDefaultCloudCap, unsigned jobs = 1) {
  if (a.initial().empty()) throw Error(ErrorKind::EmptyInitialSet, "automaton has no initial states");
  std::vector<double> start(a.num_states(), 0.0);
  double norm = 0;
  for (auto v : a.initial()) norm += pd.right[v];
  for (auto v : a.initial()) start[v] = 1.0 / norm;
  return detail::depth_cloud_from(a, p, pd, start, n, cap, jobs);
}

struct CdfBracket {
  double x = 0;
  double lower = 0;
  double upper = 0;
};

/// lower = mass of entries with hi <= x, upper = mass of entries with lo <= x.
inline CdfBracket cdf_bounds(const DepthCloud& cloud, double x) {
  long double lower = 0, upper = 0;
  for (const auto& e : cloud.entries) {
    if (e.hi <= x) lower += e.mass;
    if (e.lo <= x) upper += e.mass;
  }
  return {x, static_cast<double>(std::min(lower, 1.0L)), static_cast<double>(std::min(upper, 1.0L))};
}

/// Same bracket without materialising the cloud: subtrees whose interval
/// lies entirely on one side of x are settled by their cylinder mass.
inline CdfBracket cdf_bounds(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, std::size_t depth,
                             double x, const ValueBounds& bounds) {
  long double lower = 0, upper = 0;
  detail::WordNode root{{}, pd.left, 0, 1};
  auto visit = [&](const detail::WordNode& w) {
    auto [tlo, thi] = detail::tail_range(w.row, bounds);
    double slack = detail::rounding_slack(w, bounds);
    double lo = w.value + w.scale * tlo - slack, hi = w.value + w.scale * thi + slack;
    if (lo > x) return false;
    double mass = detail::row_mass(w.row, pd);
    if (hi <= x) {
      lower += mass;
      upper += mass;
      return false;
    }
    if (w.word.size() == depth) {
      upper += mass;
      return false;
    }
    return true;
  };
  detail::walk_words(a, pd, p.beta_double(), root, depth, visit);
  return {x, static_cast<double>(std::clamp(lower, 0.0L, 1.0L)), static_cast<double>(std::clamp(upper, 0.0L, 1.0L))};
}

inline CdfBracket cdf_bounds(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd, std::size_t depth,
                             double x) {
  return cdf_bounds(a, p, pd, depth, x, value_bounds(a, p));
}

struct CloudMoments {
  double total_mass = 0;
  double mean = 0;
  double variance = 0;
};

inline CloudMoments cloud_moments(const DepthCloud& cloud) {
  long double m0 = 0, m1 = 0, m2 = 0;
  for (const auto& e : cloud.entries) {
    m0 += e.mass;
    m1 += e.mass * e.value;
    m2 += e.mass * e.value * e.value;
  }
  CloudMoments out;
  out.total_mass = static_cast<double>(m0);
  out.mean = static_cast<double>(m1 / m0);
  out.variance = static_cast<double>(m2 / m0 - (m1 / m0) * (m1 / m0));
  return out;
}

/// Entries sorted by value, ties by mass (the CSV order).
inline std::vector<CloudEntry> sorted_by_value(std::vector<CloudEntry> entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const CloudEntry& x, const CloudEntry& y) {
    return x.value != y.value ? x.value < y.value : x.mass < y.mass;
  });
  return entries;
}

}  // namespace measure_lab
