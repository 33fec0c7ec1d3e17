#pragma once

// Atomic / continuous dichotomy for the pushforward of the Parry measure
// under x -> sum x_k beta^{-k}: the finite-image test, exact atoms, and
// singularity evidence for the continuous case.

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "algebraic.hpp"
#include "automaton.hpp"
#include "error.hpp"
#include "fourier.hpp"
#include "parry.hpp"

namespace measure_lab {

struct FiniteImageResult {
  bool finite = false;
  std::size_t root = 0;
  std::vector<std::size_t> cycle;  // edge indices of the cycle through root
  /// c(v) for every state (complete when finite; on failure the values
  /// assigned before the first violated edge was found).
  std::vector<QBeta> c;
  /// First edge (by index) with beta c(u) - a != c(w).
  std::optional<std::size_t> witness;
};

namespace detail {

inline QBeta qbeta_step(const QBeta& cu, Label a, const PisotNumber& p) {
  return qbeta_times_beta(cu, p) - QBeta::from_rational(Rational(a), p.degree());
}

// Shortest cycle through `root` (breadth-first over edges), as edge indices.
inline std::vector<std::size_t> shortest_cycle(const LabeledAutomaton& a, std::size_t root) {
  const std::size_t n = a.num_states();
  std::vector<std::optional<std::size_t>> via(n);  // edge used to reach a state
  std::deque<std::size_t> queue;
  for (auto k : a.out_edges(root)) {
    const auto& e = a.edges()[k];
    if (e.to == root) return {k};
    if (!via[e.to]) via[e.to] = k, queue.push_back(e.to);
  }
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto k : a.out_edges(v)) {
      const auto& e = a.edges()[k];
      if (e.to == root) {
        std::vector<std::size_t> path{k};
        for (std::size_t u = v; u != root;) {
          path.push_back(*via[u]);
          u = a.edges()[*via[u]].from;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (e.to != root && !via[e.to]) via[e.to] = k, queue.push_back(e.to);
    }
  }
  return {};
}

}  // namespace detail

/// Decides whether the value map takes finitely many values: finds c on a
/// spanning tree from the root's cycle value and checks every edge exactly.
inline FiniteImageResult finite_image_test(const LabeledAutomaton& a, const PisotNumber& p) {
  int components = 0;
  strongly_connected_components(a, &components);
  if (a.num_states() == 0 || a.edges().empty() || components != 1)
    throw Error(ErrorKind::NotStronglyConnected, "the finite-image test needs a strongly connected automaton");
  const int r = p.degree();
  FiniteImageResult out;
  out.root = 0;
  out.cycle = detail::shortest_cycle(a, out.root);

  // c(root) = (sum_k l_k beta^{n-k}) / (beta^n - 1)
  BetaInt num = BetaInt::zero(r), bn = BetaInt::one(r);
  for (auto k : out.cycle) {
    num = times_beta(num, p) + BetaInt::from_int(a.edges()[k].label, r);
    bn = times_beta(bn, p);
  }
  QBeta root_value = qbeta_div(QBeta(num), QBeta(bn - BetaInt::one(r)), p);

  // spanning tree by breadth-first search
  const std::size_t n = a.num_states();
  std::vector<std::optional<QBeta>> c(n);
  c[out.root] = root_value;
  std::deque<std::size_t> queue{out.root};
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    for (auto k : a.out_edges(u)) {
      const auto& e = a.edges()[k];
      if (!c[e.to]) {
        c[e.to] = detail::qbeta_step(*c[u], e.label, p);
        queue.push_back(e.to);
      }
    }
  }
  for (std::size_t k = 0; k < a.edges().size(); ++k) {
    const auto& e = a.edges()[k];
    if (!(detail::qbeta_step(*c[e.from], e.label, p) == *c[e.to])) {
      out.witness = k;
      break;
    }
  }
  out.finite = !out.witness;
  for (auto& v : c) out.c.push_back(*v);
  return out;
}

struct Atom {
  QBeta value;
  double value_double = 0;
  double mass = 0;
  std::vector<std::size_t> states;
};

/// Groups states by exact value; the mass of an atom is the stationary
/// probability of its states. Sorted by increasing value.
inline std::vector<Atom> atoms(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd,
                               const FiniteImageResult& fi) {
  if (!fi.finite) throw Error(ErrorKind::SchemaError, "atoms requested for an automaton with infinite image");
  auto pi = start_distribution(pd);
  std::vector<Atom> out;
  for (std::size_t v = 0; v < a.num_states(); ++v) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Atom& at) { return at.value == fi.c[v]; });
    if (it == out.end()) {
      out.push_back(Atom{fi.c[v], qbeta_to_double(fi.c[v], p), 0.0, {}});
      it = out.end() - 1;
    }
    it->mass += pi[v];
    it->states.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const Atom& x, const Atom& y) { return x.value_double < y.value_double; });
  return out;
}

inline std::vector<Atom> atoms(const LabeledAutomaton& a, const PisotNumber& p, const PerronData& pd) {
  return atoms(a, p, pd, finite_image_test(a, p));
}

enum class VerdictKind { Atomic, Continuous };
enum class Evidence { None, SingularByDimension, SingularByFourier, Inconclusive };

inline const char* to_string(VerdictKind k) { return k == VerdictKind::Atomic ? "atomic" : "continuous"; }

inline const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::None:
      return "none";
    case Evidence::SingularByDimension:
      return "singular_by_dimension";
    case Evidence::SingularByFourier:
      return "singular_by_fourier";
    case Evidence::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

struct ClassifyOptions {
  int scan_height = 3;
  double tol = 1e-8;
  unsigned jobs = 1;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Continuous;
  std::vector<Atom> atoms;
  Evidence evidence = Evidence::None;
  double beta = 0;
  double lambda = 0;
  /// log lambda / log beta, an upper bound for the dimension of the support.
  double dimension_bound = 0;
  /// Fourier threshold max(10 tol, 1e-4) used for singularity evidence.
  double fourier_threshold = 0;
  std::optional<ScanReport> scan;
  FiniteImageResult finite_image;
};

inline Verdict classify(const LabeledAutomaton& a, const PisotNumber& p, const ClassifyOptions& options = {}) {
  PerronData pd = perron(a, std::min(options.tol, 1e-12));
  Verdict v;
  v.beta = p.beta_double();
  v.lambda = pd.lambda;
  v.dimension_bound = std::log(pd.lambda) / std::log(v.beta);
  v.finite_image = finite_image_test(a, p);
  if (v.finite_image.finite) {
    v.kind = VerdictKind::Atomic;
    v.atoms = atoms(a, p, pd, v.finite_image);
    return v;
  }
  v.kind = VerdictKind::Continuous;
  if (v.beta > v.lambda * (1 + options.tol)) {
    v.evidence = Evidence::SingularByDimension;
    return v;
  }
  v.fourier_threshold = std::max(10 * options.tol, 1e-4);
  v.scan = rajchman_scan(a, p, pd, options.scan_height, options.tol, options.jobs);
  v.evidence = v.scan->max_abs > v.fourier_threshold ? Evidence::SingularByFourier : Evidence::Inconclusive;
  return v;
}

}  // namespace measure_lab
