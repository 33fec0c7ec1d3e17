#pragma once

// The automaton recognising every finite word over an integer alphabet whose
// value sum x_k beta^{-k} is zero, and a brute-force oracle for it.

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "algebraic.hpp"
#include "automaton.hpp"
#include "error.hpp"

namespace measure_lab {

enum class Trim { None, Accessible, Both };

inline const char* to_string(Trim t) {
  switch (t) {
    case Trim::None:
      return "none";
    case Trim::Accessible:
      return "accessible";
    case Trim::Both:
      return "both";
  }
  return "?";
}

inline Trim parse_trim(const std::string& s) {
  if (s == "none") return Trim::None;
  if (s == "accessible") return Trim::Accessible;
  if (s == "both" || s == "trim_both") return Trim::Both;
  throw Error(ErrorKind::SchemaError, "unknown trim mode '" + s + "' (expected none, accessible or both)");
}

struct ZeroAutomaton {
  /// Automaton with beta and annotations; state i has value values[i], state 0
  /// is the zero state, initial = terminal = {0}.
  AutomatonDocument document;
  std::vector<BetaInt> values;
  /// No nonempty zero word exists (the trimmed automaton has no edges).
  bool empty_language = false;
  /// Bound on the real embedding M/(beta-1) and on each conjugate embedding.
  double real_bound = 0;
  std::vector<double> conjugate_bounds;

  const LabeledAutomaton& automaton() const { return document.automaton; }
};

namespace detail {

// Certified comparisons of embeddings against a rational bound, with a cache
// of root enclosures per precision.
class BoundChecker {
 public:
  BoundChecker(const PisotNumber& p, Label max_abs) : p_(p), m_(static_cast<long>(max_abs)) {
    roots_.emplace(p.precision(), p.roots());
  }

  /// |y| <= M/(beta-1) and |y_q| <= M/(1-|beta_q|) for every conjugate.
  bool within_bounds(const BetaInt& y) {
    const int r = p_.degree();
    const BetaInt one = BetaInt::one(r);
    const BetaInt beta = BetaInt::beta(p_);
    // real embedding: |y (beta - 1)| <= M
    BetaInt t = bint_mul(y, beta - one, p_);
    if (!decide(y, t, 1, [&](const RootEnclosures&, const Ball& abs_t, mpfr_prec_t) { return abs_t; })) return false;
    for (int q = 2; q <= r; ++q) {
      const ComplexBall& root = p_.conjugates()[q - 2];
      if (mpfr_zero_p(root.im().get())) {
        // real conjugate with sign s: |y_q| (1 - |beta_q|) = |(y (1 - s beta))_q|
        const bool negative = mpfr_sgn(root.re().get()) < 0;
        BetaInt u = bint_mul(y, negative ? one + beta : one - beta, p_);
        if (!decide(y, u, q, [&](const RootEnclosures&, const Ball& abs_u, mpfr_prec_t) { return abs_u; }))
          return false;
      } else {
        // complex conjugate: no exact tie test; enclosure of |y_q| (1 - |beta_q|)
        if (!decide(y, y, q, [&](const RootEnclosures& rs, const Ball& abs_y, mpfr_prec_t prec) {
              Ball factor = Ball::from_integer(1, prec) - rs.conjugates[q - 2].abs();
              return abs_y * factor;
            }))
          return false;
      }
    }
    return true;
  }

 private:
  // Decides |lhs(t_q)| <= M. Exact tie t = +-M counts as inside.
  template <typename Lhs>
  bool decide(const BetaInt& state, const BetaInt& t, int q, Lhs lhs) {
    const int r = p_.degree();
    if (t == BetaInt::from_int(m_, r) || t == BetaInt::from_int(-m_, r)) return true;
    for (mpfr_prec_t prec = p_.precision(); prec <= p_.precision_cap(); prec *= 2) {
      const RootEnclosures& rs = roots_at(prec);
      ComplexBall e = embed_with(rs, q, t.coords().size(),
                                 [&](std::size_t i, mpfr_prec_t pr) { return Ball::from_integer(t.coords()[i], pr); });
      Ball v = lhs(rs, e.abs(), rs.precision);
      Ball bound = Ball::from_integer(m_, rs.precision);
      if (definitely_less(v, bound)) return true;
      if (definitely_less(bound, v)) return false;
    }
    throw Error(ErrorKind::PrecisionExhausted,
                "cannot decide whether state " + state.to_string() + " meets the bound of embedding " +
                    std::to_string(q) + " at the precision cap");
  }

  const RootEnclosures& roots_at(mpfr_prec_t prec) {
    auto it = roots_.find(prec);
    if (it == roots_.end()) it = roots_.emplace(prec, p_.roots_at(prec)).first;
    return it->second;
  }

  const PisotNumber& p_;
  BigInt m_;
  std::map<mpfr_prec_t, RootEnclosures> roots_;
};

inline std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

/// Breadth-first construction from the zero state with transitions
/// x --a--> beta x - a, keeping targets inside the closed bounds.
inline ZeroAutomaton build_zero_automaton(const PisotNumber& p, std::vector<Label> alphabet, Trim trim = Trim::Both) {
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  if (alphabet.empty()) throw Error(ErrorKind::SchemaError, "alphabet is empty");
  const int r = p.degree();
  Label max_abs = 0;
  for (auto a : alphabet) max_abs = std::max(max_abs, a < 0 ? -a : a);

  detail::BoundChecker checker(p, max_abs);
  std::vector<BetaInt> values{BetaInt::zero(r)};
  std::map<BetaInt, std::size_t> index{{values[0], 0}};
  std::vector<Edge> edges;
  for (std::size_t head = 0; head < values.size(); ++head) {
    const BetaInt bx = times_beta(values[head], p);
    for (auto a : alphabet) {
      BetaInt y = bx - BetaInt::from_int(a, r);
      auto it = index.find(y);
      if (it == index.end()) {
        if (max_abs == 0) {
          if (!y.is_zero()) continue;
        } else if (!checker.within_bounds(y)) {
          continue;
        }
        it = index.emplace(y, values.size()).first;
        values.push_back(y);
      }
      edges.push_back({head, it->second, a});
    }
  }

  // co-reachability to the zero state
  const std::size_t n = values.size();
  std::vector<std::vector<std::size_t>> in(n);
  for (const auto& e : edges) in[e.to].push_back(e.from);
  std::vector<bool> co(n, false);
  std::deque<std::size_t> queue{0};
  co[0] = true;
  while (!queue.empty()) {
    auto v = queue.front();
    queue.pop_front();
    for (auto u : in[v])
      if (!co[u]) co[u] = true, queue.push_back(u);
  }
  const bool has_word = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.from == 0 && co[e.to]; });
  const std::vector<bool> keep = trim == Trim::Both ? co : std::vector<bool>(n, true);

  std::vector<std::size_t> remap(n, n);
  std::vector<BetaInt> kept_values;
  std::vector<std::string> names;
  nlohmann::ordered_json decimals = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    remap[i] = kept_values.size();
    kept_values.push_back(values[i]);
    names.push_back(values[i].to_string());
    decimals[names.back()] = detail::decimal(bint_real(values[i], p).mid_double());
  }
  std::vector<Edge> kept_edges;
  for (const auto& e : edges)
    if (keep[e.from] && keep[e.to]) kept_edges.push_back({remap[e.from], remap[e.to], e.label});

  ZeroAutomaton out;
  out.values = std::move(kept_values);
  out.real_bound = static_cast<double>(max_abs) / (p.beta_double() - 1);
  for (const auto& c : p.conjugates_double()) out.conjugate_bounds.push_back(max_abs / (1 - std::abs(c)));
  out.empty_language = !has_word;

  out.document.minpoly = p.minpoly();
  out.document.automaton = LabeledAutomaton(std::move(names), alphabet, std::move(kept_edges), {0}, {0});
  out.document.annotations = nlohmann::ordered_json::object();
  out.document.annotations["construction"] = "zero automaton";
  out.document.annotations["trim"] = to_string(trim);
  out.document.annotations["empty_language"] = out.empty_language;
  out.document.annotations["values"] = decimals;
  return out;
}

struct ZeroLanguageLength {
  std::size_t length = 0;
  std::uint64_t zero_words = 0;  // words of value zero (brute force)
  std::uint64_t accepted = 0;    // words accepted by the automaton
  std::uint64_t unsound = 0;     // accepted with nonzero value
  std::uint64_t incomplete = 0;  // zero value but rejected
  std::vector<Word> examples;    // up to a few offending words
};

struct ZeroLanguageReport {
  std::vector<ZeroLanguageLength> lengths;  // n = 1..n_max
  bool sound = true;
  bool complete = true;
};

inline constexpr std::size_t kMaxVerifyLength = 14;

/// Exhaustive check of the accepted language (initial to terminal) against
/// exact evaluation of every word over the automaton's alphabet.
inline ZeroLanguageReport verify_zero_language(const LabeledAutomaton& a, const PisotNumber& p, std::size_t n_max,
                                               unsigned jobs = 1) {
  if (n_max > kMaxVerifyLength)
    throw Error(ErrorKind::CapExceeded, "verification length " + std::to_string(n_max) + " exceeds " +
                                            std::to_string(kMaxVerifyLength));
  const int r = p.degree();
  const auto& alpha = a.alphabet();
  const std::size_t ns = a.num_states();
  using StateSet = std::vector<char>;

  auto step = [&](const StateSet& cur, Label l) {
    StateSet next(ns, 0);
    for (std::size_t v = 0; v < ns; ++v)
      if (cur[v])
        for (auto k : a.out_edges(v))
          if (a.edges()[k].label == l) next[a.edges()[k].to] = 1;
    return next;
  };
  auto accepting = [&](const StateSet& cur) {
    for (auto t : a.terminal())
      if (cur[t]) return true;
    return false;
  };

  // Each worker handles a contiguous slice of first letters.
  std::vector<std::vector<ZeroLanguageLength>> partial(alpha.size());
  auto work = [&](std::size_t first) {
    auto& rows = partial[first];
    rows.resize(n_max);
    for (std::size_t i = 0; i < n_max; ++i) rows[i].length = i + 1;
    Word word;
    std::function<void(const BetaInt&, const StateSet&)> dfs = [&](const BetaInt& value, const StateSet& cur) {
      auto& row = rows[word.size() - 1];
      bool zero = value.is_zero();
      bool acc = accepting(cur);
      row.zero_words += zero;
      row.accepted += acc;
      if (acc && !zero) {
        ++row.unsound;
        if (row.examples.size() < 3) row.examples.push_back(word);
      }
      if (zero && !acc) {
        ++row.incomplete;
        if (row.examples.size() < 3) row.examples.push_back(word);
      }
      if (word.size() == n_max) return;
      BetaInt bv = times_beta(value, p);
      for (auto l : alpha) {
        word.push_back(l);
        dfs(bv + BetaInt::from_int(l, r), step(cur, l));
        word.pop_back();
      }
    };
    StateSet start(ns, 0);
    for (auto v : a.initial()) start[v] = 1;
    word.push_back(alpha[first]);
    dfs(BetaInt::from_int(alpha[first], r), step(start, alpha[first]));
  };

  if (n_max > 0) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(alpha.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back([&, j] {
        for (std::size_t f = j; f < alpha.size(); f += jobs) work(f);
      });
    for (auto& t : pool) t.join();
  }

  ZeroLanguageReport report;
  for (std::size_t i = 0; i < n_max; ++i) {
    ZeroLanguageLength row;
    row.length = i + 1;
    for (const auto& rows : partial) {
      const auto& x = rows[i];
      row.zero_words += x.zero_words;
      row.accepted += x.accepted;
      row.unsound += x.unsound;
      row.incomplete += x.incomplete;
      for (const auto& w : x.examples)
        if (row.examples.size() < 3) row.examples.push_back(w);
    }
    report.sound &= row.unsound == 0;
    report.complete &= row.incomplete == 0;
    report.lengths.push_back(std::move(row));
  }
  return report;
}

}  // namespace measure_lab
