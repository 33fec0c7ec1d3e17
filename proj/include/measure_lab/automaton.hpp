#pragma once

// Labelled automata over integer alphabets.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "algebraic.hpp"
#include "error.hpp"
#include "matrix.hpp"

namespace measure_lab {

using Label = long;
using Word = std::vector<Label>;

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  Label label = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Finite directed multigraph with integer labels and optional initial and
/// terminal state sets. States are referred to by index in document order.
class LabeledAutomaton {
 public:
  LabeledAutomaton() = default;

  LabeledAutomaton(std::vector<std::string> states, std::vector<Label> alphabet, std::vector<Edge> edges,
                   std::vector<std::size_t> initial = {}, std::vector<std::size_t> terminal = {})
      : states_(std::move(states)),
        alphabet_(std::move(alphabet)),
        edges_(std::move(edges)),
        initial_(std::move(initial)),
        terminal_(std::move(terminal)) {
    std::sort(alphabet_.begin(), alphabet_.end());
    alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
    std::set<std::string> names;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      if (!names.insert(states_[i]).second) throw Error(ErrorKind::SchemaError, "duplicate state '" + states_[i] + "'");
      index_[states_[i]] = i;
    }
    std::set<Edge> seen;
    for (const auto& e : edges_) {
      if (e.from >= states_.size() || e.to >= states_.size())
        throw Error(ErrorKind::UnknownState, "edge endpoint out of range");
      if (!std::binary_search(alphabet_.begin(), alphabet_.end(), e.label))
        throw Error(ErrorKind::LabelOutsideAlphabet, "label " + std::to_string(e.label) + " on edge " +
                                                         states_[e.from] + " -> " + states_[e.to]);
      if (!seen.insert(e).second)
        throw Error(ErrorKind::DuplicateEdge, states_[e.from] + " -> " + states_[e.to] + " : " + std::to_string(e.label));
    }
    for (auto v : initial_)
      if (v >= states_.size()) throw Error(ErrorKind::UnknownState, "initial state out of range");
    for (auto v : terminal_)
      if (v >= states_.size()) throw Error(ErrorKind::UnknownState, "terminal state out of range");
    out_.assign(states_.size(), {});
    for (std::size_t k = 0; k < edges_.size(); ++k) out_[edges_[k].from].push_back(k);
    for (auto& list : out_)
      std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(edges_[a].label, edges_[a].to) < std::tie(edges_[b].label, edges_[b].to);
      });
  }

  std::size_t num_states() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<Label>& alphabet() const { return alphabet_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& initial() const { return initial_; }
  const std::vector<std::size_t>& terminal() const { return terminal_; }
  /// Edge indices leaving `state`, ordered by (label, target).
  const std::vector<std::size_t>& out_edges(std::size_t state) const { return out_[state]; }

  std::optional<std::size_t> state_index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Label max_abs_label() const {
    Label m = 0;
    for (const auto& e : edges_) m = std::max(m, e.label < 0 ? -e.label : e.label);
    return m;
  }

  friend bool operator==(const LabeledAutomaton& a, const LabeledAutomaton& b) {
    return a.states_ == b.states_ && a.alphabet_ == b.alphabet_ && a.edges_ == b.edges_ &&
           a.initial_ == b.initial_ && a.terminal_ == b.terminal_;
  }

 private:
  std::vector<std::string> states_;
  std::vector<Label> alphabet_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> initial_;
  std::vector<std::size_t> terminal_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
};

/// An automaton file: the automaton plus the optional base it is meant to be
/// read in, and free-form annotations carried through serialization.
struct AutomatonDocument {
  std::optional<std::vector<BigInt>> minpoly;
  LabeledAutomaton automaton;
  nlohmann::ordered_json annotations;  // null when absent
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::SchemaError, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Label as_label(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw Error(ErrorKind::SchemaError, std::string(what) + " must be an integer");
  return j.get<Label>();
}

inline std::vector<std::size_t> state_list(const nlohmann::json& doc, const char* key,
                                           const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::size_t> out;
  if (!doc.contains(key)) return out;
  const auto& arr = doc.at(key);
  if (!arr.is_array()) throw Error(ErrorKind::SchemaError, std::string(key) + " must be an array");
  for (const auto& s : arr) {
    if (!s.is_string()) throw Error(ErrorKind::SchemaError, std::string(key) + " entries must be strings");
    auto it = index.find(s.get<std::string>());
    if (it == index.end()) throw Error(ErrorKind::UnknownState, "'" + s.get<std::string>() + "' in " + key);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace detail

inline AutomatonDocument parse_automaton_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::SchemaError, "document must be a JSON object");
  AutomatonDocument out;
  if (doc.contains("beta")) {
    const auto& mp = detail::require(doc.at("beta"), "minpoly");
    if (!mp.is_array()) throw Error(ErrorKind::SchemaError, "beta.minpoly must be an array");
    std::vector<BigInt> coeffs;
    for (const auto& c : mp) {
      if (c.is_number_integer())
        coeffs.emplace_back(std::to_string(c.get<long long>()));
      else if (c.is_string())
        coeffs.push_back(parse_integer_list(c.get<std::string>()).at(0));
      else
        throw Error(ErrorKind::SchemaError, "beta.minpoly entries must be integers");
    }
    out.minpoly = std::move(coeffs);
  }
  const auto& alpha = detail::require(doc, "alphabet");
  const auto& states = detail::require(doc, "states");
  const auto& edges = detail::require(doc, "edges");
  if (!alpha.is_array() || !states.is_array() || !edges.is_array())
    throw Error(ErrorKind::SchemaError, "alphabet, states and edges must be arrays");

  std::vector<Label> alphabet;
  for (const auto& a : alpha) alphabet.push_back(detail::as_label(a, "alphabet entry"));
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& s : states) {
    if (!s.is_string()) throw Error(ErrorKind::SchemaError, "state names must be strings");
    if (!index.emplace(s.get<std::string>(), names.size()).second)
      throw Error(ErrorKind::SchemaError, "duplicate state '" + s.get<std::string>() + "'");
    names.push_back(s.get<std::string>());
  }
  std::vector<Edge> edge_list;
  for (const auto& e : edges) {
    const auto& from = detail::require(e, "from");
    const auto& to = detail::require(e, "to");
    if (!from.is_string() || !to.is_string()) throw Error(ErrorKind::SchemaError, "edge endpoints must be strings");
    auto f = index.find(from.get<std::string>());
    auto t = index.find(to.get<std::string>());
    if (f == index.end()) throw Error(ErrorKind::UnknownState, "'" + from.get<std::string>() + "'");
    if (t == index.end()) throw Error(ErrorKind::UnknownState, "'" + to.get<std::string>() + "'");
    edge_list.push_back({f->second, t->second, detail::as_label(detail::require(e, "label"), "edge label")});
  }
  auto initial = detail::state_list(doc, "initial", index);
  auto terminal = detail::state_list(doc, "terminal", index);
  out.automaton = LabeledAutomaton(std::move(names), std::move(alphabet), std::move(edge_list), std::move(initial),
                                   std::move(terminal));
  if (doc.contains("annotations")) out.annotations = doc.at("annotations");
  return out;
}

inline AutomatonDocument parse_automaton_document(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, e.what());
  }
  return parse_automaton_document(doc);
}

inline LabeledAutomaton parse_automaton(const std::string& text) { return parse_automaton_document(text).automaton; }

inline nlohmann::ordered_json to_json(const AutomatonDocument& doc) {
  nlohmann::ordered_json j;
  const auto& a = doc.automaton;
  if (doc.minpoly) {
    nlohmann::ordered_json mp = nlohmann::ordered_json::array();
    for (const auto& c : *doc.minpoly) {
      if (c.fits_slong_p())
        mp.push_back(c.get_si());
      else
        mp.push_back(c.get_str());
    }
    j["beta"]["minpoly"] = mp;
  }
  j["alphabet"] = a.alphabet();
  j["states"] = a.states();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& e : a.edges())
    edges.push_back({{"from", a.states()[e.from]}, {"to", a.states()[e.to]}, {"label", e.label}});
  j["edges"] = edges;
  auto names = [&](const std::vector<std::size_t>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto s : v) arr.push_back(a.states()[s]);
    return arr;
  };
  j["initial"] = names(a.initial());
  j["terminal"] = names(a.terminal());
  if (!doc.annotations.is_null()) j["annotations"] = doc.annotations;
  return j;
}

// ---------------------------------------------------------------------------
// Structure

struct TransitionMatrices {
  std::vector<Label> labels;              // alphabet order
  std::vector<Matrix<std::int64_t>> per_label;  // M_a, same order as labels
  Matrix<std::int64_t> total;             // M = sum_a M_a
};

inline TransitionMatrices transition_matrices(const LabeledAutomaton& a) {
  const std::size_t n = a.num_states();
  TransitionMatrices tm;
  tm.labels = a.alphabet();
  tm.per_label.assign(tm.labels.size(), Matrix<std::int64_t>(n, n, 0));
  tm.total = Matrix<std::int64_t>(n, n, 0);
  for (const auto& e : a.edges()) {
    auto k = std::lower_bound(tm.labels.begin(), tm.labels.end(), e.label) - tm.labels.begin();
    tm.per_label[k](e.from, e.to) = 1;
    tm.total(e.from, e.to) += 1;
  }
  return tm;
}

/// Strongly connected components (Tarjan, iterative). Component ids are in
/// reverse topological order of discovery.
inline std::vector<int> strongly_connected_components(const LabeledAutomaton& a, int* count = nullptr) {
  const std::size_t n = a.num_states();
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int next_index = 0, next_comp = 0;
  struct Frame {
    std::size_t v;
    std::size_t pos;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& out = a.out_edges(f.v);
      if (f.pos < out.size()) {
        std::size_t w = a.edges()[out[f.pos++]].to;
        if (index[w] < 0) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        std::size_t v = f.v;
        if (low[v] == index[v]) {
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
          } while (w != v);
          ++next_comp;
        }
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

struct Primitivity {
  bool strongly_connected = false;
  int period = 0;  // 0 when not strongly connected or without edges
  bool primitive = false;
};

inline Primitivity primitivity_check(const LabeledAutomaton& a) {
  Primitivity res;
  if (a.num_states() == 0) return res;
  int count = 0;
  strongly_connected_components(a, &count);
  if (count != 1 || a.edges().empty()) return res;
  res.strongly_connected = true;
  // period = gcd over edges of level(u) + 1 - level(v) for BFS levels
  std::vector<long> level(a.num_states(), -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (auto k : a.out_edges(queue[h])) {
      auto w = a.edges()[k].to;
      if (level[w] < 0) {
        level[w] = level[queue[h]] + 1;
        queue.push_back(w);
      }
    }
  long g = 0;
  for (const auto& e : a.edges()) g = std::gcd(g, std::labs(level[e.from] + 1 - level[e.to]));
  res.period = static_cast<int>(g);
  res.primitive = g == 1;
  return res;
}

/// Sub-automaton on the states with keep[s] true, in original order.
inline LabeledAutomaton induced_subautomaton(const LabeledAutomaton& a, const std::vector<bool>& keep) {
  std::vector<std::size_t> remap(a.num_states(), SIZE_MAX);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < a.num_states(); ++s)
    if (keep[s]) {
      remap[s] = names.size();
      names.push_back(a.states()[s]);
    }
  std::vector<Edge> edges;
  for (const auto& e : a.edges())
    if (keep[e.from] && keep[e.to]) edges.push_back({remap[e.from], remap[e.to], e.label});
  auto sub = [&](const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out;
    for (auto s : v)
      if (keep[s]) out.push_back(remap[s]);
    return out;
  };
  return LabeledAutomaton(std::move(names), a.alphabet(), std::move(edges), sub(a.initial()), sub(a.terminal()));
}

// ---------------------------------------------------------------------------
// Word counting

/// Restricted: number of paths of length n from I to T, v_I^T M^n v_T (label
/// words with several runs are counted once per run).
/// Unrestricted: number of distinct label words of length n read along any
/// path, i.e. the size of the length-n language of the one-sided shift.
inline BigInt count_words(const LabeledAutomaton& a, std::size_t n, bool use_initial_terminal) {
  const std::size_t s = a.num_states();
  if (use_initial_terminal) {
    std::vector<BigInt> x(s, 0);
    for (auto v : a.initial()) x[v] = 1;
    for (std::size_t step = 0; step < n; ++step) {
      std::vector<BigInt> y(s, 0);
      for (const auto& e : a.edges())
        if (x[e.from] != 0) y[e.to] += x[e.from];
      x = std::move(y);
    }
    BigInt total = 0;
    for (auto v : a.terminal()) total += x[v];
    return total;
  }
  // subset construction on the fly, counting words by their reachable set
  std::map<std::vector<bool>, BigInt> layer;
  layer[std::vector<bool>(s, true)] = 1;
  if (s == 0) return 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::map<std::vector<bool>, BigInt> next;
    for (const auto& [set, cnt] : layer) {
      for (Label lab : a.alphabet()) {
        std::vector<bool> to(s, false);
        bool any = false;
        for (std::size_t v = 0; v < s; ++v) {
          if (!set[v]) continue;
          for (auto k : a.out_edges(v))
            if (a.edges()[k].label == lab) {
              to[a.edges()[k].to] = true;
              any = true;
            }
        }
        if (any) next[to] += cnt;
      }
    }
    layer = std::move(next);
  }
  BigInt total = 0;
  for (const auto& [set, cnt] : layer) total += cnt;
  return total;
}

struct WordRuns {
  Word word;
  std::uint64_t runs = 0;

  friend bool operator==(const WordRuns&, const WordRuns&) = default;
};

inline constexpr std::size_t kDefaultEnumerationCap = 14;

/// All label words of length n along paths from a state in `from` to a state
/// in `to`, with the number of such paths per word, sorted lexicographically.
inline std::vector<WordRuns> enumerate_paths(const LabeledAutomaton& a, std::size_t n,
                                             const std::vector<std::size_t>& from, const std::vector<std::size_t>& to,
                                             std::size_t cap = kDefaultEnumerationCap) {
  if (n > cap) throw Error(ErrorKind::CapExceeded, "word length " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  std::vector<bool> is_target(a.num_states(), false);
  for (auto v : to) is_target[v] = true;
  std::map<Word, std::uint64_t> runs;
  Word word;
  auto dfs = [&](auto& self, std::size_t v) -> void {
    if (word.size() == n) {
      if (is_target[v]) ++runs[word];
      return;
    }
    for (auto k : a.out_edges(v)) {
      word.push_back(a.edges()[k].label);
      self(self, a.edges()[k].to);
      word.pop_back();
    }
  };
  std::vector<std::size_t> starts(from);
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  for (auto v : starts) dfs(dfs, v);
  std::vector<WordRuns> out;
  for (auto& [w, c] : runs) out.push_back({w, c});
  return out;
}

inline std::vector<std::size_t> all_states(const LabeledAutomaton& a) {
  std::vector<std::size_t> v(a.num_states());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

/// Per length 1..max_len: the number of (start state, word) pairs read along
/// more than one path. Zero for every deterministic automaton. Returns nullopt
/// if more than `node_cap` paths would have to be visited.
inline std::optional<std::vector<std::uint64_t>> ambiguous_word_counts(const LabeledAutomaton& a, std::size_t max_len = 8,
                                                                       std::uint64_t node_cap = 2'000'000) {
  std::vector<std::uint64_t> out(max_len, 0);
  std::uint64_t visited = 0;
  for (std::size_t s = 0; s < a.num_states(); ++s) {
    // multiset of reachable states per distinct word, one length at a time
    std::map<Word, std::map<std::size_t, std::uint64_t>> layer;
    layer[Word{}][s] = 1;
    for (std::size_t len = 1; len <= max_len; ++len) {
      std::map<Word, std::map<std::size_t, std::uint64_t>> next;
      for (const auto& [w, states] : layer)
        for (const auto& [v, mult] : states)
          for (auto k : a.out_edges(v)) {
            if (++visited > node_cap) return std::nullopt;
            Word nw = w;
            nw.push_back(a.edges()[k].label);
            next[nw][a.edges()[k].to] += mult;
          }
      for (const auto& [w, states] : next) {
        std::uint64_t total = 0;
        for (const auto& [v, mult] : states) total += mult;
        if (total > 1) ++out[len - 1];
      }
      layer = std::move(next);
    }
  }
  return out;
}

}  // namespace measure_lab
