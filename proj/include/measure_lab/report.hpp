#pragma once

// JSON and CSV emission for the analysis results. Doubles are written by the
// JSON library's shortest round-trip formatting, so reports are byte-stable.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebraic.hpp"
#include "automaton.hpp"
#include "classify.hpp"
#include "distribution.hpp"
#include "fourier.hpp"
#include "parry.hpp"
#include "zero_automaton.hpp"

namespace measure_lab {

using Json = nlohmann::ordered_json;

/// Rational coordinates as strings ("p/q" or "n").
inline Json coords_json(const QBeta& x) {
  Json arr = Json::array();
  for (const auto& c : x.coords()) arr.push_back(c.get_str());
  return arr;
}

inline Json coords_json(const BetaInt& x) {
  Json arr = Json::array();
  for (const auto& c : x.coords()) {
    if (c.fits_slong_p())
      arr.push_back(c.get_si());
    else
      arr.push_back(c.get_str());
  }
  return arr;
}

inline Json word_json(const Word& w) {
  Json arr = Json::array();
  for (auto l : w) arr.push_back(l);
  return arr;
}

inline std::string word_string(const Word& w, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(w[i]);
  }
  return s;
}

inline std::string coords_string(const BetaInt& z, char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < z.coords().size(); ++i) {
    if (i) s += sep;
    s += z.coords()[i].get_str();
  }
  return s;
}

inline Json edge_json(const LabeledAutomaton& a, std::size_t k) {
  const auto& e = a.edges()[k];
  return Json{{"index", k}, {"from", a.states()[e.from]}, {"to", a.states()[e.to]}, {"label", e.label}};
}

inline Json to_json(const PerronData& pd, const LabeledAutomaton& a) {
  Json j;
  j["lambda"] = pd.lambda;
  j["lambda_lower"] = pd.lambda_lower;
  j["lambda_upper"] = pd.lambda_upper;
  j["right_residual"] = pd.right_residual;
  j["left_residual"] = pd.left_residual;
  j["pairing_error"] = pd.pairing_error;
  j["iterations"] = pd.iterations;
  auto pi = start_distribution(pd);
  Json states = Json::array();
  for (std::size_t v = 0; v < a.num_states(); ++v)
    states.push_back({{"state", a.states()[v]}, {"left", pd.left[v]}, {"right", pd.right[v]}, {"pi", pi[v]}});
  j["states"] = states;
  return j;
}

inline Json to_json(const FourierValue& f) {
  return Json{{"re", f.value.real()},      {"im", f.value.imag()},           {"abs", std::abs(f.value)},
              {"bound", f.bound},          {"head_factors", f.head_factors}, {"tail_factors", f.tail_factors}};
}

inline Json to_json(const ScanReport& s) {
  Json j;
  j["height"] = s.height;
  j["points"] = s.table.size();
  j["max_abs"] = s.max_abs;
  if (!s.table.empty()) j["argmax"] = coords_json(s.table[s.argmax].z);
  Json table = Json::array();
  for (const auto& e : s.table) {
    Json row = to_json(e.psi);
    row["z"] = coords_json(e.z);
    table.push_back(row);
  }
  j["table"] = table;
  return j;
}

inline Json to_json(const Atom& atom, const LabeledAutomaton& a) {
  Json states = Json::array();
  for (auto v : atom.states) states.push_back(a.states()[v]);
  return Json{{"value_coords", coords_json(atom.value)},
              {"value_decimal", atom.value_double},
              {"mass", atom.mass},
              {"states", states}};
}

/// {"kind", "atoms", "evidence", "evidence_data", "witness", "diagnostics"}.
inline Json to_json(const Verdict& v, const LabeledAutomaton& a) {
  Json j;
  j["kind"] = to_string(v.kind);
  Json atoms_arr = Json::array();
  for (const auto& at : v.atoms) atoms_arr.push_back(to_json(at, a));
  j["atoms"] = atoms_arr;
  j["evidence"] = to_string(v.evidence);

  Json data = Json::object();
  if (v.evidence == Evidence::SingularByDimension) {
    data["beta"] = v.beta;
    data["lambda"] = v.lambda;
    data["dimension_bound"] = v.dimension_bound;
  }
  if (v.scan) {
    data["threshold"] = v.fourier_threshold;
    data["height"] = v.scan->height;
    data["max_abs"] = v.scan->max_abs;
    if (!v.scan->table.empty()) {
      const auto& best = v.scan->table[v.scan->argmax];
      data["z"] = coords_json(best.z);
      data["psi_hat"] = to_json(best.psi);
    }
  }
  j["evidence_data"] = data;

  const auto& fi = v.finite_image;
  Json witness = Json::object();
  witness["root"] = a.states()[fi.root];
  Json cycle = Json::array();
  for (auto k : fi.cycle) cycle.push_back(edge_json(a, k));
  witness["cycle"] = cycle;
  if (fi.witness) {
    witness["edge"] = edge_json(a, *fi.witness);
  } else {
    Json c = Json::object();
    for (std::size_t s = 0; s < a.num_states(); ++s) c[a.states()[s]] = coords_json(fi.c[s]);
    witness["c"] = c;
  }
  j["witness"] = witness;
  j["diagnostics"] = Json{{"beta", v.beta}, {"lambda", v.lambda}, {"dimension_bound", v.dimension_bound}};
  return j;
}

inline Json to_json(const ZeroLanguageReport& r) {
  Json j;
  j["sound"] = r.sound;
  j["complete"] = r.complete;
  Json rows = Json::array();
  for (const auto& l : r.lengths) {
    Json ex = Json::array();
    for (const auto& w : l.examples) ex.push_back(word_json(w));
    rows.push_back({{"length", l.length},
                    {"zero_words", l.zero_words},
                    {"accepted", l.accepted},
                    {"unsound", l.unsound},
                    {"incomplete", l.incomplete},
                    {"examples", ex}});
  }
  j["lengths"] = rows;
  return j;
}

inline Json to_json(const CdfBracket& b) { return Json{{"x", b.x}, {"lower", b.lower}, {"upper", b.upper}}; }

inline Json to_json(const ValueBounds& b, const LabeledAutomaton& a) {
  Json states = Json::array();
  for (std::size_t v = 0; v < a.num_states(); ++v)
    states.push_back({{"state", a.states()[v]}, {"lower", b.lower[v]}, {"upper", b.upper[v]}});
  return Json{{"global_lower", b.global_lower}, {"global_upper", b.global_upper}, {"states", states}};
}

// ---------------------------------------------------------------------------
// CSV

/// %.17g keeps every double exactly recoverable.
inline std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct FourierRow {
  std::string t_or_z;
  FourierValue value;
};

inline void write_fourier_csv(std::ostream& out, const std::vector<FourierRow>& rows) {
  out << "t_or_z,re,im,abs,bound\n";
  for (const auto& r : rows)
    out << r.t_or_z << ',' << csv_number(r.value.value.real()) << ',' << csv_number(r.value.value.imag()) << ','
        << csv_number(std::abs(r.value.value)) << ',' << csv_number(r.value.bound) << '\n';
}

/// Rows sorted by value, ties by mass; words are space-separated labels.
inline void write_cloud_csv(std::ostream& out, const DepthCloud& cloud) {
  out << "word,value,mass,lo,hi\n";
  for (const auto& e : sorted_by_value(cloud.entries))
    out << word_string(e.word) << ',' << csv_number(e.value) << ',' << csv_number(e.mass) << ','
        << csv_number(e.lo) << ',' << csv_number(e.hi) << '\n';
}

}  // namespace measure_lab
