#pragma once

// Shared generators and small oracles for the test suites.

#include <random>
#include <string>
#include <vector>

#include "measure_lab/automaton.hpp"
#include "measure_lab/fixtures.hpp"

namespace test_support {

namespace ml = measure_lab;

inline ml::AutomatonDocument fixture(std::string_view json) { return ml::parse_automaton_document(std::string(json)); }

/// Random automaton with up to `max_states` states and labels in
/// [-max_label, max_label]; edges are added with probability `density`.
inline ml::LabeledAutomaton random_automaton(std::mt19937_64& rng, int max_states = 5, ml::Label max_label = 2,
                                             double density = 0.35) {
  std::uniform_int_distribution<int> ns(1, max_states);
  std::bernoulli_distribution coin(density);
  const int n = ns(rng);
  std::vector<std::string> states;
  for (int i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
  std::vector<ml::Label> alphabet;
  for (ml::Label a = -max_label; a <= max_label; ++a) alphabet.push_back(a);
  std::vector<ml::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (auto a : alphabet)
        if (coin(rng)) edges.push_back({std::size_t(i), std::size_t(j), a});
  return ml::LabeledAutomaton(states, alphabet, edges, {0}, {std::size_t(n - 1)});
}

/// Random primitive automaton (rejection sampling).
inline ml::LabeledAutomaton random_primitive_automaton(std::mt19937_64& rng, int max_states = 5,
                                                       ml::Label max_label = 2) {
  for (;;) {
    auto a = random_automaton(rng, max_states, max_label, 0.15);
    if (ml::primitivity_check(a).primitive) return a;
  }
}

}  // namespace test_support
