// Classifies every bundled fixture and prints a one-line summary each: the
// verdict, the atoms of atomic measures, and a few CDF brackets.
//
//   ./classify_fixtures

#include <cstdio>
#include <string>

#include "measure_lab/measure_lab.hpp"

namespace ml = measure_lab;

int main() {
  for (const auto& f : ml::fixtures::kAll) {
    auto doc = ml::parse_automaton_document(std::string(f.json));
    const auto& a = doc.automaton;
    auto beta = ml::make_pisot(*doc.minpoly);
    auto verdict = ml::classify(a, beta, ml::ClassifyOptions{2, 1e-8, 1});

    std::printf("%-20s beta=%.6f lambda=%.6f  %s", std::string(f.file_name).c_str(), verdict.beta, verdict.lambda,
                ml::to_string(verdict.kind));
    if (verdict.kind == ml::VerdictKind::Atomic) {
      std::printf(" with %zu atoms:", verdict.atoms.size());
      for (const auto& atom : verdict.atoms) std::printf(" %+.4f (mass %.4f)", atom.value_double, atom.mass);
      std::printf("\n");
      continue;
    }
    std::printf(", evidence %s", ml::to_string(verdict.evidence));
    if (verdict.scan) std::printf(" (max |psi_hat| %.2e)", verdict.scan->max_abs);
    std::printf("\n");

    auto pd = ml::perron(a);
    auto bounds = ml::value_bounds(a, beta);
    const double lo = bounds.global_lower, hi = bounds.global_upper;
    std::printf("%-20s CDF on [%.3f, %.3f]:", "", lo, hi);
    for (int k = 1; k <= 3; ++k) {
      double x = lo + (hi - lo) * k / 4;
      auto b = ml::cdf_bounds(a, beta, pd, 12, x, bounds);
      std::printf("  F(%.3f) in [%.4f, %.4f]", x, b.lower, b.upper);
    }
    std::printf("\n");
  }
}
