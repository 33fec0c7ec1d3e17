#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "measure_lab/classify.hpp"
#include "measure_lab/fixtures.hpp"
#include "measure_lab/zero_automaton.hpp"
#include "test_support.hpp"

namespace ml = measure_lab;
using test_support::fixture;

namespace {

ml::PisotNumber golden() { return ml::make_pisot({-1, -1, 1}); }

double bisect(double lo, double hi, double (*f)(double)) {
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return lo;
}

ml::LabeledAutomaton scaled(const ml::LabeledAutomaton& a, ml::Label s) {
  std::vector<ml::Label> alpha;
  for (auto l : a.alphabet()) alpha.push_back(l * s);
  std::vector<ml::Edge> edges;
  for (auto e : a.edges()) edges.push_back({e.from, e.to, e.label * s});
  return ml::LabeledAutomaton(a.states(), alpha, edges, a.initial(), a.terminal());
}

ml::LabeledAutomaton loops(std::vector<ml::Label> labels) {
  std::vector<ml::Edge> edges;
  for (auto l : labels) edges.push_back({0, 0, l});
  return ml::LabeledAutomaton({"s"}, labels, edges, {0}, {0});
}

struct ZeroCase {
  std::vector<ml::BigInt> minpoly;
  std::vector<ml::Label> alphabet;
};

std::vector<ZeroCase> zero_cases() {
  return {{{-1, -1, 1}, {-1, 0, 1}},     {{-1, -1, 1}, {-2, -1, 0, 1, 2}}, {{-2, 1}, {-1, 0, 1}},
          {{1, -3, 1}, {-1, 0, 1}},      {{-1, -1, -1, 1}, {-1, 0, 1}},   {{-1, 0, -1, 1}, {-1, 0, 1}},
          {{-1, -1, 1}, {-2, 0, 2}}};
}

}  // namespace

TEST(FiniteImage, ZeroAutomataHaveIdentityValueMap) {
  for (const auto& zc : zero_cases()) {
    auto p = ml::make_pisot(zc.minpoly);
    auto za = ml::build_zero_automaton(p, zc.alphabet);
    auto fi = ml::finite_image_test(za.automaton(), p);
    ASSERT_TRUE(fi.finite) << p.minpoly_string();
    for (std::size_t v = 0; v < za.values.size(); ++v) EXPECT_EQ(fi.c[v], ml::QBeta(za.values[v]));
    auto verdict = ml::classify(za.automaton(), p);
    EXPECT_EQ(verdict.kind, ml::VerdictKind::Atomic);
    EXPECT_LE(verdict.atoms.size(), za.automaton().num_states());
    double total = 0;
    for (const auto& at : verdict.atoms) {
      EXPECT_GT(at.mass, 0);
      total += at.mass;
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
    // atom at zero carries exactly the stationary mass of the zero state
    auto pi = ml::start_distribution(ml::perron(za.automaton()));
    auto zero = std::find_if(verdict.atoms.begin(), verdict.atoms.end(),
                             [](const ml::Atom& at) { return at.value.is_zero(); });
    ASSERT_NE(zero, verdict.atoms.end());
    EXPECT_DOUBLE_EQ(zero->mass, pi[0]);
  }
}

TEST(FiniteImage, TwoLoopsGiveWitness) {
  auto p = golden();
  auto a = loops({0, 1});
  auto fi = ml::finite_image_test(a, p);
  EXPECT_FALSE(fi.finite);
  ASSERT_TRUE(fi.witness);
  EXPECT_EQ(a.edges()[*fi.witness].label, 1);
  EXPECT_TRUE(fi.c[0].is_zero());
  auto verdict = ml::classify(a, p, {1, 1e-8, 1});
  EXPECT_EQ(verdict.kind, ml::VerdictKind::Continuous);
  EXPECT_TRUE(verdict.atoms.empty());
}

TEST(FiniteImage, GeometricSeries) {
  auto p = ml::make_pisot({-2, 1});
  auto a = loops({1});
  auto fi = ml::finite_image_test(a, p);
  ASSERT_TRUE(fi.finite);
  EXPECT_EQ(fi.c[0], ml::QBeta::from_rational(1, 1));
  auto v = ml::classify(a, p);
  ASSERT_EQ(v.atoms.size(), 1u);
  EXPECT_DOUBLE_EQ(v.atoms[0].mass, 1.0);
  EXPECT_EQ(v.atoms[0].value, ml::QBeta::from_rational(1, 1));
}

TEST(FiniteImage, Errors) {
  auto p = golden();
  ml::LabeledAutomaton split({"a", "b"}, {0}, {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  try {
    ml::finite_image_test(split, p);
    FAIL();
  } catch (const ml::Error& e) {
    EXPECT_EQ(e.kind(), ml::ErrorKind::NotStronglyConnected);
  }
  ml::LabeledAutomaton cycle({"a", "b"}, {0, 1}, {{0, 1, 0}, {1, 0, 1}});
  EXPECT_TRUE(ml::finite_image_test(cycle, p).finite);  // strongly connected is enough
  try {
    ml::classify(cycle, p);
    FAIL();
  } catch (const ml::Error& e) {
    EXPECT_EQ(e.kind(), ml::ErrorKind::NotPrimitive);
  }
}

TEST(Atoms, SevenEdgeFixture) {
  auto p = golden();
  auto a = fixture(ml::fixtures::kExample1Edge7).automaton;
  auto v = ml::classify(a, p);
  ASSERT_EQ(v.kind, ml::VerdictKind::Atomic);
  ASSERT_EQ(v.atoms.size(), 5u);
  double g = bisect(1, 2, [](double x) { return x * x * x - x * x - 2; });
  double g3 = g * g * g;
  // values -1, -(beta-1), 0, beta-1, 1 (sorted)
  std::vector<ml::QBeta> expect{ml::QBeta(ml::BetaInt({-1, 0})), ml::QBeta(ml::BetaInt({1, -1})),
                                ml::QBeta(ml::BetaInt({0, 0})), ml::QBeta(ml::BetaInt({-1, 1})),
                                ml::QBeta(ml::BetaInt({1, 0}))};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(v.atoms[i].value, expect[i]);
    EXPECT_NEAR(v.atoms[i].mass, (i == 2 ? g3 : 1.0) / (g3 + 4), 1e-12);
  }
  // 1/beta = beta - 1 exactly
  auto inv = ml::qbeta_div(ml::QBeta::from_rational(1, 2), ml::QBeta(ml::BetaInt({0, 1})), p);
  EXPECT_EQ(inv, expect[3]);
}

TEST(Atoms, NineEdgeFixture) {
  auto p = golden();
  auto a = fixture(ml::fixtures::kExample1Edge9).automaton;
  auto v = ml::classify(a, p);
  ASSERT_EQ(v.kind, ml::VerdictKind::Atomic);
  ASSERT_EQ(v.atoms.size(), 5u);
  double g = bisect(1, 2, [](double x) { return x * x * x - x * x - x - 1; });
  EXPECT_NEAR(v.lambda, g, 1e-12);
  double w0 = (g * g - 1) * (g * g - 1), total = w0 + 4 * g;
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(v.atoms[i].mass, (i == 2 ? w0 : g) / total, 1e-12);
}

TEST(Classify, Examples) {
  auto p = golden();
  auto fib = fixture(ml::fixtures::kFibonacci).automaton;
  auto v = ml::classify(fib, p, {2, 1e-8, 1});
  EXPECT_EQ(v.kind, ml::VerdictKind::Continuous);
  EXPECT_EQ(v.evidence, ml::Evidence::Inconclusive);
  ASSERT_TRUE(v.scan);
  EXPECT_LT(v.scan->max_abs, 1e-6);

  auto three = ml::make_pisot({-3, 1});
  auto d = ml::classify(loops({0, 1}), three);
  EXPECT_EQ(d.kind, ml::VerdictKind::Continuous);
  EXPECT_EQ(d.evidence, ml::Evidence::SingularByDimension);
  EXPECT_NEAR(d.dimension_bound, std::log(2.0) / std::log(3.0), 1e-12);
  EXPECT_FALSE(d.scan);

  // digits {0,1,2} in base 2: lambda = 3 > beta, so the scan decides;
  // nu^(2t) = nu^(t) at integers, hence psi(1) = nu^(1) != 0
  auto two = ml::make_pisot({-2, 1});
  auto f = ml::classify(loops({0, 1, 2}), two, {2, 1e-8, 1});
  EXPECT_EQ(f.evidence, ml::Evidence::SingularByFourier);
  // digits {0,1} in base 2 is Lebesgue on [0,1]: every psi(m) vanishes
  auto leb = ml::classify(loops({0, 1}), two, {3, 1e-8, 1});
  EXPECT_EQ(leb.evidence, ml::Evidence::Inconclusive);
  EXPECT_LT(leb.scan->max_abs, 1e-8);

  // golden Bernoulli convolution: |psi(1)| = 0.0066 exceeds the threshold
  auto b = ml::classify(loops({0, 1}), p, {1, 1e-8, 1});
  EXPECT_EQ(b.evidence, ml::Evidence::SingularByFourier);
  EXPECT_GT(b.scan->max_abs, b.fourier_threshold);
}

TEST(Classify, Purity) {
  std::mt19937_64 rng(99);
  auto p = golden();
  int atomic = 0, continuous = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto a = test_support::random_primitive_automaton(rng, 4, 1);
    auto v = ml::classify(a, p, {1, 1e-8, 1});
    EXPECT_EQ(v.kind == ml::VerdictKind::Atomic, v.finite_image.finite);
    if (v.kind == ml::VerdictKind::Atomic) {
      ++atomic;
      EXPECT_EQ(v.evidence, ml::Evidence::None);
      EXPECT_LE(v.atoms.size(), a.num_states());
      double total = 0;
      for (const auto& at : v.atoms) total += at.mass;
      EXPECT_NEAR(total, 1.0, 1e-10);
    } else {
      ++continuous;
      EXPECT_NE(v.evidence, ml::Evidence::None);
      EXPECT_TRUE(v.atoms.empty());
    }
  }
  EXPECT_GT(continuous, 0);
}

TEST(Atoms, ScalingEquivariance) {
  for (const auto& zc : zero_cases()) {
    auto p = ml::make_pisot(zc.minpoly);
    auto za = ml::build_zero_automaton(p, zc.alphabet);
    std::vector<ml::LabeledAutomaton> bases{za.automaton()};
    if (zc.minpoly == std::vector<ml::BigInt>{-1, -1, 1}) bases.push_back(fixture(ml::fixtures::kExample1Edge7).automaton);
    for (const auto& base : bases) {
      auto pd = ml::perron(base);
      auto at = ml::atoms(base, p, pd);
      for (ml::Label s : {2L, -3L}) {
        auto sa = scaled(base, s);
        auto spd = ml::perron(sa);
        auto sat = ml::atoms(sa, p, spd);
        ASSERT_EQ(sat.size(), at.size());
        for (const auto& x : at) {
          auto target = ml::Rational(s) * x.value;
          auto it = std::find_if(sat.begin(), sat.end(), [&](const ml::Atom& y) { return y.value == target; });
          ASSERT_NE(it, sat.end());
          EXPECT_NEAR(it->mass, x.mass, 1e-12);
        }
      }
    }
  }
}

// phi+ of a sampled path equals c(start); truncating at depth 40 and
// snapping to the nearest atom recovers it, so atom frequencies follow the
// masses.
TEST(Atoms, MonteCarloConcordance) {
  auto p = golden();
  for (auto json : {ml::fixtures::kExample1Edge7, ml::fixtures::kExample1Edge9}) {
    auto a = fixture(json).automaton;
    auto pd = ml::perron(a);
    auto at = ml::atoms(a, p, pd);
    std::mt19937_64 rng(1234);
    const int n = 100000, depth = 40;
    std::vector<int> hits(at.size(), 0);
    const double beta = p.beta_double();
    for (int i = 0; i < n; ++i) {
      auto run = ml::sample_run(pd, a, depth, rng);
      double value = 0, scale = 1;
      for (auto l : run.word) value += l * (scale /= beta);
      std::size_t best = 0;
      for (std::size_t k = 1; k < at.size(); ++k)
        if (std::fabs(at[k].value_double - value) < std::fabs(at[best].value_double - value)) best = k;
      ASSERT_LT(std::fabs(at[best].value_double - value), 1e-6);
      ++hits[best];
    }
    for (std::size_t k = 0; k < at.size(); ++k) {
      double sigma = std::sqrt(at[k].mass * (1 - at[k].mass) / n);
      EXPECT_NEAR(double(hits[k]) / n, at[k].mass, 3 * sigma);
    }
  }
}
