#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "measure_lab/fixtures.hpp"
#include "measure_lab/fourier.hpp"
#include "measure_lab/parry.hpp"
#include "test_support.hpp"

namespace ml = measure_lab;
using test_support::fixture;
using ml::Complex;

namespace {

const double kPi = std::numbers::pi;

ml::LabeledAutomaton full_shift(ml::Label k) {
  std::vector<ml::Label> alpha;
  std::vector<ml::Edge> edges;
  for (ml::Label a = 0; a < k; ++a) {
    alpha.push_back(a);
    edges.push_back({0, 0, a});
  }
  return ml::LabeledAutomaton({"s"}, alpha, edges, {0}, {0});
}

// nu = unif[0,1] * unif[0,2] for digits 0..3 in base 2.
Complex base2_closed_form(double t) {
  if (t == 0) return 1;
  const Complex i(0, 1);
  auto factor = [&](double s) { return (1.0 - std::exp(-2 * kPi * i * s)) / (2 * kPi * i * s); };
  return factor(t) * factor(2 * t);
}

// Direct product over Bernoulli factors for a one-state automaton (oracle).
Complex bernoulli_product(const std::vector<ml::Label>& digits, double beta, double t, int n = 200) {
  Complex prod = 1;
  double s = t;
  for (int k = 0; k < n; ++k) {
    s /= beta;
    Complex f = 0;
    for (auto a : digits) f += std::exp(Complex(0, -2 * kPi * a * s));
    prod *= f / double(digits.size());
  }
  return prod;
}

struct Case {
  std::string_view json;
  std::vector<ml::BigInt> minpoly;
};

std::vector<Case> primitive_fixtures() {
  return {{ml::fixtures::kFibonacci, {-1, -1, 1}},
          {ml::fixtures::kExample1Edge7, {-1, -1, 1}},
          {ml::fixtures::kExample1Edge9, {-1, -1, 1}},
          {ml::fixtures::kFullShift4, {-2, 1}},
          {ml::fixtures::kFig3, {1, -3, 1}}};
}

}  // namespace

TEST(NuHat, ZeroIsOneExactly) {
  for (const auto& c : primitive_fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    auto v = ml::nu_hat(a, p, pd, 0.0);
    EXPECT_EQ(v.value, Complex(1, 0));
    if (!a.initial().empty()) {
      EXPECT_EQ(ml::nu_hat_initial(a, p, pd, 0.0).value, Complex(1, 0));
    }
    EXPECT_EQ(ml::psi_hat(a, p, pd, ml::BetaInt::zero(p.degree())).value, Complex(1, 0));
  }
}

TEST(NuHat, FullShiftClosedForm) {
  auto a = full_shift(4);
  auto p = ml::make_pisot({-2, 1});
  auto pd = ml::perron(a);
  auto v = ml::nu_hat(a, p, pd, 0.25, 1e-10);
  // sqrt(2)/(pi/2) * 2/pi
  EXPECT_NEAR(std::abs(v.value), 4 * std::sqrt(2.0) / (kPi * kPi), 1e-10);
  EXPECT_NEAR(std::abs(v.value), 0.5731, 1e-4);
  EXPECT_LT(std::abs(v.value - base2_closed_form(0.25)), v.bound + 1e-12);
  auto one = ml::nu_hat(a, p, pd, 1.0, 1e-10);
  EXPECT_LT(std::abs(one.value), 1e-10 + one.bound);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-10, 10);
  for (int i = 0; i < 20; ++i) {
    double t = ut(rng);
    auto w = ml::nu_hat(a, p, pd, t, 1e-9);
    EXPECT_LT(std::abs(w.value - base2_closed_form(t)), w.bound + 1e-12) << t;
  }
}

TEST(NuHat, BernoulliConvolutionOracle) {
  auto a = full_shift(2);
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  for (double t : {0.3, 1.7, -4.2, 9.9}) {
    auto v = ml::nu_hat(a, p, pd, t, 1e-10);
    EXPECT_LT(std::abs(v.value - bernoulli_product({0, 1}, p.beta_double(), t)), v.bound + 1e-12);
  }
}

TEST(NuHat, SymmetryAndModulus) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(-10, 10);
  for (const auto& c : primitive_fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    for (int i = 0; i < 10; ++i) {
      double t = ut(rng);
      auto v = ml::nu_hat(a, p, pd, t, 1e-9);
      auto w = ml::nu_hat(a, p, pd, -t, 1e-9);
      EXPECT_LT(std::abs(v.value - std::conj(w.value)), v.bound + w.bound);
      EXPECT_LE(std::abs(v.value), 1 + v.bound);
    }
  }
}

TEST(NuHat, TruncationStability) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-10, 10);
  for (const auto& c : primitive_fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    for (int i = 0; i < 20; ++i) {
      double t = ut(rng);
      auto coarse = ml::nu_hat(a, p, pd, t, 1e-6);
      auto fine = ml::nu_hat(a, p, pd, t, 1e-10);
      EXPECT_LE(coarse.bound, 1e-6 * 1.01);
      EXPECT_LE(std::abs(coarse.value - fine.value), 1.1e-6);
      EXPECT_LE(std::abs(coarse.value - fine.value), coarse.bound + fine.bound);
    }
  }
}

TEST(NuHatInitial, Examples) {
  auto a = fixture(ml::fixtures::kExample1Edge7).automaton;
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ut(-10, 10);
  for (int i = 0; i < 20; ++i) {
    // every path from the zero state has value 0
    auto v = ml::nu_hat_initial(a, p, pd, ut(rng), 1e-10);
    EXPECT_LT(std::abs(v.value - Complex(1, 0)), v.bound + 1e-12);
  }
  ml::LabeledAutomaton no_init({"s"}, {0, 1}, {{0, 0, 0}, {0, 0, 1}});
  auto pd2 = ml::perron(no_init);
  EXPECT_THROW(ml::nu_hat_initial(no_init, p, pd2, 1.0), ml::Error);
}

// For a zero automaton phi+ started at state v equals v, so nu is the atomic
// measure sum_v pi(v) delta_v and nu^ is an almost periodic function.
TEST(NuHat, AtomicFixtureIsAlmostPeriodic) {
  for (auto json : {ml::fixtures::kExample1Edge7, ml::fixtures::kExample1Edge9}) {
    auto a = fixture(json).automaton;
    auto p = ml::make_pisot({-1, -1, 1});
    auto pd = ml::perron(a);
    auto pi = ml::start_distribution(pd);
    const double phi = p.beta_double();
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ut(-10, 10);
    for (int i = 0; i < 20; ++i) {
      double t = ut(rng);
      Complex expect = 0;
      for (std::size_t v = 0; v < a.num_states(); ++v) {
        auto coords = ml::parse_integer_list(a.states()[v].substr(1, a.states()[v].size() - 2));
        double value = coords[0].get_d() + coords[1].get_d() * phi;
        expect += pi[v] * std::exp(Complex(0, -2 * kPi * t * value));
      }
      auto got = ml::nu_hat(a, p, pd, t, 1e-10);
      EXPECT_LT(std::abs(got.value - expect), got.bound + 1e-9) << t;
    }
  }
}

TEST(PsiHat, IntegerBaseEqualsNuHatExactly) {
  auto a = fixture(ml::fixtures::kFullShift4).automaton;
  auto p = ml::make_pisot({-2, 1});
  auto pd = ml::perron(a);
  for (long m = -5; m <= 5; ++m) {
    auto psi = ml::psi_hat(a, p, pd, ml::BetaInt::from_int(m, 1), 1e-10);
    auto nu = ml::nu_hat(a, p, pd, double(m), 1e-10);
    EXPECT_EQ(psi.value, nu.value) << m;
    EXPECT_EQ(psi.head_factors, 0u);
  }
}

TEST(PsiHat, BernoulliConvolutionLimit) {
  // lim nu^(beta^k) for digits {0,1}, golden beta; oracle value from a
  // 60-digit direct product at k = 40
  auto a = full_shift(2);
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  auto v = ml::psi_hat(a, p, pd, ml::BetaInt::one(2), 1e-10);
  EXPECT_NEAR(v.value.real(), 0.006613493035, 1e-9);
  EXPECT_NEAR(v.value.imag(), 0.0, 1e-9);
}

TEST(PsiHat, ConsistencyWithLargePowers) {
  const unsigned long k = 25;
  for (const auto& c : primitive_fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    const double m = double(a.max_abs_label());
    for (auto z : {ml::BetaInt::one(p.degree()), ml::scan_points(p.degree(), 1).back()}) {
      auto psi = ml::psi_hat(a, p, pd, z, 1e-10);
      auto nu = ml::nu_hat_at_beta_power(a, p, pd, z, k, 1e-10);
      // nu^(z beta^k) differs from the limit by the head factors j >= k
      double head = 0;
      for (int q = 2; q <= p.degree(); ++q) {
        double zq = std::abs(ml::bint_embed(z, q, p).mid_double());
        double bq = std::abs(p.conjugates_double()[q - 2]);
        head += zq * std::pow(bq, double(k)) / (1 - bq);
      }
      EXPECT_LE(std::abs(psi.value - nu.value), psi.bound + nu.bound + 2 * kPi * m * head + 1e-12)
          << p.minpoly_string() << " " << z.to_string();
    }
  }
}

TEST(PsiHat, TruncationStability) {
  for (const auto& c : primitive_fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    auto z = ml::BetaInt::one(p.degree());
    auto coarse = ml::psi_hat(a, p, pd, z, 1e-8);
    auto fine = ml::psi_hat(a, p, pd, z, 1e-12);
    EXPECT_GT(fine.head_factors + fine.tail_factors, coarse.head_factors + coarse.tail_factors);
    EXPECT_LE(std::abs(coarse.value - fine.value), coarse.bound + fine.bound);
  }
}

TEST(PsiHat, ConjugateSymmetry) {
  auto a = fixture(ml::fixtures::kFig3).automaton;
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  ml::BetaInt z({1, 2});
  auto v = ml::psi_hat(a, p, pd, z, 1e-10);
  auto w = ml::psi_hat(a, p, pd, -z, 1e-10);
  EXPECT_LT(std::abs(v.value - std::conj(w.value)), v.bound + w.bound);
}

TEST(Scan, PointsAndDeterminism) {
  EXPECT_EQ(ml::scan_points(2, 1).size(), 4u);
  EXPECT_EQ(ml::scan_points(2, 3).size(), 24u);
  EXPECT_EQ(ml::scan_points(3, 1).size(), 13u);
  auto pts = ml::scan_points(2, 2);
  EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
  for (const auto& z : pts) {
    auto first = std::find_if(z.coords().begin(), z.coords().end(), [](const ml::BigInt& v) { return v != 0; });
    ASSERT_NE(first, z.coords().end());
    EXPECT_GT(*first, 0);
  }

  auto a = fixture(ml::fixtures::kFig3).automaton;
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  auto serial = ml::rajchman_scan(a, p, pd, 2, 1e-8, 1);
  auto parallel = ml::rajchman_scan(a, p, pd, 2, 1e-8, 3);
  ASSERT_EQ(serial.table.size(), parallel.table.size());
  for (std::size_t i = 0; i < serial.table.size(); ++i) {
    EXPECT_EQ(serial.table[i].z, parallel.table[i].z);
    EXPECT_EQ(serial.table[i].psi.value, parallel.table[i].psi.value);
  }
  EXPECT_EQ(serial.argmax, parallel.argmax);
  EXPECT_THROW(ml::rajchman_scan(a, p, pd, 0), ml::Error);
}

TEST(Scan, FibonacciVanishes) {
  auto a = fixture(ml::fixtures::kFibonacci).automaton;
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  auto report = ml::rajchman_scan(a, p, pd, 2, 1e-10);
  EXPECT_LT(report.max_abs, 1e-6);
}

TEST(Scan, BernoulliConvolutionDoesNotVanish) {
  auto a = full_shift(2);
  auto p = ml::make_pisot({-1, -1, 1});
  auto pd = ml::perron(a);
  auto report = ml::rajchman_scan(a, p, pd, 1, 1e-10);
  // all four points are +-beta^j, so they share the modulus of psi(1)
  EXPECT_NEAR(report.max_abs, 0.006613493035, 1e-9);
  for (const auto& e : report.table) EXPECT_NEAR(std::abs(e.psi.value), report.max_abs, 1e-9);
}
