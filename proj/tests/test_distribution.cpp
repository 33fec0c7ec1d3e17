#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "measure_lab/classify.hpp"
#include "measure_lab/distribution.hpp"
#include "measure_lab/fixtures.hpp"
#include "measure_lab/fourier.hpp"
#include "measure_lab/zero_automaton.hpp"
#include "test_support.hpp"

namespace ml = measure_lab;
using test_support::fixture;

namespace {

const double kPhi = (1 + std::sqrt(5.0)) / 2;

ml::LabeledAutomaton full_shift(ml::Label k) {
  std::vector<ml::Label> alpha;
  std::vector<ml::Edge> edges;
  for (ml::Label a = 0; a < k; ++a) {
    alpha.push_back(a);
    edges.push_back({0, 0, a});
  }
  return ml::LabeledAutomaton({"s"}, alpha, edges, {0}, {0});
}

// CDF of the hat-shaped density h of digits 0..3 in base 2.
double hat_cdf(double x) {
  if (x <= 0) return 0;
  if (x <= 1) return x * x / 4;
  if (x <= 2) return 0.25 + (x - 1) / 2;
  if (x <= 3) return 1 - (3 - x) * (3 - x) / 4;
  return 1;
}

// CDF of the invariant density of x -> beta x mod 1 for the golden ratio:
// proportional to beta on [0, 1/beta) and to 1 on [1/beta, 1].
double parry_cdf(double x) {
  const double b = 1 / (2 - 1 / kPhi), a = kPhi * b;
  if (x <= 0) return 0;
  if (x < 1 / kPhi) return a * x;
  if (x < 1) return a / kPhi + b * (x - 1 / kPhi);
  return 1;
}

struct Case {
  std::string_view json;
  std::vector<ml::BigInt> minpoly;
};

std::vector<Case> fixtures() {
  return {{ml::fixtures::kFibonacci, {-1, -1, 1}},
          {ml::fixtures::kExample1Edge7, {-1, -1, 1}},
          {ml::fixtures::kExample1Edge9, {-1, -1, 1}},
          {ml::fixtures::kFullShift4, {-2, 1}},
          {ml::fixtures::kFig3, {1, -3, 1}}};
}

}  // namespace

TEST(ValueBounds, Examples) {
  auto p = ml::make_pisot({-1, -1, 1});
  auto fib = fixture(ml::fixtures::kFibonacci).automaton;
  auto b = ml::value_bounds(fib, p);
  EXPECT_NEAR(b.lower[0], 0, 1e-12);
  EXPECT_NEAR(b.upper[0], 1, 1e-12);
  EXPECT_LE(b.lower[0], 0);
  EXPECT_GE(b.upper[0], 1);

  auto two = ml::make_pisot({-2, 1});
  auto f = ml::value_bounds(full_shift(4), two);
  EXPECT_NEAR(f.global_lower, 0, 1e-12);
  EXPECT_NEAR(f.global_upper, 3, 1e-12);

  auto za = ml::build_zero_automaton(p, {-1, 0, 1});
  auto z = ml::value_bounds(za.automaton(), p);
  EXPECT_NEAR(z.lower[0], -z.upper[0], 1e-12);
  EXPECT_LT(z.lower[0], 0);
  EXPECT_GT(z.upper[0], 0);
}

TEST(ValueBounds, DeadState) {
  auto p = ml::make_pisot({-1, -1, 1});
  ml::LabeledAutomaton dead({"a", "b"}, {0}, {{0, 1, 0}});
  try {
    ml::value_bounds(dead, p);
    FAIL();
  } catch (const ml::Error& e) {
    EXPECT_EQ(e.kind(), ml::ErrorKind::DeadState);
  }
}

TEST(DepthCloud, Examples) {
  auto p = ml::make_pisot({-1, -1, 1});
  auto fib = fixture(ml::fixtures::kFibonacci).automaton;
  auto pd = ml::perron(fib);
  auto cloud = ml::depth_cloud(fib, p, pd, 2);
  ASSERT_EQ(cloud.entries.size(), 3u);
  EXPECT_EQ(cloud.entries[0].word, (ml::Word{0, 0}));
  EXPECT_EQ(cloud.entries[1].word, (ml::Word{0, 1}));
  EXPECT_EQ(cloud.entries[2].word, (ml::Word{1, 0}));
  double total = 0;
  for (const auto& e : cloud.entries) {
    EXPECT_NEAR(e.mass, ml::cylinder_measure(pd, fib, e.word), 1e-15);
    total += e.mass;
  }
  EXPECT_NEAR(cloud.entries[2].mass, 0.2763932, 1e-7);
  EXPECT_NEAR(total, 1, 1e-12);

  auto two = ml::make_pisot({-2, 1});
  auto f4 = full_shift(4);
  auto c4 = ml::depth_cloud(f4, two, ml::perron(f4), 1);
  ASSERT_EQ(c4.entries.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(c4.entries[i].mass, 0.25, 1e-15);
    EXPECT_DOUBLE_EQ(c4.entries[i].value, 0.5 * double(i));
  }
}

TEST(DepthCloud, Invariants) {
  for (const auto& c : fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    const double beta = p.beta_double();
    for (std::size_t n : {0u, 1u, 4u, 7u}) {
      auto cloud = ml::depth_cloud(a, p, pd, n);
      double total = 0;
      const double spread = cloud.bounds.global_upper - cloud.bounds.global_lower;
      for (const auto& e : cloud.entries) {
        total += e.mass;
        EXPECT_LE(e.lo, e.value + spread * std::pow(beta, -double(n)));
        EXPECT_LE(e.lo, e.hi);
        EXPECT_LE(e.hi - e.lo, spread * std::pow(beta, -double(n)) + 1e-12);
      }
      EXPECT_NEAR(total, 1, 1e-10);
    }
  }
}

TEST(DepthCloud, AtomicCloudsClusterAtAtoms) {
  auto p = ml::make_pisot({-1, -1, 1});
  for (auto json : {ml::fixtures::kExample1Edge7, ml::fixtures::kExample1Edge9}) {
    auto a = fixture(json).automaton;
    auto pd = ml::perron(a);
    auto atoms = ml::atoms(a, p, pd);
    auto cloud = ml::depth_cloud(a, p, pd, 8);
    for (const auto& e : cloud.entries) {
      bool hit = false;
      for (const auto& at : atoms) hit |= e.lo <= at.value_double && at.value_double <= e.hi;
      EXPECT_TRUE(hit);
    }
  }
}

TEST(DepthCloud, CapAndParallel) {
  auto two = ml::make_pisot({-2, 1});
  auto f4 = full_shift(4);
  auto pd = ml::perron(f4);
  EXPECT_THROW(ml::depth_cloud(f4, two, pd, 6, 1000), ml::Error);
  auto serial = ml::depth_cloud(f4, two, pd, 5, ml::kDefaultCloudCap, 1);
  auto parallel = ml::depth_cloud(f4, two, pd, 5, ml::kDefaultCloudCap, 3);
  ASSERT_EQ(serial.entries.size(), parallel.entries.size());
  for (std::size_t i = 0; i < serial.entries.size(); ++i) {
    EXPECT_EQ(serial.entries[i].word, parallel.entries[i].word);
    EXPECT_EQ(serial.entries[i].mass, parallel.entries[i].mass);
  }
}

TEST(Cdf, FullShiftHatDensityAtDepthTwelve) {
  auto two = ml::make_pisot({-2, 1});
  auto f4 = fixture(ml::fixtures::kFullShift4).automaton;
  auto pd = ml::perron(f4);
  auto bounds = ml::value_bounds(f4, two);
  for (double x : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    auto b = ml::cdf_bounds(f4, two, pd, 12, x, bounds);
    EXPECT_LE(b.lower, hat_cdf(x));
    EXPECT_GE(b.upper, hat_cdf(x));
    EXPECT_LE(b.upper - b.lower, 0.01) << x;
  }
  EXPECT_EQ(hat_cdf(0.5), 0.0625);
  EXPECT_EQ(hat_cdf(2.5), 0.9375);
  auto below = ml::cdf_bounds(f4, two, pd, 12, -0.1, bounds);
  EXPECT_EQ(below.lower, 0);
  EXPECT_EQ(below.upper, 0);
  auto above = ml::cdf_bounds(f4, two, pd, 12, 3.0 + 1e-9, bounds);
  EXPECT_NEAR(above.lower, 1, 1e-12);
  EXPECT_NEAR(above.upper, 1, 1e-12);
}

TEST(Cdf, StreamingMatchesCloud) {
  std::mt19937_64 rng(17);
  for (const auto& c : fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    for (std::size_t n : {3u, 6u}) {
      auto cloud = ml::depth_cloud(a, p, pd, n);
      std::uniform_real_distribution<double> ux(cloud.bounds.global_lower - 0.1, cloud.bounds.global_upper + 0.1);
      double prev_lo = 0, prev_hi = 0;
      std::vector<double> xs;
      for (int i = 0; i < 20; ++i) xs.push_back(ux(rng));
      std::sort(xs.begin(), xs.end());
      for (double x : xs) {
        auto from_cloud = ml::cdf_bounds(cloud, x);
        auto streamed = ml::cdf_bounds(a, p, pd, n, x, cloud.bounds);
        EXPECT_NEAR(from_cloud.lower, streamed.lower, 1e-9);
        EXPECT_NEAR(from_cloud.upper, streamed.upper, 1e-9);
        EXPECT_LE(from_cloud.lower, from_cloud.upper);
        EXPECT_GE(from_cloud.lower, prev_lo);
        EXPECT_GE(from_cloud.upper, prev_hi);
        prev_lo = from_cloud.lower;
        prev_hi = from_cloud.upper;
      }
    }
  }
}

TEST(Cdf, RefinementIsNested) {
  for (const auto& c : fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    auto bounds = ml::value_bounds(a, p);
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double x = bounds.global_lower + t * (bounds.global_upper - bounds.global_lower);
      for (std::size_t n = 2; n <= 8; n += 2) {
        auto coarse = ml::cdf_bounds(a, p, pd, n, x, bounds);
        auto fine = ml::cdf_bounds(a, p, pd, n + 2, x, bounds);
        EXPECT_GE(fine.lower, coarse.lower - 1e-12);
        EXPECT_LE(fine.upper, coarse.upper + 1e-12);
      }
    }
  }
}

TEST(Cdf, FibonacciFollowsParryDensity) {
  auto p = ml::make_pisot({-1, -1, 1});
  auto fib = fixture(ml::fixtures::kFibonacci).automaton;
  auto pd = ml::perron(fib);
  auto bounds = ml::value_bounds(fib, p);
  for (double x : {0.2, 0.4, 0.5, 0.6, 0.8}) {
    auto b = ml::cdf_bounds(fib, p, pd, 20, x, bounds);
    EXPECT_LE(b.lower, parry_cdf(x) + 1e-12);
    EXPECT_GE(b.upper, parry_cdf(x) - 1e-12);
  }
  // and not Lebesgue: the bracket at 0.5 excludes 0.5
  auto half = ml::cdf_bounds(fib, p, pd, 20, 0.5, bounds);
  EXPECT_GT(half.lower, 0.5);
}

TEST(Cdf, MonteCarlo) {
  for (const auto& c : fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    auto bounds = ml::value_bounds(a, p);
    const int n = 100000, depth = 40;
    const double beta = p.beta_double();
    const double eps = std::pow(beta, -depth) * std::max(std::fabs(bounds.global_lower), std::fabs(bounds.global_upper));
    std::mt19937_64 rng(2718);
    std::vector<double> values(n);
    for (auto& v : values) {
      auto run = ml::sample_run(pd, a, depth, rng);
      double s = 1;
      v = 0;
      for (auto l : run.word) v += l * (s /= beta);
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (int q = 1; q <= 20; ++q) {
      double x = sorted[std::min<std::size_t>(n - 1, std::size_t(double(q) / 21 * n))];
      double emp = double(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) / n;
      // truncated samples sit within eps of the true value, which matters
      // when x lies on an atom
      auto below = ml::cdf_bounds(a, p, pd, 12, x - eps, bounds);
      auto above = ml::cdf_bounds(a, p, pd, 12, x + eps, bounds);
      double sigma = std::sqrt(std::max(emp * (1 - emp), 1.0 / n) / n);
      EXPECT_GE(emp, below.lower - 3 * sigma) << x;
      EXPECT_LE(emp, above.upper + 3 * sigma) << x;
    }
  }
}

TEST(Cdf, FourierQuadrature) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ut(-10, 10);
  for (const auto& c : fixtures()) {
    auto a = fixture(c.json).automaton;
    auto p = ml::make_pisot(c.minpoly);
    auto pd = ml::perron(a);
    auto cloud = ml::depth_cloud(a, p, pd, 8);
    double radius = 0;
    for (const auto& e : cloud.entries) radius = std::max({radius, e.hi - e.value, e.value - e.lo});
    for (int i = 0; i < 10; ++i) {
      double t = ut(rng);
      ml::Complex sum = 0;
      for (const auto& e : cloud.entries) sum += e.mass * std::exp(ml::Complex(0, -2 * std::numbers::pi * t * e.value));
      auto nu = ml::nu_hat(a, p, pd, t, 1e-10);
      EXPECT_LE(std::abs(nu.value - sum), 2 * std::numbers::pi * std::fabs(t) * radius + nu.bound + 1e-9);
    }
  }
}

TEST(Cdf, InitialCloudMatchesNuHatInitial) {
  auto p = ml::make_pisot({-1, -1, 1});
  auto fib = fixture(ml::fixtures::kFibonacci).automaton;
  auto pd = ml::perron(fib);
  auto cloud = ml::depth_cloud_initial(fib, p, pd, 20);
  ml::Complex sum = 0;
  double total = 0;
  for (const auto& e : cloud.entries) {
    sum += e.mass * std::exp(ml::Complex(0, -2 * std::numbers::pi * 0.5 * e.value));
    total += e.mass;
  }
  EXPECT_NEAR(total, 1, 1e-10);
  auto nu = ml::nu_hat_initial(fib, p, pd, 0.5, 1e-10);
  EXPECT_LT(std::abs(nu.value - sum), 1e-4);
}

TEST(Cloud, MomentsAndOrdering) {
  auto two = ml::make_pisot({-2, 1});
  auto f4 = full_shift(4);
  auto cloud = ml::depth_cloud(f4, two, ml::perron(f4), 8);
  auto m = ml::cloud_moments(cloud);
  EXPECT_NEAR(m.total_mass, 1, 1e-12);
  // the limit has mean 1.5 and variance 1/12 + 4/12; depth 8 truncation
  EXPECT_NEAR(m.mean, 1.5 * (1 - std::pow(2.0, -8)), 1e-12);
  auto sorted = ml::sorted_by_value(cloud.entries);
  EXPECT_TRUE(std::is_sorted(sorted.begin(), sorted.end(),
                             [](const ml::CloudEntry& x, const ml::CloudEntry& y) { return x.value < y.value; }));
}
