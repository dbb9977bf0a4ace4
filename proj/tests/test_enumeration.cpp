#include <gtest/gtest.h>

#include <vector>

#include "parid/error.hpp"
#include "parid/theory.hpp"

using namespace parid;

namespace {

using Multiset = std::vector<std::uint64_t>;

ParidModel finite_model(std::vector<double> pmf, double delta = 0.0) {
  ParidConfig config;
  config.custom_pmf = std::move(pmf);
  config.delta = delta;
  return resolve_model(config);
}

} // namespace

TEST(Enumeration, ConstantOneEdge) {
  const std::vector<double> one{1.0};
  const auto two = enumerate_exact(one, 0.0, 2);
  ASSERT_EQ(two.law.size(), 1u);
  EXPECT_DOUBLE_EQ(two.law.at(Multiset{2, 1, 1}), 1.0);

  const auto three = enumerate_exact(one, 0.0, 3);
  ASSERT_EQ(three.law.size(), 2u);
  EXPECT_NEAR(three.law.at(Multiset{3, 1, 1, 1}), 0.5, 1e-15);
  EXPECT_NEAR(three.law.at(Multiset{2, 2, 1, 1}), 0.5, 1e-15);

  const auto four = enumerate_exact(one, 0.0, 4);
  EXPECT_NEAR(four.law.at(Multiset{4, 1, 1, 1, 1}), 1.0 / 4.0, 1e-15);
  EXPECT_NEAR(four.law.at(Multiset{3, 2, 1, 1, 1}), 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(four.law.at(Multiset{2, 2, 2, 1, 1}), 1.0 / 6.0, 1e-15);
}

// Exact rationals from an independent edge-by-edge expansion in rational arithmetic.
TEST(Enumeration, TwoValueLawMatchesRationalExpansion) {
  const std::vector<double> toy{0.7, 0.3};
  const auto e = enumerate_exact(toy, 0.0, 3);
  ASSERT_EQ(e.law.size(), 15u);
  EXPECT_NEAR(e.law.at(Multiset{2, 2, 1, 1}), 343.0 / 2000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{2, 2, 2, 2}), 147.0 / 8000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 1, 1, 1}), 343.0 / 2000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 2, 2, 1}), 1617.0 / 8000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 3, 1, 1}), 147.0 / 2000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 3, 2, 2}), 273.0 / 8000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 3, 3, 1}), 63.0 / 8000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 2, 1, 1}), 147.0 / 1000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 2, 2, 2}), 21.0 / 800.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 3, 2, 1}), 651.0 / 8000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 3, 3, 2}), 243.0 / 32000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 4, 2, 2}), 351.0 / 64000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{5, 2, 2, 1}), 63.0 / 1600.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{5, 3, 2, 2}), 27.0 / 2560.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{6, 2, 2, 2}), 27.0 / 8000.0, 1e-15);
}

TEST(Enumeration, PositiveDelta) {
  const std::vector<double> toy{0.7, 0.3};
  const auto e = enumerate_exact(toy, 0.5, 3);
  EXPECT_NEAR(e.law.at(Multiset{2, 2, 1, 1}), 1029.0 / 5500.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{3, 2, 2, 1}), 64239.0 / 302500.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{4, 2, 1, 1}), 161259.0 / 1210000.0, 1e-15);
  EXPECT_NEAR(e.law.at(Multiset{6, 2, 2, 2}), 2187.0 / 722000.0, 1e-15);
}

TEST(Enumeration, TotalMassIsOne) {
  const std::vector<std::vector<double>> laws{{1.0}, {0.7, 0.3}, {0.2, 0.5, 0.3}, {0.0, 0.0, 1.0}};
  for (const auto &pmf : laws)
    for (double delta : {-0.5, 0.0, 2.0})
      for (std::uint64_t t : {1, 2, 3, 4}) {
        const auto e = enumerate_exact(pmf, delta, t);
        EXPECT_NEAR(e.total_mass(), 1.0, 1e-12) << pmf.size() << " " << delta << " " << t;
        for (const auto &[degrees, p] : e.law) {
          std::uint64_t sum = 0;
          for (auto d : degrees)
            sum += d;
          EXPECT_EQ(degrees.size(), t + 1);
          EXPECT_EQ(sum % 2, 0u);
        }
      }
}

TEST(Enumeration, Guards) {
  const std::vector<double> four{0.25, 0.25, 0.25, 0.25};
  EXPECT_THROW(enumerate_exact(four, 0.0, 3), DomainError);
  const std::vector<double> short_mass{0.5, 0.4};
  EXPECT_THROW(enumerate_exact(short_mass, 0.0, 3), DomainError);
  const std::vector<double> toy{0.7, 0.3};
  EXPECT_THROW(enumerate_exact(toy, -1.0, 3), DomainError);
  EXPECT_THROW(enumerate_exact(toy, 0.0, 12, 1000), ResourceGuardError);
}

TEST(Enumeration, MonteCarloAgrees) {
  for (const auto &pmf : {std::vector<double>{1.0}, std::vector<double>{0.7, 0.3}}) {
    const auto exact = enumerate_exact(pmf, 0.0, 3);
    const auto sampled = sample_degree_law(finite_model(pmf), 3, 200'000, 17);
    EXPECT_LT(total_variation(exact.law, sampled), 0.01);
  }
}

TEST(Enumeration, TotalVariation) {
  const DegreeLaw a{{Multiset{1, 1}, 0.5}, {Multiset{2, 2}, 0.5}};
  const DegreeLaw b{{Multiset{1, 1}, 0.25}, {Multiset{3, 3}, 0.75}};
  EXPECT_DOUBLE_EQ(total_variation(a, b), 0.75);
  EXPECT_DOUBLE_EQ(total_variation(a, a), 0.0);
}
