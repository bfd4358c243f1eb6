#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gso/errors.hpp"
#include "gso/model.hpp"
#include "gso/rng.hpp"

using namespace gso;

namespace {

Vector random_vector(std::size_t n, RandomStream& stream) {
  Vector v(n);
  for (double& t : v) t = stream.normal();
  return v;
}

GroupPartition singletons(std::size_t n) {
  return GroupPartition::from_sizes(std::vector<std::size_t>(n, 1));
}

Problem example22_problem(double p, double q, double lambda) {
  Matrix a(2, 3);
  a(0, 0) = 2; a(0, 1) = 3; a(0, 2) = 1;
  a(1, 0) = 2; a(1, 1) = 1; a(1, 2) = 3;
  return Problem(a, Vector{2, 2}, singletons(3), Regularizer(p, q, lambda));
}

}  // namespace

TEST_CASE("partition construction and permutation") {
  const auto part = GroupPartition::from_sizes({2, 3, 1});
  CHECK(part.group_count() == 3);
  CHECK(part.total_size() == 6);
  CHECK(part.max_group_size() == 3);
  CHECK(part.group_range(1) == std::pair<std::size_t, std::size_t>{2, 5});
  CHECK_FALSE(part.has_permutation());

  CHECK_THROWS_AS(GroupPartition::from_sizes({}), ConfigError);
  CHECK_THROWS_AS(GroupPartition::from_sizes({2, 0}), ConfigError);

  const auto scattered = GroupPartition::from_scattered({{0, 4}, {2, 1, 3}}, 5);
  CHECK(scattered.has_permutation());
  CHECK(scattered.group_size(0) == 2);
  const Vector x{10, 11, 12, 13, 14};
  const Vector packed = scattered.to_contiguous(x);
  CHECK(packed == Vector{10, 14, 12, 11, 13});
  CHECK(scattered.to_original(packed) == x);

  CHECK_THROWS_AS(GroupPartition::from_scattered({{0, 1}, {1, 2}}, 3), ConfigError);
  CHECK_THROWS_AS(GroupPartition::from_scattered({{0}}, 2), ConfigError);
}

TEST_CASE("regularizer validation") {
  CHECK(Regularizer(2, 0.5, 1.0).is_analytic_pair());
  CHECK(Regularizer(1, 2.0 / 3.0, 0.1).is_analytic_pair());
  CHECK(Regularizer(1, 1.0, 1.0).is_analytic_pair());  // plain l1
  CHECK_FALSE(Regularizer(2, 0.3, 1.0).is_analytic_pair());
  CHECK_THROWS_AS(Regularizer(2, 1.5, 1.0), ConfigError);
  CHECK_THROWS_AS(Regularizer(1, 0.0, 1.0), ConfigError);  // use p = 2 for hard thresholding
  CHECK_THROWS_AS(Regularizer(1.5, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(Regularizer(2, 0.5, 0.0), ConfigError);
}

TEST_CASE("lpq norm examples") {
  const auto pairs = GroupPartition::from_sizes({2, 2});
  CHECK(lpq_norm(Vector{1, 1, 1, 1}, pairs, 2, 1) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lpq_norm(Vector{0, 0, 3, 4}, pairs, 2, 0) == doctest::Approx(1.0));

  // p = q collapses to the plain l_p norm
  RandomStream stream(5);
  for (double pq : {0.5, 1.0, 2.0}) {
    const Vector x = random_vector(6, stream);
    CHECK(lpq_norm(x, GroupPartition::from_sizes({3, 2, 1}), pq, pq) ==
          doctest::Approx(norm_p(x, pq)).epsilon(1e-12));
  }
}

TEST_CASE("objective examples") {
  const Problem prob = example22_problem(1, 1, 0.5);
  CHECK(objective(prob, Vector{1, 0, 0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(objective(prob, Vector{0, 0, 0}) == doctest::Approx(8.0).epsilon(1e-14));
  // the l1 minimizer (0, 1/2 - lambda/32, 1/2 - lambda/32)
  const double c = 0.5 - 0.5 / 32.0;
  CHECK(objective(prob, Vector{0, c, c}) ==
        doctest::Approx(0.5 - 0.25 / 32.0).epsilon(1e-14));
}

TEST_CASE("group norms") {
  const auto pairs = GroupPartition::from_sizes({2, 2});
  CHECK(group_norms(Vector{3, 4, 0, 0}, pairs, 2) == Vector{5, 0});
  CHECK(group_norms(Vector{1, 1, 1, 1}, pairs, 1) == Vector{2, 2});

  RandomStream stream(6);
  const Vector x = random_vector(4, stream);
  for (double g : group_norms(x, pairs, 2)) CHECK(g >= 0.0);
}

TEST_CASE("smallest_k") {
  CHECK(smallest_k(1.0) == 1);
  CHECK(smallest_k(0.5) == 2);
  CHECK(smallest_k(2.0 / 3.0) == 2);
  CHECK(smallest_k(0.3) == 3);
  CHECK_THROWS_AS(smallest_k(0.0), ConfigError);
  CHECK_THROWS_AS(smallest_k(-1.0), ConfigError);
}

// || x ||_q^q <= n^(1 - 2^-K) || x ||_2^q and its grouped version.
TEST_CASE("norm power inequalities") {
  RandomStream stream(7);
  const auto part = GroupPartition::from_sizes({4, 4, 4, 4, 4});
  for (double q : {0.3, 0.5, 2.0 / 3.0, 1.0}) {
    const double k_factor = 1.0 - std::ldexp(1.0, -smallest_k(q));
    for (int rep = 0; rep < 500; ++rep) {
      const Vector x = random_vector(20, stream);
      const double lhs = std::pow(norm_p(x, q), q);
      CHECK(lhs <= std::pow(20.0, k_factor) * std::pow(norm2(x), q) * (1 + 1e-12));

      for (double p : {1.0, 2.0}) {
        const double grouped = lpq_penalty(x, part, p, q);
        const double p2 = lpq_norm(x, part, p, 2.0);
        CHECK(grouped <= std::pow(5.0, k_factor) * std::pow(p2, q) * (1 + 1e-12));
      }
    }
  }
}

// ||x||_{p,q}^q - ||y||_{p,q}^q <= ||x - y||_{p,q}^q for 0 < q <= 1 <= p.
TEST_CASE("penalty triangle inequality") {
  RandomStream stream(8);
  const auto part = GroupPartition::from_sizes({3, 5, 2});
  for (double q : {0.3, 0.5, 2.0 / 3.0, 1.0}) {
    for (double p : {1.0, 2.0}) {
      for (int rep = 0; rep < 500; ++rep) {
        const Vector x = random_vector(10, stream);
        const Vector y = random_vector(10, stream);
        Vector diff(10);
        for (int j = 0; j < 10; ++j) diff[j] = x[j] - y[j];
        const double lhs = lpq_penalty(x, part, p, q) - lpq_penalty(y, part, p, q);
        CHECK(lhs <= lpq_penalty(diff, part, p, q) + 1e-12);
      }
    }
  }
}

// ||x||_{g2} <= ||x||_{g1} whenever 0 < g1 <= g2.
TEST_CASE("plain norm monotonicity in the exponent") {
  RandomStream stream(9);
  const double grid[] = {0.3, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0};
  for (int rep = 0; rep < 500; ++rep) {
    const Vector x = random_vector(8, stream);
    for (std::size_t i = 0; i + 1 < std::size(grid); ++i)
      CHECK(norm_p(x, grid[i + 1]) <= norm_p(x, grid[i]) * (1 + 1e-12));
  }
}

TEST_CASE("singleton partition reduces the mixed norm to l_q") {
  RandomStream stream(10);
  const auto part = singletons(7);
  for (double q : {0.3, 0.5, 1.0}) {
    for (double p : {1.0, 1.7, 2.0}) {
      const Vector x = random_vector(7, stream);
      CHECK(lpq_norm(x, part, p, q) == doctest::Approx(norm_p(x, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("support extraction uses the zero tolerance") {
  const auto pairs = GroupPartition::from_sizes({2, 2});
  const GroupSupport s = extract_support(Vector{0, 1e-12, 0.5, 0}, pairs);
  CHECK(s.active == std::set<std::size_t>{1});
}
