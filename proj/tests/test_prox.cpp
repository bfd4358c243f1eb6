#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gso/errors.hpp"
#include "gso/prox.hpp"
#include "gso/rng.hpp"
#include "oracle.hpp"

using namespace gso;
using gso::testing::foc_residual;
using gso::testing::prox_oracle;

namespace {

ProxQuery make_query(Vector z, double v, double lambda, double p, double q) {
  ProxQuery query;
  query.z = std::move(z);
  query.v = v;
  query.lambda = lambda;
  query.p = p;
  query.q = q;
  return query;
}

ProxQuery random_query(RandomStream& stream, double p, double q, std::size_t max_len = 8) {
  const std::size_t l = 1 + stream.below(max_len);
  Vector z(l);
  for (double& t : z) t = stream.normal();
  const double target = norm2(z);
  const double scale = (target > 0.0) ? stream.uniform() * 10.0 / target : 1.0;
  for (double& t : z) t *= scale;
  const double v = 0.1 + 1.9 * stream.uniform();
  const double vl = 0.01 + 9.99 * stream.uniform();
  return make_query(std::move(z), v, vl / v, p, q);
}

void check_dominates_oracle(const ProxQuery& query) {
  const ProxResult got = prox_apply(query);
  const double oracle_q = prox_objective(query, prox_oracle(query));
  CHECK(got.objective_value <= oracle_q + 1e-6 * (1.0 + std::abs(oracle_q)));
}

const double kTwoThirds = 2.0 / 3.0;

}  // namespace

TEST_CASE("group soft thresholding (p=2, q=1)") {
  const ProxResult r = prox_2_1(make_query({3, 4}, 1, 1, 2, 1));
  CHECK(r.x[0] == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(r.x[1] == doctest::Approx(3.2).epsilon(1e-12));
  CHECK_FALSE(r.was_thresholded_to_zero);

  CHECK(prox_2_1(make_query({0.6, 0.8}, 1, 1, 2, 1)).was_thresholded_to_zero);  // ||z|| = vl
  CHECK(prox_2_1(make_query({0, 0}, 1, 1, 2, 1)).x == Vector{0, 0});
}

TEST_CASE("group hard thresholding (p=2, q=0)") {
  CHECK(prox_2_0(make_query({3, 0}, 1, 2, 2, 0)).x == Vector{3, 0});
  // exact boundary ||z|| = sqrt(2 v lambda) resolves to 0
  CHECK(prox_2_0(make_query({2, 0}, 1, 2, 2, 0)).was_thresholded_to_zero);
  CHECK(prox_2_0(make_query({1, 0}, 1, 2, 2, 0)).was_thresholded_to_zero);
}

TEST_CASE("p=2, q=1/2 operator") {
  // below the threshold 1.5 (v lambda)^(2/3)
  CHECK(prox_2_half(make_query({1, 0}, 1, 1, 2, 0.5)).was_thresholded_to_zero);

  const ProxResult r = prox_2_half(make_query({2, 0}, 1, 1, 2, 0.5));
  CHECK(r.x[0] == doctest::Approx(1.6053779405).epsilon(1e-8));  // frozen from the ray oracle
  CHECK(r.x[1] == 0.0);

  RandomStream stream(40);
  for (int rep = 0; rep < 50; ++rep) {
    const ProxQuery query = random_query(stream, 2, 0.5);
    const ProxResult out = prox_apply(query);
    // output is a nonnegative multiple of z
    const double zn = norm2(query.z);
    if (zn == 0.0) continue;
    const double c = dot(out.x, query.z) / (zn * zn);
    CHECK(c >= -1e-14);
    CHECK(c <= 1.0 + 1e-14);
    for (std::size_t j = 0; j < out.x.size(); ++j)
      CHECK(out.x[j] == doctest::Approx(c * query.z[j]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("p=1, q=1/2 operator") {
  const ProxResult r = prox_1_half(make_query({2, 2}, 1, 1, 1, 0.5));
  CHECK(r.x[0] == doctest::Approx(1.7312992115).epsilon(1e-8));  // frozen from the grid oracle
  CHECK(r.x[1] == doctest::Approx(1.7312992115).epsilon(1e-8));

  CHECK(prox_1_half(make_query({0, 0}, 1, 1, 1, 0.5)).x == Vector{0, 0});
  CHECK(prox_1_half(make_query({0.1, 0.1}, 1, 100, 1, 0.5)).was_thresholded_to_zero);

  // uniform shrinkage would exceed |z_2|; the support shrinks instead
  const ProxResult mixed = prox_1_half(make_query({3, 0.1}, 1, 1, 1, 0.5));
  CHECK(mixed.x[0] == doctest::Approx(2.6954531510).epsilon(1e-7));
  CHECK(mixed.x[1] == 0.0);
}

TEST_CASE("p=2, q=2/3 operator") {
  // threshold 2 (2 v lambda / 3)^(3/4) ~ 1.4774
  CHECK(prox_2_twothirds(make_query({1, 0}, 1, 1, 2, kTwoThirds)).was_thresholded_to_zero);

  const ProxResult r = prox_2_twothirds(make_query({2, 0}, 1, 1, 2, kTwoThirds));
  CHECK(r.x[0] == doctest::Approx(1.4047345873).epsilon(1e-8));  // frozen from the ray oracle
  CHECK(r.x[1] == 0.0);
}

TEST_CASE("p=1, q=2/3 operator") {
  CHECK(prox_1_twothirds(make_query({0, 0, 0}, 1, 1, 1, kTwoThirds)).x == Vector{0, 0, 0});

  const ProxResult r = prox_1_twothirds(make_query({2, 2}, 1, 1, 1, kTwoThirds));
  CHECK(r.x[0] == doctest::Approx(1.5419939840).epsilon(1e-8));  // frozen from the grid oracle
  CHECK(r.x[1] == doctest::Approx(1.5419939840).epsilon(1e-8));

  CHECK(prox_1_twothirds(make_query({0.2, 0.2}, 1, 50, 1, kTwoThirds)).was_thresholded_to_zero);
}

TEST_CASE("analytic operators never lose to the brute-force oracle") {
  const double pairs[][2] = {{2, 1}, {2, 0}, {2, 0.5}, {1, 0.5}, {2, kTwoThirds}, {1, kTwoThirds}};
  RandomStream stream(41);
  for (const auto& pq : pairs) {
    const std::size_t max_len = pq[0] == 1.0 ? 3 : 8;
    for (int rep = 0; rep < 120; ++rep)
      check_dominates_oracle(random_query(stream, pq[0], pq[1], max_len));
  }
}

TEST_CASE("nonzero outputs satisfy the stationarity equation") {
  const double pairs[][2] = {{2, 1}, {2, 0.5}, {1, 0.5}, {2, kTwoThirds}, {1, kTwoThirds}};
  RandomStream stream(42);
  for (const auto& pq : pairs) {
    for (int rep = 0; rep < 200; ++rep) {
      const ProxQuery query = random_query(stream, pq[0], pq[1]);
      const ProxResult out = prox_apply(query);
      if (!out.was_thresholded_to_zero) CHECK(foc_residual(query, out.x) <= 1e-8);
    }
  }
}

TEST_CASE("increasing lambda never revives a zeroed group") {
  const double pairs[][2] = {{2, 1}, {2, 0}, {2, 0.5}, {1, 0.5}, {2, kTwoThirds}, {1, kTwoThirds}};
  RandomStream stream(43);
  for (const auto& pq : pairs) {
    for (int rep = 0; rep < 25; ++rep) {
      ProxQuery query = random_query(stream, pq[0], pq[1]);
      bool seen_zero = false;
      for (int step = 0; step < 40; ++step) {
        query.lambda = 0.01 * std::pow(1.35, step);
        const bool zero = prox_apply(query).was_thresholded_to_zero;
        if (seen_zero) CHECK(zero);
        seen_zero = seen_zero || zero;
      }
      CHECK(seen_zero);  // large lambda always kills the group
    }
  }
}

TEST_CASE("group apply equals per-group results and handles mixed kinds") {
  const auto part = GroupPartition::from_sizes({2, 3, 1});
  RandomStream stream(44);
  Vector z(6);
  for (double& t : z) t = 3.0 * stream.normal();
  const Regularizer reg(2, 0.5, 0.8);
  const Vector combined = prox_group_apply(z, part, 0.7, reg);
  for (std::size_t g = 0; g < part.group_count(); ++g) {
    const auto [begin, end] = part.group_range(g);
    const ProxResult single =
        prox_apply(make_query(Vector(z.begin() + begin, z.begin() + end), 0.7, 0.8, 2, 0.5));
    for (std::size_t j = begin; j < end; ++j) CHECK(combined[j] == single.x[j - begin]);
  }

  // hard-thresholding keeps the large group and kills the small one
  const auto two = GroupPartition::from_sizes({2, 2});
  const Vector kept = prox_group_apply({5, 5, 0.1, 0.1}, two, 1.0, Regularizer(2, 0, 2.0));
  CHECK(kept[0] == 5.0);
  CHECK(kept[1] == 5.0);
  CHECK(kept[2] == 0.0);
  CHECK(kept[3] == 0.0);

  // everything below threshold
  const Vector none = prox_group_apply({0.1, 0, 0, 0.1}, two, 1.0, Regularizer(2, 0, 2.0));
  CHECK(none == Vector{0, 0, 0, 0});
}

TEST_CASE("singleton groups reproduce the scalar thresholding functions") {
  RandomStream stream(45);
  for (int rep = 0; rep < 300; ++rep) {
    const double z = 6.0 * stream.normal();
    const double v = 0.2 + stream.uniform();
    const double lambda = 0.05 + 2.0 * stream.uniform();
    const double vl = v * lambda;

    const double soft = prox_2_1(make_query({z}, v, lambda, 2, 1)).x[0];
    const double soft_ref = (std::abs(z) > vl) ? z - vl * (z > 0 ? 1 : -1) : 0.0;
    CHECK(soft == doctest::Approx(soft_ref).epsilon(1e-12).scale(1.0));

    const double hard = prox_2_0(make_query({z}, v, lambda, 2, 0)).x[0];
    const double hard_ref = (std::abs(z) > std::sqrt(2.0 * vl)) ? z : 0.0;
    CHECK(hard == hard_ref);

    // the two q = 1/2 operators coincide on scalars (the half thresholding function)
    const double half2 = prox_2_half(make_query({z}, v, lambda, 2, 0.5)).x[0];
    const double half1 = prox_1_half(make_query({z}, v, lambda, 1, 0.5)).x[0];
    CHECK(half1 == doctest::Approx(half2).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("generic operator matches the closed forms") {
  const double pairs[][2] = {{2, 0.5}, {2, kTwoThirds}, {1, 0.5}, {1, kTwoThirds}};
  RandomStream stream(46);
  for (const auto& pq : pairs) {
    for (int rep = 0; rep < 250; ++rep) {
      ProxQuery query = random_query(stream, pq[0], pq[1]);
      const ProxResult analytic = prox_apply(query);
      const ProxResult newton = prox_generic(query);
      REQUIRE(analytic.x.size() == newton.x.size());
      for (std::size_t j = 0; j < analytic.x.size(); ++j)
        CHECK(newton.x[j] == doctest::Approx(analytic.x[j]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("generic operator on non-analytic q") {
  // tiny z against a huge penalty collapses to zero
  CHECK(prox_generic(make_query({1e-3, 1e-3}, 1, 1e3, 2, 0.3)).was_thresholded_to_zero);

  RandomStream stream(47);
  for (double q : {0.1, 0.3, 0.8}) {
    for (double p : {1.0, 2.0}) {
      for (int rep = 0; rep < 40; ++rep) {
        const ProxQuery query = random_query(stream, p, q, p == 1.0 ? 3 : 8);
        const ProxResult out = prox_generic(query);
        const double oracle_q = prox_objective(query, prox_oracle(query));
        CHECK(out.objective_value <= oracle_q + 1e-6 * (1.0 + std::abs(oracle_q)));
        if (!out.was_thresholded_to_zero) CHECK(foc_residual(query, out.x) <= 1e-8);
      }
    }
  }

  CHECK_THROWS_AS(prox_generic(make_query({1.0}, 1, 1, 2, 1.0)), ConfigError);
  CHECK_THROWS_AS(prox_generic(make_query({1.0}, 1, 1, 1.5, 0.5)), ConfigError);
}

TEST_CASE("query validation") {
  CHECK_THROWS_AS(prox_2_1(make_query({}, 1, 1, 2, 1)), ConfigError);
  CHECK_THROWS_AS(prox_2_1(make_query({1.0}, 0, 1, 2, 1)), ConfigError);
  CHECK_THROWS_AS(prox_2_1(make_query({1.0}, 1, -1, 2, 1)), ConfigError);
}
