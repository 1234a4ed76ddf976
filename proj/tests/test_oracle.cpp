#include "weakminty/analysis.hpp"
#include "weakminty/oracle.hpp"
#include "weakminty/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace weakminty;

namespace {

Mat quad_matrix(double a, double b) {
  Mat m(2, 2);
  m << b, a, -a, b;
  return m;
}

StochasticOracle gaussian_linear(const Mat& m, double sigma, std::uint64_t seed) {
  return StochasticOracle(DeterministicOperator::linear(m), NoiseModel{AdditiveGaussian{sigma}, seed});
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("draw_sample is deterministic") {
  const auto o = gaussian_linear(quad_matrix(1.0, 0.0), 0.1, 9);
  CHECK(draw_sample(o, 5) == draw_sample(o, 5));
  CHECK_FALSE(draw_sample(o, 5) == draw_sample(o, 6));
  const Vec z{{0.3, -0.2}};
  CHECK(eval_at(o, draw_sample(o, 5), z) == eval_at(o, draw_sample(o, 5), z));
}

TEST_CASE("no noise and zero sigma evaluate the base operator exactly") {
  const Mat m = quad_matrix(0.8, -0.3);
  const StochasticOracle none(DeterministicOperator::linear(m), NoiseModel{});
  const auto zero = gaussian_linear(m, 0.0, 1);
  const Vec z{{1.5, -2.0}};
  for (std::uint64_t c = 0; c < 20; ++c) {
    CHECK(none.eval(none.draw(c), z) == m * z);
    CHECK(zero.eval(zero.draw(c), z) == m * z);
  }
  CHECK(*none.variance_bound() == 0.0);
}

TEST_CASE("additive noise cancels in two-point differences") {
  const Mat m = quad_matrix(1.0, 0.2);
  const auto o = gaussian_linear(m, 0.7, 3);
  const Vec z{{1.0, 2.0}};
  const Vec zp{{-0.5, 0.25}};
  for (std::uint64_t c = 0; c < 50; ++c) {
    const auto t = o.draw(c);
    const Vec diff = o.eval(t, z) - o.eval(t, zp);
    CHECK((diff - m * (z - zp)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((o.eval(t, z) - m * z - o.additive_noise(t)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("finite-sum support and unbiasedness") {
  std::vector<DeterministicOperator> comps{DeterministicOperator::linear(Mat::Constant(1, 1, 2.0)),
                                           DeterministicOperator::linear(Mat::Constant(1, 1, 0.0))};
  const auto o = StochasticOracle::finite_sum(comps, 17);
  const Vec z = Vec::Constant(1, 1.0);
  const int n = 20000;
  double sum = 0.0;
  for (int c = 0; c < n; ++c) {
    const double v = o.eval(o.draw(c), z)(0);
    REQUIRE((v == 2.0 || v == 0.0));
    sum += v;
  }
  CHECK(std::abs(sum / n - 1.0) <= 3.0 / std::sqrt(n));
  CHECK(o.base()(z)(0) == doctest::Approx(1.0));
}

TEST_CASE("finite-sum index support for N = 4") {
  const auto gap = finite_sum_gap_report(4, 1.0);
  std::set<std::size_t> seen;
  for (std::uint64_t c = 0; c < 400; ++c) {
    const auto i = gap.oracle.component_index(gap.oracle.draw(c));
    REQUIRE(i < 4);
    seen.insert(i);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("unbiasedness within a 5 sigma band") {
  const auto o = gaussian_linear(quad_matrix(0.9, -0.1), 0.5, 21);
  const Vec z{{0.4, -1.1}};
  const Vec fz = o.base()(z);
  const int n = 50000;
  Vec acc = Vec::Zero(2);
  for (int c = 0; c < n; ++c) acc += o.eval(o.draw(c), z);
  const Vec mean = acc / n;
  CHECK(((mean - fz).cwiseAbs().array() <= 5.0 * 0.5 / std::sqrt(n)).all());
}

TEST_CASE("bounded variance under a 99% chi-square bound") {
  const double sigma = 0.3;
  const auto o = gaussian_linear(quad_matrix(1.0, 0.0), sigma, 5);
  const Vec z{{2.0, 1.0}};
  const int m = 20000;
  double acc = 0.0;
  for (int c = 0; c < m; ++c) acc += (o.eval(o.draw(c), z) - o.base()(z)).squaredNorm();
  const double dof = 2.0 * m;
  const double eps = 2.3263478740408408 * std::sqrt(2.0 / dof);
  CHECK(*o.variance_bound() == doctest::Approx(2.0 * sigma * sigma));
  CHECK(acc / m <= *o.variance_bound() * (1.0 + eps));
}

TEST_CASE("mean Lipschitz estimates") {
  SUBCASE("linear operator with additive noise") {
    const Mat m = quad_matrix(0.6, 0.8);
    const auto o = gaussian_linear(m, 1.0, 8);
    CHECK(estimate_mean_lipschitz(o, 200, 10) <= 1.0 + 1e-6);
  }
  SUBCASE("scalar worst-case finite sum, N = 4") {
    const auto gap = finite_sum_gap_report(4, 1.0);
    const double est = estimate_mean_lipschitz(gap.oracle, 50, 20000);
    CHECK(est * est == doctest::Approx(4.75).epsilon(0.05));
  }
  SUBCASE("zero operator") {
    const StochasticOracle o(DeterministicOperator::zero(3), NoiseModel{AdditiveGaussian{0.4}, 2});
    CHECK(estimate_mean_lipschitz(o, 20, 5) == 0.0);
  }
}

TEST_CASE("finite-sum gap closed forms") {
  const auto one = finite_sum_gap_report(1, 2.0);
  CHECK(one.lipschitz == doctest::Approx(2.0));
  CHECK(one.mean_lipschitz == doctest::Approx(2.0));
  CHECK(one.ratio == doctest::Approx(1.0));
  const auto four = finite_sum_gap_report(4, 1.0);
  CHECK(four.lipschitz == doctest::Approx(1.75));
  CHECK(four.mean_lipschitz == doctest::Approx(std::sqrt(4.75)));
  CHECK(four.ratio == doctest::Approx(std::sqrt(4.75) / 1.75));
  for (int n : {4, 25, 100}) {
    const auto g = finite_sum_gap_report(n, 1.0);
    CHECK(g.ratio >= std::sqrt(static_cast<double>(n)) / 2.0);
    // The mean operator of the sampled oracle has slope L_F.
    CHECK(g.oracle.base()(Vec::Constant(1, 1.0))(0) == doctest::Approx(g.lipschitz));
  }
  CHECK_THROWS_AS(finite_sum_gap_report(0, 1.0), std::invalid_argument);
}

TEST_CASE("negation") {
  const Mat m = quad_matrix(1.0, -0.5);
  const auto F = DeterministicOperator::linear(m);
  const Vec z{{0.3, 0.7}};
  CHECK(negate(negate(F))(z) == F(z));
  CHECK(negate(DeterministicOperator::zero(2))(z).isZero());

  const auto o = gaussian_linear(m, 0.2, 4);
  const auto neg = negate(o);
  const auto t = o.draw(3);
  CHECK(neg.eval(t, z) == -o.eval(t, z));
  CHECK(negate(neg).eval(t, z) == o.eval(t, z));
  CHECK(neg.base()(z) == -(m * z));

  // F = Mz satisfies the negative weak MVI for ρ̄ ≥ b/(a²+b²) = −0.4, so −F
  // satisfies the weak MVI up to ρ = 0.4.
  CHECK(certify_negative_weak_mvi_linear(m, -0.4 + 1e-6));
  CHECK_FALSE(certify_negative_weak_mvi_linear(m, -0.4 - 1e-6));
  CHECK(certify_weak_mvi_linear(-m, 0.4 - 1e-6));
  CHECK_FALSE(certify_weak_mvi_linear(-m, 0.4 + 1e-6));
  CHECK(certify_weak_mvi_linear(m, -0.4 - 1e-6));
  CHECK_FALSE(certify_weak_mvi_linear(m, -0.4 + 1e-6));
}

}  // TEST_SUITE
