#include "support.hpp"

#include "weakminty/algorithms.hpp"
#include "weakminty/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace weakminty;

namespace {

// φ(x, y) = x y without constraints: F = (y, −x).
Problem plain_bilinear() {
  auto gx = [](const Vec&, const Vec& y) -> Vec { return y; };
  auto gy = [](const Vec& x, const Vec&) -> Vec { return x; };
  return minimax_to_inclusion(1, 1, gx, gy, Resolvent(), Resolvent(), 1.0);
}

bool inside(const Vec& z, double bound) { return z.cwiseAbs().maxCoeff() <= bound; }

}  // namespace

TEST_SUITE("algorithms") {

TEST_CASE("method identifiers round-trip") {
  for (Method m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK(all_methods().size() == 12);
  CHECK_FALSE(parse_method("eg").has_value());
  CHECK(requires_constraints(Method::P2SegPlus));
  CHECK(requires_unconstrained(Method::BcSegPlus));
  CHECK_FALSE(requires_unconstrained(Method::BcPsegPlus));
}

TEST_CASE("EG+ hand-computed steps") {
  SUBCASE("zero operator is a fixed point") {
    const Problem p = minimax_to_inclusion(
        1, 1, [](const Vec& x, const Vec&) -> Vec { return Vec::Zero(x.size()); },
        [](const Vec&, const Vec& y) -> Vec { return Vec::Zero(y.size()); }, Resolvent(), Resolvent());
    const auto s = step_eg_plus(p, initial_state(p, Vec{{0.3, 0.4}}), 0.5, 0.5);
    CHECK(s.z == Vec{{0.3, 0.4}});
  }
  SUBCASE("quadratic game exploration point") {
    const Problem p = quadratic_game(1.0, -0.1);
    const auto s = step_eg_plus(p, initial_state(p, Vec{{1.0, 1.0}}), 0.5, 0.5);
    const double a = std::sqrt(0.99);
    CHECK(s.zbar(0) == doctest::Approx(1.0 - 0.5 * (a - 0.1)).epsilon(1e-12));
    CHECK(s.zbar(1) == doctest::Approx(1.0 + 0.5 * (a + 0.1)).epsilon(1e-12));
    CHECK(s.zbar(0) == doctest::Approx(0.5525063).epsilon(1e-6));
  }
  SUBCASE("bilinear step") {
    const Problem p = quadratic_game(1.0, 0.0);
    const auto s = step_eg_plus(p, initial_state(p, Vec{{1.0, 0.0}}), 0.5, 0.5);
    CHECK(s.zbar(0) == doctest::Approx(1.0));
    CHECK(s.zbar(1) == doctest::Approx(0.5));
    CHECK(s.z(0) == doctest::Approx(0.875));
    CHECK(s.z(1) == doctest::Approx(0.25));
    CHECK(s.k == 1);
  }
}

TEST_CASE("noise-free SEG and SEG+ reduce to extragradient steps") {
  const Problem p = quadratic_game(1.0, -0.1);
  const Vec z0{{0.7, -0.2}};
  const auto eg = step_eg_plus(p, initial_state(p, z0), 0.5, 1.0);
  const auto seg = step_seg(p, initial_state(p, z0), 0.5, Schedule::constant(1.0));
  CHECK((seg.z - eg.z).cwiseAbs().maxCoeff() < 1e-15);
  const auto egp = step_eg_plus(p, initial_state(p, z0), 0.5, 0.3);
  const auto segp = step_seg_plus(p, initial_state(p, z0), 0.5, Schedule::constant(0.3));
  CHECK((segp.z - egp.z).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("reduction lattice") {
  for (const auto& r : support::reduction_lattice(1000)) {
    INFO(r.name);
    CHECK(r.max_gap <= 1e-12);
  }
}

TEST_CASE("BC-SEG+ with a frozen relaxation still matches EG+ without noise") {
  const Problem p = quadratic_game(1.0, -0.1);
  const Schedule s = Schedule::constant(1.0 - 1e-3);
  const double gap = support::max_gap(
      initial_bc_state(p, p.z0, 0.5, AnchorInit::Warm), initial_state(p, p.z0),
      [&](const SolverState& st) { return step_bc_seg_plus(p, st, 0.5, s); },
      [&](const SolverState& st) { return step_eg_plus(p, st, 0.5, s.alpha(st.k)); }, 1000);
  CHECK(gap <= 1e-12);
}

TEST_CASE("bias-corrected steps need their memory") {
  const Problem p = quadratic_game(1.0, -0.1);
  CHECK_THROWS_AS(step_bc_seg_plus(p, initial_state(p, p.z0), 0.5, Schedule()), std::logic_error);
  const Problem q = bilinear_box(0.9, 1.0);
  CHECK_THROWS_AS(step_bc_pseg_plus(q, initial_state(q, q.z0), 0.5, Schedule()), std::logic_error);
}

TEST_CASE("projected baselines without constraints or noise") {
  const Problem p = quadratic_game(1.0, -0.1);
  const Schedule c = Schedule::constant(0.4);
  for (ProjectedMode mode : {ProjectedMode::P1SegPlus, ProjectedMode::P2SegPlus, ProjectedMode::SfPegPlus}) {
    const double gap = support::max_gap(
        initial_state(p, p.z0), initial_state(p, p.z0),
        [&](const SolverState& s) { return step_projected_baseline(mode, p, s, 0.5, c); },
        [&](const SolverState& s) { return step_eg_plus(p, s, 0.5, 0.4); }, 200);
    CHECK(gap <= 1e-13);
  }
  // PSEG with α = β = 1 is the extragradient method.
  const Schedule one = Schedule::constant(1.0);
  const double gap = support::max_gap(
      initial_state(p, p.z0), initial_state(p, p.z0),
      [&](const SolverState& s) { return step_projected_baseline(ProjectedMode::Pseg, p, s, 0.5, one); },
      [&](const SolverState& s) { return step_eg_plus(p, s, 0.5, 1.0); }, 200);
  CHECK(gap <= 1e-13);
}

TEST_CASE("CEG+ equals the unprojected step in the interior") {
  const Problem box = bilinear_box(0.0, 10.0);
  const Problem free = quadratic_game(1.0, 0.0);
  const Vec z{{0.2, -0.1}};
  const auto a = step_ceg_plus(box, initial_state(box, z), 0.5, 0.5);
  const auto b = step_eg_plus(free, initial_state(free, z), 0.5, 0.5);
  CHECK((a.z - b.z).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("CEG+ on GlobalForsaken drives the fixed-point residual to zero") {
  const Problem p = global_forsaken();
  const double g = 0.5 / p.constants.lipschitz;
  auto residual = [&](const Vec& z) { return (z - p.resolvent(p.H(z, g), g)).norm(); };
  SolverState s = initial_state(p, p.z0);
  const double r0 = residual(s.z);
  for (int k = 0; k < 2000; ++k) s = step_ceg_plus(p, s, g, 0.5);
  CHECK(residual(s.z) < 1e-6 * r0);
}

TEST_CASE("exploration points stay in the box") {
  const Problem p = bilinear_box(0.9, 1.0).with_noise(0.5, 3);
  const Problem f = global_forsaken().with_noise(0.5, 4);
  const Schedule s = Schedule::harmonic(1.0 / 18.0, 100.0);
  for (const Problem* prob : {&p, &f}) {
    const double bound = prob->name == "global-forsaken" ? 4.0 / 3.0 : 1.0;
    for (Method m : {Method::BcPsegPlus, Method::Pseg, Method::P1SegPlus, Method::P2SegPlus, Method::SfPegPlus,
                     Method::CegPlus, Method::NpPdeg}) {
      AlgorithmSpec spec{m, 0.5 / prob->constants.lipschitz};
      SolverState st = initial_state(*prob, spec, prob->z0);
      for (int k = 0; k < 500; ++k) {
        st = step(*prob, spec, st, s);
        REQUIRE(inside(st.zbar, bound));
      }
    }
  }
}

TEST_CASE("NP-PDEG Gauss-Seidel step by hand") {
  const Problem p = plain_bilinear();
  const PdhgConfig cfg = PdhgConfig::scalar(1, 1, 0.5, 1.0, 1.0, 1.0);
  const auto s0 = initial_pdhg_state(p, Vec{{1.0, 1.0}}, cfg, AnchorInit::Warm);
  CHECK(s0.anchor_prev == Vec{{0.5, 1.5}});
  const auto s1 = step_np_pdeg(p, s0, cfg, Schedule::constant(0.5));
  // x̂ = 1 − 0.5·1 = 0.5; ŷ = 1 − 0.5·(−x̄) = 1.25; F(z̄) = (1.25, −0.5).
  CHECK(s1.zbar(0) == doctest::Approx(0.5));
  CHECK(s1.zbar(1) == doctest::Approx(1.25));
  CHECK(s1.z(0) == doctest::Approx(0.6875));
  CHECK(s1.z(1) == doctest::Approx(1.125));
  CHECK(s1.xbar_prev(0) == doctest::Approx(0.5));
}

TEST_CASE("NP-PDEG with zero coupling iterates the proximal fixed point") {
  auto zx = [](const Vec& x, const Vec&) -> Vec { return Vec::Zero(x.size()); };
  auto zy = [](const Vec&, const Vec& y) -> Vec { return Vec::Zero(y.size()); };
  const Problem p = minimax_to_inclusion(1, 1, zx, zy, box_resolvent(1.0), box_resolvent(1.0));
  const PdhgConfig cfg = PdhgConfig::scalar(1, 1, 0.5, 1.0, 0.0, 0.0);
  SolverState s = initial_pdhg_state(p, Vec{{3.0, -2.0}}, cfg, AnchorInit::Warm);
  for (int k = 0; k < 2000; ++k) s = step_np_pdeg(p, s, cfg, Schedule::constant(0.5));
  CHECK((s.z - Vec{{1.0, -1.0}}).norm() < 1e-9);
}

TEST_CASE("NP-PDEG rejects mismatched preconditioners") {
  const Problem p = plain_bilinear();
  const PdhgConfig cfg = PdhgConfig::scalar(2, 1, 0.5, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(initial_pdhg_state(p, p.z0, cfg, AnchorInit::Warm), DimensionError);
}

TEST_CASE("PDHG stepsize margins") {
  const PdhgConfig cfg = PdhgConfig::scalar(1, 1, 0.5, 1.0, 1.0, 1.0);
  const auto [m1, m2] = cfg.stepsize_margins();
  CHECK(m1 == doctest::Approx(2.0 - 0.5));
  CHECK(m2 == doctest::Approx(2.0 - 0.5));
  CHECK(cfg.stepsize_condition());
  CHECK_FALSE(PdhgConfig::scalar(1, 1, 1.5, 1.0, 1.0, 1.0).stepsize_condition());
}

TEST_CASE("SEG+ exploration is unbiased for affine operators") {
  const Problem p = quadratic_game(1.0, -0.1).with_noise(0.3, 5);
  const double g = 0.5;
  const Vec z{{0.8, -0.4}};
  const Vec expected = p.F(Vec(z - g * p.F(z)));
  const int n = 40000;
  Vec acc = Vec::Zero(2);
  for (int i = 0; i < n; ++i) {
    const SampleTicket xi = p.oracle.draw(4 * static_cast<std::uint64_t>(i));
    const SampleTicket xb = p.oracle.draw(4 * static_cast<std::uint64_t>(i) + 2);
    const Vec zbar = z - g * p.oracle.eval(xi, z);
    acc += p.oracle.eval(xb, zbar);
  }
  // Per-coordinate std of one sample is at most sqrt(σ² + γ²L²σ²).
  const double tol = 5.0 * std::sqrt(0.09 * (1 + g * g)) / std::sqrt(n);
  CHECK(((acc / n - expected).cwiseAbs().array() <= tol).all());
}

TEST_CASE("exploration residual recursion of BC-SEG+") {
  // u = z̄ − z + γFz; the bound is checked in expectation over the step's
  // samples at a fixed (zᵏ, zᵏ⁻¹, z̄ᵏ⁻¹).
  const Mat a1 = (Mat(2, 2) << 0.0, 2.0, -1.0, 0.0).finished();
  const Mat a2 = (Mat(2, 2) << 0.2, 0.0, -1.0, -0.2).finished();
  Problem fs = quadratic_game(1.0, -0.1);
  fs.oracle = StochasticOracle::finite_sum({DeterministicOperator::linear(a1), DeterministicOperator::linear(a2)}, 31);
  fs.F = fs.oracle.base();
  auto sq_norm2 = [](const Mat& m) { return std::pow(Eigen::JacobiSVD<Mat>(m).singularValues()(0), 2); };
  const Mat mean = 0.5 * (a1 + a2);
  const double lhat_sq = 0.5 * (sq_norm2(a1 - mean) + sq_norm2(a2 - mean)) + sq_norm2(mean);
  const Problem additive = quadratic_game(1.0, -0.1).with_noise(0.2, 8);

  for (const Problem* p : {&additive, static_cast<const Problem*>(&fs)}) {
    const double g = 0.4;
    const double alpha = 0.3;
    const Schedule s = Schedule::constant(alpha);
    SolverState st = initial_bc_state(*p, Vec{{1.0, 0.5}}, g, AnchorInit::Iterate);
    st.z = Vec{{0.6, -0.3}};
    st.z_prev = Vec{{1.0, 0.5}};
    st.anchor_prev = Vec{{0.7, 0.9}};
    const Vec u_prev = st.anchor_prev - st.z_prev + g * p->F(st.z_prev);
    double sigma_sq = p->constants.variance;
    double l_sq = 1.0;
    if (p == &fs) {
      const Vec fz = mean * st.z;
      sigma_sq = 0.5 * ((a1 * st.z - fz).squaredNorm() + (a2 * st.z - fz).squaredNorm());
      l_sq = lhat_sq;
    }
    const int n = 1000;
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      const SolverState next = step_bc_seg_plus(p->reseeded(1000 + static_cast<std::uint64_t>(i)), st, g, s);
      lhs += (next.zbar - st.z + g * p->F(st.z)).squaredNorm();
    }
    lhs /= n;
    const double rhs = std::pow(1 - alpha, 2) * u_prev.squaredNorm() +
                       2 * std::pow(1 - alpha, 2) * g * g * l_sq * (st.z - st.z_prev).squaredNorm() +
                       2 * alpha * alpha * g * g * sigma_sq;
    INFO(p->name);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("SEG drifts away on the weak-MVI quadratic game") {
  const Problem p = quadratic_game(1.0, -0.1);
  const Schedule s = Schedule::robbins_monro(2.0);
  SolverState st = initial_state(p, p.z0);
  const double n0 = st.z.norm();
  for (int k = 0; k < 100; ++k) st = step_seg(p, st, 0.5, s);
  double prev = st.z.norm();
  for (int k = 100; k < 100000; ++k) {
    st = step_seg(p, st, 0.5, s);
    REQUIRE(st.z.norm() >= prev);
    prev = st.z.norm();
  }
  CHECK(prev > 1.2 * n0);
}

TEST_CASE("random iterate sampling") {
  const Schedule rm = Schedule::robbins_monro(2.0);
  const int n = 40000;
  int zeros = 0;
  for (int seed = 0; seed < n; ++seed) {
    const auto k = sample_k_star(rm, 2, static_cast<std::uint64_t>(seed));
    REQUIRE(k <= 2);
    zeros += k == 0;
  }
  const double p0 = 6.0 / 13.0;
  CHECK(std::abs(static_cast<double>(zeros) / n - p0) <= 5.0 * std::sqrt(p0 * (1 - p0) / n));

  std::vector<int> counts(5, 0);
  for (int seed = 0; seed < n; ++seed) ++counts[sample_k_star(Schedule::constant(0.1), 4, seed)];
  for (int c : counts) CHECK(std::abs(c / double(n) - 0.2) <= 5.0 * std::sqrt(0.16 / n));
  CHECK(sample_k_star(rm, 100, 9) == sample_k_star(rm, 100, 9));
}

TEST_CASE("run records and determinism") {
  const Problem p = quadratic_game(1.0, -0.1).with_noise(0.1, 0);
  const AlgorithmSpec spec{Method::BcSegPlus, 0.5};
  const Schedule s;
  const auto one = run(p, spec, s, 1, 3);
  REQUIRE(one.records.size() == 2);
  CHECK(one.records[0].k == 0);
  CHECK(one.records[1].k == 1);
  CHECK_THROWS_AS(run(p, spec, s, 0, 3), std::invalid_argument);

  const auto a = run(p, spec, s, 500, 42);
  const auto b = run(p, spec, s, 500, 42);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(std::memcmp(a.records.data(), b.records.data(), a.records.size() * sizeof(IterationRecord)) == 0);
  CHECK(a.k_star == b.k_star);
  const auto c = run(p, spec, s, 500, 43);
  CHECK(c.records.back().fnorm_sq != a.records.back().fnorm_sq);

  RunOptions opts;
  opts.record_at = {0, 10, 100, 500};
  const auto thin = run(p, spec, s, 500, 42, opts);
  REQUIRE(thin.records.size() == 4);
  CHECK(thin.records[2].fnorm_sq == a.records[100].fnorm_sq);
  // Exploration metric equals ‖F z̄‖² when A ≡ 0.
  CHECK(std::isfinite(a.records[10].explore_sq));
}

TEST_CASE("divergence guard") {
  const Problem p = quadratic_game(1.0, -0.1);
  RunOptions opts;
  opts.divergence_bound = 1.0;
  const auto t = run(p, AlgorithmSpec{Method::Seg, 0.5}, Schedule(), 100, 0, opts);
  CHECK(t.blew_up);
  CHECK(t.status == TerminalStatus::Diverged);
  CHECK(t.records.empty());
  CHECK(status_name(t.status) == "diverged");
}

}  // TEST_SUITE
