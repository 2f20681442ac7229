#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpprop/propagator.hpp"
#include "fpprop/quadrature.hpp"
#include "test_support.hpp"

using namespace fpprop;

namespace {

CoefficientSet ou_set() {
    // b2 = -1, b1 = 0, D = 1 in drift/diffusion form.
    return from_fpe(FpeCoefficients{1, VectorSchedule::zero(1), ScalarSchedule::constant(-1.0),
                                    TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))});
}

CoefficientSet heat_set(double d = 1.0) {
    return CoefficientSet{1, ScalarSchedule::constant(0.0), VectorSchedule::zero(1),
                          ScalarSchedule::constant(0.0),
                          TensorSchedule::isotropic(1, ScalarSchedule::constant(d))};
}

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

}  // namespace

TEST_CASE("kernel construction: zero coefficients, mean reversion, separable tensor") {
    const PropagatorKernel k0 = build_kernel(CoefficientSet::zero(2), 0.8);
    CHECK(k0.alpha1 == 0.0);
    CHECK(k0.tau.cwiseAbs().maxCoeff() == 0.0);
    CHECK(k0.fully_deterministic());

    const PropagatorKernel kou = build_kernel(ou_set(), 1.0);
    CHECK(kou.alpha1 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(kou.alpha3 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(kou.tau(0, 0) ==
          doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-12));
    CHECK(kou.stochastic_count == 1);

    // a4(t) = f(t) * M: tau must factor as (int f e^{2 alpha3}) * M.
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd m = testutil::random_spd(rng, 2);
    const ScalarSchedule f = ScalarSchedule::polynomial({0.5, 0.3, 0.2});
    CoefficientSet c{2, ScalarSchedule::constant(0.0), VectorSchedule::zero(2),
                     ScalarSchedule::polynomial({0.2, -0.4}),
                     TensorSchedule::scaled_tensor(f, m)};
    const PropagatorKernel k = build_kernel(c, 0.9);
    const double scalar = integrate_adaptive(
        [&](double s) { return f(s) * std::exp(2.0 * c.a3.integral(s)); }, 0.0, 0.9, 1e-13);
    CHECK((k.tau - scalar * m).cwiseAbs().maxCoeff() <= 1e-11 * scalar);

    // Eigendecomposition reconstructs tau.
    const Eigen::MatrixXd rec = k.tau_eigenvectors *
                                k.tau_eigenvalues.asDiagonal() *
                                k.tau_eigenvectors.transpose();
    CHECK((rec - k.tau).cwiseAbs().maxCoeff() <= 1e-12 * k.tau.cwiseAbs().maxCoeff());
}

TEST_CASE("kernel values: pure diffusion coincidence and mean-reverting case") {
    // Only a4 = 1, t = 1, x = y: 1/sqrt(4 pi).
    const PropagatorKernel kh = build_kernel(heat_set(), 1.0);
    CHECK(kernel_eval(kh, vec1(0.3), vec1(0.3)) ==
          doctest::Approx(0.28209479177387814).epsilon(1e-12));

    // Mean-reverting set at t = 1, x = y = 0: e / sqrt(4 pi (e^2 - 1) / 2).
    // (Also equals the peak density 1/sqrt(2 pi (1 - e^{-2})).)
    const PropagatorKernel kou = build_kernel(ou_set(), 1.0);
    const double expect = std::exp(1.0) / std::sqrt(4.0 * M_PI * (std::exp(2.0) - 1.0) / 2.0);
    CHECK(expect == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * (1.0 - std::exp(-2.0))))
                        .epsilon(1e-15));
    CHECK(kernel_eval(kou, vec1(0.0), vec1(0.0)) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(kernel_eval(kou, vec1(0.0), vec1(0.0)) ==
          doctest::Approx(0.42902855338146895).epsilon(1e-12));
}

TEST_CASE("kernel symmetry in the pure-diffusion case and positivity") {
    std::mt19937_64 rng(9);
    CoefficientSet c = testutil::random_coefficients(rng, 2);
    c.a2 = VectorSchedule::zero(2);
    c.a3 = ScalarSchedule::constant(0.0);
    const PropagatorKernel k = build_kernel(c, 0.7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 20; ++i) {
        Eigen::VectorXd x(2), y(2);
        x << g(rng), g(rng);
        y << g(rng), g(rng);
        const double kxy = kernel_eval(k, x, y);
        const double kyx = kernel_eval(k, y, x);
        CHECK(kxy == doctest::Approx(kyx).epsilon(1e-12));
        CHECK(kxy >= 0.0);
    }
}

TEST_CASE("log-space evaluation survives huge quadratic forms") {
    const PropagatorKernel kh = build_kernel(heat_set(), 1.0);
    // |z - y|^2 / (4 tau) around 700: the value underflows to 0 gracefully.
    const double y = std::sqrt(700.0 * 4.0);
    const double v = kernel_eval(kh, vec1(0.0), vec1(y));
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    CHECK(v <= 1e-250);
}

TEST_CASE("kernel evaluation errors on point-mass cases") {
    // Fully deterministic kernel: evaluation must be refused.
    CoefficientSet drift{1, ScalarSchedule::constant(0.0),
                         VectorSchedule({ScalarSchedule::constant(1.0)}),
                         ScalarSchedule::constant(0.0), TensorSchedule::zero(1)};
    const PropagatorKernel k = build_kernel(drift, 1.0);
    CHECK(k.fully_deterministic());
    CHECK_THROWS_AS(kernel_eval(k, vec1(0.0), vec1(1.0)), std::domain_error);

    // Partially deterministic: y off the deterministic support is refused,
    // y on the support gives the reduced Gaussian.
    CoefficientSet partial{2, ScalarSchedule::constant(0.0), VectorSchedule::zero(2),
                           ScalarSchedule::constant(0.0),
                           TensorSchedule(2, {ScalarSchedule::constant(1.0),
                                              ScalarSchedule::constant(0.0),
                                              ScalarSchedule::constant(0.0)})};
    const PropagatorKernel kp = build_kernel(partial, 1.0);
    CHECK(kp.stochastic_count == 1);
    Eigen::VectorXd x(2), y_on(2), y_off(2);
    x << 0.0, 0.4;
    y_on << 0.5, 0.4;
    y_off << 0.5, 0.9;
    CHECK(kernel_eval(kp, x, y_on) ==
          doctest::Approx(std::exp(-0.25 / 4.0) / std::sqrt(4.0 * M_PI)).epsilon(1e-12));
    CHECK_THROWS_AS(kernel_eval(kp, x, y_off), std::domain_error);
}

TEST_CASE("closed-form Gaussian propagation: identity, heat, mean reversion") {
    GaussianState g{0.3, vec1(0.7), Eigen::MatrixXd::Constant(1, 1, 0.25)};

    const PropagatorKernel k0 = build_kernel(CoefficientSet::zero(1), 2.0);
    const GaussianState same = propagate_gaussian(k0, g);
    CHECK(same.log_weight == doctest::Approx(g.log_weight).epsilon(1e-14));
    CHECK(same.mean[0] == doctest::Approx(g.mean[0]).epsilon(1e-14));
    CHECK(same.cov(0, 0) == doctest::Approx(g.cov(0, 0)).epsilon(1e-14));

    // Pure diffusion: variance grows by 2 D t, weight unchanged.
    const double D = 0.8, t = 0.25;
    const PropagatorKernel kh = build_kernel(heat_set(D), t);
    GaussianState start{0.0, vec1(0.0), Eigen::MatrixXd::Constant(1, 1, 0.5)};
    const GaussianState spread = propagate_gaussian(kh, start);
    CHECK(spread.log_weight == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(spread.mean[0] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(spread.cov(0, 0) == doctest::Approx(0.5 + 2.0 * D * t).epsilon(1e-12));

    // Mean-reverting transition density from a point start.
    const PropagatorKernel kou = build_kernel(ou_set(), 1.0);
    const GaussianState trans = propagate_gaussian(kou, GaussianState::point_mass(vec1(1.0)));
    CHECK(trans.log_weight == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(trans.mean[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(trans.cov(0, 0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("solve: zero generator returns the initial data for every variant") {
    const CoefficientSet zero = CoefficientSet::zero(1);
    std::vector<Eigen::VectorXd> pts;
    for (double x = -1.0; x <= 1.0; x += 0.25) pts.push_back(vec1(x));

    GaussianMixture mix{{GaussianState{0.0, vec1(0.2), Eigen::MatrixXd::Constant(1, 1, 0.3)}}};
    const std::vector<double> um = solve(Problem{zero, mix}, 0.9, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(um[i] == doctest::Approx(initial_value(mix, pts[i])).epsilon(1e-12));

    HostFunction host{1, [](const Eigen::VectorXd& x) { return std::cos(x[0]); }};
    const std::vector<double> uh = solve(Problem{zero, host}, 0.9, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(uh[i] == doctest::Approx(std::cos(pts[i][0])).epsilon(1e-12));

    RegularGrid grid({{-2.0, 2.0, 41}});
    std::vector<double> vals(grid.size());
    for (long f = 0; f < grid.size(); ++f) vals[f] = std::exp(-grid.node(f)[0]);
    GridSampled gs{grid, vals, GridSampled::Outside::Zero};
    const std::vector<double> ug = solve(Problem{zero, gs}, 0.9, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(ug[i] == doctest::Approx(initial_value(gs, pts[i])).epsilon(1e-12));
}

TEST_CASE("solve: a pure source term scales the data by e^{c t}") {
    CoefficientSet c{1, ScalarSchedule::constant(0.7), VectorSchedule::zero(1),
                     ScalarSchedule::constant(0.0), TensorSchedule::zero(1)};
    HostFunction host{1, [](const Eigen::VectorXd& x) { return std::sin(x[0]) + 2.0; }};
    std::vector<Eigen::VectorXd> pts{vec1(-0.3), vec1(0.0), vec1(1.1)};
    const double t = 1.3;
    const std::vector<double> u = solve(Problem{c, host}, t, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(u[i] ==
              doctest::Approx(std::exp(0.7 * t) * (std::sin(pts[i][0]) + 2.0)).epsilon(1e-12));
}

TEST_CASE("quadrature path agrees with the closed form on Gaussian data") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 2);
        const CoefficientSet c = testutil::random_coefficients(rng, n);
        const double t = 0.6;
        const PropagatorKernel k = build_kernel(c, t);

        GaussianState g{0.0, Eigen::VectorXd::Zero(n), testutil::random_spd(rng, n, 0.3, 0.8)};
        g.mean = Eigen::VectorXd::Constant(n, 0.2);
        const GaussianState pushed = propagate_gaussian(k, g);
        const GaussianDensity density(pushed);

        // Evaluate the same solution by convolution quadrature against a
        // host-function copy of the initial data.
        const GaussianDensity phi(g);
        HostFunction host{n, [&](const Eigen::VectorXd& y) { return phi(y); }};
        std::normal_distribution<double> norm;
        for (int p = 0; p < 3; ++p) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = 0.5 * norm(rng);
            const double uq = solve_quadrature(k, host, x);
            const double uc = density(x);
            CHECK(uq == doctest::Approx(uc).epsilon(1e-8));
        }
    }
}

TEST_CASE("quadrature path integrates the kernel to one") {
    // Flat data, no source, no drift: u = 1 by normalization.
    std::mt19937_64 rng(33);
    CoefficientSet c = testutil::random_coefficients(rng, 2);
    c.a1 = ScalarSchedule::constant(0.0);
    c.a3 = ScalarSchedule::constant(0.0);
    c.a2 = VectorSchedule::zero(2);
    const PropagatorKernel k = build_kernel(c, 0.8);
    HostFunction one{2, [](const Eigen::VectorXd&) { return 1.0; }};
    CHECK(solve_quadrature(k, one, Eigen::VectorXd::Zero(2)) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("grid-sampled data: outside policies") {
    RegularGrid grid({{-1.0, 1.0, 21}});
    std::vector<double> vals(grid.size(), 1.0);
    const CoefficientSet heat = heat_set(0.5);
    const PropagatorKernel k = build_kernel(heat, 0.5);

    GridSampled zero_ext{grid, vals, GridSampled::Outside::Zero};
    const double far = solve_quadrature(k, zero_ext, vec1(30.0));
    CHECK(far <= 1e-12);  // all mass outside the sampled box

    GridSampled strict{grid, vals, GridSampled::Outside::Error};
    CHECK_THROWS_AS(solve_quadrature(k, strict, vec1(30.0)), std::domain_error);
}

TEST_CASE("solve at t = 0 reproduces the initial data") {
    std::mt19937_64 rng(87);
    const CoefficientSet c = testutil::random_coefficients(rng, 1);
    std::vector<Eigen::VectorXd> pts{vec1(-0.4), vec1(0.1), vec1(0.8)};

    GaussianMixture mix{{GaussianState{-0.1, vec1(0.0), Eigen::MatrixXd::Constant(1, 1, 0.4)},
                         GaussianState{-0.9, vec1(0.5), Eigen::MatrixXd::Constant(1, 1, 0.2)}}};
    const std::vector<double> um = solve(Problem{c, mix}, 0.0, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(um[i] == doctest::Approx(initial_value(mix, pts[i])).epsilon(1e-13));

    // Delta data at t = 0 is still a point mass: reported, not evaluated.
    try {
        solve(Problem{c, DiracDelta{vec1(0.3)}}, 0.0, pts);
        FAIL("expected point_mass_error");
    } catch (const point_mass_error& e) {
        CHECK(e.state().mean[0] == doctest::Approx(0.3).epsilon(1e-14));
        CHECK(e.state().log_weight == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(e.state().cov.cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("solve reports a point mass when the kernel is degenerate") {
    // Pure drift: the delta never spreads.
    CoefficientSet drift{1, ScalarSchedule::constant(0.0),
                         VectorSchedule({ScalarSchedule::constant(2.0)}),
                         ScalarSchedule::constant(0.0), TensorSchedule::zero(1)};
    try {
        solve(Problem{drift, DiracDelta{vec1(1.0)}}, 1.0, {vec1(0.0)});
        FAIL("expected point_mass_error");
    } catch (const point_mass_error& e) {
        // z = x + 2t: the mass sits where z = y0, i.e. x = y0 - 2t = -1.
        CHECK(e.state().mean[0] == doctest::Approx(-1.0).epsilon(1e-13));
    }

    // Rank-one diffusion in two dimensions: degenerate along one direction.
    CoefficientSet partial{2, ScalarSchedule::constant(0.0), VectorSchedule::zero(2),
                           ScalarSchedule::constant(0.0),
                           TensorSchedule(2, {ScalarSchedule::constant(1.0),
                                              ScalarSchedule::constant(0.0),
                                              ScalarSchedule::constant(0.0)})};
    CHECK_THROWS_AS(
        solve(Problem{partial, DiracDelta{Eigen::VectorXd::Zero(2)}}, 1.0,
              {Eigen::VectorXd::Zero(2)}),
        point_mass_error);
}

TEST_CASE("solution by kernel evaluation matches the propagated-state density") {
    const CoefficientSet c = ou_set();
    const PropagatorKernel k = build_kernel(c, 0.7);
    const GaussianState state = propagate_gaussian(k, GaussianState::point_mass(vec1(1.0)));
    const GaussianDensity density(state);
    const std::vector<double> u =
        solve(k, DiracDelta{vec1(1.0)}, {vec1(-0.5), vec1(0.2), vec1(1.4)});
    CHECK(u[0] == doctest::Approx(density(vec1(-0.5))).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(density(vec1(0.2))).epsilon(1e-12));
    CHECK(u[2] == doctest::Approx(density(vec1(1.4))).epsilon(1e-12));
}

TEST_CASE("residual of exact special solutions vanishes") {
    // u = constant with zero coefficients: residual is exactly zero.
    const CoefficientSet zero = CoefficientSet::zero(1);
    auto constant_field = [](double, const Eigen::VectorXd&) { return 3.7; };
    CHECK(pde_residual(zero, constant_field, 0.5, vec1(0.2), 1e-3) == 0.0);

    // u = e^{c t} with only a source term: residual is O(h^2) small.
    CoefficientSet source{1, ScalarSchedule::constant(0.9), VectorSchedule::zero(1),
                          ScalarSchedule::constant(0.0), TensorSchedule::zero(1)};
    auto exp_field = [](double t, const Eigen::VectorXd&) { return std::exp(0.9 * t); };
    CHECK(std::abs(pde_residual(source, exp_field, 0.5, vec1(0.2), 1e-3)) <= 1e-6);
}

TEST_CASE("residual of the closed-form solution decreases at second order") {
    const CoefficientSet c = ou_set();
    CoefficientIntegrals ci(c, 2.0);
    PropagatorConfig cfg;
    auto u = [&](double t, const Eigen::VectorXd& x) {
        return kernel_eval(build_kernel(ci, t, cfg), x, vec1(1.0));
    };
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ux(-0.8, 1.2);
    double max1 = 0.0, max2 = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd x = vec1(ux(rng));
        max1 = std::max(max1, std::abs(pde_residual(c, u, 1.0, x, 1e-3)));
        max2 = std::max(max2, std::abs(pde_residual(c, u, 1.0, x, 5e-4)));
    }
    const double ratio = max1 / max2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("closed-form paths work in four dimensions, quadrature refuses them") {
    std::mt19937_64 rng(777);
    const CoefficientSet c = testutil::random_coefficients(rng, 4);
    const PropagatorKernel k = build_kernel(c, 0.5);
    GaussianState g{0.0, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Identity(4, 4) * 0.3};
    const GaussianState pushed = propagate_gaussian(k, g);
    CHECK(std::isfinite(pushed.log_weight));
    CHECK(pushed.cov.rows() == 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pushed.cov, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    HostFunction host{4, [](const Eigen::VectorXd&) { return 1.0; }};
    CHECK_THROWS_AS(solve_quadrature(k, host, Eigen::VectorXd::Zero(4)),
                    std::invalid_argument);
}

TEST_CASE("two-stage propagation equals direct propagation") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const CoefficientSet c = testutil::random_coefficients(rng, n);
        const double t1 = 0.4, t2 = 1.0;

        GaussianState g{0.2, Eigen::VectorXd::Constant(n, 0.3),
                        testutil::random_spd(rng, n, 0.2, 0.9)};

        const GaussianState direct = propagate_gaussian(build_kernel(c, t2), g);
        const GaussianState stage1 = propagate_gaussian(build_kernel(c, t1), g);
        const GaussianState stage2 =
            propagate_gaussian(build_kernel(c.shifted(t1), t2 - t1), stage1);

        CHECK(stage2.log_weight == doctest::Approx(direct.log_weight).epsilon(1e-9));
        CHECK((stage2.mean - direct.mean).cwiseAbs().maxCoeff() <=
              1e-8 * std::max(1.0, direct.mean.cwiseAbs().maxCoeff()));
        CHECK((stage2.cov - direct.cov).cwiseAbs().maxCoeff() <=
              1e-8 * std::max(1.0, direct.cov.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("normalized initial data keeps unit mass under the adapter") {
    std::mt19937_64 rng(550);
    for (int trial = 0; trial < 3; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 2);
        // Random drift/diffusion problem.
        std::vector<ScalarSchedule> b1;
        for (int i = 0; i < n; ++i) b1.push_back(testutil::random_schedule(rng, 1.0, 0.5));
        FpeCoefficients f{n, VectorSchedule(std::move(b1)),
                          testutil::random_schedule(rng, 1.0, 0.5),
                          TensorSchedule::scaled_tensor(
                              testutil::random_positive_schedule(rng),
                              testutil::random_spd(rng, n, 0.3, 1.0))};
        const CoefficientSet c = from_fpe(f);

        GaussianState g{0.0, Eigen::VectorXd::Zero(n),
                        Eigen::MatrixXd::Identity(n, n) * 0.2};
        const double t = 0.8;
        const GaussianState pushed = propagate_gaussian(build_kernel(c, t), g);

        // Integrate the density over mean +/- 10 standard deviations.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pushed.cov);
        const double sd = std::sqrt(es.eigenvalues().maxCoeff());
        RegularGrid grid = RegularGrid::centered(pushed.mean,
                                                 Eigen::VectorXd::Constant(n, 10.0 * sd),
                                                 n == 1 ? 801 : 201);
        const GaussianDensity density(pushed);
        std::vector<double> vals(grid.size());
        for (long fidx = 0; fidx < grid.size(); ++fidx) vals[fidx] = density(grid.node(fidx));
        CHECK(grid.integrate(vals) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("isotropic special case matches the independent reference") {
    const ScalarSchedule a1 = ScalarSchedule::polynomial({0.2, 0.4});
    const VectorSchedule a2({ScalarSchedule::constant(0.3)});
    const ScalarSchedule a3 = ScalarSchedule::polynomial({-0.2, 0.5});
    const ScalarSchedule f = ScalarSchedule::polynomial({0.4, 0.0, 0.3});
    CoefficientSet c{1, a1, a2, a3, TensorSchedule::isotropic(1, f)};
    const double t = 0.9;
    const PropagatorKernel k = build_kernel(c, t);
    const testutil::IsotropicReference ref(a1, a2, a3, f, t, 1);
    for (double x = -1.0; x <= 1.0; x += 0.2) {
        const double lib = kernel_eval(k, vec1(x), vec1(0.4));
        const double independent = ref.delta_solution(vec1(x), vec1(0.4));
        CHECK(lib == doctest::Approx(independent).epsilon(1e-10));
    }
}

TEST_CASE("separable tensor case matches the independent reference in 2-D") {
    std::mt19937_64 rng(660);
    const Eigen::MatrixXd m = testutil::random_spd(rng, 2, 0.4, 1.2);
    const ScalarSchedule a1 = ScalarSchedule::constant(0.1);
    const VectorSchedule a2({ScalarSchedule::constant(0.2), ScalarSchedule::polynomial({0.0, 0.3})});
    const ScalarSchedule a3 = ScalarSchedule::constant(-0.3);
    const ScalarSchedule f = ScalarSchedule::polynomial({0.5, 0.4});
    CoefficientSet c{2, a1, a2, a3, TensorSchedule::scaled_tensor(f, m)};
    const double t = 0.8;
    const PropagatorKernel k = build_kernel(c, t);
    const testutil::ScaledTensorReference ref(a1, a2, a3, f, m, t);
    const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(2, 0.2);
    std::normal_distribution<double> g;
    for (int i = 0; i < 12; ++i) {
        Eigen::VectorXd x(2);
        x << 0.7 * g(rng), 0.7 * g(rng);
        CHECK(kernel_eval(k, x, y0) ==
              doctest::Approx(ref.delta_solution(x, y0)).epsilon(1e-10));
    }
}
