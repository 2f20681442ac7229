#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fpprop/oracles.hpp"
#include "fpprop/propagator.hpp"
#include "test_support.hpp"

using namespace fpprop;

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

FpeCoefficients ou_fpe() {
    return FpeCoefficients{1, VectorSchedule::zero(1), ScalarSchedule::constant(-1.0),
                           TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))};
}

GaussianMixture gaussian_start(double mean, double var) {
    return GaussianMixture{{GaussianState{0.0, vec1(mean), Eigen::MatrixXd::Constant(1, 1, var)}}};
}

// Closed-form solution values on the oracle grid.
SolutionGrid closed_form_on(const CoefficientSet& c, const InitialData& phi, double t,
                            const RegularGrid& grid) {
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(grid.size());
    for (long f = 0; f < grid.size(); ++f) pts.push_back(grid.node(f));
    return SolutionGrid{grid, t, solve(Problem{c, phi}, t, pts)};
}

double grid_variance(const SolutionGrid& s) {
    double mass = 0.0, mean = 0.0, second = 0.0;
    const double h = s.grid.step(0);
    for (long f = 0; f < s.grid.size(); ++f) {
        const double x = s.grid.node(f)[0];
        mass += s.values[f] * h;
        mean += x * s.values[f] * h;
        second += x * x * s.values[f] * h;
    }
    mean /= mass;
    return second / mass - mean * mean;
}

}  // namespace

TEST_CASE("finite differences: zero coefficients leave the data unchanged") {
    RegularGrid grid({{-2.0, 2.0, 81}});
    FdConfig cfg{grid, 1e-2, 0.5};
    const CoefficientSet zero = CoefficientSet::zero(1);
    const SolutionGrid out = fd_solve(zero, gaussian_start(0.0, 0.2), 0.5, cfg);
    for (long f = 0; f < grid.size(); ++f) {
        const double expect =
            f == 0 || f == grid.size() - 1
                ? 0.0
                : initial_value(gaussian_start(0.0, 0.2), grid.node(f));
        CHECK(out.values[f] == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("finite differences reproduce the spreading Gaussian") {
    // Pure diffusion, sigma0^2 = 0.5, t = 0.25: variance 1.0 afterwards.
    CoefficientSet heat{1, ScalarSchedule::constant(0.0), VectorSchedule::zero(1),
                        ScalarSchedule::constant(0.0),
                        TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))};
    RegularGrid grid({{-10.0, 10.0, 1001}});  // h = 0.02
    FdConfig cfg{grid, 1e-3, 0.5};
    const InitialData phi = gaussian_start(0.0, 0.5);
    const SolutionGrid fd = fd_solve(heat, phi, 0.25, cfg);
    const SolutionGrid exact = closed_form_on(heat, phi, 0.25, grid);
    CHECK(grid_variance(fd) == doctest::Approx(0.5 + 2.0 * 0.25).epsilon(1e-3));
    CHECK(grid_error(fd, exact).linf <= 1e-3);
}

TEST_CASE("finite differences track the mean-reverting variance trajectory") {
    const CoefficientSet c = from_fpe(ou_fpe());
    RegularGrid grid({{-8.0, 9.0, 1701}});
    FdConfig cfg{grid, 1e-3, 0.5};
    //

    // Narrow Gaussian stands in for the delta start.
    const InitialData phi = gaussian_start(1.0, 0.01);
    for (double t : {0.25, 0.5, 1.0}) {
        const SolutionGrid fd = fd_solve(c, phi, t, cfg);
        const double expect = 0.01 * std::exp(-2.0 * t) + (1.0 - std::exp(-2.0 * t));
        CHECK(grid_variance(fd) == doctest::Approx(expect).epsilon(0.02));
    }
}

TEST_CASE("finite differences agree with the closed form on a 2-D anisotropic problem") {
    Eigen::MatrixXd m(2, 2);
    m << 0.8, 0.3, 0.3, 0.5;
    CoefficientSet c{2, ScalarSchedule::constant(0.1),
                     VectorSchedule({ScalarSchedule::constant(0.2), ScalarSchedule::constant(-0.1)}),
                     ScalarSchedule::constant(-0.4),
                     TensorSchedule::scaled_tensor(ScalarSchedule::constant(1.0), m)};
    GaussianMixture phi{{GaussianState{0.0, Eigen::VectorXd::Zero(2),
                                       Eigen::MatrixXd::Identity(2, 2) * 0.5}}};
    RegularGrid grid({{-5.0, 5.0, 101}, {-5.0, 5.0, 101}});
    FdConfig cfg{grid, 5e-3, 0.5};
    const double t = 0.3;
    const SolutionGrid fd = fd_solve(c, phi, t, cfg);
    const SolutionGrid exact = closed_form_on(c, phi, t, grid);
    CHECK(grid_error(fd, exact).linf <= 1e-3);
}

TEST_CASE("quadrature solution of ramp data agrees with the fd oracle") {
    // C0 initial data exercises the sampled-data quadrature path.
    CoefficientSet heat{1, ScalarSchedule::constant(0.0), VectorSchedule::zero(1),
                        ScalarSchedule::constant(0.0),
                        TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))};
    RegularGrid grid({{-8.0, 8.0, 801}});
    std::vector<double> ramp(grid.size());
    for (long f = 0; f < grid.size(); ++f) {
        const double x = grid.node(f)[0];
        ramp[f] = x <= -1.0 ? 0.0 : x >= 1.0 ? 1.0 : 0.5 * (x + 1.0);
    }
    GridSampled phi{grid, ramp, GridSampled::Outside::Zero};
    const double t = 0.25;
    const SolutionGrid fd = fd_solve(heat, phi, t, FdConfig{grid, 1e-3, 0.5});

    // Compare on the interior (the fd run pins the frame to zero while the
    // quadrature sees the ramp's tail mass).
    const PropagatorKernel k = build_kernel(heat, t);
    double linf = 0.0;
    for (long f = 0; f < grid.size(); ++f) {
        const Eigen::VectorXd x = grid.node(f);
        if (std::abs(x[0]) > 5.0) continue;
        linf = std::max(linf, std::abs(fd.values[f] - solve_quadrature(k, phi, x)));
    }
    CHECK(linf <= 1e-3);
}

TEST_CASE("finite differences converge at second order in space and time") {
    // Halving h and dt together shrinks the error about fourfold.
    CoefficientSet heat{1, ScalarSchedule::constant(0.0), VectorSchedule::zero(1),
                        ScalarSchedule::constant(0.0),
                        TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))};
    const InitialData phi0 = gaussian_start(0.0, 0.5);
    auto err = [&](const CoefficientSet& c, const InitialData& phi, double t, int count,
                   double dt) {
        RegularGrid grid({{-12.0, 12.0, count}});
        FdConfig cfg{grid, dt, 0.5};
        return grid_error(fd_solve(c, phi, t, cfg), closed_form_on(c, phi, t, grid)).linf;
    };
    const double e1 = err(heat, phi0, 0.5, 301, 0.02);
    const double e2 = err(heat, phi0, 0.5, 601, 0.01);
    CHECK(e1 / e2 > 2.8);
    CHECK(e1 / e2 < 5.2);

    const CoefficientSet ou = from_fpe(ou_fpe());
    const InitialData phi1 = gaussian_start(1.0, 0.25);
    const double o1 = err(ou, phi1, 0.5, 301, 0.02);
    const double o2 = err(ou, phi1, 0.5, 601, 0.01);
    CHECK(o1 / o2 > 2.8);
    CHECK(o1 / o2 < 5.2);
}

TEST_CASE("finite differences conserve mass for conservation-form coefficients") {
    const CoefficientSet c = from_fpe(ou_fpe());
    RegularGrid grid({{-10.0, 11.0, 1051}});
    FdConfig cfg{grid, 2e-3, 0.5};
    const InitialData phi = gaussian_start(1.0, 0.04);
    const SolutionGrid out = fd_solve(c, phi, 1.0, cfg);
    CHECK(std::abs(out.grid.integrate(out.values) - 1.0) < 1e-4);
}

TEST_CASE("finite differences reject unstable explicit configurations and bad input") {
    CoefficientSet heat{1, ScalarSchedule::constant(0.0), VectorSchedule::zero(1),
                        ScalarSchedule::constant(0.0),
                        TensorSchedule::isotropic(1, ScalarSchedule::constant(1.0))};
    RegularGrid grid({{-5.0, 5.0, 101}});  // h = 0.1, explicit bound dt <= h^2/2 = 5e-3
    FdConfig explicit_bad{grid, 1e-2, 0.0};
    CHECK_THROWS_AS(fd_solve(heat, gaussian_start(0.0, 0.3), 0.5, explicit_bad),
                    std::invalid_argument);
    FdConfig explicit_ok{grid, 4e-3, 0.0};
    CHECK_NOTHROW(fd_solve(heat, gaussian_start(0.0, 0.3), 0.1, explicit_ok));

    FdConfig cn{grid, 1e-2, 0.5};
    CHECK_THROWS_AS(fd_solve(heat, DiracDelta{vec1(0.0)}, 0.5, cn), std::invalid_argument);
    const CoefficientSet c3 = CoefficientSet::zero(3);
    RegularGrid g3({{-1.0, 1.0, 5}, {-1.0, 1.0, 5}, {-1.0, 1.0, 5}});
    CHECK_THROWS_AS(fd_solve(c3, gaussian_start(0.0, 0.3), 0.1, FdConfig{g3, 1e-3, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("path sampling: no noise means no motion, pure drift is exact") {
    FpeCoefficients still{1, VectorSchedule::zero(1), ScalarSchedule::constant(0.0),
                          TensorSchedule::zero(1)};
    const Eigen::MatrixXd fixed =
        mc_sample(still, StartSampler::fixed(vec1(0.7)), 1.0, McConfig{200, 0.125, 5});
    for (long i = 0; i < fixed.rows(); ++i) CHECK(fixed(i, 0) == 0.7);

    FpeCoefficients drift{1, VectorSchedule({ScalarSchedule::constant(1.0)}),
                          ScalarSchedule::constant(0.0), TensorSchedule::zero(1)};
    const Eigen::MatrixXd moved =
        mc_sample(drift, StartSampler::fixed(vec1(0.0)), 2.0, McConfig{50, 0.5, 5});
    for (long i = 0; i < moved.rows(); ++i) CHECK(moved(i, 0) == 2.0);
}

TEST_CASE("path sampling reaches the stationary variance of the mean-reverting process") {
    const Eigen::MatrixXd samples =
        mc_sample(ou_fpe(), StartSampler::fixed(vec1(0.0)), 6.0, McConfig{100000, 0.01, 99});
    GaussianState reference{0.0, vec1(0.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
    const MomentReport rep = compare_moments(samples, reference);
    CHECK(!rep.degenerate);
    CHECK(rep.pass);
}

TEST_CASE("path sampling is reproducible and stream-split by path index") {
    const McConfig cfg{400, 0.05, 1234};
    const Eigen::MatrixXd a = mc_sample(ou_fpe(), StartSampler::fixed(vec1(0.3)), 1.0, cfg);
    const Eigen::MatrixXd b = mc_sample(ou_fpe(), StartSampler::fixed(vec1(0.3)), 1.0, cfg);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

    // Shrinking the path count must not change the paths that remain.
    const Eigen::MatrixXd c = mc_sample(ou_fpe(), StartSampler::fixed(vec1(0.3)), 1.0,
                                        McConfig{100, 0.05, 1234});
    CHECK((a.topRows(100) - c).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("path sampling rejects an indefinite diffusion tensor") {
    FpeCoefficients bad{2, VectorSchedule::zero(2), ScalarSchedule::constant(0.0),
                        TensorSchedule(2, {ScalarSchedule::constant(1.0),
                                           ScalarSchedule::constant(2.0),
                                           ScalarSchedule::constant(1.0)})};
    CHECK_THROWS_AS(
        mc_sample(bad, StartSampler::fixed(Eigen::VectorXd::Zero(2)), 1.0, McConfig{10, 0.1, 1}),
        std::invalid_argument);
}

TEST_CASE("drift bias halves when the step halves (weak first order)") {
    // Common random numbers (same seed) keep the comparison sharp.
    const double t = 1.0;
    const long n = 400000;
    const Eigen::MatrixXd coarse =
        mc_sample(ou_fpe(), StartSampler::fixed(vec1(1.0)), t, McConfig{n, 0.1, 31});
    const Eigen::MatrixXd fine =
        mc_sample(ou_fpe(), StartSampler::fixed(vec1(1.0)), t, McConfig{n, 0.05, 31});
    const double bias1 = coarse.col(0).mean() - std::exp(-1.0);
    const double bias2 = fine.col(0).mean() - std::exp(-1.0);
    CHECK(std::abs(bias1) > std::abs(bias2));
    const double ratio = bias1 / bias2;
    CHECK(ratio > 1.55);
    CHECK(ratio < 2.6);
}

TEST_CASE("moment comparison: self-test, power, and degenerate input") {
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> g;
    const long n = 20000;
    Eigen::MatrixXd samples(n, 2);
    // Exact draws from the reference.
    Eigen::MatrixXd l(2, 2);
    l << 1.0, 0.0, 0.4, 0.8;
    for (long i = 0; i < n; ++i) {
        Eigen::VectorXd xi(2);
        xi << g(rng), g(rng);
        samples.row(i) = (l * xi).transpose();
    }
    GaussianState ref{0.0, Eigen::VectorXd::Zero(2), l * l.transpose()};
    const MomentReport good = compare_moments(samples, ref);
    CHECK(good.pass);

    // Mean shifted by 10 sigma / sqrt(N): decisively detected.
    GaussianState shifted = ref;
    shifted.mean[0] += 10.0 * std::sqrt(ref.cov(0, 0) / n);
    const MomentReport detected = compare_moments(samples, shifted);
    CHECK(!detected.pass);
    CHECK(detected.max_abs_z > 4.0);

    const MomentReport degen = compare_moments(samples.topRows(1), ref);
    CHECK(degen.degenerate);
    CHECK(!degen.pass);
}

TEST_CASE("grid error norms: trivial cases and brute-force agreement") {
    RegularGrid grid({{0.0, 1.0, 11}, {0.0, 2.0, 21}});
    std::vector<double> a(grid.size()), b(grid.size());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : a) v = u(rng);

    SolutionGrid sa{grid, 1.0, a};
    CHECK(grid_error(sa, sa).linf == 0.0);
    CHECK(grid_error(sa, sa).l1 == 0.0);
    CHECK(grid_error(sa, sa).l2 == 0.0);

    b = a;
    for (auto& v : b) v += 1e-3;
    SolutionGrid sb{grid, 1.0, b};
    CHECK(grid_error(sa, sb).linf == doctest::Approx(1e-3).epsilon(1e-12));

    for (auto& v : b) v = u(rng);
    double linf = 0.0, l1 = 0.0, l2 = 0.0;
    const double vol = grid.step(0) * grid.step(1);
    for (long f = 0; f < grid.size(); ++f) {
        const double d = std::abs(a[f] - b[f]);
        linf = std::max(linf, d);
        l1 += d * vol;
        l2 += d * d * vol;
    }
    const GridErrorNorms norms = grid_error(sa, SolutionGrid{grid, 1.0, b});
    CHECK(norms.linf == doctest::Approx(linf).epsilon(1e-14));
    CHECK(norms.l1 == doctest::Approx(l1).epsilon(1e-13));
    CHECK(norms.l2 == doctest::Approx(std::sqrt(l2)).epsilon(1e-13));

    RegularGrid other({{0.0, 1.0, 11}, {0.0, 2.0, 22}});
    CHECK_THROWS_AS(
        grid_error(sa, SolutionGrid{other, 1.0, std::vector<double>(other.size(), 0.0)}),
        std::invalid_argument);
}
