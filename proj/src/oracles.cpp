#include "fpprop/oracles.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

#include "fpprop/parallel.hpp"

namespace fpprop {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

long step_count(double t, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    return std::max<long>(1, static_cast<long>(std::ceil(t / dt - 1e-9)));
}

// Principal square root of 2 D(s); D must be non-negative definite.
Eigen::MatrixXd diffusion_sqrt(const TensorSchedule& D, double s, double eps_psd) {
    const Eigen::MatrixXd d = D(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] < -eps_psd * scale)
            throw std::invalid_argument("mc_sample: diffusion tensor not non-negative definite "
                                        "at s = " + std::to_string(s));
        lam[i] = std::sqrt(2.0 * std::max(lam[i], 0.0));
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SolutionGrid fd_solve(const CoefficientSet& c, const InitialData& phi, double t,
                      const FdConfig& cfg) {
    const int n = c.dim;
    if (n != 1 && n != 2)
        throw std::invalid_argument("fd_solve: supports dim 1 and 2 only");
    if (cfg.grid.dim() != n) throw std::invalid_argument("fd_solve: grid dimension mismatch");
    if (cfg.theta < 0.0 || cfg.theta > 1.0)
        throw std::invalid_argument("fd_solve: theta must lie in [0, 1]");
    if (std::holds_alternative<DiracDelta>(phi))
        throw std::invalid_argument(
            "fd_solve: delta data is not grid-representable; use a narrow Gaussian");

    const long steps = step_count(t, cfg.dt);
    const double dt = t / steps;

    if (cfg.theta < 0.5) {
        double lam_max = 0.0;
        for (int k = 0; k <= 64; ++k) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.a4(t * k / 64.0),
                                                              Eigen::EigenvaluesOnly);
            lam_max = std::max(lam_max, es.eigenvalues().maxCoeff());
        }
        double h2 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) h2 = std::min(h2, cfg.grid.step(i) * cfg.grid.step(i));
        if (lam_max > 0.0 && dt > h2 / (2.0 * n * lam_max))
            throw std::invalid_argument("fd_solve: dt violates the parabolic stability bound "
                                        "for theta < 1/2");
    }

    const long size = cfg.grid.size();
    Eigen::VectorXd u(size);
    for (long f = 0; f < size; ++f) u[f] = initial_value(phi, cfg.grid.node(f));

    // Zero Dirichlet boundary; boundary nodes stay pinned at 0.
    std::vector<char> interior(size, 1);
    for (long f = 0; f < size; ++f) {
        long rem = f;
        for (int i = n - 1; i >= 0; --i) {
            const int k = static_cast<int>(rem % cfg.grid.axis(i).count);
            rem /= cfg.grid.axis(i).count;
            if (k == 0 || k == cfg.grid.axis(i).count - 1) interior[f] = 0;
        }
        if (!interior[f]) u[f] = 0.0;
    }

    std::vector<long> stride(n, 1);
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * cfg.grid.axis(i + 1).count;

    auto assemble = [&](double s) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(size * (n == 1 ? 3 : 9));
        const double a1 = c.a1(s);
        const Eigen::VectorXd a2 = c.a2(s);
        const double a3 = c.a3(s);
        const Eigen::MatrixXd a4 = c.a4(s);
        for (long f = 0; f < size; ++f) {
            if (!interior[f]) continue;
            const Eigen::VectorXd x = cfg.grid.node(f);
            trip.emplace_back(f, f, a1);
            for (int i = 0; i < n; ++i) {
                const double h = cfg.grid.step(i);
                const double drift = a2[i] + a3 * x[i];
                trip.emplace_back(f, f + stride[i], drift / (2.0 * h) + a4(i, i) / (h * h));
                trip.emplace_back(f, f - stride[i], -drift / (2.0 * h) + a4(i, i) / (h * h));
                trip.emplace_back(f, f, -2.0 * a4(i, i) / (h * h));
                for (int j = i + 1; j < n; ++j) {
                    const double w = 2.0 * a4(i, j) / (4.0 * h * cfg.grid.step(j));
                    if (w == 0.0) continue;
                    trip.emplace_back(f, f + stride[i] + stride[j], w);
                    trip.emplace_back(f, f - stride[i] - stride[j], w);
                    trip.emplace_back(f, f + stride[i] - stride[j], -w);
                    trip.emplace_back(f, f - stride[i] + stride[j], -w);
                }
            }
        }
        Eigen::SparseMatrix<double> L(size, size);
        L.setFromTriplets(trip.begin(), trip.end());
        return L;
    };

    const bool frozen = c.time_invariant();
    Eigen::SparseMatrix<double> identity(size, size);
    identity.setIdentity();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::SparseMatrix<double> rhs_op;
    bool factored = false;
    for (long k = 0; k < steps; ++k) {
        if (!factored || !frozen) {
            const Eigen::SparseMatrix<double> L = assemble((k + 0.5) * dt);
            Eigen::SparseMatrix<double> lhs = identity - cfg.theta * dt * L;
            rhs_op = identity + (1.0 - cfg.theta) * dt * L;
            lhs.makeCompressed();
            lu.compute(lhs);
            if (lu.info() != Eigen::Success)
                throw std::runtime_error("fd_solve: sparse factorization failed");
            factored = true;
        }
        u = lu.solve(rhs_op * u);
    }

    SolutionGrid out{cfg.grid, t, std::vector<double>(size)};
    Eigen::VectorXd::Map(out.values.data(), size) = u;
    return out;
}

Eigen::MatrixXd mc_sample(const FpeCoefficients& f, const StartSampler& start, double t,
                          const McConfig& cfg) {
    if (cfg.n_paths < 1) throw std::invalid_argument("mc_sample: n_paths must be >= 1");
    const int n = f.dim;
    const long steps = step_count(t, cfg.dt);
    const double dt = t / steps;
    const double sqrt_dt = std::sqrt(dt);

    // Per-step coefficients are shared across paths.
    std::vector<Eigen::VectorXd> b1(steps);
    std::vector<double> b2(steps);
    std::vector<Eigen::MatrixXd> sigma(steps);
    for (long k = 0; k < steps; ++k) {
        const double s = k * dt;
        b1[k] = f.b1(s);
        b2[k] = f.b2(s);
        sigma[k] = diffusion_sqrt(f.D, s, 1e-12);
    }

    Eigen::MatrixXd samples(cfg.n_paths, n);
    parallel_for(0, cfg.n_paths, [&](long lo, long hi) {
        Eigen::VectorXd x(n), xi(n);
        for (long i = lo; i < hi; ++i) {
            std::mt19937_64 rng(splitmix64(cfg.seed + 0x9E3779B97F4A7C15ull *
                                                          static_cast<std::uint64_t>(i + 1)));
            std::normal_distribution<double> normal;
            x = start(rng);
            for (long k = 0; k < steps; ++k) {
                for (int d = 0; d < n; ++d) xi[d] = normal(rng);
                x += (b1[k] + b2[k] * x) * dt + sqrt_dt * (sigma[k] * xi);
            }
            samples.row(i) = x;
        }
    });
    return samples;
}

MomentReport compare_moments(const Eigen::MatrixXd& samples, const GaussianState& reference,
                             double z_limit) {
    const long N = samples.rows();
    const int n = static_cast<int>(samples.cols());
    if (N < 1) throw std::invalid_argument("compare_moments: empty sample set");
    if (reference.dim() != n)
        throw std::invalid_argument("compare_moments: reference dimension mismatch");

    MomentReport rep;
    rep.sample_mean = samples.colwise().mean();
    if (N < 2) {
        rep.degenerate = true;
        rep.sample_cov = Eigen::MatrixXd::Zero(n, n);
        return rep;
    }

    const Eigen::MatrixXd centered = samples.rowwise() - rep.sample_mean.transpose();
    rep.sample_cov = centered.transpose() * centered / static_cast<double>(N - 1);

    rep.mean_z.resize(n);
    for (int j = 0; j < n; ++j) {
        const double se = std::sqrt(std::max(rep.sample_cov(j, j), 1e-300) / N);
        rep.mean_z[j] = (rep.sample_mean[j] - reference.mean[j]) / se;
    }

    rep.cov_z.resize(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            // Fourth-moment standard error of a covariance entry.
            const double m4 =
                (centered.col(j).array().square() * centered.col(k).array().square()).mean();
            const double var = std::max(m4 - rep.sample_cov(j, k) * rep.sample_cov(j, k), 0.0);
            const double se = std::sqrt(std::max(var / N, 1e-300));
            rep.cov_z(j, k) = (rep.sample_cov(j, k) - reference.cov(j, k)) / se;
        }
    }

    rep.max_abs_z = std::max(rep.mean_z.cwiseAbs().maxCoeff(), rep.cov_z.cwiseAbs().maxCoeff());
    rep.pass = rep.max_abs_z <= z_limit;
    return rep;
}

GridErrorNorms grid_error(const SolutionGrid& a, const SolutionGrid& b) {
    if (!(a.grid == b.grid) || std::abs(a.time - b.time) > 1e-12 * std::max(1.0, std::abs(a.time)))
        throw std::invalid_argument("grid_error: grids/times must match");
    const double vol = a.grid.cell_volume();
    GridErrorNorms out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = std::abs(a.values[i] - b.values[i]);
        out.linf = std::max(out.linf, d);
        out.l1 += d * vol;
        out.l2 += d * d * vol;
    }
    out.l2 = std::sqrt(out.l2);
    return out;
}

}  // namespace fpprop
