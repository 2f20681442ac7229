#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fpprop/coefficients.hpp"
#include "fpprop/gaussian.hpp"

namespace fpprop {

/// theta-method configuration for the finite-difference reference solver.
/// theta = 1/2 is Crank-Nicolson; theta < 1/2 must satisfy the parabolic
/// stability bound dt <= h^2 / (2 n lambda_max(a4)).
struct FdConfig {
    RegularGrid grid;
    double dt;
    double theta = 0.5;
};

struct SolutionGrid {
    RegularGrid grid;
    double time;
    std::vector<double> values;
};

/// Second-order central-difference discretization (4-point cross stencil
/// for mixed derivatives), theta-method in time with coefficients frozen at
/// the half step, zero Dirichlet boundary. Supports dim 1 and 2.
SolutionGrid fd_solve(const CoefficientSet& c, const InitialData& phi, double t,
                      const FdConfig& cfg);

struct McConfig {
    long n_paths;
    double dt;
    std::uint64_t seed = 0;
};

/// Initial state for sampled paths: a fixed point, or a per-path sampler
/// drawing from the initial distribution with the path's own generator.
class StartSampler {
public:
    static StartSampler fixed(Eigen::VectorXd x) {
        StartSampler s;
        s.point_ = std::move(x);
        return s;
    }
    static StartSampler draw(std::function<Eigen::VectorXd(std::mt19937_64&)> f) {
        StartSampler s;
        s.sampler_ = std::move(f);
        return s;
    }
    Eigen::VectorXd operator()(std::mt19937_64& rng) const {
        return sampler_ ? sampler_(rng) : point_;
    }

private:
    StartSampler() = default;
    Eigen::VectorXd point_;
    std::function<Eigen::VectorXd(std::mt19937_64&)> sampler_;
};

/// Euler-Maruyama paths of dX = (b1(s) + b2(s) X) ds + sigma(s) dW with
/// sigma(s) the principal square root of 2 D(s). Returns the terminal
/// states, one row per path. Each path draws from its own generator seeded
/// by a split of (seed, path index), so results are reproducible and
/// independent of the path count and thread count.
Eigen::MatrixXd mc_sample(const FpeCoefficients& f, const StartSampler& start, double t,
                          const McConfig& cfg);

struct MomentReport {
    bool degenerate = false;  // too few samples for standard errors
    bool pass = false;
    Eigen::VectorXd mean_z;       // per-component mean z-scores
    Eigen::MatrixXd cov_z;        // per-entry covariance z-scores
    double max_abs_z = 0.0;
    Eigen::VectorXd sample_mean;
    Eigen::MatrixXd sample_cov;
};

/// z-scores of sample mean/covariance against a reference Gaussian. The
/// covariance standard errors use the sample fourth moments. pass is true
/// when every |z| <= z_limit.
MomentReport compare_moments(const Eigen::MatrixXd& samples, const GaussianState& reference,
                             double z_limit = 4.0);

struct GridErrorNorms {
    double linf;
    double l1;  // cell-volume weighted
    double l2;  // cell-volume weighted
};

/// Discrete error norms between two solutions on the same grid and time.
GridErrorNorms grid_error(const SolutionGrid& a, const SolutionGrid& b);

}  // namespace fpprop
