#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpprop/coefficients.hpp"
#include "fpprop/gaussian.hpp"

namespace fpprop {

struct PropagatorConfig {
    QuadratureConfig quad;          // time-integral quadrature
    double eps_deg = 1e-12;         // relative eigenvalue cutoff for deterministic directions
    double eps_abs_deg = 1e-250;    // absolute cutoff when tau itself is ~0
    double k_sigma = 8.0;           // spatial integration box half-width, in std deviations
    double tol_space = 1e-10;       // relative tolerance of the spatial quadrature
    int min_nodes_per_axis = 16;
    int max_nodes_per_axis = 512;
    double support_match_tol = 1e-9;  // deterministic-component match tolerance
};

/// Frozen evaluation state of the solution operator at one time: the
/// integrated coefficients plus the eigendecomposition of tau. Eigenvalue
/// directions at numerical zero are flagged deterministic; along them the
/// kernel acts by substitution instead of convolution.
struct PropagatorKernel {
    double t = 0.0;
    int dim = 0;
    double alpha1 = 0.0;
    double alpha3 = 0.0;
    Eigen::VectorXd alpha2;
    Eigen::VectorXd shift;
    Eigen::MatrixXd tau;
    Eigen::VectorXd tau_eigenvalues;   // ascending, clamped at >= 0
    Eigen::MatrixXd tau_eigenvectors;  // orthonormal columns
    std::vector<char> deterministic;   // per eigen-direction
    int stochastic_count = 0;
    PropagatorConfig config;

    Eigen::VectorXd z(const Eigen::VectorXd& x) const;
    bool fully_deterministic() const { return stochastic_count == 0; }
};

/// Thrown when the requested pointwise values do not exist because the
/// solution is a point mass (delta data with a deterministic tau
/// direction). state() carries the full description: weight exp(log_weight),
/// mean, and the (singular) covariance.
class point_mass_error : public std::runtime_error {
public:
    point_mass_error(const std::string& what, GaussianState state)
        : std::runtime_error(what), state_(std::move(state)) {}
    const GaussianState& state() const { return state_; }

private:
    GaussianState state_;
};

PropagatorKernel build_kernel(const CoefficientSet& c, double t, PropagatorConfig cfg = {});
PropagatorKernel build_kernel(const CoefficientIntegrals& ci, double t, PropagatorConfig cfg = {});

/// Kernel value K(x, y): a Gaussian in y with mean z(x) and covariance
/// 2 tau, weighted by exp(alpha1). Computed in log space through the
/// eigendecomposition. Throws std::domain_error when tau is fully
/// deterministic (the kernel is a delta, not a function) or when y is off
/// the deterministic support.
double kernel_eval(const PropagatorKernel& k, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Closed-form push of a weighted Gaussian through the kernel:
///   log_weight += alpha1 - n alpha3,
///   mean       = (mean - shift) e^{-alpha3},
///   cov        = (cov + 2 tau) e^{-2 alpha3}.
GaussianState propagate_gaussian(const PropagatorKernel& k, const GaussianState& g);

/// Convolution of the kernel with arbitrary initial data by tensorized
/// Gauss-Legendre quadrature over the +/- k_sigma box in tau's eigenbasis,
/// with deterministic directions collapsed by substitution. Supports
/// dim <= 3.
double solve_quadrature(const PropagatorKernel& k, const InitialData& phi,
                        const Eigen::VectorXd& x);

struct Problem {
    CoefficientSet coefficients;
    InitialData initial;
};

/// Solution values u(t, x) at the given points. Dispatches on the initial
/// data: closed form for delta/Gaussian data, quadrature for sampled or
/// host-supplied data, exact substitution u = e^{alpha1} phi(z) when tau is
/// fully deterministic. Throws point_mass_error when the solution is not a
/// function.
std::vector<double> solve(const PropagatorKernel& k, const InitialData& phi,
                          const std::vector<Eigen::VectorXd>& points);
std::vector<double> solve(const Problem& p, double t, const std::vector<Eigen::VectorXd>& points,
                          PropagatorConfig cfg = {});

/// The propagated state for delta or single-Gaussian data (closed form,
/// valid for any dim and any degeneracy).
GaussianState solve_state(const Problem& p, double t, PropagatorConfig cfg = {});

using TimeField = std::function<double(double, const Eigen::VectorXd&)>;

/// du/dt - a1 u - a2 . grad u - a3 x . grad u - a4 : grad grad u with all
/// derivatives replaced by second-order central differences of step h.
double pde_residual(const CoefficientSet& c, const TimeField& u, double t,
                    const Eigen::VectorXd& x, double h);

}  // namespace fpprop
