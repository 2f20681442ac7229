#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fpprop/schedule.hpp"

namespace fpprop {

/// The four coefficient schedules of the evolution equation
///   du/dt = a1(t) u + a2(t).grad u + a3(t) x.grad u + a4(t) : grad grad u.
struct CoefficientSet {
    int dim;
    ScalarSchedule a1;
    VectorSchedule a2;
    ScalarSchedule a3;
    TensorSchedule a4;

    static CoefficientSet zero(int dim);

    double t_max() const;
    bool time_invariant() const;
    /// Restarted at t0: schedules become s -> f(t0 + s).
    CoefficientSet shifted(double t0) const;
    /// Dim consistency + domain coverage of [0, horizon] + sampled PSD check
    /// on a4. Throws std::invalid_argument on violation.
    void validate(double horizon, double eps_psd = 1e-12) const;
};

/// Drift/diffusion form: dX = (b1(t) + b2(t) X) dt with diffusion tensor
/// D(t), i.e. dw/dt = -div[(b1 + b2 x) w] + grad grad : (D w). The drift
/// slope b2 is scalar by construction.
struct FpeCoefficients {
    int dim;
    VectorSchedule b1;
    ScalarSchedule b2;
    TensorSchedule D;

    double t_max() const;
    void validate(double horizon, double eps_psd = 1e-12) const;
};

/// Expands the divergence form into the four-coefficient form:
/// a1 = -n b2, a2 = -b1, a3 = -b2, a4 = D (D independent of x).
CoefficientSet from_fpe(const FpeCoefficients& f);

/// Integral of a schedule over [0, t]; closed-form for every representation.
double integrate_scalar(const ScalarSchedule& f, double t);

/// The accumulated coefficient integrals at one time:
///   alpha1 = int a1, alpha2 = int a2, alpha3 = int a3,
///   shift  = int a2(s) e^{alpha3(s)} ds,
///   tau    = int a4(s) e^{2 alpha3(s)} ds.
/// All fields vanish at t = 0; tau is symmetric and non-decreasing in the
/// PSD order.
struct IntegratedCoefficients {
    double t = 0.0;
    double alpha1 = 0.0;
    Eigen::VectorXd alpha2;
    double alpha3 = 0.0;
    Eigen::VectorXd shift;
    Eigen::MatrixXd tau;
};

struct QuadratureConfig {
    double tol = 1e-10;  // relative tolerance for the weighted time integrals
    int min_nodes = 8;
    int max_nodes = 512;
};

/// Evaluator for the weighted integrals (shift, tau) of a coefficient set.
///
/// alpha1/alpha3 come from exact antiderivatives. The e^{alpha3}-weighted
/// integrands are integrated with Gauss-Legendre per panel (panels split at
/// table knots); the node count is chosen once, by doubling until the
/// [0, horizon] integrals converge to cfg.tol, and then frozen, which makes
/// t -> (shift, tau) smooth. Immutable after construction; evaluation is
/// pure and safe to call concurrently.
class CoefficientIntegrals {
public:
    CoefficientIntegrals(CoefficientSet c, double horizon, QuadratureConfig cfg = {});

    IntegratedCoefficients at(double t) const;
    const CoefficientSet& coefficients() const { return coeffs_; }
    double horizon() const { return horizon_; }

private:
    Eigen::VectorXd weighted_panel(double lo, double hi, int nodes) const;
    Eigen::VectorXd integrand(double s) const;  // stacked [a2 e^w ; vech(a4) e^{2w}]

    CoefficientSet coeffs_;
    double horizon_;
    QuadratureConfig cfg_;
    int frozen_nodes_ = 0;
    std::vector<double> panel_edges_;           // 0 = first, horizon = last
    std::vector<Eigen::VectorXd> panel_prefix_; // cumulative integral at each edge
};

/// One-shot evaluation of all integrated coefficients at t.
IntegratedCoefficients alphas(const CoefficientSet& c, double t, QuadratureConfig cfg = {});

/// Characteristic coordinate z = x e^{alpha3(t)} + shift(t).
Eigen::VectorXd z_map(const IntegratedCoefficients& ic, const Eigen::VectorXd& x);
Eigen::VectorXd z_map(const CoefficientSet& c, double t, const Eigen::VectorXd& x,
                      QuadratureConfig cfg = {});

}  // namespace fpprop
