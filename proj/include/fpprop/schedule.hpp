#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fpprop {

/// Time-dependent scalar coefficient on [0, t_max]. Three representations:
/// a constant, a polynomial in t (coefficients ascending in degree), or a
/// piecewise-linear table whose first knot sits at t = 0. All three have
/// closed-form antiderivatives, so integral() is exact.
class ScalarSchedule {
public:
    enum class Kind { Constant, Polynomial, Table };

    static ScalarSchedule constant(double value);
    static ScalarSchedule polynomial(std::vector<double> coeffs);
    static ScalarSchedule table(std::vector<double> knots, std::vector<double> values);

    /// Value at t. Throws std::domain_error outside [0, t_max].
    double operator()(double t) const;

    /// Integral over [0, t] by the closed-form antiderivative.
    double integral(double t) const;

    /// The schedule s -> f(t0 + s), defined on [0, t_max - t0].
    ScalarSchedule shifted(double t0) const;

    /// Pointwise scaling f -> factor * f, representation preserved.
    ScalarSchedule scaled(double factor) const;

    Kind kind() const { return kind_; }
    /// Upper end of the domain; +inf for constant/polynomial schedules.
    double t_max() const { return t_max_; }
    bool time_invariant() const;

    const std::vector<double>& coeffs() const { return coeffs_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

    /// Interior kinks in (0, t), ascending. Empty except for tables.
    std::vector<double> breakpoints(double t) const;

private:
    ScalarSchedule() = default;
    void check_domain(double t) const;

    Kind kind_ = Kind::Constant;
    double t_max_ = 0.0;
    std::vector<double> coeffs_;                      // Constant/Polynomial, ascending degree
    std::vector<double> knots_, values_, prefix_;     // Table; prefix_[i] = integral to knot i
};

/// n scalar schedules sharing a domain.
class VectorSchedule {
public:
    explicit VectorSchedule(std::vector<ScalarSchedule> components);
    static VectorSchedule zero(int dim);

    int dim() const { return static_cast<int>(components_.size()); }
    const ScalarSchedule& component(int i) const { return components_[i]; }

    Eigen::VectorXd operator()(double t) const;
    Eigen::VectorXd integral(double t) const;
    VectorSchedule shifted(double t0) const;
    VectorSchedule scaled(double factor) const;
    double t_max() const;
    bool time_invariant() const;

private:
    std::vector<ScalarSchedule> components_;
};

/// Symmetric n x n schedule stored as the upper triangle (row-major), so
/// entry(i,j) == entry(j,i) holds by construction.
class TensorSchedule {
public:
    TensorSchedule(int dim, std::vector<ScalarSchedule> upper_triangle);
    static TensorSchedule zero(int dim);
    static TensorSchedule isotropic(int dim, ScalarSchedule diagonal);
    /// scale(t) * fixed, entries expressible only for constant/poly/table
    /// scale schedules; `fixed` must be symmetric.
    static TensorSchedule scaled_tensor(const ScalarSchedule& scale, const Eigen::MatrixXd& fixed);

    int dim() const { return dim_; }
    const ScalarSchedule& entry(int i, int j) const;

    Eigen::MatrixXd operator()(double t) const;
    Eigen::MatrixXd integral(double t) const;
    TensorSchedule shifted(double t0) const;
    TensorSchedule scaled(double factor) const;
    double t_max() const;
    bool time_invariant() const;

    /// Sampled non-negative-definiteness check over [0, horizon]: the
    /// smallest eigenvalue must be >= -eps_psd * max(trace, 1) at every
    /// sample. Throws std::invalid_argument on violation.
    void validate_psd(double horizon, int samples = 64, double eps_psd = 1e-12) const;

private:
    int dim_;
    std::vector<ScalarSchedule> upper_;  // (i,j), i <= j, row-major
};

}  // namespace fpprop
