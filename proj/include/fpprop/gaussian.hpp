#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>
#include <vector>

namespace fpprop {

/// Weighted Gaussian: exp(log_weight) * N(mean, cov). The covariance is
/// symmetric non-negative definite; a singular covariance describes a
/// point mass along the null directions and has no pointwise density.
struct GaussianState {
    double log_weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    int dim() const { return static_cast<int>(mean.size()); }
    static GaussianState point_mass(const Eigen::VectorXd& center, double log_weight = 0.0);
};

/// Frozen density evaluator for a GaussianState (eigendecomposition done
/// once). singular() reports covariance directions at (numerical) zero.
class GaussianDensity {
public:
    explicit GaussianDensity(const GaussianState& g, double eps_rel = 1e-12);

    bool singular() const { return singular_; }
    double operator()(const Eigen::VectorXd& x) const;
    double log_density(const Eigen::VectorXd& x) const;

private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd basis_;
    Eigen::VectorXd inv_eigs_;
    double log_norm_;
    bool singular_;
};

/// Axis-aligned uniform grid.
class RegularGrid {
public:
    struct Axis {
        double lo;
        double hi;
        int count;  // nodes per axis, >= 2
    };

    explicit RegularGrid(std::vector<Axis> axes);
    static RegularGrid centered(const Eigen::VectorXd& center, const Eigen::VectorXd& half_width,
                                int count_per_axis);

    int dim() const { return static_cast<int>(axes_.size()); }
    long size() const { return size_; }
    const Axis& axis(int i) const { return axes_[i]; }
    double step(int i) const;
    double cell_volume() const;

    Eigen::VectorXd node(long flat) const;
    long flat_index(const std::vector<int>& idx) const;
    bool contains(const Eigen::VectorXd& x) const;

    /// Multilinear interpolation of nodal values at x. Outside the grid:
    /// returns 0 if zero_outside, else throws std::domain_error.
    double interpolate(const std::vector<double>& values, const Eigen::VectorXd& x,
                       bool zero_outside) const;

    /// Trapezoid-weighted integral of nodal values over the grid box.
    double integrate(const std::vector<double>& values) const;

    bool operator==(const RegularGrid& other) const;

private:
    std::vector<Axis> axes_;
    long size_;
};

struct DiracDelta {
    Eigen::VectorXd center;
};

struct GaussianMixture {
    std::vector<GaussianState> components;  // non-empty
};

struct GridSampled {
    enum class Outside { Zero, Error };
    RegularGrid grid;
    std::vector<double> values;
    Outside outside = Outside::Zero;
};

struct HostFunction {
    int dim;
    std::function<double(const Eigen::VectorXd&)> f;
};

using InitialData = std::variant<DiracDelta, GaussianMixture, GridSampled, HostFunction>;

int dim_of(const InitialData& phi);

/// Pointwise phi(x). Throws std::domain_error for a delta (no density) and
/// for out-of-grid evaluation under the Error policy.
double initial_value(const InitialData& phi, const Eigen::VectorXd& x);

}  // namespace fpprop
