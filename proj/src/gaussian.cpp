#include "fpprop/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace fpprop {

GaussianState GaussianState::point_mass(const Eigen::VectorXd& center, double log_weight) {
    return GaussianState{log_weight, center,
                         Eigen::MatrixXd::Zero(center.size(), center.size())};
}

GaussianDensity::GaussianDensity(const GaussianState& g, double eps_rel) : mean_(g.mean) {
    const int n = g.dim();
    if (g.cov.rows() != n || g.cov.cols() != n)
        throw std::invalid_argument("GaussianDensity: covariance shape mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.cov);
    const Eigen::VectorXd eigs = es.eigenvalues();
    basis_ = es.eigenvectors();
    const double lmax = eigs.cwiseMax(0.0).maxCoeff();
    singular_ = false;
    inv_eigs_.resize(n);
    log_norm_ = g.log_weight;
    for (int i = 0; i < n; ++i) {
        if (eigs[i] <= eps_rel * lmax || lmax == 0.0) {
            singular_ = true;
            inv_eigs_[i] = 0.0;
        } else {
            inv_eigs_[i] = 1.0 / eigs[i];
            log_norm_ -= 0.5 * std::log(2.0 * M_PI * eigs[i]);
        }
    }
}

double GaussianDensity::log_density(const Eigen::VectorXd& x) const {
    if (singular_)
        throw std::domain_error("GaussianDensity: singular covariance has no pointwise density");
    const Eigen::VectorXd w = basis_.transpose() * (x - mean_);
    double q = 0.0;
    for (int i = 0; i < w.size(); ++i) q += w[i] * w[i] * inv_eigs_[i];
    return log_norm_ - 0.5 * q;
}

double GaussianDensity::operator()(const Eigen::VectorXd& x) const {
    return std::exp(log_density(x));
}

RegularGrid::RegularGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw std::invalid_argument("RegularGrid: need at least one axis");
    size_ = 1;
    for (const Axis& a : axes_) {
        if (a.count < 2) throw std::invalid_argument("RegularGrid: count must be >= 2 per axis");
        if (!(a.lo < a.hi)) throw std::invalid_argument("RegularGrid: min must be < max");
        size_ *= a.count;
    }
}

RegularGrid RegularGrid::centered(const Eigen::VectorXd& center,
                                  const Eigen::VectorXd& half_width, int count_per_axis) {
    std::vector<Axis> axes;
    for (int i = 0; i < center.size(); ++i)
        axes.push_back({center[i] - half_width[i], center[i] + half_width[i], count_per_axis});
    return RegularGrid(std::move(axes));
}

double RegularGrid::step(int i) const {
    return (axes_[i].hi - axes_[i].lo) / (axes_[i].count - 1);
}

double RegularGrid::cell_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) v *= step(i);
    return v;
}

Eigen::VectorXd RegularGrid::node(long flat) const {
    Eigen::VectorXd x(dim());
    // Last axis varies fastest.
    for (int i = dim() - 1; i >= 0; --i) {
        const int k = static_cast<int>(flat % axes_[i].count);
        flat /= axes_[i].count;
        x[i] = axes_[i].lo + k * step(i);
    }
    return x;
}

long RegularGrid::flat_index(const std::vector<int>& idx) const {
    long flat = 0;
    for (int i = 0; i < dim(); ++i) flat = flat * axes_[i].count + idx[i];
    return flat;
}

bool RegularGrid::contains(const Eigen::VectorXd& x) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < axes_[i].lo || x[i] > axes_[i].hi) return false;
    return true;
}

double RegularGrid::interpolate(const std::vector<double>& values, const Eigen::VectorXd& x,
                                bool zero_outside) const {
    if (static_cast<long>(values.size()) != size_)
        throw std::invalid_argument("RegularGrid: value count does not match grid size");
    if (!contains(x)) {
        if (zero_outside) return 0.0;
        throw std::domain_error("RegularGrid: evaluation outside grid support");
    }
    const int n = dim();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int i = 0; i < n; ++i) {
        const double u = (x[i] - axes_[i].lo) / step(i);
        int k = static_cast<int>(std::floor(u));
        k = std::max(0, std::min(k, axes_[i].count - 2));
        base[i] = k;
        frac[i] = u - k;
    }
    double sum = 0.0;
    std::vector<int> idx(n);
    for (int corner = 0; corner < (1 << n); ++corner) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            const bool hi = corner & (1 << i);
            idx[i] = base[i] + (hi ? 1 : 0);
            w *= hi ? frac[i] : 1.0 - frac[i];
        }
        if (w != 0.0) sum += w * values[flat_index(idx)];
    }
    return sum;
}

double RegularGrid::integrate(const std::vector<double>& values) const {
    if (static_cast<long>(values.size()) != size_)
        throw std::invalid_argument("RegularGrid: value count does not match grid size");
    double sum = 0.0;
    for (long f = 0; f < size_; ++f) {
        double w = 1.0;
        long rem = f;
        for (int i = dim() - 1; i >= 0; --i) {
            const int k = static_cast<int>(rem % axes_[i].count);
            rem /= axes_[i].count;
            if (k == 0 || k == axes_[i].count - 1) w *= 0.5;
        }
        sum += w * values[f];
    }
    return sum * cell_volume();
}

bool RegularGrid::operator==(const RegularGrid& other) const {
    if (dim() != other.dim()) return false;
    for (int i = 0; i < dim(); ++i)
        if (axes_[i].lo != other.axes_[i].lo || axes_[i].hi != other.axes_[i].hi ||
            axes_[i].count != other.axes_[i].count)
            return false;
    return true;
}

int dim_of(const InitialData& phi) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiracDelta>)
                return static_cast<int>(v.center.size());
            else if constexpr (std::is_same_v<T, GaussianMixture>) {
                if (v.components.empty())
                    throw std::invalid_argument("GaussianMixture: empty component list");
                return v.components.front().dim();
            } else if constexpr (std::is_same_v<T, GridSampled>)
                return v.grid.dim();
            else
                return v.dim;
        },
        phi);
}

double initial_value(const InitialData& phi, const Eigen::VectorXd& x) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiracDelta>) {
                throw std::domain_error("initial_value: delta data has no pointwise density");
            } else if constexpr (std::is_same_v<T, GaussianMixture>) {
                double sum = 0.0;
                for (const GaussianState& g : v.components) sum += GaussianDensity(g)(x);
                return sum;
            } else if constexpr (std::is_same_v<T, GridSampled>) {
                return v.grid.interpolate(v.values, x, v.outside == GridSampled::Outside::Zero);
            } else {
                return v.f(x);
            }
        },
        phi);
}

}  // namespace fpprop
