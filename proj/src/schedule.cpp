#include "fpprop/schedule.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpprop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace

ScalarSchedule ScalarSchedule::constant(double value) {
    ScalarSchedule s;
    s.kind_ = Kind::Constant;
    s.t_max_ = kInf;
    s.coeffs_ = {value};
    return s;
}

ScalarSchedule ScalarSchedule::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) coeffs.push_back(0.0);
    ScalarSchedule s;
    s.kind_ = Kind::Polynomial;
    s.t_max_ = kInf;
    s.coeffs_ = std::move(coeffs);
    return s;
}

ScalarSchedule ScalarSchedule::table(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() != values.size() || knots.size() < 2)
        throw std::invalid_argument("schedule table: need matching knot/value lists, >= 2 entries");
    if (knots.front() != 0.0)
        throw std::invalid_argument("schedule table: first knot must be at t = 0");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw std::invalid_argument("schedule table: knots must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("schedule table: values must be finite");

    ScalarSchedule s;
    s.kind_ = Kind::Table;
    s.t_max_ = knots.back();
    s.prefix_.assign(knots.size(), 0.0);
    for (std::size_t i = 1; i < knots.size(); ++i)
        s.prefix_[i] = s.prefix_[i - 1] +
                       0.5 * (values[i] + values[i - 1]) * (knots[i] - knots[i - 1]);
    s.knots_ = std::move(knots);
    s.values_ = std::move(values);
    return s;
}

void ScalarSchedule::check_domain(double t) const {
    if (!(t >= 0.0) || t > t_max_ * (1.0 + 1e-15))
        throw std::domain_error("schedule: t outside [0, t_max]");
}

double ScalarSchedule::operator()(double t) const {
    check_domain(t);
    switch (kind_) {
        case Kind::Constant:
            return coeffs_[0];
        case Kind::Polynomial: {
            double v = 0.0;
            for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) v = v * t + *it;
            return v;
        }
        case Kind::Table: {
            t = std::min(t, t_max_);
            auto hi = std::upper_bound(knots_.begin(), knots_.end(), t);
            std::size_t i = std::min<std::size_t>(hi - knots_.begin(), knots_.size() - 1);
            const double t0 = knots_[i - 1], t1 = knots_[i];
            const double w = (t - t0) / (t1 - t0);
            return values_[i - 1] * (1.0 - w) + values_[i] * w;
        }
    }
    return 0.0;
}

double ScalarSchedule::integral(double t) const {
    check_domain(t);
    switch (kind_) {
        case Kind::Constant:
            return coeffs_[0] * t;
        case Kind::Polynomial: {
            double v = 0.0;
            for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * t + coeffs_[k] / (k + 1);
            return v * t;
        }
        case Kind::Table: {
            t = std::min(t, t_max_);
            auto hi = std::upper_bound(knots_.begin(), knots_.end(), t);
            std::size_t i = std::min<std::size_t>(hi - knots_.begin(), knots_.size() - 1);
            const double t0 = knots_[i - 1], t1 = knots_[i];
            const double w = (t - t0) / (t1 - t0);
            const double vt = values_[i - 1] * (1.0 - w) + values_[i] * w;
            return prefix_[i - 1] + 0.5 * (values_[i - 1] + vt) * (t - t0);
        }
    }
    return 0.0;
}

ScalarSchedule ScalarSchedule::shifted(double t0) const {
    if (!(t0 >= 0.0) || t0 > t_max_)
        throw std::domain_error("schedule shift: origin outside domain");
    switch (kind_) {
        case Kind::Constant:
            return *this;
        case Kind::Polynomial: {
            // Taylor shift: coefficients of p(t0 + s) in s.
            const int n = static_cast<int>(coeffs_.size());
            std::vector<double> out(n, 0.0);
            for (int k = 0; k < n; ++k)
                for (int j = 0; j <= k; ++j)
                    out[j] += coeffs_[k] * binomial(k, j) * (j == k ? 1.0 : std::pow(t0, k - j));
            return polynomial(std::move(out));
        }
        case Kind::Table: {
            std::vector<double> k{0.0}, v{(*this)(t0)};
            for (std::size_t i = 0; i < knots_.size(); ++i) {
                if (knots_[i] > t0) {
                    k.push_back(knots_[i] - t0);
                    v.push_back(values_[i]);
                }
            }
            if (k.size() < 2) {  // origin at (or past) the last knot
                k.push_back(1.0);
                v.push_back(v[0]);
            }
            return table(std::move(k), std::move(v));
        }
    }
    return *this;
}

ScalarSchedule ScalarSchedule::scaled(double factor) const {
    ScalarSchedule s = *this;
    for (double& c : s.coeffs_) c *= factor;
    for (double& v : s.values_) v *= factor;
    for (double& p : s.prefix_) p *= factor;
    return s;
}

bool ScalarSchedule::time_invariant() const {
    switch (kind_) {
        case Kind::Constant:
            return true;
        case Kind::Polynomial:
            return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double c) { return c == 0.0; });
        case Kind::Table:
            return std::all_of(values_.begin(), values_.end(),
                               [&](double v) { return v == values_[0]; });
    }
    return false;
}

std::vector<double> ScalarSchedule::breakpoints(double t) const {
    std::vector<double> out;
    if (kind_ == Kind::Table)
        for (double k : knots_)
            if (k > 0.0 && k < t) out.push_back(k);
    return out;
}

VectorSchedule::VectorSchedule(std::vector<ScalarSchedule> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("VectorSchedule: empty component list");
}

VectorSchedule VectorSchedule::zero(int dim) {
    return VectorSchedule(std::vector<ScalarSchedule>(dim, ScalarSchedule::constant(0.0)));
}

Eigen::VectorXd VectorSchedule::operator()(double t) const {
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = components_[i](t);
    return v;
}

Eigen::VectorXd VectorSchedule::integral(double t) const {
    Eigen::VectorXd v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = components_[i].integral(t);
    return v;
}

VectorSchedule VectorSchedule::shifted(double t0) const {
    std::vector<ScalarSchedule> c;
    c.reserve(components_.size());
    for (const auto& s : components_) c.push_back(s.shifted(t0));
    return VectorSchedule(std::move(c));
}

VectorSchedule VectorSchedule::scaled(double factor) const {
    std::vector<ScalarSchedule> c;
    c.reserve(components_.size());
    for (const auto& s : components_) c.push_back(s.scaled(factor));
    return VectorSchedule(std::move(c));
}

double VectorSchedule::t_max() const {
    double m = kInf;
    for (const auto& s : components_) m = std::min(m, s.t_max());
    return m;
}

bool VectorSchedule::time_invariant() const {
    return std::all_of(components_.begin(), components_.end(),
                       [](const ScalarSchedule& s) { return s.time_invariant(); });
}

TensorSchedule::TensorSchedule(int dim, std::vector<ScalarSchedule> upper_triangle)
    : dim_(dim), upper_(std::move(upper_triangle)) {
    if (dim < 1) throw std::invalid_argument("TensorSchedule: dim must be >= 1");
    if (static_cast<int>(upper_.size()) != dim * (dim + 1) / 2)
        throw std::invalid_argument("TensorSchedule: need dim*(dim+1)/2 upper-triangle entries");
}

TensorSchedule TensorSchedule::zero(int dim) {
    return TensorSchedule(dim, std::vector<ScalarSchedule>(dim * (dim + 1) / 2,
                                                           ScalarSchedule::constant(0.0)));
}

TensorSchedule TensorSchedule::isotropic(int dim, ScalarSchedule diagonal) {
    std::vector<ScalarSchedule> upper;
    upper.reserve(dim * (dim + 1) / 2);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
            upper.push_back(i == j ? diagonal : ScalarSchedule::constant(0.0));
    return TensorSchedule(dim, std::move(upper));
}

TensorSchedule TensorSchedule::scaled_tensor(const ScalarSchedule& scale,
                                             const Eigen::MatrixXd& fixed) {
    if (fixed.rows() != fixed.cols())
        throw std::invalid_argument("scaled_tensor: fixed tensor must be square");
    if (!fixed.isApprox(fixed.transpose(), 1e-12))
        throw std::invalid_argument("scaled_tensor: fixed tensor must be symmetric");
    const int n = static_cast<int>(fixed.rows());
    std::vector<ScalarSchedule> upper;
    upper.reserve(n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) upper.push_back(scale.scaled(fixed(i, j)));
    return TensorSchedule(n, std::move(upper));
}

const ScalarSchedule& TensorSchedule::entry(int i, int j) const {
    if (i > j) std::swap(i, j);
    return upper_[i * dim_ - i * (i - 1) / 2 + (j - i)];
}

Eigen::MatrixXd TensorSchedule::operator()(double t) const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) m(i, j) = m(j, i) = entry(i, j)(t);
    return m;
}

Eigen::MatrixXd TensorSchedule::integral(double t) const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) m(i, j) = m(j, i) = entry(i, j).integral(t);
    return m;
}

TensorSchedule TensorSchedule::shifted(double t0) const {
    std::vector<ScalarSchedule> upper;
    upper.reserve(upper_.size());
    for (const auto& s : upper_) upper.push_back(s.shifted(t0));
    return TensorSchedule(dim_, std::move(upper));
}

TensorSchedule TensorSchedule::scaled(double factor) const {
    std::vector<ScalarSchedule> upper;
    upper.reserve(upper_.size());
    for (const auto& s : upper_) upper.push_back(s.scaled(factor));
    return TensorSchedule(dim_, std::move(upper));
}

double TensorSchedule::t_max() const {
    double m = kInf;
    for (const auto& s : upper_) m = std::min(m, s.t_max());
    return m;
}

bool TensorSchedule::time_invariant() const {
    return std::all_of(upper_.begin(), upper_.end(),
                       [](const ScalarSchedule& s) { return s.time_invariant(); });
}

void TensorSchedule::validate_psd(double horizon, int samples, double eps_psd) const {
    if (samples < 1) samples = 1;
    for (int k = 0; k <= samples; ++k) {
        const double t = horizon * k / samples;
        const Eigen::MatrixXd m = (*this)(t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        const double scale = std::max(m.trace(), 1.0);
        if (es.eigenvalues().minCoeff() < -eps_psd * scale)
            throw std::invalid_argument("TensorSchedule: not non-negative definite at t = " +
                                        std::to_string(t));
    }
}

}  // namespace fpprop
