#include "fpprop/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fpprop/quadrature.hpp"

namespace fpprop {

CoefficientSet CoefficientSet::zero(int dim) {
    return CoefficientSet{dim, ScalarSchedule::constant(0.0), VectorSchedule::zero(dim),
                          ScalarSchedule::constant(0.0), TensorSchedule::zero(dim)};
}

double CoefficientSet::t_max() const {
    return std::min({a1.t_max(), a2.t_max(), a3.t_max(), a4.t_max()});
}

bool CoefficientSet::time_invariant() const {
    return a1.time_invariant() && a2.time_invariant() && a3.time_invariant() &&
           a4.time_invariant();
}

CoefficientSet CoefficientSet::shifted(double t0) const {
    return CoefficientSet{dim, a1.shifted(t0), a2.shifted(t0), a3.shifted(t0), a4.shifted(t0)};
}

void CoefficientSet::validate(double horizon, double eps_psd) const {
    if (dim < 1) throw std::invalid_argument("CoefficientSet: dim must be >= 1");
    if (a2.dim() != dim || a4.dim() != dim)
        throw std::invalid_argument("CoefficientSet: component dimensions disagree");
    if (horizon > t_max())
        throw std::invalid_argument("CoefficientSet: schedules do not cover the horizon");
    a4.validate_psd(horizon, 64, eps_psd);
}

double FpeCoefficients::t_max() const { return std::min({b1.t_max(), b2.t_max(), D.t_max()}); }

void FpeCoefficients::validate(double horizon, double eps_psd) const {
    if (dim < 1) throw std::invalid_argument("FpeCoefficients: dim must be >= 1");
    if (b1.dim() != dim || D.dim() != dim)
        throw std::invalid_argument("FpeCoefficients: component dimensions disagree");
    if (horizon > t_max())
        throw std::invalid_argument("FpeCoefficients: schedules do not cover the horizon");
    D.validate_psd(horizon, 64, eps_psd);
}

CoefficientSet from_fpe(const FpeCoefficients& f) {
    return CoefficientSet{f.dim, f.b2.scaled(-static_cast<double>(f.dim)), f.b1.scaled(-1.0),
                          f.b2.scaled(-1.0), f.D};
}

double integrate_scalar(const ScalarSchedule& f, double t) { return f.integral(t); }

CoefficientIntegrals::CoefficientIntegrals(CoefficientSet c, double horizon, QuadratureConfig cfg)
    : coeffs_(std::move(c)), horizon_(horizon), cfg_(cfg) {
    if (!(horizon >= 0.0)) throw std::domain_error("CoefficientIntegrals: horizon must be >= 0");
    if (horizon > coeffs_.t_max())
        throw std::domain_error("CoefficientIntegrals: horizon beyond schedule domain");

    // Panels split at every table knot of the weighted integrands (a2, a4)
    // and of the weight exponent a3.
    std::set<double> edges{0.0, horizon_};
    auto add_breaks = [&](const ScalarSchedule& s) {
        for (double b : s.breakpoints(horizon_)) edges.insert(b);
    };
    add_breaks(coeffs_.a3);
    for (int i = 0; i < coeffs_.dim; ++i) add_breaks(coeffs_.a2.component(i));
    for (int i = 0; i < coeffs_.dim; ++i)
        for (int j = i; j < coeffs_.dim; ++j) add_breaks(coeffs_.a4.entry(i, j));
    panel_edges_.assign(edges.begin(), edges.end());

    if (horizon_ == 0.0) {
        panel_edges_ = {0.0};
        frozen_nodes_ = cfg_.min_nodes;
        panel_prefix_.assign(1, Eigen::VectorXd::Zero(
                                    coeffs_.dim + coeffs_.dim * (coeffs_.dim + 1) / 2));
        return;
    }

    // Freeze the node count: double until the full-horizon integrals stop
    // moving at the requested tolerance.
    const int m = coeffs_.dim + coeffs_.dim * (coeffs_.dim + 1) / 2;
    auto total = [&](int nodes) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
        for (std::size_t p = 0; p + 1 < panel_edges_.size(); ++p)
            sum += weighted_panel(panel_edges_[p], panel_edges_[p + 1], nodes);
        return sum;
    };
    int nodes = std::max(2, cfg_.min_nodes);
    Eigen::VectorXd prev = total(nodes);
    while (nodes < cfg_.max_nodes) {
        const int next = nodes * 2;
        Eigen::VectorXd cur = total(next);
        const double scale = std::max(cur.cwiseAbs().maxCoeff(), 1e-30);
        nodes = next;
        const double diff = (cur - prev).cwiseAbs().maxCoeff();
        prev = cur;
        if (diff <= cfg_.tol * scale) break;
    }
    frozen_nodes_ = nodes;

    panel_prefix_.assign(panel_edges_.size(), Eigen::VectorXd::Zero(m));
    for (std::size_t p = 0; p + 1 < panel_edges_.size(); ++p)
        panel_prefix_[p + 1] =
            panel_prefix_[p] + weighted_panel(panel_edges_[p], panel_edges_[p + 1], frozen_nodes_);
}

Eigen::VectorXd CoefficientIntegrals::integrand(double s) const {
    const int n = coeffs_.dim;
    Eigen::VectorXd out(n + n * (n + 1) / 2);
    const double w = std::exp(coeffs_.a3.integral(s));
    for (int i = 0; i < n; ++i) out[i] = coeffs_.a2.component(i)(s) * w;
    const double w2 = w * w;
    int k = n;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out[k++] = coeffs_.a4.entry(i, j)(s) * w2;
    return out;
}

Eigen::VectorXd CoefficientIntegrals::weighted_panel(double lo, double hi, int nodes) const {
    const auto xs = gauss_legendre_nodes(nodes);
    const auto ws = gauss_legendre_weights(nodes);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    Eigen::VectorXd sum =
        Eigen::VectorXd::Zero(coeffs_.dim + coeffs_.dim * (coeffs_.dim + 1) / 2);
    for (int i = 0; i < nodes; ++i) sum += ws[i] * integrand(c + h * xs[i]);
    return h * sum;
}

IntegratedCoefficients CoefficientIntegrals::at(double t) const {
    if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12) + 1e-300)
        throw std::domain_error("CoefficientIntegrals: t outside [0, horizon]");
    t = std::min(t, horizon_);

    const int n = coeffs_.dim;
    IntegratedCoefficients ic;
    ic.t = t;
    ic.alpha1 = coeffs_.a1.integral(t);
    ic.alpha3 = coeffs_.a3.integral(t);
    ic.alpha2 = coeffs_.a2.integral(t);

    auto hi = std::upper_bound(panel_edges_.begin(), panel_edges_.end(), t);
    const std::size_t p = (hi - panel_edges_.begin()) - 1;
    Eigen::VectorXd acc = panel_prefix_[p];
    if (t > panel_edges_[p]) acc += weighted_panel(panel_edges_[p], t, frozen_nodes_);

    ic.shift = acc.head(n);
    ic.tau.resize(n, n);
    int k = n;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) ic.tau(i, j) = ic.tau(j, i) = acc[k++];
    return ic;
}

IntegratedCoefficients alphas(const CoefficientSet& c, double t, QuadratureConfig cfg) {
    return CoefficientIntegrals(c, t, cfg).at(t);
}

Eigen::VectorXd z_map(const IntegratedCoefficients& ic, const Eigen::VectorXd& x) {
    return x * std::exp(ic.alpha3) + ic.shift;
}

Eigen::VectorXd z_map(const CoefficientSet& c, double t, const Eigen::VectorXd& x,
                      QuadratureConfig cfg) {
    return z_map(alphas(c, t, cfg), x);
}

}  // namespace fpprop
