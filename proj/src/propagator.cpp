#include "fpprop/propagator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fpprop/parallel.hpp"
#include "fpprop/quadrature.hpp"

namespace fpprop {

Eigen::VectorXd PropagatorKernel::z(const Eigen::VectorXd& x) const {
    return x * std::exp(alpha3) + shift;
}

PropagatorKernel build_kernel(const CoefficientIntegrals& ci, double t, PropagatorConfig cfg) {
    const IntegratedCoefficients ic = ci.at(t);
    PropagatorKernel k;
    k.t = t;
    k.dim = ci.coefficients().dim;
    k.alpha1 = ic.alpha1;
    k.alpha3 = ic.alpha3;
    k.alpha2 = ic.alpha2;
    k.shift = ic.shift;
    k.tau = ic.tau;
    k.config = cfg;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ic.tau);
    k.tau_eigenvalues = es.eigenvalues().cwiseMax(0.0);
    k.tau_eigenvectors = es.eigenvectors();
    const double lmax = k.tau_eigenvalues.maxCoeff();
    const double cut = std::max(cfg.eps_deg * lmax, cfg.eps_abs_deg);
    k.deterministic.assign(k.dim, 0);
    k.stochastic_count = 0;
    for (int i = 0; i < k.dim; ++i) {
        if (k.tau_eigenvalues[i] <= cut) {
            k.deterministic[i] = 1;
            k.tau_eigenvalues[i] = 0.0;
        } else {
            ++k.stochastic_count;
        }
    }
    return k;
}

PropagatorKernel build_kernel(const CoefficientSet& c, double t, PropagatorConfig cfg) {
    return build_kernel(CoefficientIntegrals(c, t, cfg.quad), t, cfg);
}

double kernel_eval(const PropagatorKernel& k, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
    if (k.fully_deterministic())
        throw std::domain_error(
            "kernel_eval: tau is fully deterministic, the kernel is a point mass; "
            "evaluate by substitution (solve() handles this case)");
    const Eigen::VectorXd w = k.tau_eigenvectors.transpose() * (k.z(x) - y);
    const double scale = 1.0 + x.cwiseAbs().maxCoeff() + y.cwiseAbs().maxCoeff();
    double logv = k.alpha1;
    for (int i = 0; i < k.dim; ++i) {
        if (k.deterministic[i]) {
            if (std::abs(w[i]) > k.config.support_match_tol * scale)
                throw std::domain_error(
                    "kernel_eval: y is off the kernel's deterministic support");
            continue;
        }
        const double lam = k.tau_eigenvalues[i];
        logv -= 0.5 * std::log(4.0 * M_PI * lam) + w[i] * w[i] / (4.0 * lam);
    }
    return std::exp(logv);
}

GaussianState propagate_gaussian(const PropagatorKernel& k, const GaussianState& g) {
    const double decay = std::exp(-k.alpha3);
    GaussianState out;
    out.log_weight = g.log_weight + k.alpha1 - k.dim * k.alpha3;
    out.mean = (g.mean - k.shift) * decay;
    out.cov = (g.cov + 2.0 * k.tau) * (decay * decay);
    return out;
}

namespace {

// Direct substitution: u = e^{alpha1} phi(z). Only valid when every
// direction is deterministic.
double substitution_value(const PropagatorKernel& k, const InitialData& phi,
                          const Eigen::VectorXd& x) {
    return std::exp(k.alpha1) * initial_value(phi, k.z(x));
}

double quadrature_pass(const PropagatorKernel& k, const InitialData& phi,
                       const Eigen::VectorXd& z, const std::vector<int>& stoch, int nodes) {
    const auto xs = gauss_legendre_nodes(nodes);
    const auto ws = gauss_legendre_weights(nodes);
    const int ns = static_cast<int>(stoch.size());

    std::vector<double> half(ns);
    for (int a = 0; a < ns; ++a)
        half[a] = k.config.k_sigma * std::sqrt(2.0 * k.tau_eigenvalues[stoch[a]]);

    double sum = 0.0;
    std::vector<int> idx(ns, 0);
    Eigen::VectorXd y(k.dim);
    while (true) {
        double weight = 1.0;
        double q = 0.0;
        y = z;
        for (int a = 0; a < ns; ++a) {
            const double s = half[a] * xs[idx[a]];
            weight *= ws[idx[a]] * half[a];
            q += s * s / (4.0 * k.tau_eigenvalues[stoch[a]]);
            y += s * k.tau_eigenvectors.col(stoch[a]);
        }
        sum += weight * std::exp(-q) * initial_value(phi, y);

        int a = ns - 1;
        while (a >= 0 && ++idx[a] == nodes) idx[a--] = 0;
        if (a < 0) break;
    }
    return sum;
}

}  // namespace

double solve_quadrature(const PropagatorKernel& k, const InitialData& phi,
                        const Eigen::VectorXd& x) {
    if (k.dim > 3)
        throw std::invalid_argument("solve_quadrature: quadrature path supports dim <= 3");
    if (k.fully_deterministic()) return substitution_value(k, phi, x);

    std::vector<int> stoch;
    for (int i = 0; i < k.dim; ++i)
        if (!k.deterministic[i]) stoch.push_back(i);

    double log_prefactor = k.alpha1;
    for (int i : stoch) log_prefactor -= 0.5 * std::log(4.0 * M_PI * k.tau_eigenvalues[i]);

    const Eigen::VectorXd z = k.z(x);
    const int cap = std::min(k.config.max_nodes_per_axis,
                             stoch.size() == 1 ? 512 : stoch.size() == 2 ? 192 : 64);
    int nodes = std::min(std::max(2, k.config.min_nodes_per_axis), cap);
    double prev = quadrature_pass(k, phi, z, stoch, nodes);
    while (nodes < cap) {
        nodes = std::min(2 * nodes, cap);
        const double cur = quadrature_pass(k, phi, z, stoch, nodes);
        const double diff = std::abs(cur - prev);
        prev = cur;
        if (diff <= k.config.tol_space * std::abs(cur) + 1e-280) break;
    }
    return std::exp(log_prefactor) * prev;
}

std::vector<double> solve(const PropagatorKernel& k, const InitialData& phi,
                          const std::vector<Eigen::VectorXd>& points) {
    std::vector<double> out(points.size());

    if (const auto* delta = std::get_if<DiracDelta>(&phi)) {
        const GaussianState state =
            propagate_gaussian(k, GaussianState::point_mass(delta->center));
        if (k.stochastic_count == k.dim) {
            parallel_for(0, static_cast<long>(points.size()), [&](long lo, long hi) {
                for (long i = lo; i < hi; ++i)
                    out[i] = kernel_eval(k, points[i], delta->center);
            });
            return out;
        }
        throw point_mass_error(
            "solve: tau is degenerate, the solution is a point mass along at least one "
            "direction; see the attached state for its weight, mean and covariance",
            state);
    }

    if (const auto* mix = std::get_if<GaussianMixture>(&phi)) {
        if (mix->components.empty())
            throw std::invalid_argument("solve: empty Gaussian mixture");
        std::vector<GaussianDensity> densities;
        densities.reserve(mix->components.size());
        for (const GaussianState& g : mix->components) {
            const GaussianState pushed = propagate_gaussian(k, g);
            GaussianDensity d(pushed);
            if (d.singular())
                throw point_mass_error(
                    "solve: a propagated mixture component has singular covariance; "
                    "the solution is not a pointwise density",
                    pushed);
            densities.push_back(std::move(d));
        }
        parallel_for(0, static_cast<long>(points.size()), [&](long lo, long hi) {
            for (long i = lo; i < hi; ++i) {
                double sum = 0.0;
                for (const auto& d : densities) sum += d(points[i]);
                out[i] = sum;
            }
        });
        return out;
    }

    // Sampled or host-supplied data: substitution when fully deterministic,
    // quadrature otherwise.
    parallel_for(0, static_cast<long>(points.size()), [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i)
            out[i] = k.fully_deterministic() ? substitution_value(k, phi, points[i])
                                             : solve_quadrature(k, phi, points[i]);
    });
    return out;
}

std::vector<double> solve(const Problem& p, double t, const std::vector<Eigen::VectorXd>& points,
                          PropagatorConfig cfg) {
    if (dim_of(p.initial) != p.coefficients.dim)
        throw std::invalid_argument("solve: initial data dimension mismatch");
    return solve(build_kernel(p.coefficients, t, cfg), p.initial, points);
}

GaussianState solve_state(const Problem& p, double t, PropagatorConfig cfg) {
    const PropagatorKernel k = build_kernel(p.coefficients, t, cfg);
    if (const auto* delta = std::get_if<DiracDelta>(&p.initial))
        return propagate_gaussian(k, GaussianState::point_mass(delta->center));
    if (const auto* mix = std::get_if<GaussianMixture>(&p.initial)) {
        if (mix->components.size() == 1) return propagate_gaussian(k, mix->components.front());
        throw std::invalid_argument("solve_state: need delta or single-Gaussian initial data");
    }
    throw std::invalid_argument("solve_state: need delta or single-Gaussian initial data");
}

double pde_residual(const CoefficientSet& c, const TimeField& u, double t,
                    const Eigen::VectorXd& x, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("pde_residual: step must be positive");
    if (t - h < 0.0) throw std::domain_error("pde_residual: need t >= h for the time stencil");

    const int n = c.dim;
    const double u0 = u(t, x);
    const double dudt = (u(t + h, x) - u(t - h, x)) / (2.0 * h);

    Eigen::VectorXd grad(n);
    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double up = u(t, xp), um = u(t, xm);
        grad[i] = (up - um) / (2.0 * h);
        hess(i, i) = (up - 2.0 * u0 + um) / (h * h);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            hess(i, j) = hess(j, i) =
                (u(t, xpp) - u(t, xpm) - u(t, xmp) + u(t, xmm)) / (4.0 * h * h);
        }
    }

    const Eigen::MatrixXd a4 = c.a4(t);
    double residual = dudt - c.a1(t) * u0 - c.a2(t).dot(grad) - c.a3(t) * x.dot(grad);
    residual -= (a4.array() * hess.array()).sum();
    return residual;
}

}  // namespace fpprop
