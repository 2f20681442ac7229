#include "fpprop/disentangle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fpprop {

namespace {

void enumerate_monomials(int dim, int max_degree, std::vector<int>& cur, int pos, int left,
                         std::vector<std::vector<int>>& out) {
    if (pos == dim) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e <= left; ++e) {
        cur[pos] = e;
        enumerate_monomials(dim, max_degree, cur, pos + 1, left - e, out);
    }
    cur[pos] = 0;
}

}  // namespace

PolyBasis::PolyBasis(int dim, int max_degree) : dim_(dim), deg_(max_degree) {
    if (dim < 1 || max_degree < 0) throw std::invalid_argument("PolyBasis: bad dim/degree");
    std::vector<int> cur(dim, 0);
    for (int d = 0; d <= max_degree; ++d) {
        // Within a grade, lexicographic in the exponent tuple.
        std::vector<std::vector<int>> grade;
        enumerate_monomials(dim, max_degree, cur, 0, d, grade);
        grade.erase(std::remove_if(grade.begin(), grade.end(),
                                   [&](const std::vector<int>& e) {
                                       int s = 0;
                                       for (int v : e) s += v;
                                       return s != d;
                                   }),
                    grade.end());
        std::sort(grade.begin(), grade.end());
        for (auto& e : grade) monomials_.push_back(std::move(e));
    }
    for (int i = 0; i < size(); ++i) index_[monomials_[i]] = i;
}

int PolyBasis::total_degree(int i) const {
    int s = 0;
    for (int v : monomials_[i]) s += v;
    return s;
}

int PolyBasis::index_of(const std::vector<int>& exp) const {
    auto it = index_.find(exp);
    return it == index_.end() ? -1 : it->second;
}

OperatorMatrix matrix_A(const CoefficientSet& c, double t, const PolyBasis& basis) {
    if (c.dim != basis.dim()) throw std::invalid_argument("matrix_A: dimension mismatch");
    const int m = basis.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    const Eigen::VectorXd a2 = c.a2(t);
    const double a3 = c.a3(t);
    for (int j = 0; j < m; ++j) {
        const std::vector<int>& e = basis.exponents(j);
        // x . grad multiplies a monomial by its total degree.
        out(j, j) += a3 * basis.total_degree(j);
        for (int i = 0; i < c.dim; ++i) {
            if (e[i] == 0) continue;
            std::vector<int> d = e;
            d[i] -= 1;
            out(basis.index_of(d), j) += a2[i] * e[i];
        }
    }
    return {basis, std::move(out)};
}

OperatorMatrix matrix_B(const CoefficientSet& c, double t, const PolyBasis& basis) {
    if (c.dim != basis.dim()) throw std::invalid_argument("matrix_B: dimension mismatch");
    const int m = basis.size();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    const Eigen::MatrixXd a4 = c.a4(t);
    for (int j = 0; j < m; ++j) {
        const std::vector<int>& e = basis.exponents(j);
        for (int i = 0; i < c.dim; ++i) {
            for (int l = 0; l < c.dim; ++l) {
                const double factor = i == l ? e[i] * (e[i] - 1) : e[i] * e[l];
                if (factor == 0.0 || a4(i, l) == 0.0) continue;
                std::vector<int> d = e;
                d[i] -= 1;
                d[l] -= 1;
                out(basis.index_of(d), j) += a4(i, l) * factor;
            }
        }
    }
    return {basis, std::move(out)};
}

double commutator_residual(const CoefficientSet& c, double s, double s2,
                           const PolyBasis& basis) {
    const Eigen::MatrixXd A = matrix_A(c, s, basis).m;
    const Eigen::MatrixXd B = matrix_B(c, s2, basis).m;
    const Eigen::MatrixXd R = A * B - B * A + 2.0 * c.a3(s) * B;
    return R.cwiseAbs().maxCoeff();
}

double commutator_scale(const CoefficientSet& c, double s, double s2, const PolyBasis& basis) {
    const double na = matrix_A(c, s, basis).m.cwiseAbs().maxCoeff();
    const double nb = matrix_B(c, s2, basis).m.cwiseAbs().maxCoeff();
    return std::max(1.0, na * nb);
}

Eigen::MatrixXd t_exp(const std::function<Eigen::MatrixXd(double)>& generator, double t,
                      double tol) {
    if (t == 0.0) {
        const Eigen::MatrixXd probe = generator(0.0);
        return Eigen::MatrixXd::Identity(probe.rows(), probe.cols());
    }
    if (t < 0.0) throw std::invalid_argument("t_exp: negative horizon");
    if (!(tol > 0.0)) throw std::invalid_argument("t_exp: tolerance must be positive");

    // Dormand-Prince 5(4) tableau.
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    Eigen::MatrixXd probe = generator(0.0);
    const long m = probe.rows();
    Eigen::MatrixXd U = Eigen::MatrixXd::Identity(m, m);

    double s = 0.0;
    double h = t / 64.0;
    const double h_min = t * 1e-14;
    const double t_done = t * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    long steps = 0;
    Eigen::MatrixXd k1 = probe * U;
    while (s < t_done) {
        if (++steps > 2000000) throw std::runtime_error("t_exp: step budget exhausted");
        const double hs = std::min(h, t - s);
        const Eigen::MatrixXd k2 = generator(s + c2 * hs) * (U + hs * (a21 * k1));
        const Eigen::MatrixXd k3 = generator(s + c3 * hs) * (U + hs * (a31 * k1 + a32 * k2));
        const Eigen::MatrixXd k4 =
            generator(s + c4 * hs) * (U + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::MatrixXd k5 =
            generator(s + c5 * hs) * (U + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::MatrixXd k6 =
            generator(s + hs) *
            (U + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::MatrixXd U5 = U + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::MatrixXd k7 = generator(s + hs) * U5;
        const Eigen::MatrixXd err_m =
            hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        // Error-per-unit-step control keeps the accumulated error near
        // tol * scale instead of (step count) * tol * scale. The estimate
        // itself carries roundoff ~ eps * h * |C U|, so acceptance bottoms
        // out at that floor instead of underflowing the step.
        const double scale = std::max(1.0, U5.cwiseAbs().maxCoeff());
        const double roundoff_floor = 32.0 * std::numeric_limits<double>::epsilon() * hs *
                                      std::max(1.0, k7.cwiseAbs().maxCoeff());
        const double allowed = std::max(tol * scale * (hs / t), roundoff_floor);
        const double err = err_m.cwiseAbs().maxCoeff() / allowed;
        const bool accept = std::isfinite(err) && err <= 1.0;
        if (accept) {
            s += hs;
            U = U5;
            k1 = k7;  // FSAL
        }
        double grow = !std::isfinite(err)   ? 0.2
                      : err == 0.0          ? 4.0
                                            : 0.9 * std::pow(err, -0.25);
        if (!accept) grow = std::min(grow, 0.9);
        h = hs * std::clamp(grow, 0.2, 4.0);
        if (h < h_min && t - s > 8.0 * std::numeric_limits<double>::epsilon() * t)
            throw std::runtime_error("t_exp: step size underflow (stiff generator?)");
    }
    return U;
}

Eigen::MatrixXd dyson_series(const std::function<Eigen::MatrixXd(double)>& generator, double t,
                             int terms, int panels) {
    if (terms < 0 || panels < 2) throw std::invalid_argument("dyson_series: bad arguments");
    if (panels % 2 == 1) ++panels;
    const int nodes = panels + 1;
    const double h = t / panels;

    std::vector<Eigen::MatrixXd> gen(nodes);
    for (int j = 0; j < nodes; ++j) gen[j] = generator(j * h);
    const long m = gen[0].rows();

    std::vector<Eigen::MatrixXd> level(nodes, Eigen::MatrixXd::Identity(m, m));
    Eigen::MatrixXd total = Eigen::MatrixXd::Identity(m, m);

    for (int term = 1; term <= terms; ++term) {
        std::vector<Eigen::MatrixXd> f(nodes);
        for (int j = 0; j < nodes; ++j) f[j] = gen[j] * level[j];
        std::vector<Eigen::MatrixXd> next(nodes, Eigen::MatrixXd::Zero(m, m));
        // Cumulative integral: Simpson on even nodes, one-sided quadratic
        // rule on odd nodes.
        for (int j = 1; j < nodes; ++j) {
            if (j % 2 == 0)
                next[j] = next[j - 2] + (h / 3.0) * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
            else
                next[j] = next[j - 1] + (h / 12.0) * (5.0 * f[j - 1] + 8.0 * f[j] - f[j + 1]);
        }
        total += next[panels];
        level = std::move(next);
    }
    return total;
}

double suzuki_factorization_residual(const CoefficientSet& c, double t, const PolyBasis& basis,
                                     double tol, ReweightSign sign) {
    const double sgn = sign == ReweightSign::Standard ? 2.0 : -2.0;
    auto gen_sum = [&](double s) -> Eigen::MatrixXd {
        return matrix_A(c, s, basis).m + matrix_B(c, s, basis).m;
    };
    auto gen_a = [&](double s) { return matrix_A(c, s, basis).m; };
    auto gen_b = [&](double s) -> Eigen::MatrixXd {
        return std::exp(sgn * c.a3.integral(s)) * matrix_B(c, s, basis).m;
    };
    // Integrate a few orders tighter than the requested tolerance so the
    // returned residual, integration error included, sits within ~100 tol
    // of the identity while still scaling with tol.
    const double tol_eff = std::max(tol * 1e-3, 1e-14);
    const Eigen::MatrixXd full = t_exp(gen_sum, t, tol_eff);
    const Eigen::MatrixXd factored = t_exp(gen_a, t, tol_eff) * t_exp(gen_b, t, tol_eff);
    return (full - factored).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd substitution_matrix(const PolyBasis& basis, double scale,
                                    const Eigen::VectorXd& offset) {
    if (offset.size() != basis.dim())
        throw std::invalid_argument("substitution_matrix: offset dimension mismatch");
    const int m = basis.size();
    const int n = basis.dim();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);

    // Expand prod_i (scale x_i + offset_i)^{e_i} one coordinate at a time.
    for (int j = 0; j < m; ++j) {
        const std::vector<int>& e = basis.exponents(j);
        std::vector<std::pair<std::vector<int>, double>> terms{{std::vector<int>(n, 0), 1.0}};
        for (int i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            std::vector<double> binom(e[i] + 1);
            binom[0] = 1.0;
            for (int k = 1; k <= e[i]; ++k)
                binom[k] = binom[k - 1] * (e[i] - k + 1) / k;
            std::vector<std::pair<std::vector<int>, double>> expanded;
            for (const auto& [exp, coeff] : terms) {
                for (int k = 0; k <= e[i]; ++k) {
                    std::vector<int> nexp = exp;
                    nexp[i] += k;
                    expanded.emplace_back(std::move(nexp),
                                          coeff * binom[k] * std::pow(scale, k) *
                                              std::pow(offset[i], e[i] - k));
                }
            }
            terms = std::move(expanded);
        }
        for (const auto& [exp, coeff] : terms) out(basis.index_of(exp), j) += coeff;
    }
    return out;
}

double substitution_check(const CoefficientSet& c, double t, const PolyBasis& basis,
                          double tol) {
    auto gen_a = [&](double s) { return matrix_A(c, s, basis).m; };
    const Eigen::MatrixXd flow = t_exp(gen_a, t, std::max(tol * 1e-3, 1e-14));
    const IntegratedCoefficients ic = alphas(c, t, QuadratureConfig{std::min(tol, 1e-12)});
    const Eigen::MatrixXd subst =
        substitution_matrix(basis, std::exp(ic.alpha3), ic.shift);
    return (flow - subst).cwiseAbs().maxCoeff();
}

}  // namespace fpprop
