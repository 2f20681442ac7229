#include "fpprop/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace fpprop {

namespace {

struct GlRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Interior roots of P_n by Newton iteration, Chebyshev initial guess.
GlRule compute_gauss_legendre(int n) {
    GlRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double step = p1 / dp;
            x -= step;
            if (std::abs(step) <= 4 * std::abs(x) * std::numeric_limits<double>::epsilon() ||
                std::abs(step) < 1e-300)
                break;
        }
        rule.nodes[i] = x;
        rule.nodes[n - 1 - i] = -x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

const GlRule& cached_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GlRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.000000000000000000, 0.207784955007898468, 0.405845151377397167, 0.586087235467691130,
    0.741531185599394440, 0.864864423359769073, 0.949107912342758525, 0.991455371120812639};
constexpr double kKronrodWeights[8] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410, 0.169004726639267903,
    0.140653259715525919, 0.104790010322250184, 0.063092092629978553, 0.022935322010529225};
constexpr double kGaussWeights[4] = {
    0.417959183673469388, 0.381830050505118945, 0.279705391489276668, 0.129484966168869693};

struct Gk15Result {
    double value;
    double error;
};

Gk15Result gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double k15 = kKronrodWeights[0] * f0;
    double g7 = kGaussWeights[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kKronrodNodes[i];
        const double fi = f(c + dx) + f(c - dx);
        k15 += kKronrodWeights[i] * fi;
        if (i % 2 == 0) g7 += kGaussWeights[i / 2] * fi;
    }
    k15 *= h;
    g7 *= h;
    double err = std::abs(k15 - g7);
    err = 200.0 * err * std::sqrt(200.0 * err);  // (200|G-K|)^{3/2}, the QUADPACK estimate
    return {k15, err};
}

}  // namespace

std::span<const double> gauss_legendre_nodes(int n) { return cached_rule(n).nodes; }

std::span<const double> gauss_legendre_weights(int n) { return cached_rule(n).weights; }

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    constexpr int kMaxSegments = 4000;
    std::vector<std::pair<double, double>> stack;
    stack.reserve(64);
    stack.emplace_back(a, b);
    double sum = 0.0;
    int processed = 0;
    while (!stack.empty()) {
        if (++processed > kMaxSegments)
            throw std::runtime_error("integrate_adaptive: segment budget exhausted");
        auto [lo, hi] = stack.back();
        stack.pop_back();
        Gk15Result r = gk15(f, lo, hi);
        if (r.error <= rel_tol * std::abs(r.value) + abs_tol ||
            std::abs(hi - lo) < 16 * std::numeric_limits<double>::epsilon() * std::abs(hi)) {
            sum += r.value;
            continue;
        }
        const double mid = 0.5 * (lo + hi);
        stack.emplace_back(lo, mid);
        stack.emplace_back(mid, hi);
    }
    return sum;
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels < 1) throw std::invalid_argument("integrate_simpson: panels must be >= 1");
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == panels) ? b : a + (i + 1) * h;
        sum += (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    }
    return sum;
}

}  // namespace fpprop
