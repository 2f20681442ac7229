#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <vector>

#include "fpprop/coefficients.hpp"

namespace fpprop {

/// Monomial basis of the multivariate polynomials with total degree <= d,
/// ordered graded-lexicographically. Both first-order drift operators and
/// constant-coefficient second-order operators leave this space invariant,
/// which turns the operator identities into exact finite-matrix statements.
class PolyBasis {
public:
    PolyBasis(int dim, int max_degree);

    int dim() const { return dim_; }
    int max_degree() const { return deg_; }
    int size() const { return static_cast<int>(monomials_.size()); }
    const std::vector<int>& exponents(int i) const { return monomials_[i]; }
    int total_degree(int i) const;
    /// Index of an exponent tuple, or -1 if it falls outside the basis.
    int index_of(const std::vector<int>& exp) const;

private:
    int dim_, deg_;
    std::vector<std::vector<int>> monomials_;
    std::map<std::vector<int>, int> index_;
};

/// Matrix of a linear operator on PolyBasis coefficient vectors: column j
/// holds the coefficients of the operator applied to monomial j.
struct OperatorMatrix {
    PolyBasis basis;
    Eigen::MatrixXd m;
};

/// Drift operator a2(t) . grad + a3(t) x . grad. Grade-non-increasing.
OperatorMatrix matrix_A(const CoefficientSet& c, double t, const PolyBasis& basis);

/// Diffusion operator a4(t) : grad grad. Lowers total degree by exactly 2.
OperatorMatrix matrix_B(const CoefficientSet& c, double t, const PolyBasis& basis);

/// Max-norm of A(s) B(s2) - B(s2) A(s) + 2 a3(s) B(s2); exactly zero in
/// exact arithmetic for this operator family.
double commutator_residual(const CoefficientSet& c, double s, double s2, const PolyBasis& basis);

/// Natural magnitude of the products entering the commutator, for relative
/// residual checks: max(1, |A|_max |B|_max).
double commutator_scale(const CoefficientSet& c, double s, double s2, const PolyBasis& basis);

/// Time-ordered exponential over [0, t] of a matrix-valued generator:
/// solves U' = C(s) U, U(0) = I with an adaptive embedded Dormand-Prince
/// 5(4) step controlled to local tolerance tol. Throws std::runtime_error
/// on step-size underflow.
Eigen::MatrixXd t_exp(const std::function<Eigen::MatrixXd(double)>& generator, double t,
                      double tol = 1e-10);

/// Truncated iterated-integral series with `terms` integral terms, each
/// nested integral evaluated by a cumulative Simpson rule on a uniform grid
/// of `panels` panels. The truncation error scales as t^{terms+1}; meant as
/// a small-t cross-check of the series definition, not as an integrator.
Eigen::MatrixXd dyson_series(const std::function<Eigen::MatrixXd(double)>& generator, double t,
                             int terms, int panels = 512);

enum class ReweightSign {
    Standard,  // e^{+2 alpha3(s)} on the diffusion factor
    Flipped,   // deliberately wrong sign; mutation self-test hook
};

/// Max-norm difference between the ordered exponential of A + B and the
/// product (ordered exp of A) * (ordered exp of e^{2 alpha3(s)} B(s)).
/// The flows are integrated a few orders tighter than tol internally, so
/// the returned residual stays well inside 100 * tol when the identity
/// holds, and still scales with tol.
double suzuki_factorization_residual(const CoefficientSet& c, double t, const PolyBasis& basis,
                                     double tol = 1e-10,
                                     ReweightSign sign = ReweightSign::Standard);

/// Matrix of the substitution g(x) -> g(scale * x + offset) on the basis.
Eigen::MatrixXd substitution_matrix(const PolyBasis& basis, double scale,
                                    const Eigen::VectorXd& offset);

/// Max-norm difference between the ordered exponential of A over [0, t] and
/// the substitution by the characteristic map z = x e^{alpha3} + shift.
double substitution_check(const CoefficientSet& c, double t, const PolyBasis& basis,
                          double tol = 1e-10);

}  // namespace fpprop
