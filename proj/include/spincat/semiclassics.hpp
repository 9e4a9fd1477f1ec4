#pragma once

#include <functional>

#include <Eigen/Dense>

#include "spincat/errors.hpp"

namespace spincat {

/// Reduced coordinates of the block lattice: nu = n/j, eta = k/j.
/// The physical domain is the diamond |nu + eta| <= 1, |nu - eta| <= 1.
struct ReducedPoint {
    double nu;
    double eta;
};

inline double reduced_w(const ReducedPoint& p) {
    return std::sqrt(std::max(0.0, (1.0 - (p.nu - p.eta) * (p.nu - p.eta)) *
                                       (1.0 - (p.nu + p.eta) * (p.nu + p.eta))));
}

/// Interior maximum of the action S0 with its Hessian sigma.
struct SaddleData {
    ReducedPoint point;
    Eigen::Matrix2d hessian;  // (nu, eta) second derivatives of S0
    double s0_value;
};

/// Exact finite-j Taylor coefficients of the propagator column sum
/// S(nu, eta, ttilde) = 1 + a ttilde + b ttilde^2 + O(ttilde^3).
struct SDerivativeCoeffs {
    double a;
    double b;
};

/// Large-j expansion coefficients a = a0 + a1/j + ..., b = b0 + b1/j + b2/j^2
/// at a reduced point. b2 depends on the (never needed) a2, which is exposed
/// as an argument so that insensitivity to it can be tested.
struct CoeffExpansion {
    double nu, eta, w;
    double a0, a1, b0, b1;
    double b2(double a2 = 0.0) const;
};

/// Asymptotic orders of the Laplace functional I[f] = int f e^{j S0}:
///   I[f] = e^{j S0(saddle)} (2 pi / j) |det sigma|^{-1/2}
///          (orders[0] + orders[1]/j + orders[2]/j^2 + o(1/j^2)).
/// orders[] are the reduced (prefactor-stripped) values; every ratio of I's
/// in the norm expansion uses them directly since the prefactor cancels.
struct LaplaceExpansion {
    double orders[3];
    int terms_used;  // highest operator power l included
    double s0_at_saddle;
    double det_hessian;

    double reduced(double j) const {
        return orders[0] + orders[1] / j + orders[2] / (j * j);
    }
    double evaluate(double j) const;
};

using ScalarField = std::function<double(double nu, double eta)>;

/// WKB action of the initial cat block in reduced coordinates (phi = 0, both
/// gammas real positive):
///   S0 = (1-nu) ln(g1 g2) + eta ln(g2/g1)
///        - (1/2)[p(1-nu-eta) + p(1+nu+eta) + p(1-nu+eta) + p(1+nu-eta)],
/// with p(x) = x ln x and p(0) = 0.
double action_s0(const ReducedPoint& p, double gamma1, double gamma2);

/// Closed-form maximum of S0,
///   nu0 = (1 - g1^2 g2^2) / ((1+g1^2)(1+g2^2)),
///   eta0 = (g2^2 - g1^2) / ((1+g1^2)(1+g2^2)),
/// with the analytic Hessian. Throws BoundarySaddle when w(nu0, eta0) < 1e-6.
SaddleData saddle_point(double gamma1, double gamma2);

/// Finite-j coefficients a, b with w1, w2 as printed in the source formulas.
SDerivativeCoeffs s_derivative_coeffs(const ReducedPoint& p, double j);

/// a0, a1, b0, b1 and the b2 functional; requires w > 1e-8.
CoeffExpansion coeff_expansion(const ReducedPoint& p);

/// Higher-order two-dimensional Laplace expansion of I[f]. Derivatives of the
/// action are analytic closed forms; derivatives of f (needed up to fourth
/// order) come from Richardson-refined central differences. max_l >= 3; the
/// orders triple is complete through 1/j^2 once max_l >= 6.
LaplaceExpansion laplace_expand(const ScalarField& f, double gamma1, double gamma2,
                                int max_l);

/// Adaptive 2D quadrature of f e^{j S0} over the physical diamond, to
/// relative tolerance 1e-8. Ground truth for laplace_expand.
double quadrature_oracle(const ScalarField& f, double gamma1, double gamma2, double j);

/// Norm ratio n(tau) through quadratic order in ttilde = j tau, assembled
/// from the Laplace orders of 1, a0, a1, b0, b1, b2. Requires j tau <= 0.3.
double n_ratio_semiclassical(double gamma1, double gamma2, double j, double tau);

/// Fast (accelerated) decay: exp(-2j (g1-g2)^2 (1-g1g2)^2 / ((1+g1^2)(1+g2^2))^2 tau).
/// Throws WrongRegime when g1 = g2 or g1 g2 = 1 (the rate would vanish).
double predict_fast(double gamma1, double gamma2, double j, double tau);

/// Slow decay (g2 = 1/g1) in exponential form; j-independent.
double predict_slow_exp(double gamma1, double tau);

/// Slow decay as the plain quadratic polynomial (g1 g2 = 1 required).
/// Disagrees with predict_slow_exp at order tau^2 as printed; the exact
/// engines adjudicate between the two in the discrepancy report.
double predict_slow_poly(double gamma1, double gamma2, double tau);

/// Single coherent state decay, exp(-g^4 ((g^2-1)/(g^2+1))^2 tau).
double predict_single_coherent(double gamma, double tau);

namespace detail {

/// Analytic partial derivative d^(da, db) S0 at a point (da + db >= 1).
double action_s0_partial(const ReducedPoint& p, double gamma1, double gamma2, int da,
                         int db);

/// Laplace expansion around explicit saddle data; `s0_partial(da, db)` feeds
/// the residual action (only orders >= 3 are used). Exposed for tests that
/// replace the action by a pure quadratic.
LaplaceExpansion laplace_expand_at(const ScalarField& f, const SaddleData& saddle,
                                   const std::function<double(int, int)>& s0_partial,
                                   int max_l);

/// Numeric maximization of S0 (damped Newton with analytic derivatives);
/// independent check of the closed-form saddle.
ReducedPoint numeric_saddle(double gamma1, double gamma2);

}  // namespace detail

}  // namespace spincat
