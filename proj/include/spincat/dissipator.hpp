#pragma once

#include <vector>

#include "spincat/spin_core.hpp"

namespace spincat {

/// Density matrix in the block decomposition natural to the superradiance
/// master equation
///
///   d rho / d tau = (1/2j) (2 J- rho J+ - J+J- rho - rho J+J-).
///
/// With mean and relative quantum numbers m = (m1+m2)/2, k = (m1-m2)/2 the
/// relative number k is conserved, so the matrix splits into independent
/// blocks rho_m(k) with |m| + |k| <= j. Blocks are stored with twice_m
/// ascending; block k has twice_m in [-(2j-|2k|), 2j-|2k|] in steps of 2.
class BlockDensity {
  public:
    explicit BlockDensity(SpinQuantum spin);

    static BlockDensity from_matrix(const DensityMatrix& rho);
    DensityMatrix to_matrix() const;

    SpinQuantum spin() const { return spin_; }

    static int block_size(SpinQuantum spin, int twice_k) {
        return spin.twice_j() - std::abs(twice_k) + 1;
    }
    int min_twice_m(int twice_k) const { return -(spin_.twice_j() - std::abs(twice_k)); }

    Eigen::VectorXcd& block(int twice_k) { return blocks_[twice_k + spin_.twice_j()]; }
    const Eigen::VectorXcd& block(int twice_k) const {
        return blocks_[twice_k + spin_.twice_j()];
    }

    Complex value(int twice_k, int twice_m) const {
        return block(twice_k)[(twice_m - min_twice_m(twice_k)) / 2];
    }
    void set_value(int twice_k, int twice_m, Complex v) {
        block(twice_k)[(twice_m - min_twice_m(twice_k)) / 2] = v;
    }

    double max_abs_difference(const BlockDensity& other) const;

  private:
    SpinQuantum spin_;
    std::vector<Eigen::VectorXcd> blocks_;  // index twice_k + twice_j
};

/// One entry of the dissipative propagator D_mn(k, tau). Indices are stored
/// in twice-units; tau is dimensionless (units of the classical damping time).
struct PropagatorEntry {
    int twice_j;
    int twice_k;
    int twice_m;
    int twice_n;
    double tau;
    double value;
};

/// Right-hand side of the master equation in block form:
///   d rho_m(k)/d tau = (1/2j) [ 2 sqrt(g_{m+k+1} g_{m-k+1}) rho_{m+1}(k)
///                               - (g_{m+k} + g_{m-k}) rho_m(k) ].
BlockDensity liouvillian_apply(const BlockDensity& rho);

/// Ground-truth ODE integration of the master equation: classic RK4 with
/// step halving until two successive refinements agree within tol.
/// Throws StepUnderflow if the refinement does not settle.
BlockDensity evolve_oracle(const BlockDensity& rho0, double tau, double tol);

/// Same integration, recording the state at every requested time.
/// taus must be ascending and non-negative.
std::vector<BlockDensity> evolve_oracle_samples(const BlockDensity& rho0,
                                                const std::vector<double>& taus,
                                                double tol);

/// Exact dissipative propagator D_mn(k, tau), evaluated by residues of its
/// inverse-Laplace representation. Poles sit at s = k^2 - g_l for l = m..n;
/// since g_l = g_{1-l}, pairs (l, 1-l) inside [m, n] produce confluent double
/// poles handled as (A + B tau) exponentials. Degeneracy is detected exactly
/// through integer arithmetic on twice-indices. Returns 0 for n < m and the
/// Kronecker delta at tau = 0; throws IndexOutOfRange for indices outside the
/// representation.
double propagator_exact(SpinQuantum spin, int twice_k, int twice_m, int twice_n,
                        double tau);

/// Propagate every block through the exact propagator:
///   rho_m(k, tau) = sum_{n >= m} D_mn(k, tau) rho_n(k, 0).
BlockDensity evolve_exact(const BlockDensity& rho0, double tau);

struct ShortTimePropagator {
    double value;
    /// True when (|m+n-1|/j) (n-m) tau < 0.1, the stated validity bound.
    bool inside_validity;
};

/// Short-time approximation of D_mn(k, tau):
///   sqrt(Q_{m-k,n-k} Q_{m+k,n+k}) / (n-m)! (tau/j)^{n-m}
///     exp(-(tau/j) [j^2 - ((n+m-1)/2)^2]),
/// with the Q factors in log space.
ShortTimePropagator propagator_short_time(SpinQuantum spin, int twice_k, int twice_m,
                                          int twice_n, double tau);

/// Propagate every block using the short-time propagator.
BlockDensity evolve_short_time(const BlockDensity& rho0, double tau);

}  // namespace spincat
