#pragma once

#include <string>
#include <vector>

#include "spincat/dissipator.hpp"

namespace spincat {

/// Which evolution engine produced a curve.
enum class Engine { oracle, exact, short_time };

std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name);

/// Sampled time series of the coherence norms of an evolving cat block.
struct DecoherenceCurve {
    std::vector<double> taus;     // ascending, taus[0] = 0
    std::vector<double> n1;       // N1(tau) = tr rho rho^dag
    std::vector<double> n2;       // N2(tau) = sum |rho_{m1 m2}|
    std::vector<double> n_ratio;  // N2(tau)/N2(0), exactly 1 at tau = 0
    struct Meta {
        int twice_j = 0;
        CoherentLabel label1 = CoherentLabel::north_pole();
        CoherentLabel label2 = CoherentLabel::north_pole();
        Engine engine = Engine::oracle;
    } meta;
};

/// N1 = sum of |rho_{m1 m2}|^2 over all entries.
double norm_n1(const BlockDensity& rho);

/// N2 = sum of |rho_{m1 m2}| over all entries.
double norm_n2(const BlockDensity& rho);

/// Initial decay rate of N1 for the block |g1><g2|, exactly as printed in
/// the source formula:
///   -2j (sin^2 t1 + sin^2 t2 - 2 cos(dphi) sin t1 sin t2)
///   - (1+cos t1)^2 (1+cos t2)^2.
/// Shipped verbatim for comparison against n1_rate_oracle, which disagrees
/// with it (see the discrepancy report); all quantitative logic uses the
/// oracle.
double n1_rate_paper(double theta1, double theta2, double dphi, double j);

/// Ground truth for the initial N1 rate: builds rho = |g1><g2|, applies the
/// generator once and returns dN1/dtau|_0 = 2 Re sum (L rho) conj(rho).
double n1_rate_oracle(SpinQuantum spin, const CoherentLabel& label1,
                      const CoherentLabel& label2);

/// Least-squares slope of ln n(tau) over [0, window_end]; returns the decay
/// rate (positive for decaying curves). Requires at least 5 samples in
/// (0, window_end] with n_ratio > 0, else throws InsufficientSamples.
double fit_initial_rate(const DecoherenceCurve& curve, double window_end);

/// Evolve the off-diagonal block |g1><g2| with the chosen engine and sample
/// both norms at `samples` equidistant times in [0, t_max].
DecoherenceCurve compute_curve(SpinQuantum spin, const CoherentLabel& label1,
                               const CoherentLabel& label2, double t_max, int samples,
                               Engine engine, double tol);

}  // namespace spincat
