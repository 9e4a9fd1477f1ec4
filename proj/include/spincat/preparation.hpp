#pragma once

#include <utility>
#include <vector>

#include "spincat/spin_core.hpp"

namespace spincat {

/// Record of one preparation sequence: accumulated twisting phase chi (the
/// dimensionless product of the detuned-cavity J+J- coefficient and its
/// duration) followed by resonant pulses (equatorial axis azimuth, angle).
struct TwistSchedule {
    double chi = 0.0;
    std::vector<std::pair<double, double>> pulses;
};

/// Diagonal twisting unitary: phase exp(-i chi g_m) on each |j m> component,
/// g_m = j(j+1) - m(m-1) being the J+J- eigenvalues. Norm preserving and
/// additive in chi.
StateVector twist_evolve(const StateVector& psi, double chi);

/// Two-coherent-component decomposition of a state, obtained by maximizing
/// the fidelity of the ansatz c1|g1> + c2|g2> (Husimi peak scan followed by
/// joint refinement of the four label angles).
struct TwoComponentFit {
    CoherentLabel label1;  // smaller theta first
    CoherentLabel label2;
    Complex c1;
    Complex c2;
    double fit_fidelity;  // projection of psi onto span{|g1>, |g2>}
};

TwoComponentFit fit_two_components(const StateVector& psi);

/// Raw pipeline: ground state -> resonant pulse to |theta_offset, 0> ->
/// twist by chi = pi/2 -> pi/2 pulse about the equatorial axis at
/// `final_axis_phi`. The correct axis (perpendicular to the plane of the two
/// split components) is x, i.e. final_axis_phi = 0; any other choice is a
/// negative control producing an asymmetric cat.
StateVector run_twist_pipeline(SpinQuantum spin, double theta_offset,
                               double final_axis_phi, TwistSchedule* schedule = nullptr);

/// Full preparation of an equator-symmetric cat with components at
/// theta = pi/2 -+ theta_offset and a common azimuth (gamma1 gamma2* = 1).
/// Integer j only; throws PipelineFidelityLow if the two-component fit drops
/// below 0.999 or the fitted labels violate the symmetry beyond 1e-6.
StateVector prepare_symmetric_cat(SpinQuantum spin, double theta_offset);

/// Everything the prepare report needs in one pass.
struct PreparationResult {
    StateVector state;
    TwistSchedule schedule;
    TwoComponentFit fit;
    double ideal_fidelity;    // vs the ideal symmetric cat, relative phase optimized
    double relative_phase;    // optimizing phase chi of the ideal-cat comparison
    double symmetry_error;    // |gamma1 gamma2* - 1| of the fitted labels
};

PreparationResult prepare_symmetric_cat_detailed(SpinQuantum spin, double theta_offset,
                                                 bool wrong_axis = false);

/// max over chi of |<psi| N(chi) (|g1> + e^{i chi} |g2>)|^2.
double best_cat_fidelity(const StateVector& psi, const CoherentLabel& label1,
                         const CoherentLabel& label2, double* best_phase = nullptr);

}  // namespace spincat
