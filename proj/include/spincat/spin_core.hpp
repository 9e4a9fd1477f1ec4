#pragma once

#include <complex>
#include <Eigen/Dense>

#include "spincat/errors.hpp"

namespace spincat {

using Complex = std::complex<double>;

/// log C(n, k) via log-gamma; n, k need not be small.
double log_binomial(int n, int k);

/// Spin quantum number j, stored exactly as the integer 2j.
///
/// The collective spin of N two-level atoms has j = N/2, so twice_j equals
/// the atom number and the Hilbert-space dimension is 2j+1.
class SpinQuantum {
  public:
    explicit SpinQuantum(int twice_j) : twice_j_(twice_j) {
        if (twice_j < 1) throw IndexOutOfRange("SpinQuantum: twice_j must be >= 1");
    }

    int twice_j() const { return twice_j_; }
    int dim() const { return twice_j_ + 1; }
    double j() const { return 0.5 * twice_j_; }
    int atom_count() const { return twice_j_; }

    /// Ladder factor g_l = j(j+1) - l(l-1), exact for half-integer l = twice_l/2.
    double ladder_factor(int twice_l) const {
        const long long tj = twice_j_, tl = twice_l;
        return 0.25 * static_cast<double>(tj * (tj + 2) - tl * (tl - 2));
    }

    /// 4 g_l as an exact integer; used where exact pole comparisons matter.
    long long ladder_factor_x4(int twice_l) const {
        const long long tj = twice_j_, tl = twice_l;
        return tj * (tj + 2) - tl * (tl - 2);
    }

    bool valid_twice_m(int twice_m) const {
        return std::abs(twice_m) <= twice_j_ && (twice_m - twice_j_) % 2 == 0;
    }

    bool operator==(const SpinQuantum& o) const { return twice_j_ == o.twice_j_; }
    bool operator!=(const SpinQuantum& o) const { return twice_j_ != o.twice_j_; }

  private:
    int twice_j_;
};

/// A point on the Bloch sphere labelling a spin coherent state.
///
/// Canonical storage is (theta, phi); the complex label
/// gamma = tan(theta/2) e^{i phi} is a derived view, with theta = pi mapped
/// to the point at infinity. At the poles phi is canonicalized to 0, so the
/// pole states are exactly |j j> (theta = 0) and |j -j> (theta = pi).
class CoherentLabel {
  public:
    CoherentLabel(double theta, double phi);

    static CoherentLabel from_gamma(Complex gamma);
    static CoherentLabel north_pole() { return CoherentLabel(0.0, 0.0); }
    static CoherentLabel south_pole();  // gamma = infinity

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    bool at_infinity() const { return theta_ == kPi; }
    bool at_origin() const { return theta_ == 0.0; }

    /// Finite gamma value; throws DomainError at the infinity pole.
    Complex gamma() const;

    /// |gamma|, with infinity at the south pole.
    double gamma_abs() const;

  private:
    static constexpr double kPi = 3.14159265358979323846;
    double theta_;  // [0, pi]
    double phi_;    // [0, 2*pi), 0 at the poles
};

/// Pure state of a spin j. Amplitudes are indexed from m = +j downwards:
/// amplitudes[p] multiplies |j, m> with twice_m = twice_j - 2p.
struct StateVector {
    SpinQuantum spin;
    Eigen::VectorXcd amplitudes;

    int index_of(int twice_m) const { return (spin.twice_j() - twice_m) / 2; }
    int twice_m_at(int index) const { return spin.twice_j() - 2 * index; }
    Complex amplitude(int twice_m) const { return amplitudes[index_of(twice_m)]; }

    double norm() const { return amplitudes.norm(); }
};

/// <a|b>; throws DimensionMismatch for different spins.
Complex inner_product(const StateVector& a, const StateVector& b);

/// General complex matrix on the spin-j space, indexed like StateVector
/// along both axes. Physical density matrices are Hermitian with unit
/// trace; off-diagonal cat blocks |g1><g2| are unconstrained.
struct DensityMatrix {
    SpinQuantum spin;
    Eigen::MatrixXcd entries;

    int index_of(int twice_m) const { return (spin.twice_j() - twice_m) / 2; }
    Complex entry(int twice_m1, int twice_m2) const {
        return entries(index_of(twice_m1), index_of(twice_m2));
    }

    static DensityMatrix from_state(const StateVector& psi);
    /// a b^dagger (not Hermitian in general).
    static DensityMatrix outer(const StateVector& a, const StateVector& b);

    Complex trace() const { return entries.trace(); }
};

/// Spin coherent state |gamma>, Bloch vector along (theta, phi).
/// Amplitudes carry the phase gamma^{j-m} with principal branches; at phi = 0
/// all amplitudes are real and positive. Poles return basis states exactly.
StateVector coherent_state(SpinQuantum spin, const CoherentLabel& label);

/// <g1|g2> in closed form; agrees with the amplitude inner product.
Complex coherent_overlap(SpinQuantum spin, const CoherentLabel& label1,
                         const CoherentLabel& label2);

/// Normalized cat state N(|g1> + |g2>). Throws DegenerateCat when the
/// components cancel (2 + 2 Re<g1|g2> < 1e-14).
StateVector cat_state(SpinQuantum spin, const CoherentLabel& label1,
                      const CoherentLabel& label2);

/// J- psi (unnormalized): (J- psi)_m = sqrt(g_{m+1}) psi_{m+1}.
StateVector apply_jminus(const StateVector& psi);

/// J+ psi (unnormalized): (J+ psi)_m = sqrt(g_m) psi_{m-1}.
StateVector apply_jplus(const StateVector& psi);

/// Sine of the angle between J-|gamma> and |gamma>; 0 for the dark state
/// theta = pi. Measures how far |gamma> is from a J- eigenstate: O(1/sqrt(j)).
double pointer_deviation(SpinQuantum spin, const CoherentLabel& label);

/// exp(-i angle J_y) applied to psi. Convention fixed such that
/// rotate_y(|j j>, theta) = coherent_state(theta, phi=0).
StateVector rotate_y(const StateVector& psi, double angle);

/// Rotation by `angle` about the equatorial axis at azimuth `axis_phi`
/// (axis_phi = pi/2 is rotate_y). Implemented as a J_z sandwich around
/// rotate_y, so the same d-matrix convention applies.
StateVector rotate_about_equatorial_axis(const StateVector& psi, double axis_phi,
                                         double angle);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

}  // namespace spincat
