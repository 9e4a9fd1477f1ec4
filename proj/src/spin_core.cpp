#include "spincat/spin_core.hpp"

#include <cmath>

namespace spincat {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_phi(double phi) {
    double w = std::fmod(phi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}
}  // namespace

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

CoherentLabel::CoherentLabel(double theta, double phi) : theta_(theta), phi_(wrap_phi(phi)) {
    if (!(theta >= 0.0 && theta <= kPi))
        throw DomainError("CoherentLabel: theta outside [0, pi]");
    if (theta_ == 0.0 || theta_ == kPi) phi_ = 0.0;
}

CoherentLabel CoherentLabel::from_gamma(Complex gamma) {
    if (std::isinf(std::abs(gamma))) return south_pole();
    const double r = std::abs(gamma);
    if (r == 0.0) return north_pole();
    return CoherentLabel(2.0 * std::atan(r), wrap_phi(std::arg(gamma)));
}

CoherentLabel CoherentLabel::south_pole() { return CoherentLabel(kPi, 0.0); }

Complex CoherentLabel::gamma() const {
    if (at_infinity()) throw DomainError("CoherentLabel: gamma is infinite at theta = pi");
    return std::polar(std::tan(0.5 * theta_), phi_);
}

double CoherentLabel::gamma_abs() const {
    if (at_infinity()) return std::numeric_limits<double>::infinity();
    return std::tan(0.5 * theta_);
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.spin != b.spin) throw DimensionMismatch("inner_product: different spins");
    return a.amplitudes.dot(b.amplitudes);  // Eigen dot conjugates the left factor
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
    return DensityMatrix{psi.spin, psi.amplitudes * psi.amplitudes.adjoint()};
}

DensityMatrix DensityMatrix::outer(const StateVector& a, const StateVector& b) {
    if (a.spin != b.spin) throw DimensionMismatch("DensityMatrix::outer: different spins");
    return DensityMatrix{a.spin, a.amplitudes * b.amplitudes.adjoint()};
}

StateVector coherent_state(SpinQuantum spin, const CoherentLabel& label) {
    const int d = spin.dim();
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
    if (label.at_origin()) {
        amps[0] = 1.0;
        return {spin, amps};
    }
    if (label.at_infinity()) {
        amps[d - 1] = 1.0;
        return {spin, amps};
    }
    // c_m = cos(t/2)^{j+m} sin(t/2)^{j-m} sqrt(C(2j, j-m)) e^{i(j-m)phi},
    // assembled in log space; j+m = 2j-p and j-m = p at index p.
    const int tj = spin.twice_j();
    const double lc = std::log(std::cos(0.5 * label.theta()));
    const double ls = std::log(std::sin(0.5 * label.theta()));
    for (int p = 0; p <= tj; ++p) {
        const double lmag = (tj - p) * lc + p * ls + 0.5 * log_binomial(tj, p);
        amps[p] = std::polar(std::exp(lmag), p * label.phi());
    }
    return {spin, amps};
}

Complex coherent_overlap(SpinQuantum spin, const CoherentLabel& label1,
                         const CoherentLabel& label2) {
    // <g1|g2> = [cos(t1/2)cos(t2/2) + sin(t1/2)sin(t2/2) e^{i(phi2-phi1)}]^{2j},
    // the half-angle form of (1 + g1* g2)^{2j} / ((1+|g1|^2)(1+|g2|^2))^j.
    // Valid at the poles because phi is canonicalized to 0 there.
    const Complex base =
        std::cos(0.5 * label1.theta()) * std::cos(0.5 * label2.theta()) +
        std::sin(0.5 * label1.theta()) * std::sin(0.5 * label2.theta()) *
            std::polar(1.0, label2.phi() - label1.phi());
    if (std::abs(base) == 0.0) return 0.0;
    return std::pow(base, spin.twice_j());
}

StateVector cat_state(SpinQuantum spin, const CoherentLabel& label1,
                      const CoherentLabel& label2) {
    const double denom = 2.0 + 2.0 * std::real(coherent_overlap(spin, label1, label2));
    if (denom < 1e-14) throw DegenerateCat("cat_state: components cancel");
    const StateVector a = coherent_state(spin, label1);
    const StateVector b = coherent_state(spin, label2);
    return {spin, (a.amplitudes + b.amplitudes) / std::sqrt(denom)};
}

StateVector apply_jminus(const StateVector& psi) {
    const int tj = psi.spin.twice_j();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.spin.dim());
    // (J- psi)_m = sqrt(g_{m+1}) psi_{m+1}: index p receives from p-1.
    for (int p = 1; p <= tj; ++p) {
        const int twice_m_plus_1 = tj - 2 * (p - 1);
        out[p] = std::sqrt(psi.spin.ladder_factor(twice_m_plus_1)) * psi.amplitudes[p - 1];
    }
    return {psi.spin, out};
}

StateVector apply_jplus(const StateVector& psi) {
    const int tj = psi.spin.twice_j();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.spin.dim());
    // (J+ psi)_m = sqrt(g_m) psi_{m-1}: index p receives from p+1.
    for (int p = 0; p < tj; ++p) {
        const int twice_m = tj - 2 * p;
        out[p] = std::sqrt(psi.spin.ladder_factor(twice_m)) * psi.amplitudes[p + 1];
    }
    return {psi.spin, out};
}

double pointer_deviation(SpinQuantum spin, const CoherentLabel& label) {
    const StateVector psi = coherent_state(spin, label);
    const StateVector jm = apply_jminus(psi);
    const double n2 = jm.amplitudes.squaredNorm();
    if (n2 <= 0.0) return 0.0;  // dark state convention
    const double overlap2 = std::norm(inner_product(psi, jm));
    const double s2 = 1.0 - overlap2 / n2;
    return std::sqrt(std::max(0.0, s2));
}

namespace {

/// exp(-i angle J_y) as a dense matrix, via the eigendecomposition of the
/// phase-gauged J_y. With U = diag(i^p), U^dag J_y U is real symmetric
/// tridiagonal with off-diagonal sqrt(g_{m_p})/2, which keeps the
/// decomposition stable at large j (the textbook d-matrix sum cancels badly).
Eigen::MatrixXcd rotation_matrix_y(SpinQuantum spin, double angle) {
    const int d = spin.dim();
    const int tj = spin.twice_j();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
    for (int p = 0; p + 1 < d; ++p) {
        const int twice_m = tj - 2 * p;  // coupling between m and m-1 uses g_m
        const double off = 0.5 * std::sqrt(spin.ladder_factor(twice_m));
        t(p, p + 1) = off;
        t(p + 1, p) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::VectorXcd phases(d);
    for (int i = 0; i < d; ++i)
        phases[i] = std::polar(1.0, -angle * es.eigenvalues()[i]);
    Eigen::MatrixXcd core = v * phases.asDiagonal() * v.transpose();
    const Complex iu(0.0, 1.0);
    Eigen::VectorXcd gauge(d);
    Complex ip(1.0, 0.0);
    for (int p = 0; p < d; ++p, ip *= iu) gauge[p] = ip;
    return gauge.asDiagonal() * core * gauge.asDiagonal().toDenseMatrix().conjugate();
}

}  // namespace

StateVector rotate_y(const StateVector& psi, double angle) {
    return {psi.spin, rotation_matrix_y(psi.spin, angle) * psi.amplitudes};
}

StateVector rotate_about_equatorial_axis(const StateVector& psi, double axis_phi,
                                         double angle) {
    // exp(-i a n.J) = exp(-i s J_z) exp(-i a J_y) exp(+i s J_z), s = axis_phi - pi/2.
    const double s = axis_phi - 0.5 * kPi;
    const int tj = psi.spin.twice_j();
    Eigen::VectorXcd work = psi.amplitudes;
    for (int p = 0; p <= tj; ++p) {
        const double m = 0.5 * (tj - 2 * p);
        work[p] *= std::polar(1.0, s * m);  // exp(+i s J_z)
    }
    work = rotation_matrix_y(psi.spin, angle) * work;
    for (int p = 0; p <= tj; ++p) {
        const double m = 0.5 * (tj - 2 * p);
        work[p] *= std::polar(1.0, -s * m);  // exp(-i s J_z)
    }
    return {psi.spin, work};
}

double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner_product(a, b));
}

}  // namespace spincat
