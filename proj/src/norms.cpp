#include "spincat/norms.hpp"

#include <cmath>

namespace spincat {

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::oracle: return "oracle";
        case Engine::exact: return "exact";
        case Engine::short_time: return "short_time";
    }
    return "unknown";
}

Engine engine_from_name(const std::string& name) {
    if (name == "oracle") return Engine::oracle;
    if (name == "exact") return Engine::exact;
    if (name == "short_time") return Engine::short_time;
    throw DomainError("unknown engine: " + name);
}

double norm_n1(const BlockDensity& rho) {
    const int tj = rho.spin().twice_j();
    double sum = 0.0;
    for (int tk = -tj; tk <= tj; ++tk) sum += rho.block(tk).squaredNorm();
    return sum;
}

double norm_n2(const BlockDensity& rho) {
    const int tj = rho.spin().twice_j();
    double sum = 0.0;
    for (int tk = -tj; tk <= tj; ++tk) sum += rho.block(tk).cwiseAbs().sum();
    return sum;
}

double n1_rate_paper(double theta1, double theta2, double dphi, double j) {
    const double s1 = std::sin(theta1), s2 = std::sin(theta2);
    const double c1 = std::cos(theta1), c2 = std::cos(theta2);
    return -2.0 * j * (s1 * s1 + s2 * s2 - 2.0 * std::cos(dphi) * s1 * s2) -
           (1.0 + c1) * (1.0 + c1) * (1.0 + c2) * (1.0 + c2);
}

double n1_rate_oracle(SpinQuantum spin, const CoherentLabel& label1,
                      const CoherentLabel& label2) {
    const StateVector a = coherent_state(spin, label1);
    const StateVector b = coherent_state(spin, label2);
    const BlockDensity rho = BlockDensity::from_matrix(DensityMatrix::outer(a, b));
    const BlockDensity drho = liouvillian_apply(rho);
    const int tj = spin.twice_j();
    double rate = 0.0;
    for (int tk = -tj; tk <= tj; ++tk)
        rate += 2.0 * drho.block(tk).dot(rho.block(tk)).real();
    return rate;
}

double fit_initial_rate(const DecoherenceCurve& curve, double window_end) {
    // Least squares on (tau, ln n) pairs, tau in [0, window_end].
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n_total = 0, n_positive_tau = 0;
    for (std::size_t i = 0; i < curve.taus.size(); ++i) {
        const double t = curve.taus[i];
        if (t > window_end) break;
        const double r = curve.n_ratio[i];
        if (r <= 0.0) throw DomainError("fit_initial_rate: n_ratio <= 0 in window");
        const double y = std::log(r);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n_total;
        if (t > 0.0) ++n_positive_tau;
    }
    if (n_positive_tau < 5)
        throw InsufficientSamples("fit_initial_rate: need >= 5 samples in (0, window_end]");
    const double denom = n_total * sxx - sx * sx;
    const double slope = (n_total * sxy - sx * sy) / denom;
    return -slope;
}

DecoherenceCurve compute_curve(SpinQuantum spin, const CoherentLabel& label1,
                               const CoherentLabel& label2, double t_max, int samples,
                               Engine engine, double tol) {
    if (samples < 2) throw DomainError("compute_curve: samples must be >= 2");
    if (t_max <= 0.0) throw DomainError("compute_curve: t_max must be > 0");

    const StateVector a = coherent_state(spin, label1);
    const StateVector b = coherent_state(spin, label2);
    const BlockDensity rho0 = BlockDensity::from_matrix(DensityMatrix::outer(a, b));

    DecoherenceCurve curve;
    curve.meta = {spin.twice_j(), label1, label2, engine};
    curve.taus.resize(samples);
    for (int i = 0; i < samples; ++i) curve.taus[i] = t_max * i / (samples - 1);

    std::vector<BlockDensity> states;
    switch (engine) {
        case Engine::oracle:
            states = evolve_oracle_samples(rho0, curve.taus, tol);
            break;
        case Engine::exact:
            for (double t : curve.taus) states.push_back(evolve_exact(rho0, t));
            break;
        case Engine::short_time:
            for (double t : curve.taus) states.push_back(evolve_short_time(rho0, t));
            break;
    }

    curve.n1.reserve(samples);
    curve.n2.reserve(samples);
    curve.n_ratio.reserve(samples);
    for (const BlockDensity& s : states) {
        curve.n1.push_back(norm_n1(s));
        curve.n2.push_back(norm_n2(s));
    }
    for (int i = 0; i < samples; ++i) curve.n_ratio.push_back(curve.n2[i] / curve.n2[0]);
    return curve;
}

}  // namespace spincat
