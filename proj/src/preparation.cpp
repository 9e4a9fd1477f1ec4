#include "spincat/preparation.hpp"

#include <array>
#include <cmath>

namespace spincat {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

StateVector twist_evolve(const StateVector& psi, double chi) {
    const int tj = psi.spin.twice_j();
    Eigen::VectorXcd out = psi.amplitudes;
    for (int p = 0; p <= tj; ++p)
        out[p] *= std::polar(1.0, -chi * psi.spin.ladder_factor(tj - 2 * p));
    return {psi.spin, out};
}

StateVector run_twist_pipeline(SpinQuantum spin, double theta_offset,
                               double final_axis_phi, TwistSchedule* schedule) {
    StateVector psi{spin, Eigen::VectorXcd::Zero(spin.dim())};
    psi.amplitudes[spin.dim() - 1] = 1.0;  // ground state |j, -j>

    const double pulse1 = theta_offset - kPi;  // brings -z to (theta_offset, 0)
    psi = rotate_y(psi, pulse1);
    psi = twist_evolve(psi, 0.5 * kPi);
    psi = rotate_about_equatorial_axis(psi, final_axis_phi, 0.5 * kPi);

    if (schedule) {
        schedule->chi = 0.5 * kPi;
        schedule->pulses = {{0.5 * kPi, pulse1}, {final_axis_phi, 0.5 * kPi}};
    }
    return psi;
}

namespace {

double husimi(const StateVector& psi, double theta, double phi) {
    return std::norm(inner_product(coherent_state(psi.spin, CoherentLabel(theta, phi)), psi));
}

/// Projection of psi onto span{|l1>, |l2>} via the Gram matrix.
double projection_fidelity(const StateVector& psi, const CoherentLabel& l1,
                           const CoherentLabel& l2, Complex* c1 = nullptr,
                           Complex* c2 = nullptr) {
    const Complex v1 = inner_product(coherent_state(psi.spin, l1), psi);
    const Complex v2 = inner_product(coherent_state(psi.spin, l2), psi);
    const Complex g = coherent_overlap(psi.spin, l1, l2);
    const double det = 1.0 - std::norm(g);
    if (det < 1e-12) {  // components (anti)parallel; treat as one component
        if (c1) *c1 = v1;
        if (c2) *c2 = 0.0;
        return std::norm(v1);
    }
    const Complex a1 = (v1 - g * v2) / det;
    const Complex a2 = (v2 - std::conj(g) * v1) / det;
    if (c1) *c1 = a1;
    if (c2) *c2 = a2;
    return std::real(std::conj(a1) * v1 + std::conj(a2) * v2);
}

struct Peak {
    double theta, phi, value;
};

double sphere_distance(const Peak& a, const Peak& b) {
    const double ca = std::cos(a.theta), sa = std::sin(a.theta);
    const double cb = std::cos(b.theta), sb = std::sin(b.theta);
    const double dot = sa * sb * std::cos(a.phi - b.phi) + ca * cb;
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

/// Golden-section maximization of g on [lo, hi].
template <typename F>
double golden_max(F&& g, double lo, double hi, int iters) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double g1 = g(x1), g2 = g(x2);
    for (int i = 0; i < iters; ++i) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + r * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - r * (hi - lo);
            g1 = g(x1);
        }
    }
    return 0.5 * (lo + hi);
}

Peak refine_peak(const StateVector& psi, Peak p, double span) {
    for (int round = 0; round < 4; ++round) {
        p.theta = golden_max(
            [&](double t) { return husimi(psi, std::clamp(t, 0.0, kPi), p.phi); },
            p.theta - span, p.theta + span, 40);
        p.theta = std::clamp(p.theta, 0.0, kPi);
        p.phi = golden_max([&](double f) { return husimi(psi, p.theta, f); }, p.phi - span,
                           p.phi + span, 40);
        span *= 0.25;
    }
    p.value = husimi(psi, p.theta, p.phi);
    return p;
}

}  // namespace

TwoComponentFit fit_two_components(const StateVector& psi) {
    // Coarse Husimi scan for the two dominant, well separated peaks.
    const int n_theta = 49, n_phi = 96;
    std::vector<Peak> grid;
    grid.reserve(n_theta * n_phi);
    for (int it = 0; it < n_theta; ++it) {
        const double theta = kPi * it / (n_theta - 1);
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = 2.0 * kPi * ip / n_phi;
            grid.push_back({theta, phi, husimi(psi, theta, phi)});
            if (theta == 0.0 || theta == kPi) break;  // poles are phi-independent
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i].value > grid[best].value) best = i;
    std::size_t second = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (sphere_distance(grid[i], grid[best]) < 0.5) continue;
        if (second == grid.size() || grid[i].value > grid[second].value) second = i;
    }
    if (second == grid.size())
        throw PipelineFidelityLow("fit_two_components: no second Husimi peak found");

    Peak p1 = refine_peak(psi, grid[best], 0.1);
    Peak p2 = refine_peak(psi, grid[second], 0.1);

    // Joint refinement of the four angles on the projection fidelity.
    std::array<double, 4> x = {p1.theta, p1.phi, p2.theta, p2.phi};
    auto eval = [&](const std::array<double, 4>& y) {
        return projection_fidelity(psi, CoherentLabel(std::clamp(y[0], 0.0, kPi), y[1]),
                                   CoherentLabel(std::clamp(y[2], 0.0, kPi), y[3]));
    };
    double span = 0.05;
    for (int round = 0; round < 8; ++round) {
        for (int dim = 0; dim < 4; ++dim) {
            x[dim] = golden_max(
                [&](double t) {
                    std::array<double, 4> y = x;
                    y[dim] = t;
                    return eval(y);
                },
                x[dim] - span, x[dim] + span, 48);
        }
        span *= 0.3;
    }

    TwoComponentFit fit{CoherentLabel(std::clamp(x[0], 0.0, kPi), x[1]),
                        CoherentLabel(std::clamp(x[2], 0.0, kPi), x[3]),
                        0.0,
                        0.0,
                        0.0};
    if (fit.label2.theta() < fit.label1.theta()) std::swap(fit.label1, fit.label2);
    fit.fit_fidelity = projection_fidelity(psi, fit.label1, fit.label2, &fit.c1, &fit.c2);
    return fit;
}

double best_cat_fidelity(const StateVector& psi, const CoherentLabel& label1,
                         const CoherentLabel& label2, double* best_phase) {
    const Complex v1 = inner_product(coherent_state(psi.spin, label1), psi);
    const Complex v2 = inner_product(coherent_state(psi.spin, label2), psi);
    const Complex g = coherent_overlap(psi.spin, label1, label2);
    auto fid = [&](double chi) {
        const double norm2 = 2.0 + 2.0 * std::real(std::polar(1.0, chi) * g);
        if (norm2 < 1e-14) return 0.0;
        return std::norm(v1 + std::polar(1.0, -chi) * v2) / norm2;
    };
    double chi0 = 0.0, best = -1.0;
    for (int i = 0; i < 720; ++i) {
        const double chi = 2.0 * kPi * i / 720;
        const double f = fid(chi);
        if (f > best) {
            best = f;
            chi0 = chi;
        }
    }
    const double chi_star = golden_max(fid, chi0 - 0.02, chi0 + 0.02, 60);
    if (best_phase) *best_phase = chi_star;
    return fid(chi_star);
}

PreparationResult prepare_symmetric_cat_detailed(SpinQuantum spin, double theta_offset,
                                                 bool wrong_axis) {
    if (spin.twice_j() % 2 != 0)
        throw DomainError(
            "prepare_symmetric_cat: integer j required (the chi = pi/2 twist splits "
            "into two components only for integer j)");
    if (!(theta_offset > 0.0 && theta_offset < 0.5 * kPi))
        throw DomainError("prepare_symmetric_cat: theta_offset must be in (0, pi/2)");

    PreparationResult res{
        StateVector{spin, Eigen::VectorXcd()}, {}, TwoComponentFit{CoherentLabel(0, 0),
                                                                   CoherentLabel(0, 0), 0.0,
                                                                   0.0, 0.0},
        0.0, 0.0, 0.0};
    res.state =
        run_twist_pipeline(spin, theta_offset, wrong_axis ? 0.5 * kPi : 0.0, &res.schedule);
    res.fit = fit_two_components(res.state);

    const double t1 = res.fit.label1.theta(), t2 = res.fit.label2.theta();
    const Complex product = std::polar(std::tan(0.5 * t1) * std::tan(0.5 * t2),
                                       res.fit.label1.phi() - res.fit.label2.phi());
    res.symmetry_error = std::abs(product - 1.0);

    // Fidelity against the ideal symmetric cat at the fitted common azimuth,
    // maximized over the relative component phase (pulse phases are a
    // convention, not part of the target).
    const double phi = 0.5 * (res.fit.label1.phi() + res.fit.label2.phi());
    const CoherentLabel ideal1(0.5 * kPi - theta_offset, phi);
    const CoherentLabel ideal2(0.5 * kPi + theta_offset, phi);
    res.ideal_fidelity = best_cat_fidelity(res.state, ideal1, ideal2, &res.relative_phase);
    return res;
}

StateVector prepare_symmetric_cat(SpinQuantum spin, double theta_offset) {
    PreparationResult res = prepare_symmetric_cat_detailed(spin, theta_offset, false);
    if (res.fit.fit_fidelity < 0.999)
        throw PipelineFidelityLow("prepare_symmetric_cat: two-component fit below 0.999");
    if (res.symmetry_error > 1e-6)
        throw PipelineFidelityLow(
            "prepare_symmetric_cat: fitted labels violate gamma1 gamma2* = 1");
    return res.state;
}

}  // namespace spincat
