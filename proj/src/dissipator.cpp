#include "spincat/dissipator.hpp"

#include <algorithm>
#include <cmath>

namespace spincat {

namespace {

void check_block_index(SpinQuantum spin, int twice_k, int twice_m, const char* who) {
    const int tj = spin.twice_j();
    if (std::abs(twice_m + twice_k) > tj || std::abs(twice_m - twice_k) > tj ||
        (twice_m + twice_k - tj) % 2 != 0)
        throw IndexOutOfRange(std::string(who) + ": (m, k) outside the representation");
}

}  // namespace

BlockDensity::BlockDensity(SpinQuantum spin) : spin_(spin) {
    const int tj = spin.twice_j();
    blocks_.reserve(2 * tj + 1);
    for (int tk = -tj; tk <= tj; ++tk)
        blocks_.push_back(Eigen::VectorXcd::Zero(block_size(spin, tk)));
}

BlockDensity BlockDensity::from_matrix(const DensityMatrix& rho) {
    BlockDensity out(rho.spin);
    const int tj = rho.spin.twice_j();
    for (int i1 = 0; i1 <= tj; ++i1) {
        for (int i2 = 0; i2 <= tj; ++i2) {
            const int tm1 = tj - 2 * i1, tm2 = tj - 2 * i2;
            out.set_value((tm1 - tm2) / 2, (tm1 + tm2) / 2, rho.entries(i1, i2));
        }
    }
    return out;
}

DensityMatrix BlockDensity::to_matrix() const {
    const int tj = spin_.twice_j();
    DensityMatrix rho{spin_, Eigen::MatrixXcd::Zero(tj + 1, tj + 1)};
    for (int i1 = 0; i1 <= tj; ++i1) {
        for (int i2 = 0; i2 <= tj; ++i2) {
            const int tm1 = tj - 2 * i1, tm2 = tj - 2 * i2;
            rho.entries(i1, i2) = value((tm1 - tm2) / 2, (tm1 + tm2) / 2);
        }
    }
    return rho;
}

double BlockDensity::max_abs_difference(const BlockDensity& other) const {
    if (spin_ != other.spin_) throw DimensionMismatch("BlockDensity: different spins");
    double d = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        d = std::max(d, (blocks_[b] - other.blocks_[b]).cwiseAbs().maxCoeff());
    return d;
}

BlockDensity liouvillian_apply(const BlockDensity& rho) {
    const SpinQuantum spin = rho.spin();
    const int tj = spin.twice_j();
    const double inv_2j = 1.0 / tj;  // 1/(2j)
    BlockDensity out(spin);
    for (int tk = -tj; tk <= tj; ++tk) {
        const Eigen::VectorXcd& in = rho.block(tk);
        Eigen::VectorXcd& dst = out.block(tk);
        const int size = BlockDensity::block_size(spin, tk);
        const int tm_min = -(tj - std::abs(tk));
        for (int i = 0; i < size; ++i) {
            const int tm = tm_min + 2 * i;
            const double decay = spin.ladder_factor(tm + tk) + spin.ladder_factor(tm - tk);
            Complex v = -decay * in[i];
            if (i + 1 < size) {
                const double gain = 2.0 * std::sqrt(spin.ladder_factor(tm + tk + 2) *
                                                    spin.ladder_factor(tm - tk + 2));
                v += gain * in[i + 1];
            }
            dst[i] = inv_2j * v;
        }
    }
    return out;
}

namespace {

// One classic RK4 step of the block master equation.
BlockDensity rk4_step(const BlockDensity& y, double h) {
    const SpinQuantum spin = y.spin();
    const int tj = spin.twice_j();
    BlockDensity k1 = liouvillian_apply(y);
    BlockDensity tmp(spin);
    for (int tk = -tj; tk <= tj; ++tk) tmp.block(tk) = y.block(tk) + 0.5 * h * k1.block(tk);
    BlockDensity k2 = liouvillian_apply(tmp);
    for (int tk = -tj; tk <= tj; ++tk) tmp.block(tk) = y.block(tk) + 0.5 * h * k2.block(tk);
    BlockDensity k3 = liouvillian_apply(tmp);
    for (int tk = -tj; tk <= tj; ++tk) tmp.block(tk) = y.block(tk) + h * k3.block(tk);
    BlockDensity k4 = liouvillian_apply(tmp);
    BlockDensity out(spin);
    for (int tk = -tj; tk <= tj; ++tk)
        out.block(tk) = y.block(tk) + (h / 6.0) * (k1.block(tk) + 2.0 * k2.block(tk) +
                                                   2.0 * k3.block(tk) + k4.block(tk));
    return out;
}

std::vector<BlockDensity> integrate_fixed(const BlockDensity& rho0,
                                          const std::vector<double>& taus, double h_max) {
    std::vector<BlockDensity> out;
    out.reserve(taus.size());
    BlockDensity state = rho0;
    double t = 0.0;
    for (double target : taus) {
        const double span = target - t;
        if (span > 0.0) {
            const int steps = std::max(1, static_cast<int>(std::ceil(span / h_max)));
            const double h = span / steps;
            for (int s = 0; s < steps; ++s) state = rk4_step(state, h);
            t = target;
        }
        out.push_back(state);
    }
    return out;
}

}  // namespace

std::vector<BlockDensity> evolve_oracle_samples(const BlockDensity& rho0,
                                                const std::vector<double>& taus,
                                                double tol) {
    if (taus.empty()) return {};
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] < 0.0 || (i > 0 && taus[i] < taus[i - 1]))
            throw DomainError("evolve_oracle_samples: taus must be ascending and >= 0");
    }
    // Start below the RK4 stability limit (rates are bounded by ~ j+1 in tau
    // units) and halve until two refinements agree everywhere.
    const double rate = 0.5 * rho0.spin().twice_j() + 1.25;
    double h = 1.0 / rate;
    std::vector<BlockDensity> prev = integrate_fixed(rho0, taus, h);
    for (int level = 0; level < 24; ++level) {
        h *= 0.5;
        std::vector<BlockDensity> next = integrate_fixed(rho0, taus, h);
        double diff = 0.0;
        for (std::size_t i = 0; i < taus.size(); ++i)
            diff = std::max(diff, prev[i].max_abs_difference(next[i]));
        if (diff < tol) return next;
        prev = std::move(next);
    }
    throw StepUnderflow("evolve_oracle: step halving did not converge");
}

BlockDensity evolve_oracle(const BlockDensity& rho0, double tau, double tol) {
    if (tau < 0.0) throw DomainError("evolve_oracle: tau must be >= 0");
    if (tol <= 0.0) throw DomainError("evolve_oracle: tol must be > 0");
    if (tau == 0.0) return rho0;
    return evolve_oracle_samples(rho0, {tau}, tol).front();
}

namespace {

// Shared per-(m..n) residue evaluation. Poles and the log prefactor are
// accumulated in long double: the alternating residue sums cancel heavily for
// long cascades and the extra mantissa keeps j <= 20 chains at ~1e-10.
struct PoleData {
    long double lambda;  // g_l - k^2
    long long key;       // 4 lambda, exact
};

double residue_propagator(SpinQuantum spin, int twice_k, int twice_m, int twice_n,
                          double tau) {
    const long double u = static_cast<long double>(tau) / spin.j();
    const long long tk = twice_k;

    // distinct poles with multiplicities (g_l = g_{1-l} gives at most 2)
    std::vector<PoleData> poles;
    std::vector<int> mult;
    for (int tl = twice_m; tl <= twice_n; tl += 2) {
        const long long key = spin.ladder_factor_x4(tl) - tk * tk;
        bool merged = false;
        for (std::size_t p = 0; p < poles.size(); ++p) {
            if (poles[p].key == key) {
                ++mult[p];
                merged = true;
                break;
            }
        }
        if (!merged) {
            poles.push_back({static_cast<long double>(key) / 4.0L, key});
            mult.push_back(1);
        }
    }

    long double log_pref = 0.0L;
    for (int tl = twice_m + 2; tl <= twice_n; tl += 2) {
        const long double gp = static_cast<long double>(spin.ladder_factor_x4(tl + tk)) / 4.0L;
        const long double gm = static_cast<long double>(spin.ladder_factor_x4(tl - tk)) / 4.0L;
        log_pref += 0.5L * (std::log(gp) + std::log(gm));
    }

    long double sum = 0.0L;
    for (std::size_t p = 0; p < poles.size(); ++p) {
        long double log_abs_f = 0.0L;
        int sign = 1;
        long double deriv_sum = 0.0L;  // sum mult_q / (lambda_q - lambda_p)
        for (std::size_t q = 0; q < poles.size(); ++q) {
            if (q == p) continue;
            const long double d = poles[q].lambda - poles[p].lambda;
            log_abs_f -= mult[q] * std::log(std::abs(d));
            if (d < 0.0L && mult[q] % 2 == 1) sign = -sign;
            deriv_sum += mult[q] / d;
        }
        const long double scale = sign * std::exp(log_pref + log_abs_f - poles[p].lambda * u);
        if (mult[p] == 1) {
            sum += scale;
        } else {
            sum += scale * (u - deriv_sum);
        }
    }
    double result = static_cast<double>(sum);
    if (result < 0.0 && result > -1e-13) result = 0.0;  // residue dust
    return result;
}

}  // namespace

double propagator_exact(SpinQuantum spin, int twice_k, int twice_m, int twice_n,
                        double tau) {
    check_block_index(spin, twice_k, twice_m, "propagator_exact");
    check_block_index(spin, twice_k, twice_n, "propagator_exact");
    if (tau < 0.0) throw DomainError("propagator_exact: tau must be >= 0");
    if (twice_n < twice_m) return 0.0;  // one-directional cascade
    if (tau == 0.0) return twice_m == twice_n ? 1.0 : 0.0;
    if (twice_m == twice_n) {
        const double lambda =
            spin.ladder_factor(twice_m) - 0.25 * static_cast<double>(twice_k) * twice_k;
        return std::exp(-lambda * tau / spin.j());
    }
    return residue_propagator(spin, twice_k, twice_m, twice_n, tau);
}

BlockDensity evolve_exact(const BlockDensity& rho0, double tau) {
    if (tau < 0.0) throw DomainError("evolve_exact: tau must be >= 0");
    const SpinQuantum spin = rho0.spin();
    const int tj = spin.twice_j();
    BlockDensity out(spin);
    for (int tk = -tj; tk <= tj; ++tk) {
        const Eigen::VectorXcd& in = rho0.block(tk);
        Eigen::VectorXcd& dst = out.block(tk);
        const int size = BlockDensity::block_size(spin, tk);
        const int tm_min = -(tj - std::abs(tk));
        for (int i = 0; i < size; ++i) {
            Complex acc = 0.0;
            for (int n = i; n < size; ++n) {
                if (in[n] == Complex(0.0, 0.0)) continue;
                acc += propagator_exact(spin, tk, tm_min + 2 * i, tm_min + 2 * n, tau) * in[n];
            }
            dst[i] = acc;
        }
    }
    return out;
}

ShortTimePropagator propagator_short_time(SpinQuantum spin, int twice_k, int twice_m,
                                          int twice_n, double tau) {
    check_block_index(spin, twice_k, twice_m, "propagator_short_time");
    check_block_index(spin, twice_k, twice_n, "propagator_short_time");
    if (tau < 0.0) throw DomainError("propagator_short_time: tau must be >= 0");

    const double j = spin.j();
    const double m_plus_n_minus_1 = 0.5 * (twice_m + twice_n - 2);
    const double n_minus_m = 0.5 * (twice_n - twice_m);
    const bool valid = std::abs(m_plus_n_minus_1) / j * n_minus_m * tau < 0.1;

    if (twice_n < twice_m) return {0.0, valid};

    const double exponent = (tau / j) * (j * j - 0.25 * m_plus_n_minus_1 * m_plus_n_minus_1);
    if (twice_n == twice_m) return {std::exp(-exponent), valid};

    double log_pref = 0.0;
    for (int tl = twice_m + 2; tl <= twice_n; tl += 2) {
        log_pref += 0.5 * (std::log(spin.ladder_factor(tl + twice_k)) +
                           std::log(spin.ladder_factor(tl - twice_k)));
    }
    const double log_value = log_pref - std::lgamma(n_minus_m + 1.0) +
                             n_minus_m * std::log(tau / j) - exponent;
    return {std::exp(log_value), valid};
}

BlockDensity evolve_short_time(const BlockDensity& rho0, double tau) {
    const SpinQuantum spin = rho0.spin();
    const int tj = spin.twice_j();
    BlockDensity out(spin);
    for (int tk = -tj; tk <= tj; ++tk) {
        const Eigen::VectorXcd& in = rho0.block(tk);
        Eigen::VectorXcd& dst = out.block(tk);
        const int size = BlockDensity::block_size(spin, tk);
        const int tm_min = -(tj - std::abs(tk));
        for (int i = 0; i < size; ++i) {
            Complex acc = 0.0;
            for (int n = i; n < size; ++n) {
                if (in[n] == Complex(0.0, 0.0)) continue;
                acc += propagator_short_time(spin, tk, tm_min + 2 * i, tm_min + 2 * n, tau)
                           .value *
                       in[n];
            }
            dst[i] = acc;
        }
    }
    return out;
}

}  // namespace spincat
