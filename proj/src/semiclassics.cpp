#include "spincat/semiclassics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace spincat {

namespace {

constexpr double kPi = 3.14159265358979323846;

double plog(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void check_domain(const ReducedPoint& p, const char* who) {
    if (std::abs(p.nu - p.eta) > 1.0 + 1e-12 || std::abs(p.nu + p.eta) > 1.0 + 1e-12)
        throw DomainError(std::string(who) + ": point outside |nu +- eta| <= 1");
}

void check_gammas(double g1, double g2, const char* who) {
    if (!(g1 > 0.0) || !(g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2))
        throw DomainError(std::string(who) + ": gammas must be finite and > 0");
}

/// n-th derivative of p(x) = x ln x.
double plog_deriv(double x, int n) {
    if (n == 0) return plog(x);
    if (n == 1) return std::log(x) + 1.0;
    double fact = 1.0;
    for (int i = 2; i <= n - 2; ++i) fact *= i;  // (n-2)!
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign * fact / std::pow(x, n - 1);
}

}  // namespace

double action_s0(const ReducedPoint& p, double gamma1, double gamma2) {
    check_gammas(gamma1, gamma2, "action_s0");
    check_domain(p, "action_s0");
    const double a = 1.0 - p.nu - p.eta, b = 1.0 + p.nu + p.eta;
    const double c = 1.0 - p.nu + p.eta, e = 1.0 + p.nu - p.eta;
    return (1.0 - p.nu) * std::log(gamma1 * gamma2) + p.eta * std::log(gamma2 / gamma1) -
           0.5 * (plog(a) + plog(b) + plog(c) + plog(e));
}

double detail::action_s0_partial(const ReducedPoint& p, double gamma1, double gamma2,
                                 int da, int db) {
    check_gammas(gamma1, gamma2, "action_s0_partial");
    check_domain(p, "action_s0_partial");
    const int n = da + db;
    double linear = 0.0;
    if (n == 1) linear = (da == 1) ? -std::log(gamma1 * gamma2) : std::log(gamma2 / gamma1);
    // The four p(1 + snu*nu + seta*eta) terms pick up sign snu^da seta^db.
    const struct {
        double x;
        int snu, seta;
    } terms[4] = {{1.0 - p.nu - p.eta, -1, -1},
                  {1.0 + p.nu + p.eta, +1, +1},
                  {1.0 - p.nu + p.eta, -1, +1},
                  {1.0 + p.nu - p.eta, +1, -1}};
    double sum = 0.0;
    for (const auto& t : terms) {
        const double s = ((t.snu < 0 && da % 2 == 1) ? -1.0 : 1.0) *
                         ((t.seta < 0 && db % 2 == 1) ? -1.0 : 1.0);
        sum += s * plog_deriv(t.x, n);
    }
    return linear - 0.5 * sum;
}

SaddleData saddle_point(double gamma1, double gamma2) {
    check_gammas(gamma1, gamma2, "saddle_point");
    const double q1 = gamma1 * gamma1, q2 = gamma2 * gamma2;
    const double denom = (1.0 + q1) * (1.0 + q2);
    SaddleData sd;
    sd.point = {(1.0 - q1 * q2) / denom, (q2 - q1) / denom};
    if (reduced_w(sd.point) < 1e-6)
        throw BoundarySaddle("saddle_point: maximum within 1e-6 of the boundary w = 0");
    sd.s0_value = action_s0(sd.point, gamma1, gamma2);
    sd.hessian(0, 0) = detail::action_s0_partial(sd.point, gamma1, gamma2, 2, 0);
    sd.hessian(0, 1) = sd.hessian(1, 0) =
        detail::action_s0_partial(sd.point, gamma1, gamma2, 1, 1);
    sd.hessian(1, 1) = detail::action_s0_partial(sd.point, gamma1, gamma2, 0, 2);
    return sd;
}

SDerivativeCoeffs s_derivative_coeffs(const ReducedPoint& p, double j) {
    check_domain(p, "s_derivative_coeffs");
    if (!(j > 0.0)) throw DomainError("s_derivative_coeffs: j must be > 0");
    const double d = 0.5 / j;
    const double u = p.nu - p.eta, v = p.nu + p.eta;
    const double w1sq = (1.0 - (u - d) * (u - d)) * (1.0 - (v - d) * (v - d));
    if (w1sq < 0.0) throw DomainError("s_derivative_coeffs: w1 undefined");
    const double w1 = std::sqrt(w1sq);
    const double nu_shift = p.nu - d;
    const double a = w1 + p.eta * p.eta - 1.0 + nu_shift * nu_shift;
    double cross = 0.0;
    if (w1 > 0.0) {
        const double w2sq =
            (1.0 - (u - 3.0 * d) * (u - 3.0 * d)) * (1.0 - (v - 3.0 * d) * (v - 3.0 * d));
        if (w2sq < 0.0) throw DomainError("s_derivative_coeffs: w2 undefined");
        const double w2 = std::sqrt(w2sq);
        cross = w1 * (w2 - w1) + 2.0 * w1 * (-p.nu / j + 0.75 / (j * j));
    }
    return {a, 0.5 * (a * a + cross)};
}

CoeffExpansion coeff_expansion(const ReducedPoint& p) {
    check_domain(p, "coeff_expansion");
    const double w = reduced_w(p);
    if (w <= 1e-8) throw DomainError("coeff_expansion: w too close to 0");
    const double nu = p.nu, eta = p.eta;
    CoeffExpansion ce;
    ce.nu = nu;
    ce.eta = eta;
    ce.w = w;
    ce.a0 = w + eta * eta - 1.0 + nu * nu;
    ce.a1 = nu * (1.0 - nu * nu + eta * eta - w) / w;
    ce.b0 = 0.5 * ce.a0 * ce.a0;
    ce.b1 = ce.a0 * ce.a1 - nu * (nu * nu + w - eta * eta - 1.0);
    return ce;
}

double CoeffExpansion::b2(double a2) const {
    const double n2 = nu * nu, e2 = eta * eta;
    const double n4 = n2 * n2, e4 = e2 * e2;
    const double n6 = n4 * n2, e6 = e4 * e2;
    const double quad = (e2 - n2) * (e2 - n2) - 2.0 * (e2 + n2) + 1.0;
    const double first =
        (2.0 * a0 * a2 + a1 * a1) * quad - 2.0 + 4.0 * n6 - 2.0 * e6 - 10.0 * n4 * e2 +
        8.0 * n2 * e4 - 10.0 * n4 - 8.0 * n2 * e2 + 2.0 * e4 + 8.0 * n2 + 2.0 * e2;
    const double second = 3.0 * e4 + 7.0 * n4 - 10.0 * n2 * e2 - 10.0 * n2 - 6.0 * e2 + 3.0;
    return first / (2.0 * w * w) + second / (4.0 * w);
}

// ---------------------------------------------------------------------------
// Higher-order Laplace method.
//
// I[f] = e^{jS0} (2pi/j) |det sigma|^{-1/2}
//        sum_l 1/(l! (2j)^l) (L_S)^l (f e^{jR}) |_saddle,
// with R the deviation of S0 from its quadratic approximation. Expanding
// e^{jR} = sum_q (jR)^q / q! and using that R vanishes to second order at the
// saddle, the (l, q) term contributes at order 1/j^{l-q} with 3q <= 2l. The
// reduced orders through 1/j^2 therefore need l <= 6, f-derivatives up to
// fourth order and R (i.e. S0) derivatives up to sixth order. Everything is
// evaluated on truncated Taylor tables at the saddle.
// ---------------------------------------------------------------------------

namespace {

/// Taylor coefficient table c[a][b] ~ d^(a,b)g / (a! b!), truncated at total
/// degree `deg`.
class Poly2 {
  public:
    explicit Poly2(int deg) : deg_(deg), c_((deg + 1) * (deg + 1), 0.0) {}

    int deg() const { return deg_; }
    double& at(int a, int b) { return c_[a * (deg_ + 1) + b]; }
    double at(int a, int b) const { return c_[a * (deg_ + 1) + b]; }

    Poly2 multiply(const Poly2& o) const {
        Poly2 out(deg_);
        for (int a1 = 0; a1 <= deg_; ++a1) {
            for (int b1 = 0; a1 + b1 <= deg_; ++b1) {
                const double c1 = at(a1, b1);
                if (c1 == 0.0) continue;
                for (int a2 = 0; a1 + a2 <= deg_; ++a2) {
                    for (int b2 = 0; a1 + b1 + a2 + b2 <= deg_; ++b2) {
                        const double c2 = o.at(a2, b2);
                        if (c2 != 0.0) out.at(a1 + a2, b1 + b2) += c1 * c2;
                    }
                }
            }
        }
        return out;
    }

  private:
    int deg_;
    std::vector<double> c_;
};

/// L_S = A d^2/dnu^2 + 2B d^2/dnu deta + C d^2/deta^2 acting on a table.
Poly2 apply_ls(const Poly2& p, double A, double B, double C) {
    Poly2 out(p.deg());
    for (int a = 0; a <= p.deg(); ++a) {
        for (int b = 0; a + b <= p.deg(); ++b) {
            const double c = p.at(a, b);
            if (c == 0.0) continue;
            if (a >= 2) out.at(a - 2, b) += A * a * (a - 1) * c;
            if (a >= 1 && b >= 1) out.at(a - 1, b - 1) += 2.0 * B * a * b * c;
            if (b >= 2) out.at(a, b - 2) += C * b * (b - 1) * c;
        }
    }
    return out;
}

// 7-point central difference weights on offsets -3..3 (order >= 4 accurate).
const std::array<std::array<double, 7>, 5> kStencil = {{
    {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0},
    {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60},
    {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90},
    {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8},
    {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6},
}};

/// All mixed partials of f at the saddle with 1 <= da+db <= 4, from a 7x7
/// sample grid with spacing h.
std::array<std::array<double, 5>, 5> f_partials_grid(const ScalarField& f,
                                                     const ReducedPoint& x0, double h) {
    std::array<std::array<double, 7>, 7> grid;
    for (int i = -3; i <= 3; ++i)
        for (int k = -3; k <= 3; ++k)
            grid[i + 3][k + 3] = f(x0.nu + i * h, x0.eta + k * h);
    std::array<std::array<double, 5>, 5> out{};
    for (int da = 0; da <= 4; ++da) {
        for (int db = 0; da + db <= 4; ++db) {
            if (da + db == 0) continue;
            double acc = 0.0;
            for (int i = 0; i < 7; ++i) {
                if (kStencil[da][i] == 0.0) continue;
                for (int k = 0; k < 7; ++k) {
                    if (kStencil[db][k] == 0.0) continue;
                    acc += kStencil[da][i] * kStencil[db][k] * grid[i][k];
                }
            }
            out[da][db] = acc / std::pow(h, da + db);
        }
    }
    return out;
}

}  // namespace

LaplaceExpansion detail::laplace_expand_at(const ScalarField& f, const SaddleData& saddle,
                                           const std::function<double(int, int)>& s0_partial,
                                           int max_l) {
    if (max_l < 3) throw DomainError("laplace_expand: max_l must be >= 3");
    const int l_max = std::min(max_l, 6);  // nothing beyond l=6 reaches 1/j^2
    const int deg = 2 * l_max;

    // Residual action R: S0 coefficients of total order >= 3 only.
    Poly2 r_table(deg);
    std::vector<double> factorial(deg + 1, 1.0);
    for (int i = 1; i <= deg; ++i) factorial[i] = factorial[i - 1] * i;
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            if (a + b >= 3) r_table.at(a, b) = s0_partial(a, b) / (factorial[a] * factorial[b]);

    // f table: exact value at the saddle, Richardson-refined finite
    // differences for the partials up to fourth order.
    Poly2 f_table(deg);
    f_table.at(0, 0) = f(saddle.point.nu, saddle.point.eta);
    {
        const double margin =
            std::min(1.0 - std::abs(saddle.point.nu - saddle.point.eta),
                     1.0 - std::abs(saddle.point.nu + saddle.point.eta));
        const double h = std::min(0.01, margin / 8.0);
        const auto coarse = f_partials_grid(f, saddle.point, h);
        const auto fine = f_partials_grid(f, saddle.point, 0.5 * h);
        // Richardson residuals are judged against the scale of the largest
        // derivative of the same total order; structurally-zero components
        // otherwise trip on harmless truncation dust.
        std::array<double, 5> order_scale;
        order_scale.fill(1.0);
        for (int da = 0; da <= 4; ++da)
            for (int db = 0; da + db <= 4; ++db)
                if (da + db > 0)
                    order_scale[da + db] =
                        std::max(order_scale[da + db], std::abs(fine[da][db]));
        for (int da = 0; da <= 4; ++da) {
            for (int db = 0; da + db <= 4; ++db) {
                if (da + db == 0) continue;
                const double val = (16.0 * fine[da][db] - coarse[da][db]) / 15.0;
                if (std::abs(fine[da][db] - coarse[da][db]) > 0.05 * order_scale[da + db])
                    throw DerivativeInstability("laplace_expand: f derivative did not settle");
                f_table.at(da, db) = val / (factorial[da] * factorial[db]);
            }
        }
    }

    const double det = saddle.hessian.determinant();
    const double A = -saddle.hessian(1, 1) / det;
    const double B = saddle.hessian(0, 1) / det;
    const double C = -saddle.hessian(0, 0) / det;

    LaplaceExpansion ex{};
    ex.terms_used = l_max;
    ex.s0_at_saddle = saddle.s0_value;
    ex.det_hessian = det;

    Poly2 r_power(deg);  // R^q / q!, starting at q = 0
    r_power.at(0, 0) = 1.0;
    const int q_max = (2 * l_max) / 3;
    for (int q = 0; q <= q_max; ++q) {
        if (q > 0) {
            r_power = r_power.multiply(r_table);
            for (int a = 0; a <= deg; ++a)
                for (int b = 0; a + b <= deg; ++b) r_power.at(a, b) /= q;
        }
        Poly2 term = f_table.multiply(r_power);
        double weight = 1.0;  // 1 / (l! 2^l)
        for (int l = 0; l <= l_max; ++l) {
            if (l > 0) {
                term = apply_ls(term, A, B, C);
                weight /= 2.0 * l;
            }
            const int order = l - q;
            if (order >= 0 && order <= 2 && 3 * q <= 2 * l)
                ex.orders[order] += weight * term.at(0, 0);
        }
    }
    return ex;
}

LaplaceExpansion laplace_expand(const ScalarField& f, double gamma1, double gamma2,
                                int max_l) {
    const SaddleData sd = saddle_point(gamma1, gamma2);
    return detail::laplace_expand_at(
        f, sd,
        [&](int da, int db) {
            return detail::action_s0_partial(sd.point, gamma1, gamma2, da, db);
        },
        max_l);
}

double LaplaceExpansion::evaluate(double j) const {
    return std::exp(j * s0_at_saddle) * (2.0 * kPi / j) /
           std::sqrt(std::abs(det_hessian)) * reduced(j);
}

namespace {

/// Scaled integral of f e^{j(S0 - S0max)} over the square in u = nu - eta,
/// v = nu + eta (the action separates there and the diamond straightens out).
/// Both directions are split at the saddle so the Gaussian peak sits on panel
/// boundaries, where the Kronrod error estimate behaves.
template <unsigned Points>
double quadrature_pass(const ScalarField& f, double lg1, double lg2, double j,
                       double s0_max, double u0, double v0) {
    auto s0_uv = [&](double u, double v) {
        return lg1 + lg2 - u * lg2 - v * lg1 -
               0.5 * (plog(1.0 - u) + plog(1.0 + u) + plog(1.0 - v) + plog(1.0 + v));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, Points>;
    auto outer = [&](double v) {
        auto inner = [&](double u) {
            return f(0.5 * (u + v), 0.5 * (v - u)) * std::exp(j * (s0_uv(u, v) - s0_max));
        };
        return GK::integrate(inner, -1.0, u0, 14, 1e-12) +
               GK::integrate(inner, u0, 1.0, 14, 1e-12);
    };
    return GK::integrate(outer, -1.0, v0, 14, 1e-11) +
           GK::integrate(outer, v0, 1.0, 14, 1e-11);
}

}  // namespace

double quadrature_oracle(const ScalarField& f, double gamma1, double gamma2, double j) {
    check_gammas(gamma1, gamma2, "quadrature_oracle");
    if (j < 4.0) throw DomainError("quadrature_oracle: j >= 4 required");
    const double lg1 = std::log(gamma1), lg2 = std::log(gamma2);
    const SaddleData sd = saddle_point(gamma1, gamma2);
    const double u0 = sd.point.nu - sd.point.eta, v0 = sd.point.nu + sd.point.eta;
    // Two independent rules must agree to 1e-8 relative; the built-in Kronrod
    // estimate alone is far too pessimistic near a sign change of f.
    const double r15 = quadrature_pass<15>(f, lg1, lg2, j, sd.s0_value, u0, v0);
    const double r31 = quadrature_pass<31>(f, lg1, lg2, j, sd.s0_value, u0, v0);
    const double scale = std::max(std::abs(r15), std::abs(r31));
    if (scale > 0.0 && std::abs(r15 - r31) > 1e-8 * scale)
        throw QuadratureFailure("quadrature_oracle: tolerance 1e-8 not reached");
    return 0.5 * r31 * std::exp(j * sd.s0_value);
}

double n_ratio_semiclassical(double gamma1, double gamma2, double j, double tau) {
    check_gammas(gamma1, gamma2, "n_ratio_semiclassical");
    if (!(j > 0.0) || tau < 0.0) throw DomainError("n_ratio_semiclassical: bad j or tau");
    if (j * tau > 0.3)
        throw DomainError("n_ratio_semiclassical: expansion regime requires j tau <= 0.3");

    const SaddleData sd = saddle_point(gamma1, gamma2);
    auto partial = [&](int da, int db) {
        return detail::action_s0_partial(sd.point, gamma1, gamma2, da, db);
    };
    auto expand = [&](const ScalarField& f) {
        return detail::laplace_expand_at(f, sd, partial, 6);
    };

    const auto i_1 = expand([](double, double) { return 1.0; });
    const auto i_a0 = expand([](double nu, double eta) {
        return coeff_expansion({nu, eta}).a0;
    });
    const auto i_a1 = expand([](double nu, double eta) {
        return coeff_expansion({nu, eta}).a1;
    });
    const auto i_b0 = expand([](double nu, double eta) {
        return coeff_expansion({nu, eta}).b0;
    });
    const auto i_b1 = expand([](double nu, double eta) {
        return coeff_expansion({nu, eta}).b1;
    });
    const auto i_b2 = expand([](double nu, double eta) {
        return coeff_expansion({nu, eta}).b2(0.0);
    });

    const double I10 = i_1.orders[0], I11 = i_1.orders[1], I12 = i_1.orders[2];
    const double linear =
        i_a0.orders[0] / I10 -
        (i_a0.orders[0] * I11 - (i_a1.orders[0] + i_a0.orders[1]) * I10) / (j * I10 * I10);
    const double quadratic =
        i_b0.orders[0] / I10 -
        (i_b0.orders[0] * I11 - (i_b1.orders[0] + i_b0.orders[1]) * I10) / (j * I10 * I10) -
        (-(i_b2.orders[0] + i_b1.orders[1]) * I10 * I10 +
         (i_b0.orders[0] * I12 + I11 * i_b1.orders[0] + I11 * i_b0.orders[1]) * I10 -
         i_b0.orders[0] * I11 * I11) /
            (j * j * I10 * I10 * I10);

    const double ttilde = j * tau;
    return 1.0 + ttilde * linear + ttilde * ttilde * quadratic;
}

double predict_fast(double gamma1, double gamma2, double j, double tau) {
    if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0) || !std::isfinite(gamma1) ||
        !std::isfinite(gamma2))
        throw DomainError("predict_fast: gammas must be finite and >= 0");
    if (std::abs(gamma1 - gamma2) < 1e-12 || std::abs(gamma1 * gamma2 - 1.0) < 1e-12)
        throw WrongRegime("predict_fast: slow configuration, rate would vanish");
    const double q1 = gamma1 * gamma1, q2 = gamma2 * gamma2;
    const double num = (gamma1 - gamma2) * (gamma1 - gamma2) *
                       (1.0 - gamma1 * gamma2) * (1.0 - gamma1 * gamma2);
    const double den = (1.0 + q1) * (1.0 + q2) * (1.0 + q1) * (1.0 + q2);
    return std::exp(-2.0 * j * num / den * tau);
}

double predict_slow_exp(double gamma1, double tau) {
    const double q = gamma1 * gamma1;
    const double lin = (q - 1.0) / (q + 1.0);
    const double q2 = q * q, q3 = q2 * q, q4 = q3 * q;
    const double quad = (3.0 * q4 - 3.0 * q3 + 4.0 * q2 - 3.0 * q + 3.0) /
                        (2.0 * (q + 1.0) * (q + 1.0) * (q + 1.0) * (q + 1.0));
    return std::exp(-lin * lin * tau - quad * tau * tau);
}

double predict_slow_poly(double gamma1, double gamma2, double tau) {
    check_gammas(gamma1, gamma2, "predict_slow_poly");
    if (std::abs(gamma1 * gamma2 - 1.0) > 1e-10)
        throw WrongRegime("predict_slow_poly: requires g1 g2 = 1");
    const double q1 = gamma1 * gamma1, q2 = gamma2 * gamma2;
    const double lin = (q1 - 1.0) / (q1 + 1.0);
    const double eta0 = (q2 - q1) / ((1.0 + q1) * (1.0 + q2));
    return 1.0 - lin * lin * tau - 0.25 * (7.0 * eta0 * eta0 + 1.0) * tau * tau;
}

double predict_single_coherent(double gamma, double tau) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw DomainError("predict_single_coherent: gamma must be finite and > 0");
    const double q = gamma * gamma;
    const double lin = (q - 1.0) / (q + 1.0);
    return std::exp(-q * q * lin * lin * tau);
}

ReducedPoint detail::numeric_saddle(double gamma1, double gamma2) {
    check_gammas(gamma1, gamma2, "numeric_saddle");
    // Damped Newton from the domain center; S0 is strictly concave inside.
    ReducedPoint x{0.0, 0.0};
    for (int it = 0; it < 200; ++it) {
        const double gx = action_s0_partial(x, gamma1, gamma2, 1, 0);
        const double gy = action_s0_partial(x, gamma1, gamma2, 0, 1);
        if (std::abs(gx) < 1e-13 && std::abs(gy) < 1e-13) break;
        const double hxx = action_s0_partial(x, gamma1, gamma2, 2, 0);
        const double hxy = action_s0_partial(x, gamma1, gamma2, 1, 1);
        const double hyy = action_s0_partial(x, gamma1, gamma2, 0, 2);
        const double det = hxx * hyy - hxy * hxy;
        double dn = -(hyy * gx - hxy * gy) / det;
        double de = -(-hxy * gx + hxx * gy) / det;
        // stay strictly inside the diamond
        double step = 1.0;
        while (step > 1e-6) {
            const ReducedPoint trial{x.nu + step * dn, x.eta + step * de};
            if (std::abs(trial.nu - trial.eta) < 1.0 - 1e-9 &&
                std::abs(trial.nu + trial.eta) < 1.0 - 1e-9) {
                x = trial;
                break;
            }
            step *= 0.5;
        }
    }
    return x;
}

}  // namespace spincat
