#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spincat/dissipator.hpp"
#include "spincat/norms.hpp"
#include "test_support.hpp"

using namespace spincat;
using test_support::kPi;

namespace {

DensityMatrix random_matrix(SpinQuantum s, bool hermitian) {
    Eigen::MatrixXcd m(s.dim(), s.dim());
    for (int i = 0; i < s.dim(); ++i)
        for (int k = 0; k < s.dim(); ++k)
            m(i, k) = Complex(test_support::uniform(-1.0, 1.0),
                              test_support::uniform(-1.0, 1.0));
    if (hermitian) {
        m = (m + m.adjoint()).eval();
        m /= m.trace().real();
    }
    return DensityMatrix{s, m};
}

BlockDensity polar_cat_block(SpinQuantum s) {
    // |j j><j -j|: single entry in the k = j block.
    DensityMatrix rho{s, Eigen::MatrixXcd::Zero(s.dim(), s.dim())};
    rho.entries(0, s.dim() - 1) = 1.0;
    return BlockDensity::from_matrix(rho);
}

}  // namespace

TEST_CASE("block decomposition round trip") {
    for (int tj : {1, 2, 5, 12}) {
        const DensityMatrix rho = random_matrix(SpinQuantum(tj), false);
        const DensityMatrix back = BlockDensity::from_matrix(rho).to_matrix();
        CHECK((back.entries - rho.entries).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("liouvillian_apply matches a dense implementation") {
    for (int tj = 1; tj <= 16; ++tj) {
        const SpinQuantum s(tj);
        const DensityMatrix rho = random_matrix(s, false);
        const DensityMatrix via_blocks =
            liouvillian_apply(BlockDensity::from_matrix(rho)).to_matrix();
        const Eigen::MatrixXcd dense = test_support::dense_liouvillian(tj, rho.entries);
        CHECK((via_blocks.entries - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("liouvillian_apply hand values") {
    SUBCASE("ground state is stationary") {
        const SpinQuantum s(6);
        DensityMatrix rho{s, Eigen::MatrixXcd::Zero(s.dim(), s.dim())};
        rho.entries(s.dim() - 1, s.dim() - 1) = 1.0;
        const BlockDensity out = liouvillian_apply(BlockDensity::from_matrix(rho));
        CHECK(out.to_matrix().entries.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("polar cat block decays at unit rate") {
        const SpinQuantum s(14);
        const BlockDensity rho = polar_cat_block(s);
        const BlockDensity out = liouvillian_apply(rho);
        // d rho/d tau = -rho for the single k = j entry
        CHECK(std::abs(out.value(s.twice_j(), 0) - Complex(-1.0, 0.0)) < 1e-13);
    }
    SUBCASE("j = 1 population transfer") {
        const SpinQuantum s(2);
        DensityMatrix rho{s, Eigen::MatrixXcd::Zero(3, 3)};
        rho.entries(0, 0) = 1.0;  // |1,1><1,1|
        const DensityMatrix out = liouvillian_apply(BlockDensity::from_matrix(rho)).to_matrix();
        CHECK(std::abs(out.entries(0, 0) - Complex(-2.0, 0.0)) < 1e-14);
        CHECK(std::abs(out.entries(1, 1) - Complex(2.0, 0.0)) < 1e-14);
    }
    SUBCASE("k is conserved: single-block input stays in its block") {
        const SpinQuantum s(8);
        BlockDensity rho(s);
        rho.set_value(4, 0, Complex(0.3, -0.2));  // k = 2 block
        rho.set_value(4, 2, Complex(-0.1, 0.5));
        const BlockDensity out = liouvillian_apply(rho);
        for (int tk = -8; tk <= 8; ++tk) {
            if (tk == 4) continue;
            CHECK(out.block(tk).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("evolve_oracle") {
    SUBCASE("polar cat follows e^{-tau} for any j") {
        for (int tj : {2, 10, 25, 40}) {
            const SpinQuantum s(tj);
            const BlockDensity rho0 = polar_cat_block(s);
            for (double tau : {0.25, 1.0, 3.0}) {
                const BlockDensity rho = evolve_oracle(rho0, tau, 1e-12);
                CHECK(std::abs(rho.value(tj, 0) - std::exp(-tau)) < 1e-10);
            }
        }
    }
    SUBCASE("trace is preserved for Hermitian input") {
        const SpinQuantum s(9);
        const DensityMatrix rho0 = random_matrix(s, true);
        const BlockDensity out =
            evolve_oracle(BlockDensity::from_matrix(rho0), 0.8, 1e-11);
        CHECK(std::abs(out.to_matrix().trace() - Complex(1.0, 0.0)) < 1e-10);
    }
    SUBCASE("everything ends in the dark state") {
        const SpinQuantum s(5);
        const DensityMatrix rho0 = random_matrix(s, true);
        const DensityMatrix late =
            evolve_oracle(BlockDensity::from_matrix(rho0), 50.0, 1e-11).to_matrix();
        for (int i = 0; i < s.dim(); ++i) {
            for (int k = 0; k < s.dim(); ++k) {
                if (i == s.dim() - 1 && k == s.dim() - 1) continue;
                CHECK(std::abs(late.entries(i, k)) < 1e-10);
            }
        }
        CHECK(std::abs(late.entries(s.dim() - 1, s.dim() - 1) - 1.0) < 1e-9);
    }
    SUBCASE("bad arguments") {
        const BlockDensity rho0 = polar_cat_block(SpinQuantum(2));
        CHECK_THROWS_AS(evolve_oracle(rho0, -1.0, 1e-10), DomainError);
        CHECK_THROWS_AS(evolve_oracle(rho0, 1.0, 0.0), DomainError);
    }
}

TEST_CASE("propagator_exact") {
    SUBCASE("identity at tau = 0") {
        const SpinQuantum s(8);
        CHECK(propagator_exact(s, 2, -2, -2, 0.0) == 1.0);
        CHECK(propagator_exact(s, 2, -2, 4, 0.0) == 0.0);
    }
    SUBCASE("cascade zero structure below the diagonal") {
        CHECK(propagator_exact(SpinQuantum(8), 0, 4, -2, 0.7) == 0.0);
    }
    SUBCASE("polar block: single pole, exact e^{-tau}") {
        for (int tj : {2, 9, 40}) {
            const SpinQuantum s(tj);
            for (double tau : {0.1, 1.0, 2.5})
                CHECK(std::abs(propagator_exact(s, tj, 0, 0, tau) - std::exp(-tau)) < 1e-14);
        }
    }
    SUBCASE("diagonal entries are single exponentials") {
        const SpinQuantum s(11);  // j = 11/2
        for (int tk : {1, 3, 7}) {
            const int tn = s.twice_j() - std::abs(tk) - 2;  // one below the top
            const double lambda = s.ladder_factor(tn) - 0.25 * tk * tk;
            const double tau = 0.6;
            CHECK(propagator_exact(s, tk, tn, tn, tau) ==
                  doctest::Approx(std::exp(-lambda * tau / s.j())).epsilon(1e-13));
        }
    }
    SUBCASE("index validation") {
        const SpinQuantum s(6);
        CHECK_THROWS_AS(propagator_exact(s, 0, 8, 8, 0.1), IndexOutOfRange);
        CHECK_THROWS_AS(propagator_exact(s, 4, -4, 4, 0.1), IndexOutOfRange);
        CHECK_THROWS_AS(propagator_exact(s, 0, 1, 3, 0.1), IndexOutOfRange);  // parity
        CHECK_THROWS_AS(propagator_exact(s, 0, 0, 2, -0.5), DomainError);
    }
    SUBCASE("full column against the ODE oracle, including confluent poles") {
        // k = 0 blocks contain the degenerate pairs g_l = g_{1-l}; j = 2 with
        // n = 1 covers the double pole at l in {0, 1}.
        for (int tj : {4, 5, 13}) {
            const SpinQuantum s(tj);
            for (int tk : {0, 1, 2}) {
                if ((tk + tj) % 2 == 1) continue;  // parity of twice_m vs block
                const int size = BlockDensity::block_size(s, tk);
                const int tm_min = -(tj - std::abs(tk));
                const int tn = tm_min + 2 * (size - 1);  // top of the block
                BlockDensity delta(s);
                delta.set_value(tk, tn, 1.0);
                for (double tau : {0.3, 1.2}) {
                    const BlockDensity evolved = evolve_oracle(delta, tau, 1e-12);
                    for (int i = 0; i < size; ++i) {
                        const int tm = tm_min + 2 * i;
                        const double d = propagator_exact(s, tk, tm, tn, tau);
                        CHECK(d == doctest::Approx(evolved.value(tk, tm).real())
                                       .epsilon(1e-9)
                                       .scale(1.0));
                        CHECK(d >= 0.0);
                    }
                }
            }
        }
    }
    SUBCASE("columns sums stay below 1 (contractive cascade)") {
        const SpinQuantum s(10);
        for (int tk : {0, 4}) {
            const int size = BlockDensity::block_size(s, tk);
            const int tm_min = -(s.twice_j() - std::abs(tk));
            for (double tau : {0.2, 2.0}) {
                for (int n = 0; n < size; ++n) {
                    double col = 0.0;
                    for (int i = 0; i <= n; ++i)
                        col += propagator_exact(s, tk, tm_min + 2 * i, tm_min + 2 * n, tau);
                    CHECK(col <= 1.0 + 1e-12);
                    if (tk == 0) {  // populations: the cascade conserves trace
                        CHECK(col == doctest::Approx(1.0).epsilon(1e-10));
                    }
                }
            }
        }
    }
}

TEST_CASE("evolve_exact agrees with the oracle") {
    SUBCASE("identity at tau = 0") {
        const SpinQuantum s(5);
        const DensityMatrix rho = random_matrix(s, false);
        const BlockDensity blocks = BlockDensity::from_matrix(rho);
        CHECK(evolve_exact(blocks, 0.0).max_abs_difference(blocks) == 0.0);
    }
    SUBCASE("polar cat is exact") {
        const SpinQuantum s(20);
        const BlockDensity rho = evolve_exact(polar_cat_block(s), 1.7);
        CHECK(std::abs(rho.value(20, 0) - std::exp(-1.7)) < 1e-14);
    }
    SUBCASE("random Hermitian matrix, j = 8, tau = 0.7") {
        const SpinQuantum s(16);
        const BlockDensity rho0 = BlockDensity::from_matrix(random_matrix(s, true));
        const BlockDensity exact = evolve_exact(rho0, 0.7);
        const BlockDensity oracle = evolve_oracle(rho0, 0.7, 1e-12);
        CHECK(exact.max_abs_difference(oracle) < 1e-8);
    }
    SUBCASE("half-integer j") {
        const SpinQuantum s(15);  // j = 15/2
        const BlockDensity rho0 = BlockDensity::from_matrix(random_matrix(s, false));
        for (double tau : {0.1, 1.0}) {
            CHECK(evolve_exact(rho0, tau).max_abs_difference(
                      evolve_oracle(rho0, tau, 1e-12)) < 1e-8);
        }
    }
    SUBCASE("long chains at j = 20, late time") {
        const SpinQuantum s(40);
        const BlockDensity rho0 = BlockDensity::from_matrix(random_matrix(s, true));
        CHECK(evolve_exact(rho0, 3.0).max_abs_difference(
                  evolve_oracle(rho0, 3.0, 1e-12)) < 1e-8);
    }
}

TEST_CASE("phi = 0 cat blocks stay real and non-negative") {
    const SpinQuantum s(12);
    const StateVector a = coherent_state(s, CoherentLabel(2.0 * std::atan(0.5), 0.0));
    const StateVector b = coherent_state(s, CoherentLabel(2.0 * std::atan(2.0), 0.0));
    const BlockDensity rho0 = BlockDensity::from_matrix(DensityMatrix::outer(a, b));
    for (double tau : {0.0, 0.4, 1.5}) {
        const BlockDensity rho = evolve_oracle(rho0, tau, 1e-12);
        for (int tk = -12; tk <= 12; ++tk) {
            for (int i = 0; i < rho.block(tk).size(); ++i) {
                CHECK(std::abs(rho.block(tk)[i].imag()) < 1e-12);
                CHECK(rho.block(tk)[i].real() > -1e-12);
            }
        }
    }
}

TEST_CASE("coherence of a block is non-increasing") {
    const SpinQuantum s(9);
    const BlockDensity rho0 = BlockDensity::from_matrix(random_matrix(s, false));
    double prev = norm_n2(rho0);
    for (double tau : {0.1, 0.3, 0.8, 2.0}) {
        const double n2 = norm_n2(evolve_oracle(rho0, tau, 1e-11));
        CHECK(n2 <= prev + 1e-10);
        prev = n2;
    }
}

TEST_CASE("propagator_short_time") {
    SUBCASE("direct substitution at j = 10, k = 0, m = n = 0, tau = 0.01") {
        // exp(-0.01 (100 - 1/4) / 10) = exp(-0.099750)
        const auto st = propagator_short_time(SpinQuantum(20), 0, 0, 0, 0.01);
        CHECK(st.value == doctest::Approx(std::exp(-0.09975)).epsilon(1e-12));
        CHECK(st.value == doctest::Approx(0.9050637).epsilon(1e-6));
        CHECK(st.inside_validity);
    }
    SUBCASE("tau = 0") {
        const SpinQuantum s(10);
        CHECK(propagator_short_time(s, 0, 2, 2, 0.0).value == 1.0);
        CHECK(propagator_short_time(s, 0, -2, 2, 0.0).value == 0.0);
    }
    SUBCASE("close to the exact propagator deep inside the validity region") {
        const SpinQuantum s(20);
        const double exact = propagator_exact(s, 0, 0, 4, 0.01);
        const auto st = propagator_short_time(s, 0, 0, 4, 0.01);
        CHECK(st.inside_validity);
        CHECK(std::abs(st.value / exact - 1.0) < 0.02);
    }
    SUBCASE("the printed form carries O(tau) slack further out") {
        // At tau = 0.05 the validity product (|m+n-1|/j)(n-m) tau = 0.01 is
        // still small, but the printed exponent drops a term ~ j - k^2, so the
        // deviation grows to a few percent.
        const SpinQuantum s(20);
        const double exact = propagator_exact(s, 0, 0, 4, 0.05);
        const auto st = propagator_short_time(s, 0, 0, 4, 0.05);
        CHECK(st.inside_validity);
        CHECK(std::abs(st.value / exact - 1.0) < 0.10);
        CHECK(std::abs(st.value / exact - 1.0) > 0.02);
    }
    SUBCASE("validity flag trips when the bound product reaches 0.1") {
        const SpinQuantum s(20);
        CHECK_FALSE(propagator_short_time(s, 0, 4, 12, 0.5).inside_validity);
    }
}
