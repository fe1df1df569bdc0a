#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "llax/elliptic.hpp"

using namespace llax;
using Catch::Matchers::WithinAbs;

namespace {

const EllipticContext square{2, cplx{0.0, 1.0}};          // tau = i
const EllipticContext sheared{2, cplx{0.3, 0.8}};         // tau = 0.3 + 0.8i

double cdist(cplx a, cplx b) { return std::abs(a - b); }

// Reference values frozen from an independent 50-digit direct summation of the
// defining series (|k| <= 500) and its termwise derivatives.
const cplx ref_theta_quarter{0.6435897640385858841, 0.0};
const cplx ref_theta1_zero{2.848694603987787316, 0.0};
const cplx ref_theta2_quarter{-6.256902211892472715, 0.0};
const cplx ref_theta3_zero{-26.84831412062675385, 0.0};
const cplx ref_e1_03{2.304835039993462114, 0.0};
const cplx ref_e2_03{15.12550696943532051, 0.0};
const cplx ref_wp_03{11.98391431584552727, 0.0};
const cplx ref_rho_03{-3.335824877131931583, 0.0};
const cplx ref_wp_half{6.875185818020372828, 0.0};
const cplx ref_phi_03_045{2.756668305666446735, 0.0};
const cplx ref_f_03_045{-10.11675881461744704, 0.0};
const cplx ref_phi_cplx{8.860097173914349813, -0.1863408231006335329};
const cplx ref_phi1_031{4.268056505886245607, 0.0};
const cplx ref_phi2_031{3.367658016993045993, 0.0};
const cplx ref_phi3_031{2.113275822366110832, 0.0};
// tau = 0.3 + 0.8i
const cplx ref_sh_theta{0.5789476869270757082, 0.4121178712523917124};
const cplx ref_sh_theta1_zero{3.293868115661520430, 0.7262494351076561281};
const cplx ref_sh_e1_03{2.258110324464808493, 0.0744634030391835124};
const cplx ref_sh_phi{2.805007994730619980, -0.0788183917266778448};
const cplx ref_sh_f{-10.12154714810793465, -0.0031041913442523585};
const cplx ref_sh_wp{1.187713562477158922, -8.638544943176061768};

} // namespace

TEST_CASE("context validation") {
    CHECK_THROWS_AS(EllipticContext(1, cplx{0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(EllipticContext(2, cplx{0.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(EllipticContext(2, cplx{0.0, 1.0}, 1e-7), std::invalid_argument);
    CHECK_THROWS_AS(EllipticContext(2, cplx{0.0, 1.0}, 1e-14, 10), std::invalid_argument);
}

TEST_CASE("theta reference values") {
    CHECK(cdist(theta(cplx{0.25, 0.0}, square), ref_theta_quarter) < 1e-13);
    CHECK(std::abs(theta(cplx{0.0, 0.0}, square)) < 1e-14);
    CHECK(cdist(theta(cplx{0.2, 0.1}, sheared), ref_sh_theta) < 1e-13);
}

TEST_CASE("theta oddness and quasi-periodicity") {
    for (const auto& ctx : {square, sheared}) {
        const cplx pts[] = {{0.13, 0.21 * ctx.tau.imag()}, {-0.37, -0.05}, {0.4, -0.3 * ctx.tau.imag()}};
        for (cplx z : pts) {
            CHECK(cdist(theta(-z, ctx), -theta(z, ctx)) < 1e-12);
            CHECK(cdist(theta(z + 1.0, ctx), -theta(z, ctx)) < 1e-10);
            const cplx factor = -std::exp(-pi * iunit * ctx.tau - 2.0 * pi * iunit * z);
            CHECK(cdist(theta(z + ctx.tau, ctx), factor * theta(z, ctx)) < 1e-10);
        }
    }
}

TEST_CASE("theta derivatives") {
    CHECK(cdist(theta_derivative(cplx{0.0, 0.0}, square, 1), ref_theta1_zero) < 1e-13);
    CHECK(cdist(theta_derivative(cplx{0.25, 0.0}, square, 2), ref_theta2_quarter) < 1e-12);
    CHECK(cdist(theta_derivative(cplx{0.0, 0.0}, square, 3), ref_theta3_zero) < 1e-12);
    CHECK(cdist(theta_derivative(cplx{0.0, 0.0}, sheared, 1), ref_sh_theta1_zero) < 1e-13);
    // theta is odd, so even-order derivatives vanish at 0
    CHECK(std::abs(theta_derivative(cplx{0.0, 0.0}, square, 2)) < 1e-13);
    CHECK_THROWS_AS(theta_derivative(cplx{0.1, 0.0}, square, 0), std::invalid_argument);
    CHECK_THROWS_AS(theta_derivative(cplx{0.1, 0.0}, square, 4), std::invalid_argument);
}

TEST_CASE("theta derivative agrees with central differences at fourth order") {
    const cplx z{0.17, 0.08};
    auto fd = [&](double h) {
        return std::abs((theta(z + h, square) - theta(z - h, square)) / (2.0 * h)
                        - theta_derivative(z, square, 1));
    };
    const double ea = fd(1e-4), eb = fd(5e-5);
    CHECK(ea / eb > 3.5);
    CHECK(ea / eb < 4.5);
}

TEST_CASE("series non-convergence raises PrecisionError") {
    const EllipticContext thin{2, cplx{0.0, 0.001}, 1e-14, 50};
    CHECK_THROWS_AS(theta(cplx{0.3, 0.0}, thin), PrecisionError);
}

TEST_CASE("kronecker_phi values and structure") {
    CHECK(cdist(kronecker_phi(cplx{0.3, 0.0}, cplx{0.45, 0.0}, square), ref_phi_03_045) < 1e-12);
    CHECK(cdist(kronecker_phi(cplx{0.2, 0.1}, cplx{0.15, -0.05}, square), ref_phi_cplx) < 1e-12);
    CHECK(cdist(kronecker_phi(cplx{0.3, 0.0}, cplx{0.45, 0.0}, sheared), ref_sh_phi) < 1e-12);

    // simple pole, residue one: z phi(z,u) -> 1
    const cplx z{1e-4, 0.0};
    CHECK(std::abs(z * kronecker_phi(z, cplx{0.3, 0.0}, square) - 1.0) < 1e-3);

    // symmetry in the two arguments
    const cplx a{0.21, 0.05}, b{-0.11, 0.17};
    CHECK(cdist(kronecker_phi(a, b, square), kronecker_phi(b, a, square)) < 1e-12);
}

TEST_CASE("kronecker_phi near-pole guard names the offending argument") {
    try {
        kronecker_phi(cplx{1e-12, 0.0}, cplx{0.3, 0.0}, square);
        FAIL("expected NearPoleError");
    } catch (const NearPoleError& e) {
        CHECK(e.argument == "z");
    }
    try {
        kronecker_phi(cplx{0.3, 0.0}, cplx{1e-12, 0.0}, square);
        FAIL("expected NearPoleError");
    } catch (const NearPoleError& e) {
        CHECK(e.argument == "u");
    }
}

TEST_CASE("kronecker_f matches reference and finite differences") {
    CHECK(cdist(kronecker_f(cplx{0.3, 0.0}, cplx{0.45, 0.0}, square), ref_f_03_045) < 1e-11);
    CHECK(cdist(kronecker_f(cplx{0.3, 0.0}, cplx{0.45, 0.0}, sheared), ref_sh_f) < 1e-11);

    const cplx z{0.23, 0.11}, u{-0.17, 0.06};
    const double h = 1e-5;
    const cplx fd = (kronecker_phi(z, u + h, square) - kronecker_phi(z, u - h, square)) / (2.0 * h);
    CHECK(cdist(kronecker_f(z, u, square), fd) < 1e-7);

    // double pole: u^2 f(z,u) -> -1
    const cplx small{1e-3, 0.0};
    CHECK(std::abs(small * small * kronecker_f(cplx{0.3, 0.0}, small, square) + 1.0) < 1e-4);
}

TEST_CASE("e1 values at half-periods") {
    CHECK(std::abs(e1(cplx{0.5, 0.0}, square)) < 1e-13);
    CHECK(cdist(e1(square.tau / 2.0, square), cplx{0.0, -pi}) < 1e-13);
    CHECK(cdist(e1((1.0 + square.tau) / 2.0, square), cplx{0.0, -pi}) < 1e-13);
    CHECK(cdist(e1(sheared.tau / 2.0, sheared), cplx{0.0, -pi}) < 1e-13);
    CHECK(cdist(e1(cplx{0.3, 0.0}, square), ref_e1_03) < 1e-12);
    CHECK(cdist(e1(cplx{0.3, 0.0}, sheared), ref_sh_e1_03) < 1e-12);
}

TEST_CASE("e2 is minus the derivative of e1") {
    CHECK(cdist(e2(cplx{0.3, 0.0}, square), ref_e2_03) < 1e-11);
    const cplx z{0.19, -0.07};
    const double h = 1e-5;
    const cplx fd = -(e1(z + h, square) - e1(z - h, square)) / (2.0 * h);
    CHECK(cdist(e2(z, square), fd) < 1e-6);
}

TEST_CASE("wp is the double-pole even lattice function") {
    CHECK(cdist(wp(cplx{0.3, 0.0}, square), ref_wp_03) < 1e-11);
    CHECK(cdist(wp(cplx{0.25, 0.2}, sheared), ref_sh_wp) < 1e-11);
    CHECK(cdist(theta_third_ratio(square), cplx{-pi, 0.0}) < 1e-13);

    const cplx z{0.22, 0.13};
    CHECK(cdist(wp(-z, square), wp(z, square)) < 1e-10);
    CHECK(cdist(wp(z + 1.0, square), wp(z, square)) < 1e-9);
    CHECK(cdist(wp(z + square.tau, square), wp(z, square)) < 1e-9);

    // z^2 wp(z) -> 1 with no constant term in the expansion
    const cplx s{1e-3, 0.0};
    CHECK(std::abs(s * s * wp(s, square) - 1.0) < 1e-5);
}

TEST_CASE("rho value and the phi expansion in u") {
    CHECK(cdist(rho(cplx{0.3, 0.0}, square), ref_rho_03) < 1e-10);

    // phi(z,u) = 1/u + E1(z) + u rho(z) + O(u^2): remainder falls ~4x when u halves
    const cplx z{0.27, 0.09};
    auto rem = [&](double u) {
        const cplx uu{u, 0.0};
        return std::abs(kronecker_phi(z, uu, square) - 1.0 / uu - e1(z, square) - uu * rho(z, square));
    };
    const double ra = rem(1e-3), rb = rem(5e-4);
    CHECK(ra / rb > 3.5);
    CHECK(ra / rb < 4.5);
}

TEST_CASE("analytic z-derivatives agree with central differences") {
    const cplx z{0.21, 0.06}, u{0.14, -0.09};
    const double h = 1e-5;

    const cplx fd_phi = (kronecker_phi(z + h, u, square) - kronecker_phi(z - h, u, square)) / (2.0 * h);
    CHECK(cdist(kronecker_phi_dz(z, u, square), fd_phi) < 1e-7);

    const cplx fd_f = (kronecker_f(z + h, u, square) - kronecker_f(z - h, u, square)) / (2.0 * h);
    CHECK(cdist(kronecker_f_dz(z, u, square), fd_f) < 1e-6);

    const cplx fd_rho = (rho(z + h, square) - rho(z - h, square)) / (2.0 * h);
    CHECK(cdist(rho_dz(z, square), fd_rho) < 1e-6);
}

TEST_CASE("phi_k sections for N = 2") {
    CHECK(cdist(phi_k(1, cplx{0.31, 0.0}, square), ref_phi1_031) < 1e-11);
    CHECK(cdist(phi_k(2, cplx{0.31, 0.0}, square), ref_phi2_031) < 1e-11);
    CHECK(cdist(phi_k(3, cplx{0.31, 0.0}, square), ref_phi3_031) < 1e-11);

    for (const auto& ctx : {square, sheared}) {
        const cplx zs[] = {{0.31, 0.0}, {0.12, 0.2 * ctx.tau.imag()}, {-0.26, -0.13 * ctx.tau.imag()}};
        for (cplx z : zs)
            for (int k = 1; k <= 3; ++k) {
                const cplx lhs = phi_k(k, z, ctx) * phi_k(k, z, ctx);
                const cplx rhs = wp(z, ctx) - wp(half_period(k, ctx), ctx);
                CHECK(cdist(lhs, rhs) < 1e-10);
            }
    }

    // d/dz phi_1 = -phi_2 phi_3 (and cyclic), checked with central differences
    const cplx z{0.23, 0.14};
    const double h = 1e-6;
    for (int k = 1; k <= 3; ++k) {
        const int j = (k % 3) + 1, l = (j % 3) + 1;
        const cplx fd = (phi_k(k, z + h, square) - phi_k(k, z - h, square)) / (2.0 * h);
        CHECK(cdist(fd, -phi_k(j, z, square) * phi_k(l, z, square)) < 1e-6);
    }

    const EllipticContext n3{3, cplx{0.0, 1.0}};
    CHECK_THROWS_AS(phi_k(1, cplx{0.3, 0.0}, n3), std::invalid_argument);
    CHECK_THROWS_AS(phi_k(4, cplx{0.3, 0.0}, square), std::invalid_argument);
}

TEST_CASE("scalar degenerations are the documented reference formulas") {
    const cplx hb{0.13, 0.0}, z{0.29, 0.0};
    CHECK(cdist(phi_rat(hb, z), 1.0 / hb + 1.0 / z) < 1e-15);
    CHECK(cdist(phi_trig(hb, z), pi / std::tan(pi * z) + pi / std::tan(pi * hb)) < 1e-15);
    // both are symmetric under (hbar, z) exchange
    CHECK(cdist(phi_trig(hb, z), phi_trig(z, hb)) < 1e-13);
    CHECK(cdist(phi_rat(hb, z), phi_rat(z, hb)) < 1e-13);
}

TEST_CASE("lattice distances") {
    const cplx tau{0.0, 1.0};
    CHECK_THAT(lattice_distance(cplx{0.5, 0.0}, tau), WithinAbs(0.5, 1e-12));
    CHECK_THAT(lattice_distance(cplx{1.0, 1.0}, tau), WithinAbs(0.0, 1e-12));
    CHECK_THAT(lattice_distance(cplx{-0.1, 0.0}, tau), WithinAbs(0.1, 1e-12));
    CHECK_THAT(lattice_distance(cplx{2.0, 0.95}, tau), WithinAbs(0.05, 1e-12));
    CHECK_THAT(refined_lattice_distance(cplx{0.25, 0.0}, tau, 2), WithinAbs(0.25, 1e-12));
    CHECK_THAT(refined_lattice_distance(cplx{0.5, 0.5}, tau, 2), WithinAbs(0.0, 1e-12));

    const cplx sh{0.3, 0.8};
    CHECK_THAT(lattice_distance(sh / 2.0 - sh, sh), WithinAbs(std::abs(sh) / 2.0, 1e-12));
}
