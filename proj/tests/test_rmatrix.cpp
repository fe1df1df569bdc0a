#include <catch2/catch_amalgamated.hpp>

#include "llax/random.hpp"
#include "llax/rmatrix.hpp"

using namespace llax;

namespace {

SquareMatrix sigma(int k) {
    SquareMatrix s(2, 2);
    switch (k) {
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, -iunit, iunit, 0; break;
        default: s << 1, 0, 0, -1; break;
    }
    return s;
}

TensorOperator conj_swap(const RMatrixFamily& fam, const TensorOperator& op) {
    return fam.permutation_op() * op * fam.permutation_op();
}

} // namespace

TEST_CASE("quantum R residue at z = 0") {
    // z R(hbar, z) -> sum_a T_a (x) T_{-a} = N P as z -> 0.
    for (int N : {2, 3}) {
        RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
        const cplx hbar{0.083, 0.021};
        const TensorOperator target = static_cast<double>(N) * fam.permutation_op();

        const cplx z1{1e-5, 0.0};
        TensorOperator g1 = z1 * fam.quantum_r(hbar, z1);
        CHECK(sup_norm(g1 - target) < 1e-3);

        // linear extrapolation in z from {1e-4, 5e-5} cancels the O(z) term
        const cplx za{1e-4, 0.0}, zb{5e-5, 0.0};
        TensorOperator ga = za * fam.quantum_r(hbar, za);
        TensorOperator gb = zb * fam.quantum_r(hbar, zb);
        TensorOperator fit = 2.0 * gb - ga;
        CHECK(sup_norm(fit - target) < 1e-6);
    }
}

TEST_CASE("unitarity product is scalar") {
    RMatrixFamily fam(EllipticContext{3, cplx{0, 1}});
    const cplx hbar{0.07, 0.04};
    const cplx z{0.23, -0.11};
    const cplx nh = 3.0 * hbar;

    TensorOperator lhs = fam.quantum_r(hbar, z) * conj_swap(fam, fam.quantum_r(hbar, -z));
    const cplx scalar = 9.0 * kronecker_phi(nh, z, fam.context()) * kronecker_phi(nh, -z, fam.context());
    CHECK(sup_norm(lhs - scalar * TensorOperator::identity(2, 3)) < 1e-9);
}

TEST_CASE("hbar expansion of the quantum R-matrix") {
    RMatrixFamily fam(EllipticContext{3, cplx{0, 1}});
    const cplx z{0.21, 0.13};
    const TensorOperator id = TensorOperator::identity(2, 3);
    const TensorOperator r = fam.classical_r(z);
    const TensorOperator m = fam.m_matrix(z);

    auto res1 = [&](cplx h) { return sup_norm(fam.quantum_r(h, z) - (1.0 / h) * id - r); };
    auto res2 = [&](cplx h) {
        return sup_norm(fam.quantum_r(h, z) - (1.0 / h) * id - r - h * m);
    };

    const cplx h{1e-3, 0.0};
    const double ratio1 = res1(h) / res1(h / 2.0);
    const double ratio2 = res2(h) / res2(h / 2.0);
    CHECK(ratio1 > 1.8);
    CHECK(ratio1 < 2.2);
    CHECK(ratio2 > 3.5);
    CHECK(ratio2 < 4.5);

    // r is the finite part of R - 1/hbar: the remainder at hbar = 1e-5 is
    // hbar * m + O(hbar^2) with sup|m| ~ 30 here, so ~3e-4.  Subtracting the
    // hbar * m term leaves the O(hbar^2) tail (~3e-9) under rounding noise
    // from the theta quotient at argument hbar (~eps/|theta(hbar)| amplified
    // by the pole to ~6e-7).
    const cplx tiny{1e-5, 0.0};
    CHECK(sup_norm(fam.quantum_r(tiny, z) - (1.0 / tiny) * id - r) < 1e-3);
    CHECK(sup_norm(fam.quantum_r(tiny, z) - (1.0 / tiny) * id - r - tiny * m) < 2e-6);
}

TEST_CASE("N=2 classical coefficients reduce to phi_k") {
    EllipticContext ctx{2, cplx{0, 1}};
    RMatrixFamily fam(ctx);
    for (cplx z : {cplx{0.31, 0.0}, cplx{0.17, -0.22}, cplx{-0.26, 0.09}}) {
        CHECK(std::abs(fam.classical_coeff(0, 1, z) - phi_k(1, z, ctx)) < 1e-12 * std::abs(phi_k(1, z, ctx)) + 1e-12);
        CHECK(std::abs(fam.classical_coeff(1, 1, z) - phi_k(2, z, ctx)) < 1e-12 * std::abs(phi_k(2, z, ctx)) + 1e-12);
        CHECK(std::abs(fam.classical_coeff(1, 0, z) - phi_k(3, z, ctx)) < 1e-12 * std::abs(phi_k(3, z, ctx)) + 1e-12);
    }
}

TEST_CASE("classical r and m swap symmetry") {
    // r_12(z) = -r_21(-z), m_12(z) = +m_21(-z)
    for (auto tau : {cplx{0, 1}, cplx{0.3, 0.8}}) {
        for (int N : {2, 3}) {
            RMatrixFamily fam(EllipticContext{N, tau});
            const cplx z{0.19, 0.11 * tau.imag()};
            CHECK(sup_norm(fam.classical_r(z) + conj_swap(fam, fam.classical_r(-z))) < 1e-10);
            CHECK(sup_norm(fam.m_matrix(z) - conj_swap(fam, fam.m_matrix(-z))) < 1e-10);
        }
    }
}

TEST_CASE("constant term r0") {
    SECTION("vanishes identically at N=2") {
        RMatrixFamily fam(EllipticContext{2, cplx{0, 1}});
        CHECK(sup_norm(fam.r0()) < 1e-12);
        RMatrixFamily sheared(EllipticContext{2, cplx{0.3, 0.8}});
        CHECK(sup_norm(sheared.r0()) < 1e-12);
    }
    SECTION("absorbs the permutation on the right") {
        for (int N : {3, 4}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
            CHECK(sup_norm(fam.r0() * fam.permutation_op() - fam.r0()) < 1e-10);
        }
    }
    SECTION("antisymmetric under slot swap") {
        for (int N : {3, 4}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0.3, 0.8}});
            CHECK(sup_norm(conj_swap(fam, fam.r0()) + fam.r0()) < 1e-10);
        }
    }
}

TEST_CASE("constant term m0") {
    SECTION("symmetric under slot swap") {
        for (int N : {2, 3, 4}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
            CHECK(sup_norm(conj_swap(fam, fam.m0()) - fam.m0()) < 1e-10);
        }
    }
    SECTION("is the z -> 0 limit of m(z)") {
        for (int N : {2, 3}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
            CHECK(sup_norm(fam.m_matrix(cplx{1e-6, 0.0}) - fam.m0()) < 1e-4);
        }
    }
    SECTION("N=2 coefficients are -E2 at the half periods") {
        RMatrixFamily fam(EllipticContext{2, cplx{0, 1}});
        for (auto a : {BasisIndex{0, 1}, BasisIndex{1, 1}, BasisIndex{1, 0}}) {
            CHECK(std::abs(pair_coefficient(fam.m0(), a) + fam.lattice_e2(a)) < 1e-12);
        }
        CHECK(std::abs(pair_coefficient(fam.m0(), BasisIndex{0, 0}) - fam.theta3_ratio()) < 1e-12);
    }
}

TEST_CASE("linear map E") {
    Rng rng(91);
    SECTION("vanishes at N=2") {
        RMatrixFamily fam(EllipticContext{2, cplx{0, 1}});
        const SquareMatrix a = random_matrix(2, rng);
        CHECK(sup_norm(fam.e_map(a)) < 1e-12);
    }
    SECTION("matches the partial trace of r0 for N >= 3") {
        for (int N : {3, 4}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
            const SquareMatrix a = random_matrix(N, rng);
            TensorOperator wa(1, N);
            wa.m = a;
            const SquareMatrix via_trace =
                partial_trace(fam.r0(), {2}, wa).m / static_cast<double>(N);
            CHECK(sup_norm(SquareMatrix(via_trace - fam.e_map(a))) < 1e-12);
        }
    }
    SECTION("kills the identity and is linear") {
        RMatrixFamily fam(EllipticContext{3, cplx{0.3, 0.8}});
        CHECK(sup_norm(fam.e_map(SquareMatrix::Identity(3, 3))) < 1e-12);
        const SquareMatrix a = random_matrix(3, rng);
        const SquareMatrix b = random_matrix(3, rng);
        const cplx al{0.7, -0.2}, be{-1.1, 0.4};
        CHECK(sup_norm(SquareMatrix(fam.e_map(al * a + be * b) - al * fam.e_map(a) - be * fam.e_map(b)))
              < 1e-12);
    }
    SECTION("anti-self-adjoint under the trace pairing") {
        RMatrixFamily fam(EllipticContext{4, cplx{0, 1}});
        const SquareMatrix a = random_matrix(4, rng);
        const SquareMatrix b = random_matrix(4, rng);
        const cplx lhs = (fam.e_map(a) * b).trace();
        const cplx rhs = -(a * fam.e_map(b)).trace();
        CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("linear map J") {
    Rng rng(17);
    SECTION("matches the partial trace of m0") {
        for (int N : {2, 3, 4}) {
            RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
            const SquareMatrix s = random_matrix(N, rng);
            TensorOperator ws(1, N);
            ws.m = s;
            const SquareMatrix via_trace =
                partial_trace(fam.m0(), {2}, ws).m / static_cast<double>(N);
            CHECK(sup_norm(SquareMatrix(via_trace - fam.j_map(s))) < 1e-12);
        }
    }
    SECTION("sends identity to a multiple of identity") {
        RMatrixFamily fam(EllipticContext{3, cplx{0, 1}});
        const SquareMatrix ji = fam.j_map(SquareMatrix::Identity(3, 3));
        CHECK(sup_norm(SquareMatrix(ji - fam.theta3_ratio() * SquareMatrix::Identity(3, 3))) < 1e-12);
    }
    SECTION("N=2 commutator carries the -wp(omega_k) anisotropy") {
        RMatrixFamily fam(EllipticContext{2, cplx{0, 1}});
        const SquareMatrix s = random_matrix(2, rng);
        const BasisIndex idx_of_k[4] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
        SquareMatrix aniso = SquareMatrix::Zero(2, 2);
        for (int k = 1; k <= 3; ++k) {
            const cplx sk = (s * sigma(k)).trace() / 2.0;
            aniso += fam.lattice_wp(idx_of_k[k]) * sk * sigma(k);
        }
        const SquareMatrix lhs = s * fam.j_map(s) - fam.j_map(s) * s;
        const SquareMatrix rhs = -(s * aniso - aniso * s);
        CHECK(sup_norm(SquareMatrix(lhs - rhs)) < 1e-10);
    }
    SECTION("self-adjoint under the trace pairing") {
        RMatrixFamily fam(EllipticContext{3, cplx{0.3, 0.8}});
        const SquareMatrix a = random_matrix(3, rng);
        const SquareMatrix b = random_matrix(3, rng);
        CHECK(std::abs((fam.j_map(a) * b).trace() - (a * fam.j_map(b)).trace()) < 1e-10);
    }
}

TEST_CASE("z-derivatives of the classical coefficient tables") {
    RMatrixFamily fam(EllipticContext{3, cplx{0.3, 0.8}});
    const double h = 1e-5;
    const cplx z{0.21, 0.17};
    for (int a1 = 0; a1 < 3; ++a1)
        for (int a2 = 0; a2 < 3; ++a2) {
            const cplx fd_r = (fam.classical_coeff(a1, a2, z + h) - fam.classical_coeff(a1, a2, z - h))
                              / (2.0 * h);
            CHECK(std::abs(fd_r - fam.classical_coeff_dz(a1, a2, z)) < 1e-6);
            const cplx fd_m = (fam.m_coeff(a1, a2, z + h) - fam.m_coeff(a1, a2, z - h)) / (2.0 * h);
            CHECK(std::abs(fd_m - fam.m_coeff_dz(a1, a2, z)) < 1e-5);
        }
    CHECK(sup_norm(fam.classical_r_dz(z)
                   - (1.0 / (2.0 * h)) * (fam.classical_r(z + h) - fam.classical_r(z - h)))
          < 1e-5);
    CHECK(sup_norm(fam.m_matrix_dz(z) - (1.0 / (2.0 * h)) * (fam.m_matrix(z + h) - fam.m_matrix(z - h)))
          < 1e-4);
}

TEST_CASE("spectral parameter and Planck constant exchange") {
    // R^hbar(z) P = R^{z/N}(N hbar)
    for (int N : {2, 3}) {
        RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
        const cplx hbar{0.06, 0.03};
        const cplx z{0.24, -0.13};
        const TensorOperator lhs = fam.quantum_r(hbar, z) * fam.permutation_op();
        const TensorOperator rhs = fam.quantum_r(z / static_cast<double>(N), static_cast<double>(N) * hbar);
        CHECK(sup_norm(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("component table reconstructs the matrix") {
    Rng rng(5);
    for (int N : {2, 3, 5}) {
        RMatrixFamily fam(EllipticContext{N, cplx{0, 1}});
        const SquareMatrix s = random_matrix(N, rng);
        const auto table = fam.component_table(s);
        SquareMatrix back = SquareMatrix::Zero(N, N);
        for (int a1 = 0; a1 < N; ++a1)
            for (int a2 = 0; a2 < N; ++a2)
                back += table[a1 * N + a2] * fam.basis({a1, a2});
        CHECK(sup_norm(SquareMatrix(back - s)) < 1e-13);
    }
}

TEST_CASE("family accessors") {
    RMatrixFamily fam(EllipticContext{3, cplx{0.3, 0.8}});
    CHECK(fam.rank() == 3);
    const cplx w = fam.omega({1, 2});
    CHECK(std::abs(w - (1.0 + 2.0 * cplx{0.3, 0.8}) / 3.0) < 1e-15);
    CHECK(std::abs(fam.lattice_e1({1, 2}) - e1(w, fam.context())) < 1e-13);
    CHECK(std::abs(fam.lattice_wp({1, 2}) - wp(w, fam.context())) < 1e-12);
    CHECK(std::abs(fam.omega({4, 5}) - fam.omega({1, 2})) < 1e-15);
    CHECK_THROWS_AS(fam.e_map(SquareMatrix::Identity(2, 2)), std::invalid_argument);
}
