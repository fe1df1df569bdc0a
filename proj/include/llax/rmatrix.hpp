#pragma once

// The elliptic glN quantum R-matrix family
//
//   R(hbar, z) = sum_a T_a (x) T_{-a} exp(2 pi i a2 z / N) phi(z, omega_a + hbar),
//   omega_a = (a1 + a2 tau)/N,
//
// together with the coefficients of its small-hbar expansion
// R = 1/hbar + r + hbar m + O(hbar^2):
//
//   r(z)  : E1(z) at a = 0,  exp(2 pi i a2 z/N) phi(z, omega_a) otherwise
//   m(z)  : rho(z) at a = 0, exp(2 pi i a2 z/N) f(z, omega_a) otherwise
//   r0    : 0 at a = 0,      2 pi i a2/N + E1(omega_a) otherwise (z -> 0 finite part of r)
//   m0    : theta'''(0)/(3 theta'(0)) at a = 0, -E2(omega_a) otherwise (m at z = 0)
//
// and the linear maps E(A) = (1/N) tr_2 r0 (1 x A), J(S) = (1/N) tr_2 m0 (1 x S).
// r has residue N P at z = 0; E kills the identity and J maps it into the
// theta'''-scalar times the identity.

#include <vector>

#include "llax/tensor.hpp"

namespace llax {

class RMatrixFamily {
  public:
    explicit RMatrixFamily(EllipticContext ctx) : ctx_(ctx) {
        const int N = ctx_.N;
        basis_.reserve(N * N);
        pair_.reserve(N * N);
        omega_.resize(N * N);
        e1_lat_.assign(N * N, cplx{0, 0});
        e2_lat_.assign(N * N, cplx{0, 0});
        wp_lat_.assign(N * N, cplx{0, 0});
        for (int a1 = 0; a1 < N; ++a1)
            for (int a2 = 0; a2 < N; ++a2) {
                const BasisIndex a{a1, a2};
                basis_.push_back(basis_t(a, N));
                pair_.push_back(kron2(basis_t(a, N), basis_t_dual(a, N)));
                const int idx = a1 * N + a2;
                omega_[idx] = (static_cast<double>(a1) + static_cast<double>(a2) * ctx_.tau)
                              / static_cast<double>(N);
                if (idx != 0) {
                    e1_lat_[idx] = e1(omega_[idx], ctx_);
                    e2_lat_[idx] = e2(omega_[idx], ctx_);
                    wp_lat_[idx] = wp(omega_[idx], ctx_);
                }
            }
        theta3_ratio_ = theta_third_ratio(ctx_);
        perm_ = permutation(N);

        r0_ = assemble([&](int a1, int a2) -> cplx {
            if (a1 == 0 && a2 == 0) return {0.0, 0.0};
            return 2.0 * pi * iunit * static_cast<double>(a2) / static_cast<double>(N)
                   + e1_lat_[a1 * N + a2];
        });
        m0_ = assemble([&](int a1, int a2) -> cplx {
            if (a1 == 0 && a2 == 0) return theta3_ratio_;
            return -e2_lat_[a1 * N + a2];
        });

        e_matrix_ = map_matrix([&](int idx) {
            if (idx == 0) return cplx{0.0, 0.0};
            const int a2 = idx % N;
            return 2.0 * pi * iunit * static_cast<double>(a2) / static_cast<double>(N) + e1_lat_[idx];
        });
        j_matrix_ = map_matrix([&](int idx) {
            if (idx == 0) return theta3_ratio_;
            return -e2_lat_[idx];
        });
    }

    const EllipticContext& context() const { return ctx_; }
    int rank() const { return ctx_.N; }
    const TensorOperator& permutation_op() const { return perm_; }
    const SquareMatrix& basis(BasisIndex a) const {
        a = BasisIndex::reduced(a.a1, a.a2, ctx_.N);
        return basis_[a.a1 * ctx_.N + a.a2];
    }
    cplx omega(BasisIndex a) const {
        a = BasisIndex::reduced(a.a1, a.a2, ctx_.N);
        return omega_[a.a1 * ctx_.N + a.a2];
    }
    cplx lattice_e1(BasisIndex a) const { return e1_lat_[canon(a)]; }
    cplx lattice_e2(BasisIndex a) const { return e2_lat_[canon(a)]; }
    cplx lattice_wp(BasisIndex a) const { return wp_lat_[canon(a)]; }
    cplx theta3_ratio() const { return theta3_ratio_; }

    // ---- coefficient functions (per basis label) ----

    cplx quantum_coeff(int a1, int a2, cplx hbar, cplx z) const {
        const int N = ctx_.N;
        return std::exp(2.0 * pi * iunit * static_cast<double>(a2) * z / static_cast<double>(N))
               * kronecker_phi(z, omega_[a1 * N + a2] + hbar, ctx_);
    }

    cplx classical_coeff(int a1, int a2, cplx z) const {
        if (a1 == 0 && a2 == 0) return e1(z, ctx_);
        const int N = ctx_.N;
        return std::exp(2.0 * pi * iunit * static_cast<double>(a2) * z / static_cast<double>(N))
               * kronecker_phi(z, omega_[a1 * N + a2], ctx_);
    }

    cplx m_coeff(int a1, int a2, cplx z) const {
        if (a1 == 0 && a2 == 0) return rho(z, ctx_);
        const int N = ctx_.N;
        return std::exp(2.0 * pi * iunit * static_cast<double>(a2) * z / static_cast<double>(N))
               * kronecker_f(z, omega_[a1 * N + a2], ctx_);
    }

    cplx classical_coeff_dz(int a1, int a2, cplx z) const {
        if (a1 == 0 && a2 == 0) return -e2(z, ctx_);
        const int N = ctx_.N;
        const cplx k = 2.0 * pi * iunit * static_cast<double>(a2) / static_cast<double>(N);
        const cplx om = omega_[a1 * N + a2];
        return std::exp(k * z) * (k * kronecker_phi(z, om, ctx_) + kronecker_phi_dz(z, om, ctx_));
    }

    cplx m_coeff_dz(int a1, int a2, cplx z) const {
        if (a1 == 0 && a2 == 0) return rho_dz(z, ctx_);
        const int N = ctx_.N;
        const cplx k = 2.0 * pi * iunit * static_cast<double>(a2) / static_cast<double>(N);
        const cplx om = omega_[a1 * N + a2];
        return std::exp(k * z) * (k * kronecker_f(z, om, ctx_) + kronecker_f_dz(z, om, ctx_));
    }

    // ---- operators on C^N x C^N ----

    TensorOperator quantum_r(cplx hbar, cplx z) const {
        return assemble([&](int a1, int a2) { return quantum_coeff(a1, a2, hbar, z); });
    }
    TensorOperator classical_r(cplx z) const {
        return assemble([&](int a1, int a2) { return classical_coeff(a1, a2, z); });
    }
    TensorOperator m_matrix(cplx z) const {
        return assemble([&](int a1, int a2) { return m_coeff(a1, a2, z); });
    }
    TensorOperator classical_r_dz(cplx z) const {
        return assemble([&](int a1, int a2) { return classical_coeff_dz(a1, a2, z); });
    }
    TensorOperator m_matrix_dz(cplx z) const {
        return assemble([&](int a1, int a2) { return m_coeff_dz(a1, a2, z); });
    }
    const TensorOperator& r0() const { return r0_; }
    const TensorOperator& m0() const { return m0_; }

    // ---- linear maps on N x N matrices ----

    SquareMatrix e_map(const SquareMatrix& a) const { return apply_map(e_matrix_, a); }
    SquareMatrix j_map(const SquareMatrix& s) const { return apply_map(j_matrix_, s); }

    // Expansion coefficients tr(S T_{-a})/N as a dense table indexed a1*N + a2.
    // tr(S T_a^dagger) = sum_{ij} S_ij conj((T_a)_ij).
    std::vector<cplx> component_table(const SquareMatrix& s) const {
        const int N = ctx_.N;
        std::vector<cplx> out(N * N);
        for (int idx = 0; idx < N * N; ++idx)
            out[idx] = s.cwiseProduct(basis_[idx].conjugate()).sum() / static_cast<double>(N);
        return out;
    }

  private:
    int canon(BasisIndex a) const {
        a = BasisIndex::reduced(a.a1, a.a2, ctx_.N);
        return a.a1 * ctx_.N + a.a2;
    }

    template <typename Coeff>
    TensorOperator assemble(Coeff coeff) const {
        const int N = ctx_.N;
        TensorOperator out(2, N);
        for (int a1 = 0; a1 < N; ++a1)
            for (int a2 = 0; a2 < N; ++a2) out.m += coeff(a1, a2) * pair_[a1 * N + a2].m;
        return out;
    }

    // dense matrix of the map S -> sum_a c_a S_a T_a acting on column-major vec(S)
    template <typename Coeff>
    Eigen::MatrixXcd map_matrix(Coeff coeff) const {
        const int N = ctx_.N;
        Eigen::MatrixXcd mm = Eigen::MatrixXcd::Zero(N * N, N * N);
        for (int col = 0; col < N * N; ++col) {
            SquareMatrix e = SquareMatrix::Zero(N, N);
            e(col % N, col / N) = 1.0; // column-major unit
            const auto table = component_table(e);
            SquareMatrix img = SquareMatrix::Zero(N, N);
            for (int idx = 0; idx < N * N; ++idx) img += coeff(idx) * table[idx] * basis_[idx];
            mm.col(col) = Eigen::Map<const Eigen::VectorXcd>(img.data(), N * N);
        }
        return mm;
    }

    SquareMatrix apply_map(const Eigen::MatrixXcd& mm, const SquareMatrix& s) const {
        const int N = ctx_.N;
        if (s.rows() != N || s.cols() != N)
            throw std::invalid_argument("RMatrixFamily: matrix dimension does not match the context rank");
        Eigen::VectorXcd v = mm * Eigen::Map<const Eigen::VectorXcd>(s.data(), N * N);
        return Eigen::Map<const SquareMatrix>(v.data(), N, N);
    }

    EllipticContext ctx_;
    std::vector<SquareMatrix> basis_;
    std::vector<TensorOperator> pair_;
    std::vector<cplx> omega_, e1_lat_, e2_lat_, wp_lat_;
    cplx theta3_ratio_;
    TensorOperator perm_, r0_, m0_;
    Eigen::MatrixXcd e_matrix_, j_matrix_;
};

} // namespace llax
