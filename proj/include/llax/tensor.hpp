#pragma once

// Finite-dimensional operator algebra on (C^N)^{tensor k}, k <= 3, with the
// finite Heisenberg pair (Q1, Q2) and the sine-algebra style basis
//
//   T_a = exp(pi i a1 a2 / N) Q1^{a1} Q2^{a2},   a = (a1, a2) in (Z_N)^2,
//   (Q1)_{kl} = delta_{kl} exp(2 pi i k / N)  (1-based k),
//   (Q2)_{kl} = delta_{k-l+1 = 0 mod N}.
//
// T_a as a function of the integer label is only quasi-periodic:
// T_{a + N e1} = (-1)^{a2} T_a and T_{a + N e2} = (-1)^{a1} T_a.  T_{-a}
// therefore always means the value at the integer point (-a1, -a2), which
// equals T_a^{-1} = T_a^dagger; reducing -a into [0, N)^2 first flips the
// sign whenever both components are nonzero and N + a1 + a2 is odd.  With
// that reading tr(T_a T_{-b}) = N delta_{ab}, (1/N) sum_a T_a (x) T_{-a} is
// the slot permutation, and any matrix expands as S = sum_a S_a T_a with
// S_a = tr(S T_{-a})/N.  Composite indices are row-major with slot 1 most
// significant.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "llax/elliptic.hpp"

namespace llax {

using SquareMatrix = Eigen::MatrixXcd;

// Index on the N x N lattice of basis labels, stored canonically in [0, N)^2.
struct BasisIndex {
    int a1 = 0;
    int a2 = 0;

    static BasisIndex reduced(int a1, int a2, int N) {
        auto m = [N](int v) { int r = v % N; return r < 0 ? r + N : r; };
        return BasisIndex{m(a1), m(a2)};
    }
    BasisIndex negated(int N) const { return reduced(-a1, -a2, N); }
    bool is_zero() const { return a1 == 0 && a2 == 0; }
    auto operator<=>(const BasisIndex&) const = default;
};

inline SquareMatrix clock_matrix(int N) {
    SquareMatrix q = SquareMatrix::Zero(N, N);
    for (int k = 0; k < N; ++k)
        q(k, k) = std::exp(2.0 * pi * iunit * static_cast<double>(k + 1) / static_cast<double>(N));
    return q;
}

inline SquareMatrix shift_matrix(int N) {
    SquareMatrix q = SquareMatrix::Zero(N, N);
    for (int k = 0; k < N; ++k) q(k, (k + 1) % N) = 1.0;
    return q;
}

inline SquareMatrix basis_t(BasisIndex a, int N) {
    a = BasisIndex::reduced(a.a1, a.a2, N);
    const cplx phase = std::exp(pi * iunit * static_cast<double>(a.a1) * static_cast<double>(a.a2)
                                / static_cast<double>(N));
    SquareMatrix m = SquareMatrix::Identity(N, N);
    const SquareMatrix q1 = clock_matrix(N), q2 = shift_matrix(N);
    for (int j = 0; j < a.a1; ++j) m = m * q1;
    for (int j = 0; j < a.a2; ++j) m = m * q2;
    return phase * m;
}

// T_{-a} at the integer point (-a1, -a2); equals T_a^{-1} = T_a^dagger.
inline SquareMatrix basis_t_dual(BasisIndex a, int N) {
    return basis_t(a, N).adjoint();
}

// Expansion coefficients S_a = tr(S T_{-a})/N over the full label lattice.
inline std::map<BasisIndex, cplx> components(const SquareMatrix& s) {
    const int N = static_cast<int>(s.rows());
    if (s.cols() != N) throw std::invalid_argument("components: matrix must be square");
    std::map<BasisIndex, cplx> out;
    for (int a1 = 0; a1 < N; ++a1)
        for (int a2 = 0; a2 < N; ++a2) {
            const BasisIndex a{a1, a2};
            out[a] = (s * basis_t_dual(a, N)).trace() / static_cast<double>(N);
        }
    return out;
}

// Operator on a k-fold tensor space, stored dense with row-major composite
// indices (slot 1 most significant).
struct TensorOperator {
    int arity = 2;
    int dim = 2;
    Eigen::MatrixXcd m;

    TensorOperator() = default;
    TensorOperator(int arity_, int dim_) : arity(arity_), dim(dim_) {
        if (arity < 1 || arity > 3) throw std::invalid_argument("TensorOperator: arity must be 1, 2, or 3");
        if (dim < 2) throw std::invalid_argument("TensorOperator: dim must be >= 2");
        int n = 1;
        for (int j = 0; j < arity; ++j) n *= dim;
        m = Eigen::MatrixXcd::Zero(n, n);
    }
    static TensorOperator identity(int arity, int dim) {
        TensorOperator t(arity, dim);
        t.m.setIdentity();
        return t;
    }

    int total_dim() const { return static_cast<int>(m.rows()); }
    void require_same_shape(const TensorOperator& o, const char* who) const {
        if (arity != o.arity || dim != o.dim)
            throw std::invalid_argument(std::string(who) + ": operands have mismatched (arity, dim)");
    }

    TensorOperator operator+(const TensorOperator& o) const {
        require_same_shape(o, "TensorOperator::operator+");
        TensorOperator r = *this;
        r.m += o.m;
        return r;
    }
    TensorOperator operator-(const TensorOperator& o) const {
        require_same_shape(o, "TensorOperator::operator-");
        TensorOperator r = *this;
        r.m -= o.m;
        return r;
    }
    TensorOperator operator*(const TensorOperator& o) const {
        require_same_shape(o, "TensorOperator::operator*");
        TensorOperator r(arity, dim);
        r.m = m * o.m;
        return r;
    }
    friend TensorOperator operator*(cplx s, const TensorOperator& t) {
        TensorOperator r = t;
        r.m *= s;
        return r;
    }
};

inline TensorOperator comm(const TensorOperator& a, const TensorOperator& b) {
    a.require_same_shape(b, "comm");
    TensorOperator r(a.arity, a.dim);
    r.m = a.m * b.m - b.m * a.m;
    return r;
}

inline double sup_norm(const TensorOperator& t) { return t.m.cwiseAbs().maxCoeff(); }
inline double sup_norm(const SquareMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline TensorOperator kron2(const SquareMatrix& a, const SquareMatrix& b) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.rows() != n || b.cols() != n)
        throw std::invalid_argument("kron2: factors must be square with equal dimension");
    TensorOperator t(2, n);
    for (int i1 = 0; i1 < n; ++i1)
        for (int j1 = 0; j1 < n; ++j1)
            t.m.block(i1 * n, j1 * n, n, n) = a(i1, j1) * b;
    return t;
}

// Exchange operator P(u x v) = v x u on C^N x C^N.
inline TensorOperator permutation(int N) {
    TensorOperator p(2, N);
    for (int i1 = 0; i1 < N; ++i1)
        for (int i2 = 0; i2 < N; ++i2) p.m(i1 * N + i2, i2 * N + i1) = 1.0;
    return p;
}

// Place a two-slot operator into slots (i, j) of a k-fold space, identity
// elsewhere.  Slots are 1-based, distinct, and may come in either order;
// embed(op, {2,1}, 2) is the slot-exchanged operator P op P.
inline TensorOperator embed(const TensorOperator& op, std::pair<int, int> slots, int arity) {
    if (op.arity != 2) throw std::invalid_argument("embed: operator must act on two slots");
    const auto [p, q] = slots;
    if (p == q || p < 1 || q < 1 || p > arity || q > arity)
        throw std::invalid_argument("embed: slots must be distinct and within 1..arity");
    const int N = op.dim;
    TensorOperator out(arity, N);
    std::vector<int> idx(arity), jdx(arity);
    const int total = out.total_dim();
    for (int row = 0; row < total; ++row) {
        int r = row;
        for (int s = arity - 1; s >= 0; --s) { idx[s] = r % N; r /= N; }
        for (int col = 0; col < total; ++col) {
            int c = col;
            for (int s = arity - 1; s >= 0; --s) { jdx[s] = c % N; c /= N; }
            bool spectator_ok = true;
            for (int s = 0; s < arity; ++s)
                if (s != p - 1 && s != q - 1 && idx[s] != jdx[s]) { spectator_ok = false; break; }
            if (!spectator_ok) continue;
            out.m(row, col) = op.m(idx[p - 1] * N + idx[q - 1], jdx[p - 1] * N + jdx[q - 1]);
        }
    }
    return out;
}

// Multiply by `weight` placed in the traced slots, then trace those slots out.
// weight.arity must equal traced.size(); its slot order follows `traced`.
// The result keeps the remaining slots in their original order (a single kept
// slot yields an arity-1 operator, i.e. an N x N matrix in .m).
inline TensorOperator partial_trace(const TensorOperator& op, const std::vector<int>& traced,
                                    const TensorOperator& weight) {
    const int N = op.dim;
    if (static_cast<int>(traced.size()) != weight.arity)
        throw std::invalid_argument("partial_trace: weight arity must match the number of traced slots");
    if (weight.dim != N) throw std::invalid_argument("partial_trace: weight dimension mismatch");
    std::vector<bool> is_traced(op.arity, false);
    for (int s : traced) {
        if (s < 1 || s > op.arity) throw std::invalid_argument("partial_trace: slot out of range");
        if (is_traced[s - 1]) throw std::invalid_argument("partial_trace: repeated slot");
        is_traced[s - 1] = true;
    }
    std::vector<int> kept;
    for (int s = 0; s < op.arity; ++s)
        if (!is_traced[s]) kept.push_back(s);
    if (kept.empty()) throw std::invalid_argument("partial_trace: at least one slot must remain");

    const int kept_arity = static_cast<int>(kept.size());
    TensorOperator out(kept_arity, N);
    const int kept_total = out.total_dim();
    const int traced_total = weight.total_dim();

    std::vector<int> full_i(op.arity), full_j(op.arity);
    auto compose = [&](const std::vector<int>& digits) {
        int v = 0;
        for (int s = 0; s < op.arity; ++s) v = v * N + digits[s];
        return v;
    };

    for (int ki = 0; ki < kept_total; ++ki)
        for (int kj = 0; kj < kept_total; ++kj) {
            // decompose kept composite indices
            int r = ki, c = kj;
            std::vector<int> kid(kept_arity), kjd(kept_arity);
            for (int s = kept_arity - 1; s >= 0; --s) { kid[s] = r % N; r /= N; }
            for (int s = kept_arity - 1; s >= 0; --s) { kjd[s] = c % N; c /= N; }

            cplx acc = 0.0;
            for (int ti = 0; ti < traced_total; ++ti)
                for (int tj = 0; tj < traced_total; ++tj) {
                    // out[i,i'] = sum_{t,s} op[(i,t),(i',s)] weight[s,t]
                    int tv = ti;
                    std::vector<int> tid(weight.arity);
                    for (int s = weight.arity - 1; s >= 0; --s) { tid[s] = tv % N; tv /= N; }
                    tv = tj;
                    std::vector<int> tjd(weight.arity);
                    for (int s = weight.arity - 1; s >= 0; --s) { tjd[s] = tv % N; tv /= N; }

                    for (int s = 0; s < kept_arity; ++s) { full_i[kept[s]] = kid[s]; full_j[kept[s]] = kjd[s]; }
                    for (int s = 0; s < weight.arity; ++s) {
                        full_i[traced[s] - 1] = tid[s];
                        full_j[traced[s] - 1] = tjd[s];
                    }
                    acc += op.m(compose(full_i), compose(full_j)) * weight.m(tj, ti);
                }
            out.m(ki, kj) = acc;
        }
    return out;
}

// Coefficient of T_a (x) T_{-a} inside a two-slot operator:
// c_a = tr(op (T_{-a} x T_a)) / N^2.
inline cplx pair_coefficient(const TensorOperator& op, BasisIndex a) {
    if (op.arity != 2) throw std::invalid_argument("pair_coefficient: arity-2 operator required");
    const int N = op.dim;
    a = BasisIndex::reduced(a.a1, a.a2, N);
    const TensorOperator probe = kron2(basis_t_dual(a, N), basis_t(a, N));
    return (op.m * probe.m).trace() / static_cast<double>(N * N);
}

} // namespace llax
