#pragma once

// Periodic matrix-valued fields S(x_j) on the unit circle, x_j = 2*pi*j/M,
// with spectral differentiation and constraint-exact field generators.
//
// Generators draw their parameters independently of the grid size, so the same
// seed produces samples of one underlying smooth field at every resolution.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "llax/random.hpp"
#include "llax/tensor.hpp"

namespace llax {

// Grid size must be a power of two (FFT) with enough nodes to resolve the
// generator bandwidth.
inline void validate_grid_size(int M, const char* who) {
    if (M < 8 || (M & (M - 1)) != 0)
        throw std::invalid_argument(std::string(who) + ": grid size must be a power of two >= 8");
}

struct SpinField {
    int M = 0;                        // grid size, power of two >= 8
    std::vector<SquareMatrix> values; // S(x_j), j = 0..M-1
    cplx c{};                         // constraint constant, S^2 = cS at every node
    double t = 0.0;

    int matrix_rank_n() const { return values.empty() ? 0 : static_cast<int>(values[0].rows()); }
    double node(int j) const { return 2.0 * pi * static_cast<double>(j) / static_cast<double>(M); }
    double dx() const { return 2.0 * pi / static_cast<double>(M); }
};

// Max over nodes of ||S(x_j)^2 - c S(x_j)||.
inline double field_constraint_residual(const SpinField& f) {
    double worst = 0.0;
    for (const SquareMatrix& s : f.values)
        worst = std::max(worst, sup_norm(SquareMatrix(s * s - f.c * s)));
    return worst;
}

// Entrywise Fourier differentiation on the periodic grid; exact for
// trigonometric polynomials below the Nyquist mode.  The Nyquist coefficient
// is zeroed for the first derivative (odd symbol) and kept for the second.
inline std::vector<SquareMatrix> spectral_derivative(const std::vector<SquareMatrix>& values,
                                                     int order) {
    const int M = static_cast<int>(values.size());
    validate_grid_size(M, "spectral_derivative");
    if (order != 1 && order != 2)
        throw std::invalid_argument("spectral_derivative: order must be 1 or 2");
    const int N = static_cast<int>(values[0].rows());
    for (const SquareMatrix& v : values)
        if (v.rows() != N || v.cols() != N)
            throw std::invalid_argument("spectral_derivative: inhomogeneous matrix sizes");

    std::vector<SquareMatrix> out(M, SquareMatrix::Zero(N, N));
    Eigen::FFT<double> fft;
    std::vector<cplx> time(M), freq(M);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            for (int k = 0; k < M; ++k) time[k] = values[k](i, j);
            fft.fwd(freq, time);
            for (int k = 0; k < M; ++k) {
                const int ks = (k <= M / 2) ? k : k - M;
                if (order == 1)
                    freq[k] *= (k == M / 2) ? cplx(0.0) : iunit * static_cast<double>(ks);
                else
                    freq[k] *= -static_cast<double>(ks) * static_cast<double>(ks);
            }
            fft.inv(time, freq);
            for (int k = 0; k < M; ++k) out[k](i, j) = time[k];
        }
    }
    return out;
}

inline std::vector<SquareMatrix> spectral_derivative(const SpinField& f, int order) {
    return spectral_derivative(f.values, order);
}

// Periodic conjugating factor g(x) = exp(A cos x + B sin x).  A and B are
// fixed small draws, so g and g^{-1} = exp(-(A cos x + B sin x)) are entire
// in x with rapidly decaying Fourier tails.
struct PeriodicConjugator {
    SquareMatrix A, B;

    SquareMatrix at(double x) const {
        return SquareMatrix(SquareMatrix(A * std::cos(x) + B * std::sin(x)).exp());
    }
    SquareMatrix inverse_at(double x) const {
        return SquareMatrix(SquareMatrix(-(A * std::cos(x) + B * std::sin(x))).exp());
    }
};

inline PeriodicConjugator random_conjugator(int N, Rng& rng, double amplitude = 0.3) {
    PeriodicConjugator g;
    g.A = random_matrix(N, rng);
    g.B = random_matrix(N, rng);
    g.A *= amplitude / sup_norm(g.A);
    g.B *= amplitude / sup_norm(g.B);
    return g;
}

// S(x) = c g(x) P0 g(x)^{-1} with P0 the diagonal projector of the given
// rank: the constraint S^2 = cS holds at every node to rounding accuracy and
// the eigenvalues {0, c} are x-independent.
inline SpinField make_projector_field(int N, int M, int rank, cplx c, Rng& rng,
                                      double amplitude = 0.3) {
    validate_grid_size(M, "make_projector_field");
    if (rank < 1 || rank > N)
        throw std::invalid_argument("make_projector_field: rank must lie in [1, N]");
    const PeriodicConjugator g = random_conjugator(N, rng, amplitude);
    SquareMatrix p0 = SquareMatrix::Zero(N, N);
    for (int i = 0; i < rank; ++i) p0(i, i) = 1.0;

    SpinField f;
    f.M = M;
    f.c = c;
    f.values.reserve(M);
    for (int j = 0; j < M; ++j) {
        const double x = f.node(j);
        f.values.push_back(SquareMatrix(c * g.at(x) * p0 * g.inverse_at(x)));
    }
    return f;
}

inline SpinField make_rank_one_field(int N, int M, cplx c, Rng& rng, double amplitude = 0.3) {
    return make_projector_field(N, M, 1, c, rng, amplitude);
}

// x-independent field: a single conjugation of P0 copied to every node.
inline SpinField make_constant_field(int N, int M, int rank, cplx c, Rng& rng,
                                     double amplitude = 0.3) {
    validate_grid_size(M, "make_constant_field");
    if (rank < 1 || rank > N)
        throw std::invalid_argument("make_constant_field: rank must lie in [1, N]");
    const PeriodicConjugator g = random_conjugator(N, rng, amplitude);
    SquareMatrix p0 = SquareMatrix::Zero(N, N);
    for (int i = 0; i < rank; ++i) p0(i, i) = 1.0;
    const SquareMatrix s = c * g.at(0.7) * p0 * g.inverse_at(0.7);

    SpinField f;
    f.M = M;
    f.c = c;
    f.values.assign(M, s);
    return f;
}

} // namespace llax
