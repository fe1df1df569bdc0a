#pragma once

// Seeded sampling helpers.  Uniform variates are derived from raw mt19937_64
// output so that a fixed seed reproduces the same stream on every platform.

#include <cstdint>
#include <random>

#include "llax/tensor.hpp"

namespace llax {

using Rng = std::mt19937_64;

inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

inline cplx uniform_box(Rng& rng, double re_lo, double re_hi, double im_lo, double im_hi) {
    const double re = uniform_in(rng, re_lo, re_hi);
    const double im = uniform_in(rng, im_lo, im_hi);
    return cplx{re, im};
}

inline SquareMatrix random_matrix(int N, Rng& rng, double scale = 1.0) {
    SquareMatrix m(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = scale * uniform_box(rng, -1.0, 1.0, -1.0, 1.0);
    return m;
}

inline SquareMatrix random_traceless(int N, Rng& rng, double scale = 1.0) {
    SquareMatrix m = random_matrix(N, rng, scale);
    m -= (m.trace() / static_cast<double>(N)) * SquareMatrix::Identity(N, N);
    return m;
}

} // namespace llax
