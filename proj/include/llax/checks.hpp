#pragma once

// Seeded randomized verification of the operator identities satisfied by the
// elliptic R-matrix family: quantum/classical Yang-Baxter, unitarity, skew
// symmetry, the associative exchange relation, the m-r compatibility ladder,
// and the hbar <-> z Fourier symmetry.
//
// Residual kernels operate on pre-built tensor operators so that negative
// controls (perturbed or mis-embedded inputs) exercise the same code path as
// the checks themselves.  Sampling is rejection-based and fully deterministic
// for a given (seed, plan, context): every attempt consumes a fixed number of
// generator draws, and rejected attempts are counted in the report.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "llax/random.hpp"
#include "llax/rmatrix.hpp"

namespace llax {

struct SamplePlan {
    std::uint64_t seed = 7;
    int count = 20;
    double z_box_re = 0.4;  // Re z drawn from [-z_box_re, z_box_re]
    double z_box_im = 0.4;  // Im z drawn from [-z_box_im, z_box_im] * Im tau
    double hbar_min = 1e-3;
    double hbar_max = 0.3;
    double exclusion = 0.05;  // lattice distance below which a point is rejected
    double tolerance = 1e-8;

    void validate() const {
        if (count < 1) throw std::invalid_argument("SamplePlan: count must be >= 1");
        if (exclusion <= 0.0) throw std::invalid_argument("SamplePlan: exclusion radius must be positive");
        if (!(hbar_min > 0.0) || hbar_max < hbar_min)
            throw std::invalid_argument("SamplePlan: hbar magnitude window is empty");
        if (tolerance <= 0.0) throw std::invalid_argument("SamplePlan: tolerance must be positive");
    }
};

struct CheckReport {
    std::string name;
    int rank = 0;
    cplx tau{0.0, 1.0};
    std::vector<std::vector<cplx>> samples;  // argument tuple per sample
    double max_residual = 0.0;
    double mean_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_time = 0.0;  // seconds, informational only
    int resamples = 0;
};

// ---- residual kernels ----

// R12 R13 R23 - R23 R13 R12 on three slots.
inline double qybe_residual(const TensorOperator& r12, const TensorOperator& r13,
                            const TensorOperator& r23) {
    return sup_norm(r12 * r13 * r23 - r23 * r13 * r12);
}

// R(hbar,z) R_21(hbar,-z) - scalar * 1, scalar = N^2 phi(N hbar, z) phi(N hbar, -z).
inline double unitarity_residual(const TensorOperator& r_fwd, const TensorOperator& r_rev,
                                 cplx scalar) {
    return sup_norm(r_fwd * r_rev - scalar * TensorOperator::identity(2, r_fwd.dim));
}

// R^hbar(z) + R_21^{-hbar}(-z); the second argument is already slot-reversed.
inline double skew_residual(const TensorOperator& r_fwd, const TensorOperator& r_rev) {
    return sup_norm(r_fwd + r_rev);
}

// R^h_12 R^e_23 - R^e_13 R^{h-e}_12 - R^{e-h}_23 R^h_13 on three slots.
inline double aybe_residual(const TensorOperator& r12_h, const TensorOperator& r23_e,
                            const TensorOperator& r13_e, const TensorOperator& r12_hme,
                            const TensorOperator& r23_emh, const TensorOperator& r13_h) {
    return sup_norm(r12_h * r23_e - r13_e * r12_hme - r23_emh * r13_h);
}

// [r12,r13] + [r12,r23] + [r13,r23] on three slots.
inline double cybe_residual(const TensorOperator& r12, const TensorOperator& r13,
                            const TensorOperator& r23) {
    return sup_norm(comm(r12, r13) + comm(r12, r23) + comm(r13, r23));
}

// [m13(z1) + m23(z2), r12(z1-z2)] - [m12(z1-z2) + m13(z1), r23(z2)].
inline double mr_limit_residual(const TensorOperator& m13, const TensorOperator& m23,
                                const TensorOperator& r12, const TensorOperator& m12,
                                const TensorOperator& r23) {
    return sup_norm(comm(m13 + m23, r12) - comm(m12 + m13, r23));
}

// [m13(z), r12(z)] - [r12(z), m23(0)] + [dz m12(z), N P23]
//   - [m12(z), r0_23] - [m13(z), r0_23].
inline double mr_derivative_residual(const TensorOperator& m13, const TensorOperator& m12,
                            const TensorOperator& dzm12, const TensorOperator& r12,
                            const TensorOperator& m23_zero, const TensorOperator& r0_23,
                            const TensorOperator& p23) {
    const double n = static_cast<double>(r12.dim);
    return sup_norm(comm(m13, r12) - comm(r12, m23_zero) + comm(dzm12, n * p23)
                    - comm(m12, r0_23) - comm(m13, r0_23));
}

// r12(z) r13(z+w) - r23(w) r12(z) + r13(z+w) r23(w) - m12(z) - m23(w) - m13(z+w).
inline double aybe_classical_residual(const TensorOperator& r12, const TensorOperator& r13,
                            const TensorOperator& r23, const TensorOperator& m12,
                            const TensorOperator& m23, const TensorOperator& m13) {
    return sup_norm(r12 * r13 - r23 * r12 + r13 * r23 - m12 - m23 - m13);
}

// r12(z) r13(z) - r0_23 r12(z) + r13(z) r0_23 + N dz r13(z) P23
//   - m12(z) - m23(0) - m13(z).
inline double aybe_classical_limit_residual(const TensorOperator& r12, const TensorOperator& r13,
                            const TensorOperator& r0_23, const TensorOperator& dzr13,
                            const TensorOperator& p23, const TensorOperator& m12,
                            const TensorOperator& m23_zero, const TensorOperator& m13) {
    const double n = static_cast<double>(r12.dim);
    return sup_norm(r12 * r13 - r0_23 * r12 + r13 * r0_23 + n * (dzr13 * p23) - m12 - m23_zero
                    - m13);
}

// R^hbar(z) P - R^{z/N}(N hbar).
inline double fourier_residual(const TensorOperator& r_hz, const TensorOperator& perm,
                               const TensorOperator& r_dual) {
    return sup_norm(r_hz * perm - r_dual);
}

namespace detail {

struct CheckSampler {
    const EllipticContext& ctx;
    const SamplePlan& plan;
    Rng rng;
    int resamples = 0;

    CheckSampler(const EllipticContext& c, const SamplePlan& p) : ctx(c), plan(p), rng(p.seed) {}

    cplx draw_z() {
        const double h = plan.z_box_im * ctx.tau.imag();
        return uniform_box(rng, -plan.z_box_re, plan.z_box_re, -h, h);
    }
    cplx draw_hbar() {
        return uniform_box(rng, -plan.hbar_max, plan.hbar_max, -plan.hbar_max, plan.hbar_max);
    }

    bool z_ok(cplx z) const { return lattice_distance(z, ctx.tau) >= plan.exclusion; }
    bool hbar_ok(cplx h) const {
        const double a = std::abs(h);
        return a >= plan.hbar_min && a <= plan.hbar_max
               && refined_lattice_distance(h, ctx.tau, ctx.N) >= plan.exclusion;
    }

    // Draws whole tuples until `ok` accepts one; each attempt consumes the
    // same number of generator values, keeping the stream deterministic.
    template <class Draw, class Ok>
    std::vector<cplx> accept(Draw&& draw, Ok&& ok) {
        for (int attempt = 0; attempt < 100000; ++attempt) {
            std::vector<cplx> args = draw();
            if (ok(args)) return args;
            ++resamples;
        }
        throw NumericalAbort("check sampling: no admissible point found in 100000 attempts");
    }
};

template <class PerSample>
CheckReport run_check(const char* name, const RMatrixFamily& fam, const SamplePlan& plan,
                      PerSample&& per_sample) {
    plan.validate();
    const auto start = std::chrono::steady_clock::now();
    CheckSampler sampler(fam.context(), plan);
    CheckReport rep;
    rep.name = name;
    rep.rank = fam.rank();
    rep.tau = fam.context().tau;
    rep.tolerance = plan.tolerance;
    double sum = 0.0;
    for (int i = 0; i < plan.count; ++i) {
        std::pair<std::vector<cplx>, double> one = per_sample(sampler);
        sum += one.second;
        rep.max_residual = std::max(rep.max_residual, one.second);
        rep.samples.push_back(std::move(one.first));
    }
    rep.mean_residual = sum / static_cast<double>(plan.count);
    rep.pass = rep.max_residual <= rep.tolerance;
    rep.resamples = sampler.resamples;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace detail

inline CheckReport check_qybe(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("qybe", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_hbar(), s.draw_z(), s.draw_z(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) {
                return s.hbar_ok(v[0]) && s.z_ok(v[1] - v[2]) && s.z_ok(v[1] - v[3])
                       && s.z_ok(v[2] - v[3]);
            });
        const TensorOperator r12 = embed(fam.quantum_r(a[0], a[1] - a[2]), {1, 2}, 3);
        const TensorOperator r13 = embed(fam.quantum_r(a[0], a[1] - a[3]), {1, 3}, 3);
        const TensorOperator r23 = embed(fam.quantum_r(a[0], a[2] - a[3]), {2, 3}, 3);
        return std::pair{a, qybe_residual(r12, r13, r23)};
    });
}

inline CheckReport check_unitarity(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("unitarity", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_hbar(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) { return s.hbar_ok(v[0]) && s.z_ok(v[1]); });
        const double n = static_cast<double>(fam.rank());
        const cplx nh = n * a[0];
        const TensorOperator fwd = fam.quantum_r(a[0], a[1]);
        const TensorOperator rev =
            fam.permutation_op() * fam.quantum_r(a[0], -a[1]) * fam.permutation_op();
        const cplx scalar = n * n * kronecker_phi(nh, a[1], fam.context())
                            * kronecker_phi(nh, -a[1], fam.context());
        return std::pair{a, unitarity_residual(fwd, rev, scalar)};
    });
}

inline CheckReport check_skew(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("skew", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_hbar(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) { return s.hbar_ok(v[0]) && s.z_ok(v[1]); });
        const TensorOperator fwd = fam.quantum_r(a[0], a[1]);
        const TensorOperator rev =
            fam.permutation_op() * fam.quantum_r(-a[0], -a[1]) * fam.permutation_op();
        return std::pair{a, skew_residual(fwd, rev)};
    });
}

inline CheckReport check_aybe(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("aybe", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] {
                return std::vector<cplx>{s.draw_hbar(), s.draw_hbar(), s.draw_z(), s.draw_z(),
                                         s.draw_z()};
            },
            [&](const std::vector<cplx>& v) {
                return s.hbar_ok(v[0]) && s.hbar_ok(v[1]) && s.hbar_ok(v[0] - v[1])
                       && s.z_ok(v[2] - v[3]) && s.z_ok(v[3] - v[4]) && s.z_ok(v[2] - v[4]);
            });
        const cplx h = a[0], e = a[1];
        const cplx z12 = a[2] - a[3], z23 = a[3] - a[4], z13 = a[2] - a[4];
        const TensorOperator r12_h = embed(fam.quantum_r(h, z12), {1, 2}, 3);
        const TensorOperator r23_e = embed(fam.quantum_r(e, z23), {2, 3}, 3);
        const TensorOperator r13_e = embed(fam.quantum_r(e, z13), {1, 3}, 3);
        const TensorOperator r12_hme = embed(fam.quantum_r(h - e, z12), {1, 2}, 3);
        const TensorOperator r23_emh = embed(fam.quantum_r(e - h, z23), {2, 3}, 3);
        const TensorOperator r13_h = embed(fam.quantum_r(h, z13), {1, 3}, 3);
        return std::pair{a, aybe_residual(r12_h, r23_e, r13_e, r12_hme, r23_emh, r13_h)};
    });
}

inline CheckReport check_cybe(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("cybe", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_z(), s.draw_z(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) {
                return s.z_ok(v[0] - v[1]) && s.z_ok(v[0] - v[2]) && s.z_ok(v[1] - v[2]);
            });
        const TensorOperator r12 = embed(fam.classical_r(a[0] - a[1]), {1, 2}, 3);
        const TensorOperator r13 = embed(fam.classical_r(a[0] - a[2]), {1, 3}, 3);
        const TensorOperator r23 = embed(fam.classical_r(a[1] - a[2]), {2, 3}, 3);
        return std::pair{a, cybe_residual(r12, r13, r23)};
    });
}

inline CheckReport check_mr_limit(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("mr_limit", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_z(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) {
                return s.z_ok(v[0]) && s.z_ok(v[1]) && s.z_ok(v[0] - v[1]);
            });
        const TensorOperator m13 = embed(fam.m_matrix(a[0]), {1, 3}, 3);
        const TensorOperator m23 = embed(fam.m_matrix(a[1]), {2, 3}, 3);
        const TensorOperator r12 = embed(fam.classical_r(a[0] - a[1]), {1, 2}, 3);
        const TensorOperator m12 = embed(fam.m_matrix(a[0] - a[1]), {1, 2}, 3);
        const TensorOperator r23 = embed(fam.classical_r(a[1]), {2, 3}, 3);
        return std::pair{a, mr_limit_residual(m13, m23, r12, m12, r23)};
    });
}

inline CheckReport check_mr_derivative(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("mr_derivative", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a =
            s.accept([&] { return std::vector<cplx>{s.draw_z()}; },
                     [&](const std::vector<cplx>& v) { return s.z_ok(v[0]); });
        const TensorOperator m13 = embed(fam.m_matrix(a[0]), {1, 3}, 3);
        const TensorOperator m12 = embed(fam.m_matrix(a[0]), {1, 2}, 3);
        const TensorOperator dzm12 = embed(fam.m_matrix_dz(a[0]), {1, 2}, 3);
        const TensorOperator r12 = embed(fam.classical_r(a[0]), {1, 2}, 3);
        const TensorOperator m23_zero = embed(fam.m0(), {2, 3}, 3);
        const TensorOperator r0_23 = embed(fam.r0(), {2, 3}, 3);
        const TensorOperator p23 = embed(fam.permutation_op(), {2, 3}, 3);
        return std::pair{a, mr_derivative_residual(m13, m12, dzm12, r12, m23_zero, r0_23, p23)};
    });
}

inline CheckReport check_aybe_classical(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("aybe_classical", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_z(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) {
                return s.z_ok(v[0]) && s.z_ok(v[1]) && s.z_ok(v[0] + v[1]);
            });
        const cplx z = a[0], w = a[1];
        const TensorOperator r12 = embed(fam.classical_r(z), {1, 2}, 3);
        const TensorOperator r13 = embed(fam.classical_r(z + w), {1, 3}, 3);
        const TensorOperator r23 = embed(fam.classical_r(w), {2, 3}, 3);
        const TensorOperator m12 = embed(fam.m_matrix(z), {1, 2}, 3);
        const TensorOperator m23 = embed(fam.m_matrix(w), {2, 3}, 3);
        const TensorOperator m13 = embed(fam.m_matrix(z + w), {1, 3}, 3);
        return std::pair{a, aybe_classical_residual(r12, r13, r23, m12, m23, m13)};
    });
}

inline CheckReport check_aybe_classical_limit(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("aybe_classical_limit", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a =
            s.accept([&] { return std::vector<cplx>{s.draw_z()}; },
                     [&](const std::vector<cplx>& v) { return s.z_ok(v[0]); });
        const TensorOperator r12 = embed(fam.classical_r(a[0]), {1, 2}, 3);
        const TensorOperator r13 = embed(fam.classical_r(a[0]), {1, 3}, 3);
        const TensorOperator dzr13 = embed(fam.classical_r_dz(a[0]), {1, 3}, 3);
        const TensorOperator r0_23 = embed(fam.r0(), {2, 3}, 3);
        const TensorOperator p23 = embed(fam.permutation_op(), {2, 3}, 3);
        const TensorOperator m12 = embed(fam.m_matrix(a[0]), {1, 2}, 3);
        const TensorOperator m23_zero = embed(fam.m0(), {2, 3}, 3);
        const TensorOperator m13 = embed(fam.m_matrix(a[0]), {1, 3}, 3);
        return std::pair{a, aybe_classical_limit_residual(r12, r13, r0_23, dzr13, p23, m12, m23_zero, m13)};
    });
}

inline CheckReport check_fourier(const RMatrixFamily& fam, const SamplePlan& plan) {
    return detail::run_check("fourier", fam, plan, [&](detail::CheckSampler& s) {
        const std::vector<cplx> a = s.accept(
            [&] { return std::vector<cplx>{s.draw_hbar(), s.draw_z()}; },
            [&](const std::vector<cplx>& v) { return s.hbar_ok(v[0]) && s.z_ok(v[1]); });
        const double n = static_cast<double>(fam.rank());
        const TensorOperator r_hz = fam.quantum_r(a[0], a[1]);
        const TensorOperator r_dual = fam.quantum_r(a[1] / n, n * a[0]);
        return std::pair{a, fourier_residual(r_hz, fam.permutation_op(), r_dual)};
    });
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{
        "qybe",          "unitarity",      "skew",
        "aybe",          "cybe",           "mr_limit",
        "mr_derivative", "aybe_classical", "aybe_classical_limit",
        "fourier"};
    return names;
}

inline CheckReport run_named_check(const std::string& name, const RMatrixFamily& fam,
                                   const SamplePlan& plan) {
    if (name == "qybe") return check_qybe(fam, plan);
    if (name == "unitarity") return check_unitarity(fam, plan);
    if (name == "skew") return check_skew(fam, plan);
    if (name == "aybe") return check_aybe(fam, plan);
    if (name == "cybe") return check_cybe(fam, plan);
    if (name == "mr_limit") return check_mr_limit(fam, plan);
    if (name == "mr_derivative") return check_mr_derivative(fam, plan);
    if (name == "aybe_classical") return check_aybe_classical(fam, plan);
    if (name == "aybe_classical_limit") return check_aybe_classical_limit(fam, plan);
    if (name == "fourier") return check_fourier(fam, plan);
    throw std::invalid_argument("run_named_check: unknown check '" + name + "'");
}

// Runs the selected checks (empty selection -> empty list).  Reports come back
// in selection order regardless of worker count; each check draws its samples
// from an independent generator seeded with plan.seed.
inline std::vector<CheckReport> run_suite(const RMatrixFamily& fam, const SamplePlan& plan,
                                          const std::vector<std::string>& selection,
                                          int workers = 1) {
    for (const std::string& name : selection) {
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
            throw std::invalid_argument("run_suite: unknown check '" + name + "'");
    }
    std::vector<CheckReport> out(selection.size());
    const int n = static_cast<int>(selection.size());
    const int pool = std::clamp(workers, 1, std::max(1, n));
    if (pool <= 1) {
        for (int i = 0; i < n; ++i) out[i] = run_named_check(selection[i], fam, plan);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (int t = 0; t < pool; ++t)
        threads.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                out[i] = run_named_check(selection[i], fam, plan);
        });
    for (std::thread& th : threads) th.join();
    return out;
}

} // namespace llax
