// Command-line driver.  Subcommand as first positional argument:
//   verify            seeded run of the full R-matrix identity suite
//   top               finite-dimensional Lax pair and isospectrality checks
//   evolve            time integration of the constrained field, CSV diagnostics
//   hamiltonian-check discrete Poisson-gradient consistency, refinement order
//   sklyanin          N=2 reduction dictionary checks
// Exit codes: 0 all checks pass, 1 check failure, 2 configuration error,
// 3 numerical abort.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include "llax/lax.hpp"
#include "llax/report.hpp"

namespace {

using namespace llax;

SquareMatrix sigma(int k) {
    SquareMatrix m(2, 2);
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

cplx draw_z(Rng& rng, const EllipticContext& ctx) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const cplx z =
            uniform_box(rng, -0.4, 0.4, -0.4 * ctx.tau.imag(), 0.4 * ctx.tau.imag());
        if (refined_lattice_distance(z, ctx.tau, ctx.N) >= 0.05) return z;
    }
    throw NumericalAbort("z sampling: exclusion radius rejected 200 consecutive draws");
}

struct Accumulator {
    CheckReport rep;

    Accumulator(std::string name, const RunConfig& cfg, double tolerance) {
        rep.name = std::move(name);
        rep.rank = cfg.N;
        rep.tau = cfg.tau;
        rep.tolerance = tolerance;
    }

    void add(std::vector<cplx> args, double residual) {
        rep.samples.push_back(std::move(args));
        rep.max_residual = std::max(rep.max_residual, residual);
        rep.mean_residual += residual;
    }

    CheckReport finish() {
        if (!rep.samples.empty())
            rep.mean_residual /= static_cast<double>(rep.samples.size());
        rep.pass = rep.max_residual <= rep.tolerance;
        return rep;
    }
};

std::vector<CheckReport> run_verify(const RunConfig& cfg) {
    EllipticContext ctx{cfg.N, cfg.tau};
    RMatrixFamily fam(ctx);
    SamplePlan plan;
    plan.seed = cfg.seed;
    plan.count = cfg.samples;
    plan.tolerance = cfg.tolerance;
    return run_suite(fam, plan, suite_names(), cfg.workers);
}

std::vector<CheckReport> run_top(const RunConfig& cfg) {
    EllipticContext ctx{cfg.N, cfg.tau};
    RMatrixFamily fam(ctx);
    Rng rng(cfg.seed);

    Accumulator lax("top_lax", cfg, cfg.tolerance);
    for (int i = 0; i < cfg.samples; ++i) {
        const SquareMatrix s = random_matrix(cfg.N, rng);
        for (int j = 0; j < 10; ++j) {
            const cplx z = draw_z(rng, ctx);
            lax.add({z}, check_lax_top(s, z, fam));
        }
    }

    // dS/dt = [S, J(S)] preserves the spectrum; integrate and measure drift.
    Accumulator iso("top_flow_isospectral", cfg, cfg.tolerance);
    for (int i = 0; i < cfg.samples; ++i) {
        SquareMatrix s = random_matrix(cfg.N, rng);
        Eigen::ComplexEigenSolver<SquareMatrix> start(s, false);
        auto rhs = [&](const SquareMatrix& y) { return comm_m(y, fam.j_map(y)); };
        const double dt = 2e-5;
        for (int n = 0; n < 5000; ++n) {
            const SquareMatrix k1 = rhs(s);
            const SquareMatrix k2 = rhs(SquareMatrix(s + 0.5 * dt * k1));
            const SquareMatrix k3 = rhs(SquareMatrix(s + 0.5 * dt * k2));
            const SquareMatrix k4 = rhs(SquareMatrix(s + dt * k3));
            s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Eigen::ComplexEigenSolver<SquareMatrix> end(s, false);
        double drift = 0.0;
        for (int a = 0; a < cfg.N; ++a) {
            double best = std::numeric_limits<double>::infinity();
            for (int b = 0; b < cfg.N; ++b)
                best = std::min(best,
                                std::abs(end.eigenvalues()(a) - start.eigenvalues()(b)));
            drift = std::max(drift, best);
        }
        iso.add({}, drift);
    }

    return {lax.finish(), iso.finish()};
}

std::vector<CheckReport> run_hamiltonian_check(const RunConfig& cfg) {
    EllipticContext ctx{cfg.N, cfg.tau};
    RMatrixFamily fam(ctx);
    const int grids[3] = {cfg.M / 4, cfg.M / 2, cfg.M};
    double residual[3];
    Accumulator order("poisson_gradient_order", cfg, 0.3);
    for (int g = 0; g < 3; ++g) {
        Rng rng(cfg.seed);
        const SpinField field = make_rank_one_field(cfg.N, grids[g], cfg.c, rng);
        residual[g] = poisson_gradient_check(field, fam, 1e-5);
    }
    const double observed = std::log2(residual[0] / residual[2]) / 2.0;
    for (int g = 0; g < 3; ++g)
        order.add({cplx(static_cast<double>(grids[g]), 0.0), cplx(residual[g], 0.0)},
                  std::abs(observed - 2.0));

    Accumulator flat("poisson_gradient_xconstant", cfg, 1e-6);
    Rng rng(cfg.seed);
    const SpinField field = make_constant_field(cfg.N, 32, 1, cfg.c, rng);
    flat.add({}, poisson_gradient_check(field, fam, 1e-5));

    return {order.finish(), flat.finish()};
}

std::vector<CheckReport> run_sklyanin(const RunConfig& cfg) {
    EllipticContext ctx{2, cfg.tau};
    RMatrixFamily fam(ctx);
    Rng rng(cfg.seed);
    const BasisIndex idx_of_k[4] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};

    // classical coefficient table against the three half-period functions
    Accumulator coeffs("sklyanin_r_coefficients", cfg, 1e-10);
    for (int i = 0; i < cfg.samples; ++i) {
        const cplx z = draw_z(rng, ctx);
        double worst = 0.0;
        worst = std::max(worst, std::abs(fam.classical_coeff(0, 1, z) - phi_k(1, z, ctx)));
        worst = std::max(worst, std::abs(fam.classical_coeff(1, 1, z) - phi_k(2, z, ctx)));
        worst = std::max(worst, std::abs(fam.classical_coeff(1, 0, z) - phi_k(3, z, ctx)));
        coeffs.add({z}, worst);
    }

    Accumulator constant("sklyanin_r_constant_term", cfg, 1e-12);
    constant.add({}, sup_norm(fam.r0()));

    // J_k = wp(omega_k) dictionary and the anisotropy commutator built from it
    Accumulator dict("sklyanin_anisotropy_constants", cfg, 1e-9);
    for (int k = 1; k <= 3; ++k)
        dict.add({cplx(static_cast<double>(k), 0.0)},
                 std::abs(fam.lattice_wp(idx_of_k[k]) - wp(half_period(k, ctx), ctx)));

    Accumulator aniso("sklyanin_anisotropy", cfg, 1e-9);
    for (int i = 0; i < cfg.samples; ++i) {
        const SquareMatrix s = random_matrix(2, rng);
        SquareMatrix sum = SquareMatrix::Zero(2, 2);
        for (int k = 1; k <= 3; ++k) {
            const cplx sk = (s * sigma(k)).trace() / 2.0;
            sum += fam.lattice_wp(idx_of_k[k]) * sk * sigma(k);
        }
        aniso.add({}, sup_norm(SquareMatrix(comm_m(s, fam.j_map(s)) + comm_m(s, sum))));
    }

    // T = [S, dS]/(4 lambda^2) with lambda = c/2 inverts the exchange bracket
    Accumulator exchange("sklyanin_exchange_matrix", cfg, 1e-9);
    for (int i = 0; i < cfg.samples; ++i) {
        const SpinField field = make_rank_one_field(2, 32, cfg.c, rng);
        const std::vector<SquareMatrix> ds = spectral_derivative(field.values, 1);
        const cplx lambda = field.c / 2.0;
        double worst = 0.0;
        for (int j = 0; j < field.M; ++j) {
            const SquareMatrix t = comm_m(field.values[j], ds[j]) / (4.0 * lambda * lambda);
            worst = std::max(worst,
                             sup_norm(SquareMatrix(comm_m(field.values[j], t) - ds[j])));
        }
        exchange.add({}, worst);
    }

    return {coeffs.finish(), constant.finish(), dict.finish(), aniso.finish(),
            exchange.finish()};
}

int emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 0;
    }
    write_text_file(cfg.output, text);
    return 0;
}

int run_evolve(const RunConfig& cfg) {
    EllipticContext ctx{cfg.N, cfg.tau};
    RMatrixFamily fam(ctx);
    Rng rng(cfg.seed);
    SpinField field = make_rank_one_field(cfg.N, cfg.M, cfg.c, rng);

    EvolutionConfig ecfg;
    ecfg.dt = cfg.dt;
    ecfg.t_end = cfg.t_end;
    ecfg.diagnostics_cadence = 10;
    ecfg.zs_probe = cplx(0.23, 0.11);
    if (const auto warn = stability_warning(field, ecfg))
        std::fprintf(stderr, "warning: %s\n", warn->c_str());

    std::vector<DiagnosticsRecord> records;
    records.push_back(conserved_report(field, fam, ecfg.zs_probe));
    const long steps = std::lround(cfg.t_end / cfg.dt);
    int code = 0;
    std::string diagnostic;
    for (long i = 1; i <= steps; ++i) {
        try {
            field = step(field, ecfg, fam);
        } catch (const NumericalAbort& e) {
            code = 3;
            diagnostic = e.what();
            break;
        } catch (const ConvergenceError& e) {
            code = 3;
            diagnostic = e.what();
            break;
        }
        if (i % ecfg.diagnostics_cadence == 0 || i == steps)
            records.push_back(conserved_report(field, fam, ecfg.zs_probe));
    }
    emit(cfg, render_diagnostics(records));
    if (code != 0)
        std::fprintf(stderr, "evolve: aborted after %zu records: %s\n", records.size(),
                     diagnostic.c_str());
    return code;
}

int run_checks_command(const RunConfig& cfg) {
    std::vector<CheckReport> checks;
    if (cfg.command == "verify") checks = run_verify(cfg);
    else if (cfg.command == "top") checks = run_top(cfg);
    else if (cfg.command == "hamiltonian-check") checks = run_hamiltonian_check(cfg);
    else checks = run_sklyanin(cfg);

    emit(cfg, render_report(cfg, checks));
    int failures = 0;
    for (const CheckReport& rep : checks)
        if (!rep.pass) {
            ++failures;
            std::fprintf(stderr, "check failed: %s (max residual %.3e, tolerance %.3e)\n",
                         rep.name.c_str(), rep.max_residual, rep.tolerance);
        }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // Pass 1: an optional JSON config file supplies defaults, flags override.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            std::string path;
            if (arg == "--config" && i + 1 < argc) path = argv[i + 1];
            else if (arg.rfind("--config=", 0) == 0) path = arg.substr(9);
            if (!path.empty()) {
                std::ifstream in(path);
                if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
                Json parsed;
                try {
                    parsed = Json::parse(in);
                } catch (const Json::parse_error& e) {
                    throw std::invalid_argument("config: " + std::string(e.what()));
                }
                cfg = config_from_json(parsed);
            }
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    CLI::App app{"Elliptic R-matrix identity suite and constrained field evolution"};
    std::string config_path;
    double tau_re = cfg.tau.real(), tau_im = cfg.tau.imag();
    double c_re = cfg.c.real(), c_im = cfg.c.imag();
    app.add_option("command", cfg.command,
                   "verify | top | evolve | hamiltonian-check | sklyanin");
    app.add_option("--N", cfg.N, "matrix size");
    app.add_option("--tau-re", tau_re, "Re of the modular parameter");
    app.add_option("--tau-im", tau_im, "Im of the modular parameter (positive)");
    app.add_option("--c-re", c_re, "Re of the constraint constant");
    app.add_option("--c-im", c_im, "Im of the constraint constant");
    app.add_option("--seed", cfg.seed, "generator seed");
    app.add_option("--samples", cfg.samples, "sample count per check");
    app.add_option("--tolerance", cfg.tolerance, "pass threshold for verify/top");
    app.add_option("--M", cfg.M, "grid size (power of two)");
    app.add_option("--dt", cfg.dt, "time step");
    app.add_option("--t-end", cfg.t_end, "integration horizon");
    app.add_option("--output", cfg.output, "output file (default: stdout)");
    app.add_option("--format", cfg.format, "json | csv (default per command)");
    app.add_option("--workers", cfg.workers, "concurrent check evaluations");
    app.add_option("--config", config_path, "JSON file supplying any field; flags override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    cfg.tau = cplx(tau_re, tau_im);
    cfg.c = cplx(c_re, c_im);

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        if (cfg.command == "evolve") return run_evolve(cfg);
        return run_checks_command(cfg);
    } catch (const NumericalAbort& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const NearPoleError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const PrecisionError& e) {
        std::fprintf(stderr, "numerical abort: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
