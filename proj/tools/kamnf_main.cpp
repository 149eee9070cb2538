// kamnf — normal-form engine for the quintic lattice NLS with convolution
// potential: seed construction, KAM iteration, lemma testers, and the
// ODE-based torus verification.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kamnf/config.hpp"
#include "kamnf/lemmas.hpp"
#include "kamnf/serialize.hpp"

namespace fs = std::filesystem;
using namespace kamnf;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir;

    RunConfig load(const std::vector<std::pair<std::string, double>>& overrides,
                   const std::vector<std::pair<std::string, std::string>>& raw) const {
        RunConfig cfg =
            config_path.empty() ? default_config() : config_from_json(read_file(config_path));
        nlohmann::json patch = nlohmann::json::parse(config_to_json(cfg));
        for (const auto& [key, value] : overrides) patch[key] = value;
        for (const auto& [key, value] : raw) {
            if (value == "true" || value == "false")
                patch[key] = (value == "true");
            else
                patch[key] = std::stoll(value);
        }
        return config_from_json(patch.dump());
    }

    fs::path outdir() const {
        std::string dir = out_dir;
        if (dir.empty()) {
            const char* env = std::getenv("KAMNF_OUT_DIR");
            dir = env ? env : ".";
        }
        fs::create_directories(dir);
        return dir;
    }
};

void add_overrides(CLI::App* cmd, std::vector<std::pair<std::string, double>>& dbl,
                   std::vector<std::pair<std::string, std::string>>& raw) {
    static const char* dbl_keys[] = {"theta", "rho0", "r",       "mu0",
                                     "eps",   "gamma", "C_theta", "eps0_scale"};
    static const char* int_keys[] = {"mode_cap", "degree_cap", "steps", "rng_seed",
                                     "invert_frequencies"};
    for (const char* key : dbl_keys) {
        auto cb = [&dbl, key](double v) { dbl.push_back({key, v}); };
        cmd->add_option_function<double>(std::string("--") + key, cb);
    }
    for (const char* key : int_keys) {
        auto cb = [&raw, key](std::string v) { raw.push_back({key, v}); };
        cmd->add_option_function<std::string>(std::string("--") + key, cb);
    }
}

int cmd_seed(const CommonOpts& common, const RunConfig& cfg) {
    RunInputs in = make_run_inputs(cfg);
    FrequencyVector potential(in.omega.cap(), in.omega.gamma());
    for (Mode n = -in.omega.cap(); n <= in.omega.cap(); ++n)
        potential.set_vtilde(n, in.omega.vtilde(n));
    Seed seed = build_seed(in.f, potential, in.eps, in.mode_cap, in.degree_cap);
    const NormWeights w{cfg.rho0, cfg.mu0, cfg.theta};
    const fs::path out = common.outdir();
    write_file(out / "seed.json", seed_to_json(seed, in.f));
    std::cout << "seed: " << seed.r.n_terms() << " terms, mode cap " << in.mode_cap << "\n";
    if (!seed.r.empty()) {
        const SeedCertificate cert = seed_norm_certificate(seed.r, w, in.f, in.eps);
        std::cout << "||R||_{rho,mu} = " << cert.value << " (cap probe "
                  << cert.probe_value << ", change " << 100 * cert.relative_change << "%)\n"
                  << "max monomial: " << cert.max_monomial.id() << "\n";
    }
    std::cout << "wrote " << (out / "seed.json").string() << "\n";
    return 0;
}

int cmd_run(const CommonOpts& common, const RunConfig& cfg, bool probe_jac) {
    RunInputs in = make_run_inputs(cfg);
    RunResult result = run_pipeline(in);
    const fs::path out = common.outdir();
    write_file(out / "telemetry.csv", telemetry_csv(result.state));
    write_file(out / "final_state.json", final_state_to_json(result));
    write_file(out / "divisors.csv",
               "step,monomial_id,divisor,floor,resonant\n" +
                   divisor_reports_csv(result.state.divisor_log, 0));
    write_file(out / "contraction.txt", contraction_table(result.state));

    for (const auto& warning : result.warnings) std::cout << "warning: " << warning << "\n";
    std::cout << "seed norms: R0 " << result.seed_norms.r0 << "  R1 " << result.seed_norms.r1
              << "  R2 " << result.seed_norms.r2 << "\n";
    if (result.dioph)
        std::cout << "diophantine: " << (result.dioph->ok ? "ok" : "VIOLATED") << " (worst margin "
                  << result.dioph->worst_margin << ", " << result.dioph->vectors_checked
                  << " vectors)\n";
    std::cout << contraction_table(result.state);
    std::cout << "final ||R2||+ = " << result.final_r2_plus << " <= " << result.final_r2_allowed
              << "\n";
    if (cfg.invert_frequencies)
        std::cout << "picard: " << result.picard_iterations << " iterations, residual "
                  << result.picard_residual << "\n";
    if (probe_jac) {
        const double dev = probe_jacobian(in);
        std::cout << "jacobian probe: ||dVt/dV - I|| over probe columns = " << dev << "\n";
    }
    std::cout << "wrote telemetry.csv, final_state.json, divisors.csv, contraction.txt in "
              << out.string() << "\n";
    return 0;
}

int cmd_verify_lemmas(const CommonOpts& common, const RunConfig& cfg, std::size_t samples,
                      std::uint64_t seed) {
    (void)common;
    const std::vector<double> thetas{0.3, 0.5, 0.8};
    int violations = 0;

    H1SuiteReport h1r = lemma_h1_random_suite(samples, thetas, 8, 12, seed);
    std::cout << "rearrangement inequality, randomized: " << h1r.tested << " cases, "
              << h1r.violations << " violations, min margin " << h1r.min_margin << "\n";
    violations += static_cast<int>(h1r.violations);

    H1SuiteReport h1e = lemma_h1_exhaustive_suite(4, 3, thetas);
    std::cout << "rearrangement inequality, exhaustive deg<=4 |n|<=3: " << h1e.tested
              << " cases, " << h1e.violations << " violations, min margin " << h1e.min_margin
              << "\n";
    violations += static_cast<int>(h1e.violations);

    {
        // the worked example: k = {5}, kp = {2,3} at theta = 1/2
        Monomial m;
        m.k.add(5, 1);
        m.kp.add(2, 1);
        m.kp.add(3, 1);
        const LemmaH1Sides sides = lemma_h1_sides(m, 0.5);
        std::cout << "worked case " << m.id() << ": lhs " << sides.lhs << " rhs " << sides.rhs
                  << " margin " << sides.lhs - sides.rhs << "\n";
    }

    for (double theta : thetas) {
        A1SuiteReport a1 = lemma_a1_suite(samples / 10, theta, 8, 12, seed + 1);
        std::cout << "divisor-counting inequality, theta=" << theta << ": " << a1.tested
                  << " cases, " << a1.violations << " violations, min margin " << a1.min_margin
                  << ", excluded boundary patterns " << a1.excluded << "\n";
        if (!a1.boundary_cases.empty()) {
            std::cout << "  note: the stated inequality fails on " << a1.boundary_cases.size()
                      << " boundary patterns (tiny two-entry systems); these are reported, "
                         "not sampled:\n";
            for (std::size_t i = 0; i < std::min<std::size_t>(a1.boundary_cases.size(), 4); ++i)
                std::cout << "    " << a1.boundary_cases[i] << "\n";
        }
        violations += static_cast<int>(a1.violations);
    }

    std::cout << (violations == 0 ? "all lemma suites clean\n"
                                  : "LEMMA VIOLATIONS FOUND\n");
    return violations == 0 ? 0 : 1;
}

int cmd_check_torus(const CommonOpts& common, const RunConfig& cfg) {
    RunInputs in = make_run_inputs(cfg);
    RunResult result = run_pipeline(in);
    TorusCheckOptions topt = make_torus_options(cfg);
    TorusCheckResult check = check_torus(result, in.f, in.eps, topt);

    const fs::path out = common.outdir();
    write_file(out / "torus_transformed.csv",
               trajectory_csv(check.transformed, result.state.mode_cap));
    write_file(out / "torus_untransformed.csv",
               trajectory_csv(check.untransformed, result.state.mode_cap));

    std::cout << "transformed:   action drift " << check.transformed.action_drift
              << ", energy rel drift " << check.transformed.energy_rel_drift << ", steps "
              << check.transformed.stats.steps << "\n";
    std::cout << "untransformed: action drift " << check.untransformed.action_drift
              << ", energy rel drift " << check.untransformed.energy_rel_drift << ", steps "
              << check.untransformed.stats.steps << "\n";
    std::cout << "energy ok: " << check.energy_ok << "  pair ok: " << check.drift_pair_ok
              << "  abs ok: " << check.drift_abs_ok << "  window ok: " << check.window_ok
              << "\n";
    const bool ok = check.energy_ok && check.drift_pair_ok && check.drift_abs_ok &&
                    check.window_ok;
    std::cout << (ok ? "torus check passed\n" : "TORUS CHECK FAILED\n");
    return ok ? 0 : 1;
}

int cmd_report(const CommonOpts& common, const std::string& telemetry_path) {
    const std::string text =
        read_file(telemetry_path.empty() ? (common.outdir() / "telemetry.csv").string()
                                         : telemetry_path);
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);  // header
    std::cout << "  s        eps_s     ||R0||+   check\n";
    std::ostringstream plot;
    plot << "step,eps_target,norm_R0_plus,norm_R1_plus,norm_R2_plus\n";
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 8) continue;
        const int s = std::stoi(cells[0]);
        const double eps = std::stod(cells[4]);
        const double r0 = std::stod(cells[5]);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%3d %12.3e %11.3e   %s\n", s, eps, r0,
                      r0 <= eps ? "pass" : "FAIL");
        std::cout << buf;
        plot << cells[0] << ',' << cells[4] << ',' << cells[5] << ',' << cells[6] << ','
             << cells[7] << '\n';
    }
    write_file(common.outdir() / "report.csv", plot.str());
    std::cout << "wrote " << (common.outdir() / "report.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"normal-form engine for the quintic lattice NLS"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path, "config JSON path")->envname("KAMNF_CONFIG");
    app.add_option("--out", common.out_dir, "output directory (env KAMNF_OUT_DIR)");

    std::vector<std::pair<std::string, double>> dbl_overrides;
    std::vector<std::pair<std::string, std::string>> raw_overrides;

    auto* seed_cmd = app.add_subcommand("seed", "materialize and serialize the seed");
    add_overrides(seed_cmd, dbl_overrides, raw_overrides);

    auto* run_cmd = app.add_subcommand("run", "execute the KAM iteration");
    bool probe_jac = false;
    run_cmd->add_flag("--probe-jacobian", probe_jac,
                      "finite-difference check of the frequency-map Jacobian");
    add_overrides(run_cmd, dbl_overrides, raw_overrides);

    auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "brute-force lemma testers");
    std::size_t samples = 100000;
    std::uint64_t lemma_seed = 20240817;
    lemmas_cmd->add_option("--samples", samples, "randomized sample count");
    lemmas_cmd->add_option("--seed", lemma_seed, "RNG seed");

    auto* torus_cmd = app.add_subcommand("check-torus", "ODE verification of the torus");
    add_overrides(torus_cmd, dbl_overrides, raw_overrides);

    auto* report_cmd = app.add_subcommand("report", "render telemetry into a table");
    std::string telemetry_path;
    report_cmd->add_option("--telemetry", telemetry_path, "telemetry CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = common.load(dbl_overrides, raw_overrides);
        if (seed_cmd->parsed()) return cmd_seed(common, cfg);
        if (run_cmd->parsed()) return cmd_run(common, cfg, probe_jac);
        if (lemmas_cmd->parsed()) return cmd_verify_lemmas(common, cfg, samples, lemma_seed);
        if (torus_cmd->parsed()) return cmd_check_torus(common, cfg);
        if (report_cmd->parsed()) return cmd_report(common, telemetry_path);
    } catch (const Error& e) {
        nlohmann::ordered_json failure;
        failure["status"] = "failed";
        failure["error"] = e.what();
        std::cerr << failure.dump(1) << "\n";
        return 2;
    }
    return 0;
}
