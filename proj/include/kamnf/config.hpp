#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "kamnf/engine.hpp"
#include "kamnf/torus_check.hpp"

namespace kamnf {

// Parsed run configuration. Unknown keys, bad ranges, and schedule
// violations are reported with the offending key (and line for parse
// errors).
struct RunConfig {
    double theta = 0.5;
    double rho0 = 0.05;
    double r = 1.0;
    double mu0 = 2.0;
    double eps = 1e-10;
    double eps0_scale = 100.0;
    double gamma = 1e-3;
    double C_theta = 1.0;
    int mode_cap = 3;
    int degree_cap = 8;
    int steps = 3;
    std::uint64_t rng_seed = 20240817;
    bool invert_frequencies = false;

    // f_profile (inline sample parameters) or f_path (serialized profile)
    double f_mu_f = 2.5;
    double f_C = 1.0;
    std::optional<std::string> f_path;

    // omega_spec
    std::string omega_type = "sample";  // "sample" | "explicit"
    double omega_amplitude = 0.5;
    int omega_max_tries = 64;
    int dioph_support_cap = 4;
    int dioph_coeff_cap = 3;
    std::vector<std::pair<Mode, double>> omega_values;  // explicit entries

    // tolerances
    double lie_tol_factor = 1e-2;
    int lie_order_cap = 12;
    double drop_tol = 1e-30;
    double divisor_floor_abs = 1e-12;
    double picard_tol = 1e-10;
    int picard_max_outer = 8;
    double integrator_tol = 1e-7;
    double flow_tol = 1e-12;
    double check_T = 1000.0;

    double eps0() const { return eps0_scale * eps; }
};

RunConfig config_from_json(const std::string& text);
RunConfig default_config();
std::string config_to_json(const RunConfig& cfg);

// Materializes the profile, the target frequencies, and the engine inputs.
// The profile is sampled one probe-cap wider than the seed needs so the
// norm certificate can rebuild it.
RunInputs make_run_inputs(const RunConfig& cfg);

TorusCheckOptions make_torus_options(const RunConfig& cfg);

}  // namespace kamnf
