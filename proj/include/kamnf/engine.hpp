#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kamnf/homological.hpp"
#include "kamnf/poisson.hpp"
#include "kamnf/schedule.hpp"
#include "kamnf/seed.hpp"

namespace kamnf {

struct TelemetryRow {
    int step = 0;
    double rho_s = 0, mu_s = 0, delta_s = 0, eps_s_target = 0;
    double norm_R0_plus = 0, norm_R1_plus = 0, norm_R2_plus = 0;
    std::size_t n_terms = 0, n_solved = 0, n_deferred = 0;
    double min_divisor = 0, max_freq_shift = 0;
    int lie_orders_used = 0;
    double tail_norm = 0;
};

struct EngineOptions {
    double lie_tol_factor = 1e-2;  // series tol = factor * eps_target
    int lie_order_cap = 12;
    double drop_tol = 1e-30;
    double divisor_floor_abs = 1e-12;
    bool certify = true;
    bool collect_divisor_reports = true;
};

struct KamState {
    int s = 1;  // next step to execute
    Schedule schedule;
    NormalForm normal;
    Hamiltonian r;  // classed: R0 + R1 + R2
    TorusSpec torus;
    int mode_cap = 0, degree_cap = 0;
    std::vector<Hamiltonian> generators;  // per-step F (classes 0/1)
    std::vector<TelemetryRow> telemetry;
    std::vector<DivisorReport> divisor_log;
    double dropped_constant_mass = 0;  // [R0]-type constants absorbed into N
    std::array<double, 3> cumulative_tail{0, 0, 0};
};

// Frequency shift per mode from the resonant class-1 part: for each J_n
// factor, sum_a B^(n)_{a00} prod I_m(0)^{a_m}. The imaginary defect of a
// real Hamiltonian's shift is returned for monitoring.
struct FrequencyShift {
    std::vector<double> shift;  // indexed n + mode_cap
    double max_abs = 0;
    double imag_defect = 0;
};
FrequencyShift frequency_shift(const Hamiltonian& r1_res, const TorusSpec& I0, int mode_cap);

// One Newton step: resonant projection, truncation partition, homological
// solve with divisor audit, regrouped Lie composition, reclassification via
// split, frequency update, exit certification at the (rho_{s+1}, mu_{s+1})
// weights.
void kam_step(KamState& state, const EngineOptions& opt);

// The canonical transformation realized by a stored generator is the time-1
// Hamiltonian flow of -F/2 (the 1/(2i) bracket normalization); the torus
// check integrates exactly that field.
Hamiltonian physical_generator(const Hamiltonian& f_tilde);

struct PicardOptions {
    double tol = 1e-10;
    int max_outer = 8;
};

struct RunInputs {
    Schedule schedule;
    GevreyProfile f;
    FrequencyVector omega;  // target frequencies (Diophantine)
    std::optional<std::vector<double>> potential_override;  // V values, |n| <= omega.cap
    double eps = 1e-10;
    int mode_cap = 3;
    int degree_cap = 8;
    int steps = 3;
    bool invert_frequencies = false;
    bool check_diophantine = true;
    int dioph_support_cap = 4;
    int dioph_coeff_cap = 3;
    EngineOptions engine;
    PicardOptions picard;
};

struct RunResult {
    KamState state;
    FrequencyVector omega;
    std::vector<double> v_star;  // potential in effect (post-inversion if run)
    PlusNorm seed_norms;
    SeedCertificate seed_cert;
    std::optional<DiophantineResult> dioph;
    std::vector<std::string> warnings;
    int picard_iterations = 0;
    double picard_residual = 0;
    double final_r2_plus = 0;
    double final_r2_allowed = 0;
};

// Executes the full pipeline: seed, entry certification, `steps` KAM steps,
// the final R2 bound, and (optionally) the Picard frequency inversion.
RunResult run_pipeline(const RunInputs& in);

// Rejection-samples a Diophantine frequency vector with |omega_n| <=
// amplitude, validating via diophantine_check. Deterministic in rng_seed.
FrequencyVector sample_omega(std::uint64_t rng_seed, double amplitude, int freq_cap, double gamma,
                             int support_cap, int coeff_cap, int max_tries = 64);

// Finite-difference probe of d vtilde_final / dV - I: reruns the pipeline
// with each probed mode bumped by h and returns max row sum over probed
// columns (the operator-norm analog on the probe subset).
double probe_jacobian(const RunInputs& in, double h = 1e-6);

std::string telemetry_csv(const KamState& state);
std::string contraction_table(const KamState& state);

}  // namespace kamnf
