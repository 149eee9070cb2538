#pragma once

#include <string>
#include <vector>

#include "kamnf/errors.hpp"

namespace kamnf {

// Iteration parameters. Steps are indexed from s = 1 (delta_0 = rho/0^2 is
// undefined); rho_1 = rho0 and mu_1 = mu0, the recursions
//   delta_s = rho0/s^2, rho_{s+1} = rho_s + 3 delta_s, mu_{s+1} = mu_s - 6 delta_s
// apply for indices below the queried step. eps_s = eps0^{(3/2)^s} is the
// exit target of step s (the entry size of step s is eps_{s-1}).
struct Schedule {
    double rho0 = 0.05;
    double r = 1.0;
    double mu0 = 2.0;
    double theta = 0.5;
    double eps0 = 1e-8;
    double gamma = 1e-3;
    double C_theta = 1.0;
    double eta0 = 0.5;  // 1 - sup |omega_n|, set by the engine after sampling
};

struct StepParams {
    int s = 1;
    double delta = 0;
    double rho = 0;        // entry weight rho_s
    double mu = 0;         // entry weight mu_s
    double rho_next = 0;   // exit weight rho_{s+1}
    double mu_next = 0;    // exit weight mu_{s+1}
    double eps_entry = 0;  // eps_{s-1}
    double eps_target = 0; // eps_s
    double lambda = 0;
    double eta = 0;        // eta_s
    double d_entry = 0;    // d_{s-1}
    double d_exit = 0;     // d_s
};

// Validates rho_s < r/2 and mu_s > 0 through the exit weights of step s;
// throws ScheduleViolation otherwise.
StepParams schedule_at(const Schedule& sch, int s);

double eps_at(const Schedule& sch, int s);  // eps0^{(3/2)^s}, eps_at(0) = eps0

// Right-hand side of the elimination criterion: nonresonant monomials with
// sum_{i>=3}(ni*)^theta + m*^theta above this are deferred to the next step,
// their weight already certifies a contribution below the step target.
double truncation_threshold(const Schedule& sch, int s);

// B_s = 3*6^{theta/2} s^2 / ((2-2^theta) rho0) * ln(1/eps_s).
double mode_cutoff_B(const Schedule& sch, int s);

// N_s = ceil(B_s^{2/theta}) clamped to the global mode cap; the Diophantine
// condition only needs modes up to N_s.
struct ModeCutoff {
    double unclamped = 0;
    int effective = 0;
    bool clamped = false;
};
ModeCutoff mode_cutoff(const Schedule& sch, int s, int global_mode_cap);

// Hard hypothesis r > (1/(2-2^theta)+3) rho0 plus soft warnings for the
// set-up inequalities the convergence-section defaults do not satisfy.
std::vector<std::string> validate_schedule(const Schedule& sch);

}  // namespace kamnf
