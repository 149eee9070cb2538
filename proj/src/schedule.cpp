#include "kamnf/schedule.hpp"

#include <cmath>

namespace kamnf {

double eps_at(const Schedule& sch, int s) {
    return std::pow(sch.eps0, std::pow(1.5, s));
}

StepParams schedule_at(const Schedule& sch, int s) {
    if (s < 1) throw ScheduleViolation("step index starts at 1, got " + std::to_string(s));
    StepParams p;
    p.s = s;
    p.rho = sch.rho0;
    p.mu = sch.mu0;
    p.eta = sch.eta0;
    p.d_entry = 0;
    for (int j = 1; j < s; ++j) {
        const double delta_j = sch.rho0 / (static_cast<double>(j) * j);
        p.rho += 3.0 * delta_j;
        p.mu -= 6.0 * delta_j;
        p.d_entry += 1.0 / (M_PI * M_PI * j * j);
        const double lambda_j =
            std::exp(-sch.C_theta *
                     std::pow(std::log(1.0 / eps_at(sch, j)), 4.0 / (sch.theta + 4.0)));
        p.eta *= lambda_j / 20.0;
    }
    p.delta = sch.rho0 / (static_cast<double>(s) * s);
    p.rho_next = p.rho + 3.0 * p.delta;
    p.mu_next = p.mu - 6.0 * p.delta;
    p.eps_entry = eps_at(sch, s - 1);
    p.eps_target = eps_at(sch, s);
    p.lambda =
        std::exp(-sch.C_theta * std::pow(std::log(1.0 / p.eps_target), 4.0 / (sch.theta + 4.0)));
    p.d_exit = p.d_entry + 1.0 / (M_PI * M_PI * s * s);
    if (p.rho >= 0.5 * sch.r || p.rho_next >= 0.5 * sch.r)
        throw ScheduleViolation("rho_s exceeded r/2 at step " + std::to_string(s));
    if (p.mu <= 0 || p.mu_next <= 0)
        throw ScheduleViolation("mu_s ran out at step " + std::to_string(s));
    return p;
}

double truncation_threshold(const Schedule& sch, int s) {
    const double two_minus = 2.0 - std::pow(2.0, sch.theta);
    return static_cast<double>(s) * s / (two_minus * sch.rho0) *
           std::log(1.0 / eps_at(sch, s));
}

double mode_cutoff_B(const Schedule& sch, int s) {
    const double two_minus = 2.0 - std::pow(2.0, sch.theta);
    return 3.0 * std::pow(6.0, 0.5 * sch.theta) * static_cast<double>(s) * s /
           (two_minus * sch.rho0) * std::log(1.0 / eps_at(sch, s));
}

ModeCutoff mode_cutoff(const Schedule& sch, int s, int global_mode_cap) {
    ModeCutoff mc;
    mc.unclamped = std::ceil(std::pow(mode_cutoff_B(sch, s), 2.0 / sch.theta));
    if (mc.unclamped > static_cast<double>(global_mode_cap)) {
        mc.effective = global_mode_cap;
        mc.clamped = true;
    } else {
        mc.effective = static_cast<int>(mc.unclamped);
    }
    return mc;
}

std::vector<std::string> validate_schedule(const Schedule& sch) {
    std::vector<std::string> warnings;
    const double two_minus = 2.0 - std::pow(2.0, sch.theta);
    const double h6 = (1.0 / two_minus + 3.0) * sch.rho0;
    if (!(sch.r > h6))
        throw ScheduleViolation("vector-field bound hypothesis needs r > " + std::to_string(h6) +
                                ", got r = " + std::to_string(sch.r));
    if (sch.r < 100.0 * sch.rho0 / two_minus)
        warnings.push_back("set-up prefers r >= 100 rho0/(2-2^theta) = " +
                           std::to_string(100.0 * sch.rho0 / two_minus) + ", got r = " +
                           std::to_string(sch.r) + " (convergence-section defaults)");
    if (sch.mu0 < 2.0 * sch.r)
        warnings.push_back("set-up prefers mu0 >= 2r = " + std::to_string(2.0 * sch.r) +
                           ", got mu0 = " + std::to_string(sch.mu0));
    if (!(sch.eps0 > 0) || sch.eps0 >= 1)
        throw ScheduleViolation("eps0 must lie in (0,1), got " + std::to_string(sch.eps0));
    return warnings;
}

}  // namespace kamnf
