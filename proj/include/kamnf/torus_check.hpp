#pragma once

#include <cstdint>
#include <vector>

#include "kamnf/engine.hpp"
#include "kamnf/ode.hpp"

namespace kamnf {

struct TorusCheckOptions {
    double T = 1000.0;
    double integrator_tol = 1e-7;  // accuracy budget; energy drift must stay below 10x this
    double sample_dt = 1.0;
    std::uint64_t phase_seed = 0;  // 0: fixed golden-angle phases
    double flow_tol = 1e-12;       // generator-flow integration tolerance
    bool use_midpoint = false;     // fixed-step symplectic alternative
    double midpoint_h = 0.005;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<double>> actions;  // [sample][mode index n+cap]
    std::vector<double> energy;
    double action_drift = 0;      // sup_n sup_t ||q_n(t)|^2 - |q_n(0)|^2|
    double energy_rel_drift = 0;  // sup_t |H(t)-H(0)| / |H(0)|
    bool window_ok = true;        // 1/2 e^{-r|n|^t} <= |q_n| <= 2 e^{-r|n|^t} throughout
    double window_margin = 0;     // min distance to either window edge (log scale)
    OdeStats stats;
};

struct TorusCheckResult {
    TrajectoryRecord transformed;
    TrajectoryRecord untransformed;
    bool energy_ok = false;       // both runs within 10x integrator_tol
    bool drift_pair_ok = false;   // transformed drift <= untransformed drift
    bool drift_abs_ok = false;    // transformed drift <= 1e-4
    bool window_ok = false;
};

// Exact sextic gradient/energy via small-grid convolution (the perturbation
// is a product in physical space, so its gradient is a convolution; the
// grid is sized to make the quadrature alias-free, hence exact).
class SeedFlowEvaluator {
  public:
    SeedFlowEvaluator(const GevreyProfile& f, const std::vector<double>& omega, double eps,
                      int mode_cap);

    int cap() const { return cap_; }
    const std::vector<double>& omega() const { return omega_; }

    // dH_pert/dqbar_n for |n| <= cap (perturbation only, no linear part).
    void gradient_bar_pert(const std::vector<cplx>& q, std::vector<cplx>& out) const;

    double energy(const std::vector<cplx>& q) const;

  private:
    int cap_;
    int grid_;
    double eps_;
    std::vector<double> omega_;        // n^2 + V_n
    std::vector<cplx> f_grid_;
    std::vector<cplx> modes_grid_;     // e^{i n x_j}, row n, column j
};

// Maps a phase point through the stored transformation history: with
// `forward` the composition Phi_1 o ... o Phi_S (normal-form coordinates ->
// original coordinates, generator flows applied s = S..1 for time +1), else
// the inverse.
std::vector<cplx> apply_transformation(const std::vector<Hamiltonian>& generators,
                                       std::vector<cplx> q, const TorusSpec& I0, int mode_cap,
                                       bool forward, double flow_tol);

// Torus point in normal-form coordinates: |q_n|^2 = I_n(0) with fixed
// (seeded) phases.
std::vector<cplx> torus_point(const TorusSpec& I0, std::uint64_t phase_seed);

// Integrates the truncated lattice system from q0 and records action and
// energy drift against the window bounds of the torus spec.
TrajectoryRecord integrate_record(const SeedFlowEvaluator& flow, const std::vector<cplx>& q0,
                                  const TorusSpec& torus, const TorusCheckOptions& opt);

// The full paired check: transformed vs raw initial data.
TorusCheckResult check_torus(const RunResult& run, const GevreyProfile& f, double eps,
                             const TorusCheckOptions& opt);

std::string trajectory_csv(const TrajectoryRecord& rec, int mode_cap);

}  // namespace kamnf
