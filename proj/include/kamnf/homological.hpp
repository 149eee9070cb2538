#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kamnf/hamiltonian.hpp"

namespace kamnf {

// Audit record for one small divisor, serialized to CSV as
// (step, monomial_id, divisor, floor, resonant).
struct DivisorReport {
    std::string monomial_id;
    double divisor = 0;
    double floor = 0;
    bool resonant = false;
};

// sum (k_n - kp_n)(n^2 + vtilde_n), with the raw n^2 (no weight convention).
double divisor(const ExponentVector& k, const ExponentVector& kp, const FrequencyVector& freq);

// prod over supported modes of 1/(1 + (k_n-kp_n)^2 |n|^4); the right-hand
// side of the truncated Diophantine lower bound.
double product_lower_bound(const ExponentVector& k, const ExponentVector& kp, int mode_cap);

struct DiophantineResult {
    bool ok = true;
    bool degenerate_gamma = false;  // gamma == 0: vacuous bound
    double worst_margin = 0;        // min over l of ||sum l v|| - gamma * product
    std::string worst_l;
    std::uint64_t vectors_checked = 0;
};

// Verifies dist(sum l_n vtilde_n, Z) >= gamma * prod 1/(1+l_n^2 |n|^4) over
// all nonzero integer vectors with support in [-support_cap, support_cap]
// and |l_n| <= coeff_cap. Throws EnumerationTooLarge when the lattice
// exceeds `budget` points.
DiophantineResult diophantine_check(const FrequencyVector& vt, double gamma, int support_cap,
                                    int coeff_cap, std::uint64_t budget = 200000000ull);

struct SolveResult {
    Hamiltonian generator;
    std::vector<DivisorReport> reports;
    double min_abs_divisor = 0;
};

// Solves {N, F} + R0_nr + R1_nr = 0 termwise for the nonresonant inputs.
// With this project's 1/(2i) bracket normalization the coefficient that
// cancels B exactly is F = 2i B / divisor (the classical solution B/divisor
// times the bracket's own constant; |F| differs only by the factor 2).
// Every used divisor must clear max(divisor_floor, (gamma/2) * product
// lower bound) in magnitude or SmallDivisorViolation is thrown. Terms with
// k == kp raise ResonantLeak.
SolveResult solve(const Hamiltonian& r0_nr, const Hamiltonian& r1_nr, const FrequencyVector& freq,
                  double divisor_floor);

std::string divisor_reports_csv(const std::vector<DivisorReport>& reports, int step);

}  // namespace kamnf
