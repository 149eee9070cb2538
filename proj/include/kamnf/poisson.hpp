#pragma once

#include <array>
#include <vector>

#include "kamnf/hamiltonian.hpp"

namespace kamnf {

// Caps and valuation used when bracket/Lie outputs are truncated: dropped
// terms are valued with their norm weight at `ledger_weights` and summed
// into the tail ledger, never lost silently.
struct BracketOptions {
    double drop_tol = 1e-30;
    NormWeights ledger_weights{0.05, 2.0, 0.5};
};

struct BracketResult {
    Hamiltonian value;
    std::array<double, 3> tail_norm_by_class{0, 0, 0};

    double tail_total() const {
        return tail_norm_by_class[0] + tail_norm_by_class[1] + tail_norm_by_class[2];
    }
};

// {H1, H2} with the 1/(2i) normalization: the coefficient of the output
// monomial is (1/2i) sum_j (k_j K'_j - k'_j K_j) b B over all ways the two
// input monomials combine at a shared mode j. Inputs must be plain; outputs
// beyond the caps of H1 land in the tail ledger. Momentum is additive on
// every retained term.
BracketResult bracket(const Hamiltonian& h1, const Hamiltonian& h2, const BracketOptions& opt);

// Taylor composition H o Phi_F = sum_{n>=0} H^(n)/n!, H^(n) = {H^(n-1), F},
// truncated at the first order whose term norm (at ledger_weights) drops
// below tol. The unsummed tail is estimated by geometric extrapolation of
// the last two term norms and added to the ledger together with all bracket
// truncation mass. Throws NoDecay when term norms grow for three
// consecutive orders.
BracketResult lie_transform(const Hamiltonian& h, const Hamiltonian& f, const BracketOptions& opt,
                            double tol, int order_cap = 12, int* orders_used = nullptr);

// Exact polynomial derivative dH/dq_j evaluated at q (plain H only).
cplx gradient(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap,
              const TorusSpec& I0, Mode j);

// dH/dqbar_j, the partner derivative (used by the vector field).
cplx gradient_bar(const Hamiltonian& h, const std::vector<cplx>& q, int point_cap,
                  const TorusSpec& I0, Mode j);

// qdot_n = i dH/dqbar_n for H = N + R, all J factors expanded. Returns the
// velocity of q_n for |n| <= point_cap.
std::vector<cplx> vector_field(const NormalForm& nf, const Hamiltonian& r,
                               const std::vector<cplx>& q, int point_cap, const TorusSpec& I0);

}  // namespace kamnf
