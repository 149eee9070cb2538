#pragma once

#include <string>

#include "kamnf/engine.hpp"
#include "kamnf/seed.hpp"

namespace kamnf {

// Doubles cross the JSON boundary as hexadecimal-float strings so
// round-trips are bit-exact.
std::string double_to_hex(double v);
double hex_to_double(const std::string& s);

// Hamiltonian <-> JSON: a list of records
//   {"coeff_re": hex, "coeff_im": hex, "a": [[n,e]..], "k": [..], "kp": [..], "j": [n..]}.
std::string hamiltonian_to_json(const Hamiltonian& h);
Hamiltonian hamiltonian_from_json(const std::string& text);

// GevreyProfile <-> JSON: {"theta":, "mu_f":, "C":, "coeffs": [[n, re, im]..]}.
std::string profile_to_json(const GevreyProfile& f);
GevreyProfile profile_from_json(const std::string& text);

// Full final state: frequencies, V*, the normal form, the classed
// remainder, and the generator history.
std::string final_state_to_json(const RunResult& result);

// Seed artifact: the normal part and the plain perturbation.
std::string seed_to_json(const Seed& seed, const GevreyProfile& f);

}  // namespace kamnf
