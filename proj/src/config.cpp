#include "kamnf/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kamnf/serialize.hpp"

namespace kamnf {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& text, const json::exception& e) {
    // translate the byte offset in nlohmann's message into a line number
    std::string msg = e.what();
    const std::string key = "at byte ";
    std::size_t pos = msg.find(key);
    if (pos != std::string::npos) {
        const std::size_t byte = std::strtoull(msg.c_str() + pos + key.size(), nullptr, 10);
        std::size_t line = 1;
        for (std::size_t i = 0; i < byte && i < text.size(); ++i)
            if (text[i] == '\n') ++line;
        msg += " (line " + std::to_string(line) + ")";
    }
    throw ConfigError(msg);
}

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw ConfigError("unknown config key \"" + key + "\" in " + where);
}

template <typename T>
void load(const json& obj, const char* key, T& into) {
    if (obj.contains(key)) into = obj.at(key).get<T>();
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig config_from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        parse_fail(text, e);
    }
    RunConfig cfg;
    try {
        require_keys(obj,
                     {"theta", "rho0", "r", "mu0", "eps", "eps0_scale", "gamma", "C_theta",
                      "mode_cap", "degree_cap", "steps", "rng_seed", "f_profile", "f_path",
                      "omega_spec", "invert_frequencies", "tolerances"},
                     "top level");
        load(obj, "theta", cfg.theta);
        load(obj, "rho0", cfg.rho0);
        load(obj, "r", cfg.r);
        load(obj, "mu0", cfg.mu0);
        load(obj, "eps", cfg.eps);
        load(obj, "eps0_scale", cfg.eps0_scale);
        load(obj, "gamma", cfg.gamma);
        load(obj, "C_theta", cfg.C_theta);
        load(obj, "mode_cap", cfg.mode_cap);
        load(obj, "degree_cap", cfg.degree_cap);
        load(obj, "steps", cfg.steps);
        load(obj, "rng_seed", cfg.rng_seed);
        load(obj, "invert_frequencies", cfg.invert_frequencies);
        if (obj.contains("f_profile")) {
            const json& f = obj.at("f_profile");
            require_keys(f, {"mu_f", "C"}, "f_profile");
            load(f, "mu_f", cfg.f_mu_f);
            load(f, "C", cfg.f_C);
        }
        if (obj.contains("f_path")) cfg.f_path = obj.at("f_path").get<std::string>();
        if (obj.contains("omega_spec")) {
            const json& o = obj.at("omega_spec");
            require_keys(o, {"type", "amplitude", "max_tries", "support_cap", "coeff_cap",
                             "values"},
                         "omega_spec");
            load(o, "type", cfg.omega_type);
            load(o, "amplitude", cfg.omega_amplitude);
            load(o, "max_tries", cfg.omega_max_tries);
            load(o, "support_cap", cfg.dioph_support_cap);
            load(o, "coeff_cap", cfg.dioph_coeff_cap);
            if (o.contains("values"))
                for (const auto& rec : o.at("values"))
                    cfg.omega_values.push_back({rec.at(0).get<int>(), rec.at(1).get<double>()});
        }
        if (obj.contains("tolerances")) {
            const json& t = obj.at("tolerances");
            require_keys(t,
                         {"lie_tol_factor", "lie_order_cap", "drop_tol", "divisor_floor_abs",
                          "picard_tol", "picard_max_outer", "integrator_tol", "flow_tol",
                          "check_T"},
                         "tolerances");
            load(t, "lie_tol_factor", cfg.lie_tol_factor);
            load(t, "lie_order_cap", cfg.lie_order_cap);
            load(t, "drop_tol", cfg.drop_tol);
            load(t, "divisor_floor_abs", cfg.divisor_floor_abs);
            load(t, "picard_tol", cfg.picard_tol);
            load(t, "picard_max_outer", cfg.picard_max_outer);
            load(t, "integrator_tol", cfg.integrator_tol);
            load(t, "flow_tol", cfg.flow_tol);
            load(t, "check_T", cfg.check_T);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }

    // range validation
    if (!(cfg.theta > 0 && cfg.theta < 1))
        throw ConfigError("theta must lie in (0,1), got " + std::to_string(cfg.theta));
    if (cfg.eps < 0) throw ConfigError("eps must be >= 0");
    if (cfg.mode_cap < 1) throw ConfigError("mode_cap must be >= 1");
    if (cfg.degree_cap < 1) throw ConfigError("degree_cap must be >= 1");
    if (cfg.steps < 0) throw ConfigError("steps must be >= 0");
    const double two_minus = 2.0 - std::pow(2.0, cfg.theta);
    if (!(cfg.r > (1.0 / two_minus + 3.0) * cfg.rho0))
        throw ConfigError("need r > (1/(2-2^theta)+3) rho0 = " +
                          std::to_string((1.0 / two_minus + 3.0) * cfg.rho0));
    if (!(cfg.mu0 > 0) || !(cfg.rho0 > 0) || !(cfg.gamma > 0))
        throw ConfigError("rho0, mu0, gamma must be positive");
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    ordered_json o;
    o["theta"] = cfg.theta;
    o["rho0"] = cfg.rho0;
    o["r"] = cfg.r;
    o["mu0"] = cfg.mu0;
    o["eps"] = cfg.eps;
    o["eps0_scale"] = cfg.eps0_scale;
    o["gamma"] = cfg.gamma;
    o["C_theta"] = cfg.C_theta;
    o["mode_cap"] = cfg.mode_cap;
    o["degree_cap"] = cfg.degree_cap;
    o["steps"] = cfg.steps;
    o["rng_seed"] = cfg.rng_seed;
    o["invert_frequencies"] = cfg.invert_frequencies;
    o["f_profile"] = {{"mu_f", cfg.f_mu_f}, {"C", cfg.f_C}};
    o["omega_spec"] = {{"type", cfg.omega_type},
                       {"amplitude", cfg.omega_amplitude},
                       {"max_tries", cfg.omega_max_tries},
                       {"support_cap", cfg.dioph_support_cap},
                       {"coeff_cap", cfg.dioph_coeff_cap}};
    o["tolerances"] = {{"lie_tol_factor", cfg.lie_tol_factor},
                       {"lie_order_cap", cfg.lie_order_cap},
                       {"drop_tol", cfg.drop_tol},
                       {"divisor_floor_abs", cfg.divisor_floor_abs},
                       {"picard_tol", cfg.picard_tol},
                       {"picard_max_outer", cfg.picard_max_outer},
                       {"integrator_tol", cfg.integrator_tol},
                       {"flow_tol", cfg.flow_tol},
                       {"check_T", cfg.check_T}};
    return o.dump(1);
}

RunInputs make_run_inputs(const RunConfig& cfg) {
    RunInputs in;
    in.schedule.rho0 = cfg.rho0;
    in.schedule.r = cfg.r;
    in.schedule.mu0 = cfg.mu0;
    in.schedule.theta = cfg.theta;
    in.schedule.eps0 = cfg.eps0();
    in.schedule.gamma = cfg.gamma;
    in.schedule.C_theta = cfg.C_theta;
    in.eps = cfg.eps;
    in.mode_cap = cfg.mode_cap;
    in.degree_cap = cfg.degree_cap;
    in.steps = cfg.steps;
    in.invert_frequencies = cfg.invert_frequencies;
    in.dioph_support_cap = cfg.dioph_support_cap;
    in.dioph_coeff_cap = cfg.dioph_coeff_cap;
    in.engine.lie_tol_factor = cfg.lie_tol_factor;
    in.engine.lie_order_cap = cfg.lie_order_cap;
    in.engine.drop_tol = cfg.drop_tol;
    in.engine.divisor_floor_abs = cfg.divisor_floor_abs;
    in.picard.tol = cfg.picard_tol;
    in.picard.max_outer = cfg.picard_max_outer;

    if (cfg.f_path) {
        std::ifstream is(*cfg.f_path);
        if (!is) throw ConfigError("cannot open f_path: " + *cfg.f_path);
        std::stringstream ss;
        ss << is.rdbuf();
        in.f = profile_from_json(ss.str());
    } else {
        // one probe-cap wider than the seed needs, for the certificate
        in.f = gevrey_sample(cfg.f_mu_f, cfg.theta, cfg.f_C, 6 * (cfg.mode_cap + 1),
                             cfg.rng_seed);
    }

    const int freq_cap = std::max(cfg.mode_cap, cfg.dioph_support_cap);
    if (cfg.omega_type == "sample") {
        in.omega = sample_omega(cfg.rng_seed, cfg.omega_amplitude, freq_cap, cfg.gamma,
                                cfg.dioph_support_cap, cfg.dioph_coeff_cap, cfg.omega_max_tries);
        in.check_diophantine = true;
    } else if (cfg.omega_type == "explicit") {
        FrequencyVector omega(freq_cap, cfg.gamma);
        for (const auto& [n, v] : cfg.omega_values) omega.set_vtilde(n, v);
        in.omega = omega;
        in.check_diophantine = true;
    } else {
        throw ConfigError("omega_spec.type must be \"sample\" or \"explicit\", got \"" +
                          cfg.omega_type + "\"");
    }
    return in;
}

TorusCheckOptions make_torus_options(const RunConfig& cfg) {
    TorusCheckOptions t;
    t.T = cfg.check_T;
    t.integrator_tol = cfg.integrator_tol;
    t.flow_tol = cfg.flow_tol;
    return t;
}

}  // namespace kamnf
