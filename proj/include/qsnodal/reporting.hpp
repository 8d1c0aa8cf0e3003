#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "energy.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "radial_mesh.hpp"
#include "solvers.hpp"
#include "verification.hpp"

namespace qsnodal {

inline constexpr const char* kArtifactVersion = "1.0.0";

using json = nlohmann::ordered_json;

// %.17g guarantees double round-trips through text.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace detail {
inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw BadConfig("value for '" + key + "' is not a number: '" + v + "'");
    }
}

inline long to_long(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw BadConfig("value for '" + key + "' is not an integer: '" + v + "'");
    }
}

inline std::vector<double> to_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

inline std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += format_double(xs[i]);
    }
    return out;
}
} // namespace detail

using ConfigPairs = std::vector<std::pair<std::string, std::string>>;

// Flat run configuration addressed by dotted keys.  Layering order is
// defaults < config file < environment < command-line flags; the echoed
// config always lists every key in canonical order so a record is
// self-contained.
struct SolverConfig {
    int dim = 3;
    double R = 30.0;
    int n = 6000;
    std::string nonlinearity = "builtin"; // builtin | semilinear
    double l = 1.0;
    std::string potential = "constant"; // constant | well
    double v0 = 1.0;
    std::string mode = "nonvanishing"; // nonvanishing | vanishing
    int k = 1;
    std::string sign = "plus"; // plus | minus
    std::string seed = "eigen"; // eigen | gaussian
    long max_iters = 5000;
    double tol_nehari = 1e-10;
    double tol_el = 1e-6;
    double tol_radius_factor = 1e-3;
    long samples_per_sign = 10000;
    std::string out_dir = ".";
    int threads = 1;
    std::vector<double> sweep_R;
    std::vector<double> sweep_n;
    double sweep_spread_tol = 1e-2;

    void set(const std::string& key, const std::string& value) {
        using namespace detail;
        if (key == "grid.dim") dim = static_cast<int>(to_long(key, value));
        else if (key == "grid.R") R = to_double(key, value);
        else if (key == "grid.n") n = static_cast<int>(to_long(key, value));
        else if (key == "model.nonlinearity") nonlinearity = value;
        else if (key == "model.l") l = to_double(key, value);
        else if (key == "model.potential") potential = value;
        else if (key == "model.v0") v0 = to_double(key, value);
        else if (key == "solve.mode") mode = value;
        else if (key == "solve.k") k = static_cast<int>(to_long(key, value));
        else if (key == "solve.sign") sign = value;
        else if (key == "solve.seed") seed = value;
        else if (key == "solve.max_iters") max_iters = to_long(key, value);
        else if (key == "tol.nehari") tol_nehari = to_double(key, value);
        else if (key == "tol.el") tol_el = to_double(key, value);
        else if (key == "tol.radius_factor") tol_radius_factor = to_double(key, value);
        else if (key == "check.samples_per_sign") samples_per_sign = to_long(key, value);
        else if (key == "run.out_dir") out_dir = value;
        else if (key == "run.threads") threads = static_cast<int>(to_long(key, value));
        else if (key == "sweep.R") sweep_R = to_double_list(key, value);
        else if (key == "sweep.n") sweep_n = to_double_list(key, value);
        else if (key == "sweep.spread_tol") sweep_spread_tol = to_double(key, value);
        else throw BadConfig("unknown configuration key '" + key + "'");
    }

    // Complete canonical key/value listing (the config echo).
    ConfigPairs to_pairs() const {
        using detail::join_doubles;
        return {
            {"grid.dim", std::to_string(dim)},
            {"grid.R", format_double(R)},
            {"grid.n", std::to_string(n)},
            {"model.nonlinearity", nonlinearity},
            {"model.l", format_double(l)},
            {"model.potential", potential},
            {"model.v0", format_double(v0)},
            {"solve.mode", mode},
            {"solve.k", std::to_string(k)},
            {"solve.sign", sign},
            {"solve.seed", seed},
            {"solve.max_iters", std::to_string(max_iters)},
            {"tol.nehari", format_double(tol_nehari)},
            {"tol.el", format_double(tol_el)},
            {"tol.radius_factor", format_double(tol_radius_factor)},
            {"check.samples_per_sign", std::to_string(samples_per_sign)},
            {"run.out_dir", out_dir},
            {"run.threads", std::to_string(threads)},
            {"sweep.R", join_doubles(sweep_R)},
            {"sweep.n", join_doubles(sweep_n)},
            {"sweep.spread_tol", format_double(sweep_spread_tol)},
        };
    }

    void apply(const ConfigPairs& pairs) {
        for (const auto& [key, value] : pairs) set(key, value);
    }

    // Cross-field constraints the numeric layer cannot express.
    void validate() const {
        if (dim < 3) throw BadConfig("grid.dim must be >= 3");
        if (!(R > 0.0)) throw BadConfig("grid.R must be positive");
        if (n < 16) throw BadConfig("grid.n must be >= 16");
        if (nonlinearity != "builtin" && nonlinearity != "semilinear")
            throw BadConfig("model.nonlinearity must be builtin or semilinear");
        if (!(l > 0.0)) throw BadConfig("model.l must be positive");
        if (potential != "constant" && potential != "well")
            throw BadConfig("model.potential must be constant or well");
        if (v0 < 0.0) throw BadConfig("model.v0 must be nonnegative");
        if (mode != "nonvanishing" && mode != "vanishing")
            throw BadConfig("solve.mode must be nonvanishing or vanishing");
        if (k < 0) throw BadConfig("solve.k must be >= 0");
        if (sign != "plus" && sign != "minus")
            throw BadConfig("solve.sign must be plus or minus");
        if (seed != "eigen" && seed != "gaussian")
            throw BadConfig("solve.seed must be eigen or gaussian");
        if (max_iters <= 0) throw BadConfig("solve.max_iters must be positive");
        if (!(tol_nehari > 0.0) || !(tol_el > 0.0) || !(tol_radius_factor > 0.0))
            throw BadConfig("tolerances must be positive");
        if (samples_per_sign < 0) throw BadConfig("check.samples_per_sign must be >= 0");
        if (threads < 1) throw BadConfig("run.threads must be >= 1");
        if (mode == "vanishing" && potential == "constant")
            throw BadConfig("solve.mode=vanishing requires a potential with a declared zero set "
                            "(model.potential=well)");
        if (!(sweep_spread_tol > 0.0)) throw BadConfig("sweep.spread_tol must be positive");
    }

    Nonlinearity make_nonlinearity() const {
        return nonlinearity == "semilinear" ? Nonlinearity::semilinear()
                                            : Nonlinearity::builtin(l);
    }
    Potential make_potential() const {
        return potential == "well" ? Potential::well() : Potential::constant(v0);
    }
    Mode make_mode() const {
        return mode == "vanishing" ? Mode::vanishing : Mode::nonvanishing;
    }
    SolverOptions make_options() const {
        SolverOptions o;
        o.el_tol = tol_el;
        o.max_iters = max_iters;
        o.seed = seed;
        o.radius_tol_factor = tol_radius_factor;
        return o;
    }
};

// "key = value" lines; '#' starts a comment; blank lines ignored.
inline ConfigPairs parse_config_text(const std::string& text) {
    ConfigPairs out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw BadConfig("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw BadConfig("line " + std::to_string(lineno) + ": empty key");
        out.push_back({key, value});
    }
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadConfig("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BadConfig("cannot write file: " + path);
    out << content;
}

inline ConfigPairs parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

// QSNODAL_THREADS and QSNODAL_OUTDIR sit between config file and flags.
inline ConfigPairs env_config_overrides() {
    ConfigPairs out;
    if (const char* v = std::getenv("QSNODAL_THREADS")) out.push_back({"run.threads", v});
    if (const char* v = std::getenv("QSNODAL_OUTDIR")) out.push_back({"run.out_dir", v});
    return out;
}

inline std::string render_config_echo(const SolverConfig& cfg) {
    std::string out;
    for (const auto& [key, value] : cfg.to_pairs()) out += key + " = " + value + "\n";
    return out;
}

inline json to_json(const PropertyCheck& c) {
    json j;
    j["name"] = c.name;
    j["status"] = c.status;
    j["margin"] = c.margin;
    j["samples"] = c.samples;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const PropertyReport& r) {
    json j;
    j["suite"] = r.suite;
    j["pass"] = r.pass();
    j["checks"] = json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    return j;
}

inline json to_json(const SolveReport& r) {
    json j;
    j["task"] = r.task;
    j["mode"] = r.mode;
    j["sign"] = r.sign;
    j["k"] = r.k;
    j["converged"] = r.converged;
    if (!r.failure_reason.empty()) j["failure_reason"] = r.failure_reason;
    j["energy"] = r.energy;
    j["el_residual"] = r.el_residual;
    j["nehari_residuals"] = r.nehari_residuals;
    j["node_count"] = r.node_count;
    j["partition"] = r.partition;
    j["iterations"] = r.iterations;
    j["grid"] = {{"dim", r.grid_dim},
                 {"inner", r.grid_inner},
                 {"outer", r.grid_outer},
                 {"n", r.grid_n}};
    j["l"] = r.l;
    j["theta_generalized"] = r.theta_generalized;
    j["max_energy_increase"] = r.max_energy_increase;
    auto put_opt = [&j](const char* key, double v) {
        if (std::isfinite(v)) j[key] = v;
    };
    put_opt("nodal_energy", r.nodal_energy);
    put_opt("direct_energy", r.direct_energy);
    put_opt("path_gap", r.path_gap);
    put_opt("mu", r.mu);
    put_opt("mu1", r.mu1);
    put_opt("mu2", r.mu2);
    put_opt("seed_s0", r.seed_s0);
    put_opt("seed_t0", r.seed_t0);
    if (std::isfinite(r.cert1_s_pos)) {
        j["seed_bracket_1"] = {{"s_pos", r.cert1_s_pos},
                               {"psi_pos", r.cert1_psi_pos},
                               {"s_neg", r.cert1_s_neg},
                               {"psi_neg", r.cert1_psi_neg}};
    }
    if (std::isfinite(r.cert2_s_pos)) {
        j["seed_bracket_2"] = {{"s_pos", r.cert2_s_pos},
                               {"psi_pos", r.cert2_psi_pos},
                               {"s_neg", r.cert2_s_neg},
                               {"psi_neg", r.cert2_psi_neg}};
    }
    put_opt("interface_mismatch", r.interface_mismatch);
    if (!r.piece_energies.empty()) j["piece_energies"] = r.piece_energies;
    return j;
}

// Self-contained run record: everything needed to reproduce and audit a run.
struct RunRecord {
    std::string command;
    SolverConfig config;
    double wall_clock_sec = 0.0;
    std::vector<SolveReport> solves;
    std::vector<PropertyReport> properties;
    json sweep; // null unless the sweep command filled it

    json to_json() const {
        json j;
        j["artifact_version"] = kArtifactVersion;
        j["command"] = command;
        json cfg;
        for (const auto& [key, value] : config.to_pairs()) cfg[key] = value;
        j["config"] = cfg;
        j["wall_clock_sec"] = wall_clock_sec;
        j["solves"] = json::array();
        for (const auto& s : solves) j["solves"].push_back(qsnodal::to_json(s));
        j["properties"] = json::array();
        for (const auto& p : properties) j["properties"].push_back(qsnodal::to_json(p));
        if (!sweep.is_null()) j["sweep"] = sweep;
        return j;
    }

    // Reproducibility comparisons ignore timing.
    std::string payload_without_clock() const {
        json j = to_json();
        j.erase("wall_clock_sec");
        return j.dump(2);
    }
};

// Profile table: radius, transformed-equation value u, physical value f(u).
inline std::string profile_text(const EnergyModel& em, const RadialField& v) {
    require_on(v, *em.grid);
    std::string out = "r,u,f_u\n";
    for (size_t i = 0; i < em.grid->nodes.size(); ++i) {
        out += format_double(em.grid->nodes[i]) + "," + format_double(v.values[i]) + "," +
               format_double(em.f_of(v.values[i])) + "\n";
    }
    return out;
}

struct ProfileRow {
    double r, u, f_u;
};

inline std::vector<ProfileRow> parse_profile_text(const std::string& text) {
    std::vector<ProfileRow> rows;
    std::stringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || detail::trim(line) != "r,u,f_u")
        throw BadConfig("profile header must be exactly 'r,u,f_u'");
    int lineno = 1;
    while (std::getline(ss, line)) {
        ++lineno;
        line = detail::trim(line);
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw BadConfig("profile line " + std::to_string(lineno) + ": expected 3 columns");
        rows.push_back({detail::to_double("r", detail::trim(a)),
                        detail::to_double("u", detail::trim(b)),
                        detail::to_double("f_u", detail::trim(c))});
    }
    return rows;
}

} // namespace qsnodal
