// Command-line front end: hypothesis/property checks, the solver family, and
// grid-convergence sweeps, with self-contained run records for reproduction.
//
//   qsnodal check [--model KIND] [common flags]
//   qsnodal solve (ground|signchange|nodal [--k K]|vanishing) [common flags]
//   qsnodal sweep [--R LIST] [--n LIST] [--spread-tol X] [common flags]
//
// Exit codes: 0 success, 1 numerical failure (record still written),
// 2 configuration/usage error.

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <qsnodal/reporting.hpp>

namespace fs = std::filesystem;
using namespace qsnodal;

namespace {

std::string join_command(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += " ";
        const std::string a = argv[i];
        out += (a.find(' ') == std::string::npos) ? a : "'" + a + "'";
    }
    return out;
}

// Map a command-line option straight onto a dotted config key; values are
// collected in parse order so later flags win.
void bind_key(CLI::App* cmd, const std::string& flag, std::string key, ConfigPairs* sink,
              const std::string& desc) {
    cmd->add_option(flag, desc)->each([key = std::move(key), sink](const std::string& v) {
        sink->push_back({key, v});
    });
}

void bind_common(CLI::App* cmd, std::string* config_file, ConfigPairs* sink) {
    cmd->add_option("--config", *config_file, "config file (key = value lines, dotted keys)");
    cmd->add_option("--set", "override any config key (key=value, repeatable)")
        ->each([sink](const std::string& kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
            sink->push_back({kv.substr(0, eq), kv.substr(eq + 1)});
        });
    bind_key(cmd, "--dim", "grid.dim", sink, "space dimension N >= 3");
    bind_key(cmd, "--R", "grid.R", sink, "truncation radius");
    bind_key(cmd, "--n", "grid.n", sink, "interior grid nodes");
    bind_key(cmd, "--l", "model.l", sink, "cubic asymptote of the nonlinearity");
    bind_key(cmd, "--potential", "model.potential", sink, "potential kind: constant | well");
    bind_key(cmd, "--v0", "model.v0", sink, "constant-potential level");
    bind_key(cmd, "--mode", "solve.mode", sink, "nonvanishing | vanishing");
    bind_key(cmd, "--sign", "solve.sign", sink, "sign of the innermost component: plus | minus");
    bind_key(cmd, "--seed", "solve.seed", sink, "descent seed: eigen | gaussian");
    bind_key(cmd, "--max-iters", "solve.max_iters", sink, "descent iteration cap");
    bind_key(cmd, "--tol-el", "tol.el", sink, "Euler-Lagrange residual tolerance");
    bind_key(cmd, "--samples", "check.samples_per_sign", sink, "property-suite samples per sign");
    bind_key(cmd, "--out", "run.out_dir", sink, "output directory for record/profile files");
    bind_key(cmd, "--threads", "run.threads", sink, "worker threads for sweeps");
}

SolverConfig layer_config(const ConfigPairs& task_defaults, const std::string& config_file,
                          const ConfigPairs& flag_pairs, const ConfigPairs& task_forced) {
    SolverConfig cfg;
    cfg.apply(task_defaults);
    if (!config_file.empty()) cfg.apply(parse_config_file(config_file));
    cfg.apply(env_config_overrides());
    cfg.apply(flag_pairs);
    cfg.apply(task_forced);
    cfg.validate();
    return cfg;
}

void write_record_files(const SolverConfig& cfg, const RunRecord& rec,
                        const std::string* profile) {
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    write_text_file((dir / "record.json").string(), rec.to_json().dump(2) + "\n");
    write_text_file((dir / "config_echo.cfg").string(), render_config_echo(cfg));
    if (profile) write_text_file((dir / "profile.csv").string(), *profile);
}

int run_check(const SolverConfig& cfg, const std::string& command) {
    RunRecord rec;
    rec.command = command;
    rec.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();

    const int per_sign = static_cast<int>(cfg.samples_per_sign);
    const SampleSpec transform_spec{per_sign, 1e-8, 1e8};
    SampleSpec model_spec = SampleSpec::model_default();
    model_spec.per_sign = per_sign;

    rec.properties.push_back(run_transform_suite(DualTransform{}, transform_spec));
    rec.properties.push_back(run_model_suite(cfg.make_nonlinearity(), cfg.make_potential(),
                                             cfg.make_mode(), model_spec));

    rec.wall_clock_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record_files(cfg, rec, nullptr);

    bool ok = true;
    for (const auto& suite : rec.properties) {
        ok = ok && suite.pass();
        for (const auto& c : suite.checks)
            if (c.status == "fail")
                std::cout << "FAIL  " << suite.suite << "." << c.name
                          << "  margin=" << c.margin << "\n";
    }
    std::cout << (ok ? "check: all suites pass" : "check: FAILURES above") << "\n";
    return ok ? 0 : 1;
}

int run_solve(const std::string& task, const SolverConfig& cfg, const std::string& command) {
    RunRecord rec;
    rec.command = command;
    rec.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();

    SolveReport rep;
    std::optional<RadialField> field;
    std::optional<std::string> profile;

    try {
        const GridPtr grid = build_grid(cfg.dim, cfg.R, cfg.n);
        EnergyModel em = make_energy_model(grid, cfg.make_nonlinearity(), cfg.make_potential());
        em.nehari_tol_factor = cfg.tol_nehari;
        const SolverOptions opts = cfg.make_options();
        const int sign = (cfg.sign == "minus") ? -1 : +1;

        if (task == "ground") {
            auto [f, r] = solve_annulus_ground(em, 0.0, cfg.R, sign, opts);
            field = std::move(f);
            rep = std::move(r);
        } else if (task == "signchange") {
            auto [f, r] = solve_least_energy_sign_changing(em, cfg.make_mode(), opts);
            field = std::move(f);
            rep = std::move(r);
        } else if (task == "nodal") {
            auto [f, r] = solve_k_node(em, cfg.k, opts, sign);
            field = std::move(f);
            rep = std::move(r);
        } else { // vanishing
            auto [f, r] = solve_least_energy_sign_changing(em, Mode::vanishing, opts);
            field = std::move(f);
            rep = std::move(r);
        }
        if (field) profile = profile_text(em, *field);
    } catch (const BadConfig&) {
        throw; // configuration problem, not a numerical failure
    } catch (const Error& e) {
        rep.task = task;
        rep.mode = cfg.mode;
        rep.sign = cfg.sign;
        rep.k = cfg.k;
        rep.converged = false;
        rep.failure_reason = e.what(); // what() already carries the stable name prefix
        rep.grid_dim = cfg.dim;
        rep.grid_outer = cfg.R;
        rep.grid_n = cfg.n;
        rep.l = cfg.l;
    }

    rec.wall_clock_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.solves.push_back(rep);
    write_record_files(cfg, rec, profile ? &*profile : nullptr);

    std::cout << "task=" << task << " converged=" << (rep.converged ? "true" : "false");
    if (std::isfinite(rep.energy)) std::cout << " energy=" << format_double(rep.energy);
    if (std::isfinite(rep.el_residual))
        std::cout << " el_residual=" << format_double(rep.el_residual);
    if (rep.node_count >= 0) std::cout << " nodes=" << rep.node_count;
    if (!rep.failure_reason.empty()) std::cout << " failure=" << rep.failure_reason;
    std::cout << "\nrecord: " << (fs::path(cfg.out_dir) / "record.json").string() << "\n";
    return rep.converged ? 0 : 1;
}

int run_sweep(const SolverConfig& cfg, const std::string& command) {
    const std::vector<double> Rs = cfg.sweep_R.empty() ? std::vector<double>{cfg.R} : cfg.sweep_R;
    std::vector<int> ns;
    if (cfg.sweep_n.empty()) ns.push_back(cfg.n);
    else
        for (double x : cfg.sweep_n) ns.push_back(static_cast<int>(std::lround(x)));
    if (Rs.size() < 2 && ns.size() < 2)
        throw BadConfig("sweep needs at least 2 values on one axis (sweep.R or sweep.n)");

    struct Point {
        double R;
        int n;
        SolveReport rep;
        std::string error;
    };
    std::vector<Point> points;
    for (double R : Rs)
        for (int n : ns) points.push_back({R, n, {}, {}});

    RunRecord rec;
    rec.command = command;
    rec.config = cfg;
    const auto t0 = std::chrono::steady_clock::now();

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (size_t i; (i = cursor.fetch_add(1)) < points.size();) {
            Point& p = points[i];
            try {
                const GridPtr grid = build_grid(cfg.dim, p.R, p.n);
                EnergyModel em =
                    make_energy_model(grid, cfg.make_nonlinearity(), cfg.make_potential());
                em.nehari_tol_factor = cfg.tol_nehari;
                const SolverOptions opts = cfg.make_options();
                const int sign = (cfg.sign == "minus") ? -1 : +1;
                auto [f, r] = solve_annulus_ground(em, 0.0, p.R, sign, opts);
                p.rep = std::move(r);
            } catch (const Error& e) {
                p.error = e.what();
            }
        }
    };
    const size_t nt = std::min<size_t>(std::max(1, cfg.threads), points.size());
    std::vector<std::thread> pool;
    for (size_t t = 0; t + 1 < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    bool all_ok = true;
    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    json rows = json::array();
    for (const Point& p : points) {
        json row;
        row["R"] = p.R;
        row["n"] = p.n;
        if (p.error.empty()) {
            row["energy"] = p.rep.energy;
            row["el_residual"] = p.rep.el_residual;
            row["converged"] = p.rep.converged;
            row["iterations"] = p.rep.iterations;
            all_ok = all_ok && p.rep.converged;
            emin = std::min(emin, p.rep.energy);
            emax = std::max(emax, p.rep.energy);
        } else {
            row["error"] = p.error;
            all_ok = false;
        }
        rows.push_back(row);
    }
    const double spread = all_ok ? (emax - emin) / std::max(1e-300, std::fabs(emin)) : kNaN;
    const bool pass = all_ok && spread <= cfg.sweep_spread_tol;

    rec.sweep = json{{"task", "ground"},
                     {"rows", rows},
                     {"max_rel_spread", spread},
                     {"threshold", cfg.sweep_spread_tol},
                     {"pass", pass}};
    rec.wall_clock_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_record_files(cfg, rec, nullptr);

    for (const Point& p : points)
        std::cout << "R=" << p.R << " n=" << p.n << "  "
                  << (p.error.empty() ? "energy=" + format_double(p.rep.energy) : p.error)
                  << "\n";
    std::cout << "max_rel_spread=" << (all_ok ? format_double(spread) : std::string("n/a"))
              << " threshold=" << format_double(cfg.sweep_spread_tol)
              << (pass ? "  PASS" : "  FAIL") << "\n";
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial variational solver for a quasilinear elliptic equation: "
                 "ground states, sign-changing and multi-node solutions, property audits."};
    app.require_subcommand(1);

    std::string config_file;
    ConfigPairs flags;

    CLI::App* check = app.add_subcommand("check", "run the transform and model property suites");
    check->add_flag("--all", "run every suite (default)");
    bind_key(check, "--model", "model.nonlinearity", &flags, "nonlinearity kind: builtin | semilinear");
    bind_common(check, &config_file, &flags);

    CLI::App* solve = app.add_subcommand("solve", "compute a solution and write record/profile");
    solve->require_subcommand(1);
    CLI::App* ground = solve->add_subcommand("ground", "positive least-energy solution");
    CLI::App* signchange =
        solve->add_subcommand("signchange", "least-energy sign-changing solution (two routes)");
    CLI::App* nodal = solve->add_subcommand("nodal", "solution with exactly k interior nodes");
    bind_key(nodal, "--k", "solve.k", &flags, "number of interior nodes");
    CLI::App* vanishing = solve->add_subcommand(
        "vanishing", "sign-changing solution for a potential that vanishes on a core region");
    for (CLI::App* cmd : {ground, signchange, nodal, vanishing}) bind_common(cmd, &config_file, &flags);

    CLI::App* sweep = app.add_subcommand("sweep", "ground-state convergence study over R and n");
    bind_key(sweep, "--R-list", "sweep.R", &flags, "comma-separated truncation radii");
    bind_key(sweep, "--n-list", "sweep.n", &flags, "comma-separated grid sizes");
    bind_key(sweep, "--spread-tol", "sweep.spread_tol", &flags, "max relative energy spread");
    bind_common(sweep, &config_file, &flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string command = join_command(argc, argv);
    try {
        if (check->parsed()) {
            return run_check(layer_config({}, config_file, flags, {}), command);
        }
        if (sweep->parsed()) {
            return run_sweep(layer_config({}, config_file, flags, {}), command);
        }
        // solve subcommands
        if (ground->parsed())
            return run_solve("ground", layer_config({{"solve.k", "0"}}, config_file, flags, {}),
                             command);
        if (signchange->parsed())
            return run_solve("signchange", layer_config({{"solve.k", "1"}}, config_file, flags, {}),
                             command);
        if (nodal->parsed())
            return run_solve("nodal", layer_config({}, config_file, flags, {}), command);
        // vanishing: the subcommand pins the mode; potential/l defaults suit it
        return run_solve("vanishing",
                         layer_config({{"model.potential", "well"}, {"model.l", "400"}},
                                      config_file, flags, {{"solve.mode", "vanishing"}}),
                         command);
    } catch (const BadConfig& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSampleSpec& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
