#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include <qsnodal/reporting.hpp>

using namespace qsnodal;

TEST_CASE("config text parsing handles comments, whitespace, and errors") {
    const ConfigPairs pairs = parse_config_text(
        "# full-line comment\n"
        "\n"
        "grid.n = 512   # trailing comment\n"
        "  model.l=2.5\n"
        "run.out_dir = /tmp/out\n");
    REQUIRE(pairs.size() == 3);
    REQUIRE(pairs[0].first == "grid.n");
    REQUIRE(pairs[0].second == "512");
    REQUIRE(pairs[1].second == "2.5");
    REQUIRE(pairs[2].second == "/tmp/out");

    REQUIRE_THROWS_AS(parse_config_text("grid.n 512\n"), BadConfig);
    REQUIRE_THROWS_AS(parse_config_text("= 512\n"), BadConfig);
    try {
        parse_config_text("grid.n = 512\nbroken line\n");
        FAIL("expected BadConfig");
    } catch (const BadConfig& e) {
        REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("config keys are typed and unknown keys are rejected") {
    SolverConfig cfg;
    cfg.set("grid.n", "1234");
    cfg.set("model.l", "400");
    cfg.set("solve.mode", "vanishing");
    cfg.set("sweep.R", "10, 20,30");
    REQUIRE(cfg.n == 1234);
    REQUIRE(cfg.l == 400.0);
    REQUIRE(cfg.mode == "vanishing");
    REQUIRE(cfg.sweep_R == std::vector<double>{10.0, 20.0, 30.0});

    REQUIRE_THROWS_AS(cfg.set("grid.resolution", "10"), BadConfig);
    REQUIRE_THROWS_AS(cfg.set("grid.n", "abc"), BadConfig);
    REQUIRE_THROWS_AS(cfg.set("model.l", "1.5x"), BadConfig);
}

TEST_CASE("config validation rejects inconsistent requests") {
    SolverConfig cfg;
    cfg.validate(); // defaults are sound

    SolverConfig bad = cfg;
    bad.k = -2;
    REQUIRE_THROWS_AS(bad.validate(), BadConfig);

    bad = cfg;
    bad.nonlinearity = "cubic";
    REQUIRE_THROWS_AS(bad.validate(), BadConfig);

    bad = cfg;
    bad.mode = "vanishing"; // constant potential has no zero set
    REQUIRE_THROWS_AS(bad.validate(), BadConfig);

    bad = cfg;
    bad.mode = "vanishing";
    bad.potential = "well";
    bad.validate();

    bad = cfg;
    bad.n = 8;
    REQUIRE_THROWS_AS(bad.validate(), BadConfig);
}

TEST_CASE("config echo round-trips through the parser") {
    SolverConfig cfg;
    cfg.n = 777;
    cfg.l = 400.0;
    cfg.potential = "well";
    cfg.mode = "vanishing";
    cfg.tol_el = 1e-5;
    cfg.sweep_R = {10.0, 20.0};

    const std::string echo = render_config_echo(cfg);
    SolverConfig back;
    back.apply(parse_config_text(echo));
    REQUIRE(back.to_pairs() == cfg.to_pairs());
    REQUIRE(back.to_pairs().size() == 21);
}

TEST_CASE("environment variables override threads and output directory") {
    setenv("QSNODAL_THREADS", "7", 1);
    setenv("QSNODAL_OUTDIR", "/tmp/qsn", 1);
    const ConfigPairs env = env_config_overrides();
    unsetenv("QSNODAL_THREADS");
    unsetenv("QSNODAL_OUTDIR");

    SolverConfig cfg;
    cfg.apply(env);
    REQUIRE(cfg.threads == 7);
    REQUIRE(cfg.out_dir == "/tmp/qsn");
    REQUIRE(env_config_overrides().empty());
}

TEST_CASE("profile table round-trips bit-exactly") {
    const EnergyModel em = make_energy_model(build_grid(3, 5.0, 64),
                                             Nonlinearity::builtin(1.0),
                                             Potential::constant(1.0));
    RadialField v(em.grid);
    for (int i = 0; i < em.grid->n; ++i)
        v.values[i] = std::sin(M_PI * em.grid->nodes[i] / 5.0) / 3.0;

    const std::string text = profile_text(em, v);
    REQUIRE(text.rfind("r,u,f_u\n", 0) == 0);
    const std::vector<ProfileRow> rows = parse_profile_text(text);
    REQUIRE(rows.size() == static_cast<size_t>(em.grid->n));
    for (int i = 0; i < em.grid->n; ++i) {
        // 17 significant digits reproduce doubles exactly
        REQUIRE(rows[i].r == em.grid->nodes[i]);
        REQUIRE(rows[i].u == v.values[i]);
        REQUIRE(rows[i].f_u == em.f_of(v.values[i]));
    }

    REQUIRE_THROWS_AS(parse_profile_text("radius,u,f_u\n1,2,3\n"), BadConfig);
    REQUIRE_THROWS_AS(parse_profile_text("r,u,f_u\n1,2\n"), BadConfig);
}

TEST_CASE("run records serialize and reload") {
    RunRecord rec;
    rec.command = "solve ground";
    rec.config.n = 512;
    rec.wall_clock_sec = 1.25;

    SolveReport rep;
    rep.task = "annulus_ground";
    rep.k = 0;
    rep.converged = true;
    rep.energy = 343.5;
    rep.el_residual = 3e-7;
    rep.nehari_residuals = {1e-11};
    rep.node_count = 0;
    rep.iterations = 52;
    rec.solves.push_back(rep);

    const json j = json::parse(rec.to_json().dump(2));
    REQUIRE(j["command"] == "solve ground");
    REQUIRE(j["config"]["grid.n"] == "512");
    REQUIRE(j["wall_clock_sec"] == 1.25);
    REQUIRE(j["solves"].size() == 1);
    REQUIRE(j["solves"][0]["energy"] == 343.5);
    REQUIRE(j["solves"][0]["converged"] == true);
    // NaN diagnostics are omitted rather than serialized
    REQUIRE_FALSE(j["solves"][0].contains("path_gap"));

    // reproducibility comparisons ignore the clock
    RunRecord later = rec;
    later.wall_clock_sec = 99.0;
    REQUIRE(later.payload_without_clock() == rec.payload_without_clock());
    REQUIRE(rec.to_json().dump() != later.to_json().dump());

    // unreported numeric fields serialize as null, never as garbage
    SolveReport empty;
    const std::string dumped = to_json(empty).dump();
    REQUIRE(dumped.find("nan") == std::string::npos);
    REQUIRE(dumped.find("\"energy\":null") != std::string::npos);
}
