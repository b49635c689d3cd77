#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "selflow/config.hpp"

using namespace selflow;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

ConfigError parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected a ConfigError for: " << text);
    return ConfigError({});
}

}  // namespace

TEST_CASE("empty and comment-only files give the defaults") {
    CHECK(parse_config("") == RunConfig{});
    CHECK(parse_config("# nothing here\n\n   \n") == RunConfig{});
}

TEST_CASE("values are parsed into the typed fields") {
    const RunConfig c = parse_config(
        "sim.grid = 24 x 16\n"
        "sim.domain = 2 x 1\n"
        "sim.bc = neumann\n"
        "sim.eps = 0.05   # trailing comment\n"
        "sim.dt = 1e-4\n"
        "noise.seed = 18446744073709551615\n"
        "noise.modes = 3\n"
        "init.d = vortex:0.5,0.5,0.1\n"
        "sweep.eps = 0.4, 0.2, 0.1\n"
        "ensemble.sup = steps\n"
        "diag.budget = true\n");
    CHECK(c.nx == 24);
    CHECK(c.ny == 16);
    CHECK(c.lx == 2.0);
    CHECK(c.ly == 1.0);
    CHECK(c.bc == "neumann");
    CHECK(c.eps == 0.05);
    REQUIRE(c.dt);
    CHECK(*c.dt == 1e-4);
    CHECK(c.seed == 18446744073709551615ull);
    CHECK(c.modes == 3);
    CHECK(c.init_d == "vortex:0.5,0.5,0.1");
    CHECK(c.sweep_eps == std::vector<double>{0.4, 0.2, 0.1});
    CHECK(c.sup_every_step);
    CHECK(c.budget);
}

TEST_CASE("canonical text round-trips and drives the hash") {
    RunConfig c;
    c.eps = 0.0123456789012345;
    c.dt = 3.3e-5;
    c.init_u = "taylor-green:1,2";
    c.sweep_eps = {0.3, 0.15};
    c.delta0_sq = 0.7;
    const RunConfig back = parse_config(c.canonical());
    CHECK(back == c);
    CHECK(back.hash() == c.hash());
    CHECK(c.hash().size() == 16);

    RunConfig d = c;
    d.seed += 1;
    CHECK(d.hash() != c.hash());

    // sorted, one line per key
    const std::string text = RunConfig{}.canonical();
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == config_keys().size());
    const auto keys = config_keys();
    CHECK(std::is_sorted(keys.begin(), keys.end()));
}

TEST_CASE("the hash is 64-bit FNV-1a of the canonical text") {
    // reference FNV-1a written out independently
    const std::string text = RunConfig{}.canonical();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    CHECK(RunConfig{}.hash() == buf);
}

TEST_CASE("invalid values name the key and line") {
    const ConfigError e = parse_error("sim.T = 1\nsim.eps = -1\n");
    REQUIRE(e.problems().size() == 1);
    CHECK(mentions(e, "line 2"));
    CHECK(mentions(e, "sim.eps"));

    CHECK(mentions(parse_error("sim.bc = sideways\n"), "sim.bc"));
    CHECK(mentions(parse_error("sim.grid = 32\n"), "sim.grid"));
    CHECK(mentions(parse_error("noise.modes = 2.5\n"), "noise.modes"));
    CHECK(mentions(parse_error("sweep.eps = 0.1, 0.2\n"), "sweep.eps"));
    CHECK(mentions(parse_error("init.d = vortex:1,2\n"), "init.d"));
    CHECK(mentions(parse_error("diag.budget = maybe\n"), "diag.budget"));
}

TEST_CASE("all problems are collected") {
    const ConfigError e = parse_error(
        "sim.eps = 0.1\n"
        "sim.bogus = 3\n"
        "sim.eps = 0.2\n"
        "no equals sign\n"
        "noise.q = -1\n");
    CHECK(e.problems().size() == 4);
    CHECK(mentions(e, "line 2"));
    CHECK(mentions(e, "sim.bogus"));
    CHECK(mentions(e, "line 3"));
    CHECK(mentions(e, "line 4"));
    CHECK(mentions(e, "line 5"));
    CHECK(dynamic_cast<const ArgumentError*>(&e) != nullptr);
}

TEST_CASE("missing files are I/O errors") {
    CHECK_THROWS_AS(load_config("/nonexistent/dir/run.cfg"), IoError);
}

TEST_CASE("build_problem picks a stable dt that divides T") {
    RunConfig c;
    c.nx = c.ny = 16;
    c.T = 0.01;
    const Problem p = build_problem(c);
    CHECK(p.steps > 0);
    CHECK(std::abs(p.params.dt * p.steps - c.T) < 1e-12);
    CHECK(p.params.dt <= stability_dt(c.eps, p.grid, c.mu, c.gamma, 0.0) * (1 + 1e-12));

    // a sweep is stepped at the bound of its smallest eps
    RunConfig s = c;
    s.mode = "sweep";
    s.sweep_eps = {0.1, 0.05, 0.025};
    CHECK(build_problem(s).params.dt < p.params.dt);
}

TEST_CASE("explicit unstable dt is refused unless overridden") {
    RunConfig c;
    c.nx = c.ny = 16;
    c.T = 0.01;
    c.dt = 0.01;
    CHECK_THROWS_AS(build_problem(c), StabilityError);
    c.dt_override = true;
    CHECK(build_problem(c).steps == 1);
}

TEST_CASE("with_eps keeps dt and refuses an unstable eps") {
    RunConfig c;
    c.nx = c.ny = 16;
    c.T = 0.01;
    const Problem p = build_problem(c);
    const Problem q = with_eps(p, 0.2);
    CHECK(q.params.eps == 0.2);
    CHECK(q.params.dt == p.params.dt);
    CHECK_THROWS_AS(with_eps(p, 1e-3), StabilityError);
}

TEST_CASE("initial data sources") {
    RunConfig c;
    c.nx = c.ny = 16;
    c.init_u = "taylor-green:1,1";
    c.init_d = "texture:0.5";
    const Problem p = build_problem(c);
    CHECK(p.u0.max_abs() > 0.1);
    CHECK(p.d0.max_abs() == doctest::Approx(1.0));
    c.init_d = "skew-texture:0.5";
    c.field_h = "wave:0.5";
    const Problem q = build_problem(c);
    for (const Vec3& v : q.d0.values()) CHECK(norm_sq(v) == doctest::Approx(1.0));
    CHECK(mentions(parse_error("field.h = wave\n"), "field.h"));
    c.field_h = "const:0,0,1";
    c.init_u = "file:/nonexistent/u.snap";
    CHECK_THROWS_AS(build_problem(c), IoError);
}
