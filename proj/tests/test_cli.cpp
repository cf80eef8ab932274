#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "degensolve/expr.hpp"
#include "degensolve/run.hpp"

using namespace degensolve;
using nlohmann::json;
using Vec = Eigen::VectorXd;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig config_from_toml(const std::string& text) { return config_from_json(toml_to_json(text)); }

}  // namespace

TEST_CASE("toml subset reader") {
    const auto doc = toml_to_json(R"(
# comment
command = "solve"   # trailing comment
seed = 42
ratio = 1.5e-3
flag = true

[family]
name = "sharpness"
params = [1, 2.5]

[grid]
lows = [-1.0, -1.0]

[solver]
eps_ladder = [1.0, 0.5]
nested.key = "v"
)");
    CHECK(doc["command"] == "solve");
    CHECK(doc["seed"] == 42);
    CHECK(doc["ratio"].get<double>() == doctest::Approx(1.5e-3));
    CHECK(doc["flag"] == true);
    CHECK(doc["family"]["name"] == "sharpness");
    CHECK(doc["family"]["params"][1].get<double>() == 2.5);
    CHECK(doc["grid"]["lows"][0].get<double>() == -1.0);
    CHECK(doc["solver"]["nested"]["key"] == "v");

    CHECK_THROWS_AS(toml_to_json("novalue\n"), ConfigError);
    CHECK_THROWS_AS(toml_to_json("[broken\n"), ConfigError);
    CHECK_THROWS_AS(toml_to_json("x = [1, 2\n"), ConfigError);
}

TEST_CASE("minimal oracle config validates with defaults echoed") {
    const RunConfig cfg = config_from_toml(R"(
command = "oracle"

[oracle]
m = 1

[grid]
lows = [-1.0, -1.0]
highs = [1.0, 1.0]
counts = [129, 129]
)");
    CHECK(cfg.command == Command::oracle);
    CHECK(cfg.oracle.m == 1);
    const json echo = cfg.echo();
    CHECK(echo["solver"]["newton_tol"].get<double>() == 1e-10);
    CHECK(echo["oracle"]["exclusion_radius"].get<double>() == 0.1);
    CHECK(echo["grid"]["counts"][0] == 129);
}

TEST_CASE("non-decreasing eps ladder is rejected naming the key") {
    try {
        config_from_toml("command = \"solve\"\n[solver]\neps_ladder = [0.5, 1.0]\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("solver.eps_ladder") != std::string::npos);
    }
}

TEST_CASE("unknown keys and unresolved names fail fast with a key path") {
    CHECK_THROWS_AS(config_from_toml("command = \"solve\"\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(config_from_toml("command = \"solve\"\n[family]\nname = \"unobtainium\"\n"), ConfigError);
    CHECK_THROWS_AS(config_from_toml("command = \"warp\"\n"), ConfigError);
    CHECK_THROWS_AS(config_from_toml("command = \"solve\"\n[dirichlet]\nexpr = \"sin(\"\n"), ConfigError);
    CHECK_THROWS_AS(config_from_toml("command = \"solve\"\n[grid]\ncounts = [2, 2]\n"), ConfigError);
    try {
        config_from_toml("command = \"solve\"\n[solver]\nnewton_tol = \"tight\"\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("solver.newton_tol") != std::string::npos);
    }
}

TEST_CASE("json configs take the same validation path") {
    const json doc = {{"command", "solve"},
                      {"family", {{"name", "identity"}}},
                      {"dirichlet", {{"name", "zero"}}},
                      {"solver", {{"eps_ladder", {1.0, 0.5}}}}};
    const RunConfig cfg = config_from_json(doc);
    CHECK(cfg.solver.eps_ladder.size() == 2);
}

TEST_CASE("expression evaluator") {
    const Expression e = Expression::parse("sin(pi*x1) + cos(pi*x2)^2 - 0.5*abs(x1)");
    const Vec x{{0.5, 1.0}};
    CHECK(e(x) == doctest::Approx(1.0 + 1.0 - 0.25));
    CHECK(Expression::parse("-x1^2")(Vec{{3.0, 0.0}}) == doctest::Approx(-9.0));
    CHECK(Expression::parse("2^3^2")(Vec{{0.0, 0.0}}) == doctest::Approx(512.0));  // right associative
    CHECK(Expression::parse("exp(0) + sqrt(4)")(Vec{{0.0, 0.0}}) == doctest::Approx(3.0));
    CHECK_THROWS_AS(Expression::parse("x4"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("foo(1)"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("1 2"), ConfigError);
}

TEST_CASE("named dirichlet data resolve") {
    FamilySpec fam;
    fam.name = "sharpness";
    fam.params = {1};
    DirichletSpec d;
    d.name = "oracle";
    const auto f = resolve_dirichlet(d, fam);
    CHECK(f(Vec{{0.4, 0.0}}) == 0.0);
    d.name = "constant";
    d.value = 2.5;
    CHECK(resolve_dirichlet(d, fam)(Vec{{0.1, 0.2}}) == 2.5);
    d.name = "nope";
    CHECK_THROWS_AS(resolve_dirichlet(d, fam), ConfigError);
}

TEST_CASE("identical configs produce identical manifests and files") {
    const RunConfig cfg = config_from_toml(R"(
command = "solve"
[family]
name = "identity"
[grid]
lows = [-1.0, -1.0]
highs = [1.0, 1.0]
counts = [17, 17]
[dirichlet]
expr = "x1^2 - x2^2"
[solver]
eps_ladder = [1.0, 0.5, 0.25]
)");
    const RunResult a = execute_run(cfg);
    const RunResult b = execute_run(cfg);
    REQUIRE(a.files.count("manifest.json") == 1);
    CHECK(content_hash(a.files.at("manifest.json")) == content_hash(b.files.at("manifest.json")));
    CHECK(a.files.at("solution.csv") == b.files.at("solution.csv"));
    CHECK(a.files.at("solution.csv").find("\r") == std::string::npos);  // LF endings
    CHECK(a.files.at("solution.csv").rfind("x,y,w\n", 0) == 0);
}

TEST_CASE("failing asserted check yields a nonzero exit code with a witness") {
    const RunConfig cfg = config_from_toml(R"(
command = "check-conditions"
[family]
name = "sharpness"
params = [1]
[conditions]
flags = ["super_subordinate"]
region_center = [0.0, 0.0]
region_half = [0.25, 0.25]
z_lo = -0.25
z_hi = 0.25
sample_density = 9
super_exponent = 1.0
bound = 10.0
)");
    const RunResult res = execute_run(cfg);
    CHECK(res.exit_code() == 1);
    CHECK(!res.manifest["conditions"][0]["holds"].get<bool>());
    CHECK(res.manifest["conditions"][0]["worst_point"].size() == 2);
}

TEST_CASE("emission is transactional") {
    const RunConfig cfg = config_from_toml(R"(
command = "check-conditions"
[family]
name = "identity"
)");
    const RunResult res = execute_run(cfg);
    const auto tmp = std::filesystem::temp_directory_path() / "degensolve_blocked";
    std::filesystem::remove_all(tmp);
    {
        std::ofstream f(tmp);  // a file where the directory should go
        f << "in the way";
    }
    CHECK_THROWS_AS(emit_report(res, tmp / "sub"), EmissionError);
    CHECK(!std::filesystem::exists(tmp / "sub"));
    std::filesystem::remove(tmp);

    const auto okdir = std::filesystem::temp_directory_path() / "degensolve_ok";
    std::filesystem::remove_all(okdir);
    emit_report(res, okdir);
    CHECK(std::filesystem::exists(okdir / "manifest.json"));
    std::filesystem::remove_all(okdir);
}

TEST_CASE("golden config reproduces the committed manifest byte for byte") {
    const RunConfig cfg = parse_config("configs/acceptance.toml");
    const RunResult res = execute_run(cfg);
    const std::string golden = slurp("tests/golden/manifest.json");
    CHECK(res.files.at("manifest.json") == golden);
}
