#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "degensolve/oracle.hpp"
#include "degensolve/solver.hpp"
#include "test_util.hpp"

using namespace degensolve;
using Vec = Eigen::VectorXd;

namespace {

SolverConfig short_ladder(double eps_last) {
    SolverConfig c;
    for (double e = 1.0; e >= eps_last * (1.0 - 1e-12); e *= 0.5) c.eps_ladder.push_back(e);
    return c;
}

}  // namespace

TEST_CASE("truncation profile") {
    const double M = 0.8;
    const TruncationProfile chi(M);
    CHECK(chi.value(0.5 * M) == 0.5 * M);
    CHECK(chi.value(-0.5 * M) == -0.5 * M);
    CHECK(chi.value(3.0 * M) == 1.5 * M);
    CHECK(chi.value(-3.0 * M) == -1.5 * M);
    CHECK(chi.value(2.0 * M) == doctest::Approx(1.5 * M).epsilon(1e-15));

    SUBCASE("dense scan: derivative bound, Lipschitz bound, oddness") {
        const double delta = 1e-6 * M;
        for (int i = 0; i <= 20000; ++i) {
            const double z = -4.0 * M + 8.0 * M * i / 20000.0;
            CHECK(std::abs(chi.derivative(z)) <= 1.0 + 1e-12);
            CHECK(std::abs(chi.value(z) - chi.value(z - delta)) <= delta * (1.0 + 1e-9));
            CHECK(chi.value(-z) == -chi.value(z));
        }
    }
    SUBCASE("derivative is consistent with the value") {
        for (int i = 1; i < 100; ++i) {
            const double z = -3.0 * M + 6.0 * M * i / 100.0;
            const double fd = (chi.value(z + 1e-7) - chi.value(z - 1e-7)) / 2e-7;
            CHECK(chi.derivative(z) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
    CHECK_THROWS_AS(TruncationProfile(0.0), ParameterError);
    CHECK_THROWS_AS(build_truncation(-1.0), ParameterError);
}

TEST_CASE("residual is exact on quadratics for the constant-coefficient case") {
    const auto field = make_builtin_family("identity");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 17);
    const TruncationProfile chi(1.0);
    const Vec w = nodal_values(grid, [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; });
    const auto sys = assemble_residual(field, grid, w, 0.0 + 1e-300, chi, false);
    CHECK(sys.residual.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("residual vanishes on constants for every built-in family") {
    const auto grid = StructuredGrid::square(-1.0, 1.0, 9);
    const TruncationProfile chi(2.0);
    for (const auto& name : {"identity", "fedii", "sharpness"}) {
        const auto field = make_builtin_family(name, name == std::string("sharpness") ? std::vector<double>{1}
                                                                                      : std::vector<double>{});
        const Vec w = Vec::Constant(grid.num_nodes(), 0.7);
        const auto sys = assemble_residual(field, grid, w, 0.25, chi, false);
        CHECK(sys.residual.lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("jacobian matches directional finite differences") {
    const auto field = make_builtin_family("sharpness", {1});
    StructuredGrid grid(2, {0.2, 0.2, 0.0}, {1.2, 1.2, 0.0}, {17, 17, 1});
    const TruncationProfile chi(2.0);
    const Vec w = nodal_values(grid, [](const Vec& x) { return 0.3 * std::sin(x[0] + x[1]) - 0.2 * x[1]; });
    const auto sys = assemble_residual(field, grid, w, 0.1, chi, true);

    testutil::Rng rng(23);
    const double h = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        Vec v(grid.num_nodes());
        for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
            v[i] = grid.is_boundary(i) ? 0.0 : rng.uniform(-1.0, 1.0);
        const Vec rp = assemble_residual(field, grid, Vec(w + h * v), 0.1, chi, false).residual;
        const Vec rm = assemble_residual(field, grid, Vec(w - h * v), 0.1, chi, false).residual;
        const Vec fd = (rp - rm) / (2.0 * h);
        const Vec jv = sys.jacobian * v;
        CHECK((fd - jv).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + jv.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("jacobian carries the truncation chain terms") {
    // With M small enough that the iterate crosses the blend region, a wrong
    // chi' treatment shows up immediately in the directional derivative.
    const auto field = make_builtin_family("sharpness", {2});
    const auto grid = StructuredGrid::square(-1.0, 1.0, 9);
    const TruncationProfile chi(0.4);
    const Vec w = nodal_values(grid, [](const Vec& x) { return 0.6 * x[0] + 0.3 * x[1]; });
    const auto sys = assemble_residual(field, grid, w, 0.05, chi, true);
    testutil::Rng rng(3);
    Vec v(grid.num_nodes());
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
        v[i] = grid.is_boundary(i) ? 0.0 : rng.uniform(-1.0, 1.0);
    const double h = 1e-6;
    const Vec rp = assemble_residual(field, grid, Vec(w + h * v), 0.05, chi, false).residual;
    const Vec rm = assemble_residual(field, grid, Vec(w - h * v), 0.05, chi, false).residual;
    CHECK(((rp - rm) / (2.0 * h) - sys.jacobian * v).lpNorm<Eigen::Infinity>() <= 1e-5);
}

TEST_CASE("newton: constant data solves in at most one step") {
    const auto field = make_builtin_family("identity");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 13);
    const TruncationProfile chi(2.0);
    const Vec dirichlet = Vec::Constant(grid.num_nodes(), 1.3);
    const auto sol = newton_solve(field, grid, dirichlet, 0.5, chi, SolverConfig::defaults());
    CHECK(sol.newton_iters <= 1);
    CHECK((sol.values - dirichlet).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("newton: the saddle is discretely harmonic for the identity family") {
    const auto field = make_builtin_family("identity");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 33);
    const TruncationProfile chi(2.0);
    const Vec exact = nodal_values(grid, [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; });
    const auto sol = newton_solve(field, grid, exact, 0.5, chi, SolverConfig::defaults());
    CHECK((sol.values - exact).lpNorm<Eigen::Infinity>() <= 1e-10);
    SUBCASE("boundary rows reproduce the data exactly") {
        for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
            if (grid.is_boundary(i)) CHECK(sol.values[i] == exact[i]);
    }
}

TEST_CASE("interior jacobian is an M-matrix for diagonal fields with upwinded drift") {
    const auto grid = StructuredGrid::square(-1.0, 1.0, 11);
    const TruncationProfile chi(2.0);
    const Vec w = nodal_values(grid, [](const Vec& x) { return 0.4 * std::cos(x[0]) * x[1]; });

    CoefficientField field = make_builtin_family("fedii");
    const auto sys = assemble_residual(field, grid, w, 0.2, chi, true);
    const auto rep = check_m_matrix(sys, grid);
    CHECK(rep.holds);

    // with a drift term, still monotone thanks to the one-sided differences
    field.family = "custom";
    field.drift = [](const Vec& x, double) { return Vec{{0.8 * x[1], -0.5 * x[0]}}; };
    const auto sys2 = assemble_residual(field, grid, w, 0.2, chi, true);
    CHECK(check_m_matrix(sys2, grid).holds);
}

TEST_CASE("truncation neutrality: re-solving with 2M reproduces the solution") {
    const auto field = make_builtin_family("fedii");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 21);
    const Vec dirichlet = nodal_values(grid, [](const Vec& x) {
        const double pi = std::acos(-1.0);
        return std::sin(pi * x[0]) + std::cos(pi * x[1]);
    });
    SolverConfig cfg = SolverConfig::defaults();
    const double sup = dirichlet.cwiseAbs().maxCoeff();
    const auto a = newton_solve(field, grid, dirichlet, 0.25, TruncationProfile(sup), cfg);
    const auto b = newton_solve(field, grid, dirichlet, 0.25, TruncationProfile(2.0 * sup), cfg);
    CHECK(a.values.cwiseAbs().maxCoeff() <= sup + 1e-9);
    CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() <= cfg.newton_tol);
}

TEST_CASE("grid refinement is second order on a smooth harmonic target") {
    // Re((x+iy)^4) is harmonic but not in the stencil's exactness set, so the
    // sup error scales like h^2 with a genuine constant.
    const auto field = make_builtin_family("identity");
    auto quartic = [](const Vec& x) {
        return x[0] * x[0] * x[0] * x[0] - 6.0 * x[0] * x[0] * x[1] * x[1] + x[1] * x[1] * x[1] * x[1];
    };
    std::vector<double> errs;
    for (int n : {17, 33, 65}) {
        const auto grid = StructuredGrid::square(-1.0, 1.0, n);
        const Vec exact = nodal_values(grid, quartic);
        const auto sol = newton_solve(field, grid, exact, 0.5, TruncationProfile(4.0), SolverConfig::defaults());
        errs.push_back((sol.values - exact).lpNorm<Eigen::Infinity>());
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}

TEST_CASE("continuation: zero data gives the zero field on every rung") {
    const auto field = make_builtin_family("fedii");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 15);
    const auto run = viscosity_continuation(field, grid, Vec::Zero(grid.num_nodes()), short_ladder(1.0 / 64));
    CHECK(run.ladder.size() == 7);
    for (const auto& sol : run.ladder) CHECK(sol.values.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("continuation: sup bound by the boundary data, rung diffs settle") {
    const auto field = make_builtin_family("fedii");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 25);
    const Vec dirichlet = nodal_values(grid, [](const Vec& x) {
        const double pi = std::acos(-1.0);
        return std::sin(pi * x[0]) + std::cos(pi * x[1]);
    });
    const auto run = viscosity_continuation(field, grid, dirichlet, short_ladder(std::ldexp(1.0, -12)));
    const double sup = dirichlet.cwiseAbs().maxCoeff();
    for (const auto& sol : run.ladder) CHECK(sol.values.cwiseAbs().maxCoeff() <= sup + 1e-8);
    const auto& d = run.rung_diffs;
    REQUIRE(d.size() >= 6);
    for (std::size_t i = d.size() - 5; i < d.size(); ++i) CHECK(d[i] <= d[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("solver config validation") {
    SolverConfig c;
    c.eps_ladder = {0.5, 1.0};
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c.eps_ladder = {1.0, -0.5};
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c.eps_ladder = {};
    CHECK_THROWS_AS(c.validate(), ParameterError);
    CHECK_NOTHROW(SolverConfig::defaults().validate());

    const auto field = make_builtin_family("identity");
    const auto grid = StructuredGrid::square(-1.0, 1.0, 9);
    CHECK_THROWS_AS(
        newton_solve(field, grid, Vec::Zero(grid.num_nodes()), 0.0, TruncationProfile(1.0), SolverConfig::defaults()),
        ParameterError);
    SolverConfig small_m = SolverConfig::defaults();
    small_m.M = 0.5;
    CHECK_THROWS_AS(viscosity_continuation(field, grid, Vec::Constant(grid.num_nodes(), 1.0), small_m),
                    ParameterError);
}

TEST_CASE("sharpness solve against the oracle on an origin-free box") {
    const auto field = make_builtin_family("sharpness", {1});
    const SharpnessExample ex(1);
    StructuredGrid grid(2, {0.2, 0.2, 0.0}, {1.2, 1.2, 0.0}, {33, 33, 1});
    const Vec exact = nodal_values(grid, [&](const Vec& x) { return sharpness_w(ex, x[0], x[1]); });
    const auto run = viscosity_continuation(field, grid, exact, short_ladder(std::ldexp(1.0, -14)));
    CHECK((run.ladder.back().values - exact).lpNorm<Eigen::Infinity>() <= 1e-3);
}
