#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "degensolve/conditions.hpp"
#include "degensolve/errors.hpp"
#include "test_util.hpp"

using namespace degensolve;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace {

const BoxRegion unit_region(Vec{{0.0, 0.0}}, Vec{{1.0, 1.0}});
const Interval unit_z{-1.0, 1.0};

/// Diagonal A = diag(1, k) with an off-diagonal coupling c sqrt(k).
CoefficientField coupled_field(double c, double kscale) {
    CoefficientField f;
    f.dim = 2;
    auto kv = [](const Vec& x) { return 0.25 * (x[0] * x[0] + x[1] * x[1]) + 0.05; };
    f.matrix = [c, kv](const Vec& x, double) {
        const double k = kv(x);
        Mat a(2, 2);
        a << 1.0, c * std::sqrt(k), c * std::sqrt(k), k;
        return a;
    };
    f.matrix_dz = [](const Vec&, double) { return Mat::Zero(2, 2); };
    f.matrix_dx = [c, kv](const Vec& x, double, int i) {
        const double k = kv(x);
        const double dk = 0.5 * x[i];
        Mat a(2, 2);
        a << 0.0, 0.5 * c * dk / std::sqrt(k), 0.5 * c * dk / std::sqrt(k), dk;
        return a;
    };
    f.k = [kv, kscale](const Vec& x, double) { return Vec{{kscale, kscale * kv(x)}}; };
    f.drift = [](const Vec&, double) { return Vec::Zero(2); };
    f.drift_dz = [](const Vec&, double) { return Vec::Zero(2); };
    f.zero = [](const Vec&, double) { return 0.0; };
    f.zero_dz = [](const Vec&, double) { return 0.0; };
    return f;
}

}  // namespace

TEST_CASE("diagonal equivalence is exact on the built-in diagonal families") {
    for (const auto& name : {"identity", "fedii", "sharpness", "power"}) {
        const auto f = make_builtin_family(name, name == std::string("sharpness") ? std::vector<double>{1}
                                                                                  : std::vector<double>{});
        const auto rep = check_diagonal_equivalence(f, unit_region, unit_z, 2.0, 5);
        CHECK(rep.holds);
        CHECK(rep.best_constant == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("off-diagonal coupling violates the lower bound") {
    // Oracle: min eigenvalue of A - diag(k) in closed form at one sample.
    const auto f = coupled_field(0.2, 1.0);
    const Vec x{{0.5, 0.5}};
    const Mat a = f.matrix(x, 0.0);
    const Vec k = f.k(x, 0.0);
    const auto [lo, hi] = testutil::eig2(a(0, 0) - k[0], a(0, 1), a(1, 1) - k[1]);
    REQUIRE(lo < -1e-6);  // the coupling genuinely breaks sum k^i xi_i^2 <= xi^t A xi
    const auto rep = check_diagonal_equivalence(f, unit_region, unit_z, 10.0, 5);
    CHECK(!rep.holds);
}

TEST_CASE("slack in k restores the equivalence with Lambda = 1.5") {
    // With k = 0.8 (1, k(x)), A - diag(k) = 0.2 [[1, sqrt k],[sqrt k, k]] >= 0,
    // and the smallest feasible Lambda solves (0.8 L - 1)^2 = 0.04 L... the
    // sharp value over this family is 1.5 independent of k.
    const auto f = coupled_field(0.2, 0.8);
    const auto rep = check_diagonal_equivalence(f, unit_region, unit_z, 1.5 + 1e-9, 6);
    CHECK(rep.holds);
    CHECK(rep.best_constant == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("diagonal check parameter guards") {
    const auto f = make_builtin_family("identity");
    CHECK_THROWS_AS(check_diagonal_equivalence(f, unit_region, unit_z, 0.5, 5), ParameterError);
    CHECK_THROWS_AS(check_diagonal_equivalence(f, unit_region, unit_z, 2.0, 1), ParameterError);
}

TEST_CASE("nondegeneracy box: identity accepts the first candidate") {
    const auto f = make_builtin_family("identity");
    const auto res = check_nondegeneracy_box(f, Vec{{0.2, 0.3}}, 0.5, unit_z, 100);
    REQUIRE(res.box.has_value());
    CHECK(res.report.samples == 1);
    CHECK(res.box->center == Vec{{0.2, 0.3}});
    CHECK(res.box->half_lengths.maxCoeff() < 0.5);
}

TEST_CASE("nondegeneracy box: fedii at the degenerate point") {
    const auto f = make_builtin_family("fedii");
    const Vec x = Vec::Zero(2);
    const double eps = 1.0;
    const auto res = check_nondegeneracy_box(f, x, eps, unit_z, 2000);
    REQUIRE(res.box.has_value());
    // structural postconditions: half-lengths < eps and x in (1/3) R
    CHECK(res.box->half_lengths.maxCoeff() < eps);
    CHECK(res.box->contains(x, 1.0 / 3.0));
    // the T_2 faces avoid x1 = 0, so k stays positive there
    const double face_lo = res.box->center[0] - res.box->half_lengths[0];
    const double face_hi = res.box->center[0] + res.box->half_lengths[0];
    CHECK(fedii_k(face_lo) > 1e-12);
    CHECK(fedii_k(face_hi) > 1e-12);
}

TEST_CASE("nondegeneracy box: sharpness centered at the origin") {
    const auto f = make_builtin_family("sharpness", {1});
    const auto res = check_nondegeneracy_box(f, Vec::Zero(2), 0.5, unit_z, 500);
    REQUIRE(res.box.has_value());
    // k(+-r, z) = 2(r^2 + z^2) > 0 on the T_2 faces, so the symmetric first
    // candidate is acceptable.
    CHECK(res.box->center.isZero());
}

TEST_CASE("nondegeneracy box: failure carries the best candidate") {
    CoefficientField f = make_builtin_family("identity");
    f.family = "custom";
    f.k = [](const Vec&, double) { return Vec{{1.0, 0.0}}; };  // k^2 == 0 everywhere
    const auto res = check_nondegeneracy_box(f, Vec::Zero(2), 0.5, unit_z, 50);
    CHECK(!res.box.has_value());
    CHECK(!res.report.holds);
    CHECK(res.report.samples > 0);
    CHECK(res.report.samples <= 50);
    CHECK(res.report.best_constant <= 0.0);
    CHECK(!res.report.note.empty());
}

TEST_CASE("super subordination: finite away from the origin, matching the ratio oracle") {
    const auto f = make_builtin_family("sharpness", {1});
    const BoxRegion region(Vec{{0.7, 0.0}}, Vec{{0.3, 0.3}});
    const Interval z{-1.0, 1.0};
    SubordinationOptions opts;
    opts.sample_density = 7;
    const auto reps = check_subordination_suite(f, region, z, {ConditionName::super_subordinate}, opts);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].holds);

    // Ratio sweep oracle over the same lattice: B = |d_z k| / sqrt(k* k).
    double oracle = 0.0;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j)
            for (int l = 0; l < 7; ++l) {
                const double x1 = 0.4 + 0.6 * i / 6.0;
                const double zz = -1.0 + 2.0 * l / 6.0;
                (void)j;
                const double s = x1 * x1 + zz * zz;
                const double k = 2.0 * s;
                const double dk = 4.0 * zz;
                oracle = std::max(oracle, std::abs(dk) / std::sqrt(std::min(1.0, k) * k));
            }
    CHECK(reps[0].best_constant == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("super subordination: exponent-1 constant doubles as the lattice shrinks toward the origin") {
    const auto f = make_builtin_family("sharpness", {1});
    SubordinationOptions opts;
    opts.sample_density = 9;
    auto best = [&](double halfwidth) {
        const BoxRegion region(Vec::Zero(2), Vec::Constant(2, halfwidth));
        const Interval z{-halfwidth, halfwidth};
        return check_subordination_suite(f, region, z, {ConditionName::super_subordinate}, opts)[0].best_constant;
    };
    const double coarse = best(0.5), fine = best(0.25);
    CHECK(fine >= 1.8 * coarse);
}

TEST_CASE("subunit and drift checks") {
    SUBCASE("zero drift means zero constants") {
        const auto f = make_builtin_family("fedii");
        const auto reps = check_subordination_suite(
            f, unit_region, unit_z, {ConditionName::subunit, ConditionName::drift_super_subordinate});
        for (const auto& rep : reps) {
            CHECK(rep.holds);
            CHECK(rep.best_constant == 0.0);
        }
    }
    SUBCASE("diagonal closed form and exact scale consistency") {
        CoefficientField f = make_builtin_family("identity");
        f.family = "custom";
        f.drift = [](const Vec& x, double) { return Vec{{0.3 + 0.1 * x[0], -0.2}}; };
        const auto b1 = check_subordination_suite(f, unit_region, unit_z, {ConditionName::subunit})[0];
        f.drift = [](const Vec& x, double) { return Vec{{2.0 * (0.3 + 0.1 * x[0]), -0.4}}; };
        const auto b2 = check_subordination_suite(f, unit_region, unit_z, {ConditionName::subunit})[0];
        CHECK(b2.best_constant == doctest::Approx(2.0 * b1.best_constant).epsilon(1e-12));
    }
    SUBCASE("drift over a vanishing k is a violation") {
        CoefficientField f = make_builtin_family("fedii");
        f.family = "custom";
        f.drift = [](const Vec&, double) { return Vec{{0.0, 0.5}}; };  // gamma_2 != 0 where k^2(0) = 0
        const auto rep = check_subordination_suite(f, unit_region, unit_z, {ConditionName::subunit})[0];
        CHECK(!rep.holds);
        CHECK(std::isinf(rep.best_constant));
    }
}

TEST_CASE("subordinate condition on fedii is finite") {
    const auto f = make_builtin_family("fedii");
    const auto rep = check_subordination_suite(f, unit_region, unit_z, {ConditionName::subordinate})[0];
    CHECK(rep.holds);
    CHECK(std::isfinite(rep.best_constant));
}

TEST_CASE("wirtinger: k = x^2 gives a finite constant, |x| is rejected as non-C2") {
    const auto f = make_builtin_family("power", {1});
    SubordinationOptions opts;
    opts.sample_density = 6;
    const auto rep = check_subordination_suite(f, unit_region, unit_z, {ConditionName::wirtinger}, opts)[0];
    CHECK(rep.holds);
    CHECK(std::isfinite(rep.best_constant));
    CHECK(rep.best_constant > 0.0);

    CoefficientField g = make_builtin_family("identity");
    g.family = "custom";
    g.k = [](const Vec& x, double) { return Vec{{1.0, std::abs(x[0])}}; };
    CHECK_THROWS_AS(check_subordination_suite(g, unit_region, unit_z, {ConditionName::wirtinger}, opts),
                    ParameterError);
}

TEST_CASE("empty flag set is a parameter error") {
    const auto f = make_builtin_family("identity");
    CHECK_THROWS_AS(check_subordination_suite(f, unit_region, unit_z, {}), ParameterError);
}
