#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "degensolve/coefficient_field.hpp"
#include "degensolve/errors.hpp"
#include "test_util.hpp"

using namespace degensolve;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

TEST_CASE("identity family") {
    const auto f = make_builtin_family("identity");
    const Vec x{{0.3, -0.7}};
    CHECK(f.matrix(x, 0.2).isApprox(Mat::Identity(2, 2)));
    CHECK(f.k(x, 0.2) == Vec::Ones(2));
    CHECK(f.drift(x, 0.2).isZero());
    CHECK(f.zero(x, 0.2) == 0.0);
}

TEST_CASE("sharpness family values") {
    const auto f = make_builtin_family("sharpness", {1});
    const Vec x{{0.5, 0.1}};
    // k(x1, z) = 2m (x1^2 + z^2)^{2m-1}
    CHECK(f.k(x, 0.0)[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.matrix(x, 0.0)(0, 0) == 1.0);
    CHECK(f.matrix(x, 0.0)(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(f.k(x, 0.0)[0] == 1.0);
}

TEST_CASE("fedii family vanishing") {
    const auto f = make_builtin_family("fedii");
    CHECK(f.k(Vec{{0.0, 0.3}}, 0.0)[1] == 0.0);
    CHECK(f.k(Vec{{0.5, 0.3}}, 0.0)[1] > 0.0);
    CHECK(f.k(Vec{{-0.5, 0.3}}, 0.0)[1] > 0.0);
    CHECK(fedii_k_prime(0.0) == 0.0);
}

TEST_CASE("axis family vanishes only on the i-th axis") {
    const auto f = make_builtin_family("axis", {3});
    CHECK(f.k(Vec{{0.0, 0.4, 0.0}}, 1.0)[1] == 0.0);   // on the x2 axis
    CHECK(f.k(Vec{{0.1, 0.4, 0.0}}, 1.0)[1] > 0.0);
    CHECK(f.k(Vec{{0.0, 0.0, 0.2}}, 1.0)[2] == 0.0);   // on the x3 axis
    CHECK(f.k(Vec{{0.0, 0.3, 0.2}}, 1.0)[2] > 0.0);
}

TEST_CASE("family parameter errors") {
    CHECK_THROWS_AS(make_builtin_family("nope"), ParameterError);
    CHECK_THROWS_AS(make_builtin_family("sharpness", {0}), ParameterError);
    CHECK_THROWS_AS(make_builtin_family("sharpness", {-2}), ParameterError);
    CHECK_THROWS_AS(make_builtin_family("power", {0}), ParameterError);
}

TEST_CASE("analytic derivatives match centered differences") {
    const std::vector<std::pair<std::string, std::vector<double>>> families = {
        {"identity", {}}, {"fedii", {}}, {"sharpness", {1}}, {"sharpness", {2}}, {"axis", {}}, {"power", {2}}};
    testutil::Rng rng(7);
    for (const auto& [name, params] : families) {
        const auto f = make_builtin_family(name, params);
        for (int trial = 0; trial < 1000; ++trial) {
            Vec x(f.dim);
            for (int d = 0; d < f.dim; ++d) x[d] = rng.uniform(-1.0, 1.0);
            const double z = rng.uniform(-1.0, 1.0);
            if (name == "fedii" && std::abs(x[0]) < 0.2) continue;  // exp(-1/x^2) FD is hopeless near 0

            const double h = 1e-5;
            const Mat az = f.matrix_dz(x, z);
            const Mat az_fd = (f.matrix(x, z + h) - f.matrix(x, z - h)) / (2.0 * h);
            const double tol = std::max(1e-6, 1e-4 * f.matrix(x, z).cwiseAbs().maxCoeff());
            CHECK((az - az_fd).cwiseAbs().maxCoeff() <= tol);

            for (int d = 0; d < f.dim; ++d) {
                Vec xp = x, xm = x;
                xp[d] += h;
                xm[d] -= h;
                const Mat ax_fd = (f.matrix(xp, z) - f.matrix(xm, z)) / (2.0 * h);
                CHECK((f.matrix_dx(x, z, d) - ax_fd).cwiseAbs().maxCoeff() <= tol);
            }
        }
    }
}

TEST_CASE("k components stay nonnegative and k1 is normalized") {
    testutil::Rng rng(11);
    for (const auto& name : {"identity", "fedii", "sharpness", "axis", "power"}) {
        const auto f = make_builtin_family(name, name == std::string("sharpness") ? std::vector<double>{2}
                                                                                  : std::vector<double>{});
        for (int trial = 0; trial < 200; ++trial) {
            Vec x(f.dim);
            for (int d = 0; d < f.dim; ++d) x[d] = rng.uniform(-1.0, 1.0);
            const Vec k = f.k(x, rng.uniform(-2.0, 2.0));
            CHECK(k[0] == 1.0);
            CHECK(k.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("box region") {
    const BoxRegion box(Vec{{0.5, -0.5}}, Vec{{1.0, 2.0}});
    const BoxRegion scaled = box.scaled(0.5);
    CHECK(scaled.center == box.center);
    CHECK(scaled.half_lengths == Vec{{0.5, 1.0}});
    CHECK(box.contains(Vec{{1.4, 1.4}}));
    CHECK(!box.contains(Vec{{1.6, 0.0}}));
    CHECK(box.contains(Vec{{0.8, 0.0}}, 1.0 / 3.0));
    CHECK_THROWS_AS(BoxRegion(Vec{{0.0, 0.0}}, Vec{{1.0, 0.0}}), ParameterError);
}
