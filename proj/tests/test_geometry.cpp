#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stokeslab/geometry.hpp"

using namespace stokeslab;

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(DomainSpec::annulus(2.0, 1.0), InvalidGeometry);
    CHECK_THROWS_AS(DomainSpec::annulus(-1.0, 1.0), InvalidGeometry);
    CHECK_THROWS_AS(DomainSpec::annular_cylinder(1.0, 2.0, 0.0), InvalidGeometry);
    auto d2 = DomainSpec::annulus(1.0, 2.0);
    CHECK(d2.dim() == 2);
    CHECK(d2.cuts() == 1);
    CHECK(d2.volume() == doctest::Approx(3.0 * std::numbers::pi));
    auto d3 = DomainSpec::annular_cylinder(1.0, 2.0, 2.0);
    CHECK(d3.dim() == 3);
    CHECK(d3.cuts() == 2);
    CHECK(d3.volume() == doctest::Approx(6.0 * std::numbers::pi));
}

TEST_CASE("grid construction guards") {
    auto d2 = DomainSpec::annulus(1.0, 2.0);
    CHECK_THROWS_AS(make_grid(d2, 4, 3, 0), InvalidGeometry);
    CHECK_THROWS_AS(make_grid(d2, 16, 3, 2), DimensionMismatch);
    auto g = make_grid(d2, 16, 3, 0);
    CHECK(g->r_nodes[0] == 1.0);
    CHECK(g->r_nodes[15] == 2.0);
    for (int i = 1; i < 16; ++i) CHECK(g->r_nodes[i] > g->r_nodes[i - 1]);
    CHECK(g->n_mode_pairs() == 7);
    CHECK(g->basis_capacity() == 16 * 7 / 4);
    CHECK_THROWS_AS(g->mode_index(4, 0), IndexOutOfRange);
}

TEST_CASE("clenshaw-curtis weights integrate polynomials") {
    const double a = 1.3, b = 2.7;
    for (int n : {9, 16, 33}) {
        auto r = chebyshev_lobatto_nodes(a, b, n);
        auto w = clenshaw_curtis_weights(a, b, n);
        for (int p = 0; p <= n - 2; ++p) {
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += w[i] * std::pow(r[i], p);
            double exact = (std::pow(b, p + 1) - std::pow(a, p + 1)) / (p + 1);
            CHECK(q == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("differentiation matrix is spectrally exact on polynomials") {
    const double a = 1.0, b = 2.0;
    auto r = chebyshev_lobatto_nodes(a, b, 20);
    auto D = differentiation_matrix(r);
    Eigen::VectorXd f(20), df(20);
    for (int i = 0; i < 20; ++i) {
        double x = r[i];
        f[i] = x * x * x - 2.0 * x + 1.0;
        df[i] = 3.0 * x * x - 2.0;
    }
    CHECK(((D * f - df).cwiseAbs().maxCoeff()) < 1e-10);
    // second derivative through D^2
    Eigen::MatrixXd D2 = D * D;
    Eigen::VectorXd d2f(20);
    for (int i = 0; i < 20; ++i) d2f[i] = 6.0 * r[i];
    CHECK(((D2 * f - d2f).cwiseAbs().maxCoeff()) < 1e-8);
}

TEST_CASE("differentiation converges for transcendental data") {
    // probe-doubling: error should collapse by many orders between N and 2N
    const double a = 1.0, b = 2.0;
    auto err = [&](int n) {
        auto r = chebyshev_lobatto_nodes(a, b, n);
        auto D = differentiation_matrix(r);
        Eigen::VectorXd f(n), df(n);
        for (int i = 0; i < n; ++i) {
            f[i] = std::sin(3.0 * r[i]);
            df[i] = 3.0 * std::cos(3.0 * r[i]);
        }
        return (D * f - df).cwiseAbs().maxCoeff();
    };
    double e1 = err(10), e2 = err(20);
    CHECK(e2 < 1e-6 * e1);
    CHECK(e2 < 1e-10);
}

TEST_CASE("axial wavenumbers and measure factors") {
    auto g3 = make_grid(DomainSpec::annular_cylinder(1.0, 2.0, 2.5), 16, 2, 2);
    CHECK(g3->axial_wavenumber(1) == doctest::Approx(2.0 * std::numbers::pi / 2.5));
    CHECK(g3->angular_factor() == doctest::Approx(2.0 * std::numbers::pi * 2.5));
    // total measure: sum of w_quad equals |Omega|
    CHECK(g3->w_quad.sum() == doctest::Approx(g3->domain.volume()).epsilon(1e-12));
    auto g2 = make_grid(DomainSpec::annulus(1.0, 2.0), 16, 2, 0);
    CHECK(g2->w_quad.sum() == doctest::Approx(g2->domain.volume()).epsilon(1e-12));
}
