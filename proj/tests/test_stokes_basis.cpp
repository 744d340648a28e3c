#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "stokeslab/stokes_basis.hpp"

using namespace stokeslab;

namespace {

const double kA = 1.0, kB = 2.0, kLz = 2.0;

const StokesBasis& basis2d() {
    static StokesBasis b = build_basis(make_grid(DomainSpec::annulus(kA, kB), 48, 6, 0), 60);
    return b;
}

const StokesBasis& basis3d() {
    static StokesBasis b = build_basis(make_grid(DomainSpec::annular_cylinder(kA, kB, kLz), 28, 2, 2), 40);
    return b;
}

}  // namespace

TEST_CASE("2d kernel is the normalized circulation field") {
    const auto& b = basis2d();
    REQUIRE(b.J() == 1);
    Field k0 = b.kernel_field(0);
    CHECK(std::abs(cut_flux(k0, 1) - 1.0) < 1e-11);
    CHECK(std::abs(cut_flux_at(k0, 1, 2.1, 0.0) - 1.0) < 1e-11);
    // profile proportional to 1/r, u_r = 0
    double c = std::real(k0.profile(0, 0, 1)[0]) * b.grid().r_nodes[0];
    for (int i = 0; i < b.grid().Nr; ++i) {
        CHECK(std::abs(k0.profile(0, 0, 1)[i] - c / b.grid().r_nodes[i]) < 1e-10);
        CHECK(std::abs(k0.profile(0, 0, 0)[i]) < 1e-10);
    }
    // flux normalization fixes c = 1/log(b/a)
    CHECK(c == doctest::Approx(1.0 / std::log(kB / kA)).epsilon(1e-10));
}

TEST_CASE("2d eigenvalues match the bessel cross-product roots") {
    const auto& b = basis2d();
    // oracle list: swirl eigenvalues (m=0) + Dirichlet stream eigenvalues
    // (each m >= 1 twice, for +-m), merged ascending
    std::vector<double> ref;
    for (double lam : oracles::swirl_eigs(kA, kB, 8)) ref.push_back(lam);
    for (int m = 1; m <= 6; ++m) {
        for (double lam : oracles::dirichlet_eigs(m, kA, kB, 8)) {
            ref.push_back(lam);
            ref.push_back(lam);
        }
    }
    std::sort(ref.begin(), ref.end());
    for (int i = 0; i < 30; ++i) {
        CHECK(b.eigs()[i].lambda == doctest::Approx(ref[i]).epsilon(1e-9));
    }
    CHECK(b.lambda1() == doctest::Approx(ref[0]).epsilon(1e-10));
}

TEST_CASE("residuals and gram certification") {
    const auto& b = basis2d();
    for (const auto& p : b.eigs()) {
        CHECK(p.residuals.eig <= 1e-8);
        CHECK(p.residuals.div <= 1e-8);
        CHECK(p.residuals.bc <= 1e-8);
    }
    CHECK(b.gram_error() < 1e-9);
}

TEST_CASE("expand and synthesize round trip") {
    const auto& b = basis2d();
    std::mt19937 rng(23);
    std::normal_distribution<double> dist;
    SpectralCoeffs c;
    c.alpha = Eigen::VectorXcd(1);
    c.alpha[0] = Complex(dist(rng), dist(rng));
    c.beta = Eigen::VectorXcd(b.size());
    for (int i = 0; i < b.size(); ++i) c.beta[i] = Complex(dist(rng), dist(rng));
    Field f = b.synthesize(c);
    SpectralCoeffs c2 = b.expand(f);
    CHECK(c2.recon_error < 1e-10);
    CHECK(std::abs(c2.alpha[0] - c.alpha[0]) < 1e-8 * c.alpha.norm());
    CHECK((c2.beta - c.beta).norm() < 1e-8 * c.beta.norm());
}

TEST_CASE("expand flags fields outside the span") {
    const auto& b = basis2d();
    auto g = b.grid_ptr();
    Field f = Field::vector(g);
    // a gradient field (curl-free, nonzero normal trace) is orthogonal to
    // every basis element: nothing of it is reconstructible
    for (int i = 0; i < g->Nr; ++i) f.profile(0, 0, 0)[i] = 1.0;
    CHECK_THROWS_AS(b.expand(f), NotInSpan);
    SpectralCoeffs c = b.expand(f, false);
    CHECK(c.recon_error > 0.9);
}

TEST_CASE("3d kernel spans circulation and axial flow with unit fluxes") {
    const auto& b = basis3d();
    REQUIRE(b.J() == 2);
    for (int i = 0; i < 2; ++i) {
        Field ki = b.kernel_field(i);
        for (int j = 1; j <= 2; ++j) {
            double expect = (i + 1 == j) ? 1.0 : 0.0;
            CHECK(std::abs(cut_flux(ki, j) - expect) < 1e-9);
        }
    }
    // kernel field 1 ~ e_theta / r, kernel field 2 ~ e_z
    Field k0 = b.kernel_field(0), k1 = b.kernel_field(1);
    const auto& g = b.grid();
    for (int i = 0; i < g.Nr; ++i) {
        CHECK(std::abs(k0.profile(0, 0, 1)[i] * g.r_nodes[i] * std::log(kB / kA) * kLz - 1.0) < 1e-8);
        CHECK(std::abs(k1.profile(0, 0, 2)[i] * std::numbers::pi * (kB * kB - kA * kA) - 1.0) < 1e-8);
    }
}

TEST_CASE("3d eigenvalues match bessel oracles in decoupled blocks") {
    const auto& b = basis3d();
    const auto& g = b.grid();
    // (m=0, k): swirl eigenvalues shifted by kt^2; axial block (m=0, k=0)
    // gives Neumann eigenvalues of order 0
    auto swirl = oracles::swirl_eigs(kA, kB, 4);
    auto neu = oracles::neumann_eigs(0, kA, kB, 4);
    auto has = [&](int m, int k, double lam) {
        for (const auto& p : b.eigs()) {
            if (p.mode.m == m && p.mode.k == k && std::abs(p.lambda - lam) < 1e-7 * (1.0 + lam)) return true;
        }
        return false;
    };
    CHECK(has(0, 0, swirl[0]));
    CHECK(has(0, 0, neu[0]));
    double kt1 = g.axial_wavenumber(1);
    CHECK(has(0, 1, swirl[0] + kt1 * kt1));
    CHECK(has(0, -1, swirl[0] + kt1 * kt1));
    // (m, k=0): 2D stream eigenvalues reappear
    auto dir1 = oracles::dirichlet_eigs(1, kA, kB, 2);
    CHECK(has(1, 0, dir1[0]));
    CHECK(has(-1, 0, dir1[0]));
}

TEST_CASE("3d residuals, multiplier constancy, divergence") {
    const auto& b = basis3d();
    for (const auto& p : b.eigs()) {
        CHECK(p.residuals.eig <= 1e-8);
        CHECK(p.residuals.div <= 1e-8);
        CHECK(p.residuals.bc <= 1e-8);
        CHECK(p.pressure_dev <= 1e-7);
    }
    CHECK(b.gram_error() < 1e-9);
    // explicit divergence check through the independent operator
    Field z = b.eigen_field(0);
    CHECK(norm_l2(vector_divergence(z)) < 1e-8);
}

TEST_CASE("capacity bound is enforced") {
    auto g = make_grid(DomainSpec::annulus(kA, kB), 16, 1, 0);
    CHECK_THROWS_AS(build_basis(g, g->basis_capacity() + 1), IndexOutOfRange);
    CHECK_THROWS_AS(build_basis(g, 0), IndexOutOfRange);
}

TEST_CASE("save and load round trip") {
    const auto& b = basis3d();
    std::string path = "basis_roundtrip.json";
    save_basis(b, path);
    StokesBasis b2 = load_basis(path);
    std::remove(path.c_str());
    REQUIRE(b2.size() == b.size());
    REQUIRE(b2.J() == b.J());
    for (int i = 0; i < b.size(); ++i) {
        CHECK(b2.eigs()[i].lambda == b.eigs()[i].lambda);
        CHECK(b2.eigs()[i].mode.m == b.eigs()[i].mode.m);
        CHECK((b2.eigs()[i].coeffs - b.eigs()[i].coeffs).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(b2.gram_error() == doctest::Approx(b.gram_error()).epsilon(1e-12));
}

TEST_CASE("deterministic rebuild") {
    auto g = make_grid(DomainSpec::annulus(kA, kB), 32, 3, 0);
    StokesBasis b1 = build_basis(g, 20);
    StokesBasis b2 = build_basis(g, 20);
    for (int i = 0; i < 20; ++i) {
        CHECK(b1.eigs()[i].lambda == b2.eigs()[i].lambda);
        CHECK((b1.eigs()[i].coeffs - b2.eigs()[i].coeffs).cwiseAbs().maxCoeff() == 0.0);
    }
}
