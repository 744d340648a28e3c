#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stokeslab/helmholtz.hpp"
#include "stokeslab/spectral_ops.hpp"

using namespace stokeslab;

namespace {

GridPtr grid2d() { return make_grid(DomainSpec::annulus(1.0, 2.0), 32, 4, 0); }

const StokesBasis& basis2d() {
    static StokesBasis b = build_basis(grid2d(), 30);
    return b;
}

double weighted_mean(const SpectralGrid& g, const Field& s) {
    Complex acc = 0.0;
    for (int i = 0; i < g.Nr; ++i) acc += s.profile(0, 0, 0)[i] * g.w_rjac[i];
    return std::real(acc) / g.w_rjac.sum();
}

// Second-order FD solve of (1/r)(r pi')' - m^2/r^2 pi = rhs(r) with Neumann
// data pi'(a) = ga, pi'(b) = gb; uniform grid, Thomas algorithm.  This is the
// independent radial discretization behind the Hodge-split oracle.
Eigen::VectorXd fd_neumann_mode(int m, double a, double b, int n,
                                const std::function<double(double)>& rhs, double ga, double gb) {
    const double h = (b - a) / (n - 1);
    Eigen::VectorXd dl(n), d(n), du(n), f(n);
    for (int i = 0; i < n; ++i) {
        double r = a + i * h;
        if (i == 0) {
            // ghost point from pi'(a) = ga
            double rp = r + 0.5 * h, rm = r - 0.5 * h;
            d[0] = -(rp + rm) / (r * h * h) - m * m / (r * r);
            du[0] = (rp + rm) / (r * h * h);
            f[0] = rhs(r) + (2.0 * rm / (r * h)) * ga;
            dl[0] = 0;
        } else if (i == n - 1) {
            double rp = r + 0.5 * h, rm = r - 0.5 * h;
            d[i] = -(rp + rm) / (r * h * h) - m * m / (r * r);
            dl[i] = (rp + rm) / (r * h * h);
            f[i] = rhs(r) - (2.0 * rp / (r * h)) * gb;
            du[i] = 0;
        } else {
            double rp = r + 0.5 * h, rm = r - 0.5 * h;
            dl[i] = rm / (r * h * h);
            du[i] = rp / (r * h * h);
            d[i] = -(rp + rm) / (r * h * h) - m * m / (r * r);
            f[i] = rhs(r);
        }
    }
    if (m == 0) {
        // pin one value to fix the constant; re-gauge afterwards
        d[0] = 1.0;
        du[0] = 0.0;
        f[0] = 0.0;
    }
    // Thomas
    for (int i = 1; i < n; ++i) {
        double w = dl[i] / d[i - 1];
        d[i] -= w * du[i - 1];
        f[i] -= w * f[i - 1];
    }
    Eigen::VectorXd x(n);
    x[n - 1] = f[n - 1] / d[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = (f[i] - du[i] * x[i + 1]) / d[i];
    return x;
}

}  // namespace

TEST_CASE("pure gradient input recovers the potential") {
    auto g = grid2d();
    // chi = r^2 cos(theta): modal profile r^2/2 in m = +-1
    Field chi = Field::scalar(g);
    for (int i = 0; i < g->Nr; ++i) {
        double v = g->r_nodes[i] * g->r_nodes[i] / 2.0;
        chi.profile(1, 0, 0)[i] = v;
        chi.profile(-1, 0, 0)[i] = v;
    }
    Field f = gradient(chi);
    Field pi = weak_neumann(f);
    // pi = chi - mean(chi); the m = +-1 parts carry no mean
    double err = 0.0;
    for (int i = 0; i < g->Nr; ++i) {
        err = std::max(err, std::abs(pi.profile(1, 0, 0)[i] - chi.profile(1, 0, 0)[i]));
        err = std::max(err, std::abs(pi.profile(-1, 0, 0)[i] - chi.profile(-1, 0, 0)[i]));
    }
    CHECK(err < 1e-9 * norm_l2(chi));
    CHECK(std::abs(weighted_mean(*g, pi)) < 1e-10);
}

TEST_CASE("solenoidal tangent input produces zero potential") {
    auto g = grid2d();
    Field f = Field::vector(g);
    for (int i = 0; i < g->Nr; ++i) f.profile(0, 0, 1)[i] = 1.0 / g->r_nodes[i];
    Field pi = weak_neumann(f);
    CHECK(norm_l2(gradient(pi)) < 1e-10);
}

TEST_CASE("random smooth input matches the FD Hodge oracle") {
    auto g = grid2d();
    const double a = 1.0, b = 2.0;
    // analytic test field, modes m in {0, 1, 2}:
    //   f_r = r^2 cos(m theta) pieces, f_theta = (r - 1)(2 - r) sin-free
    // realized modally with real profiles fr_m(r) = r^2/(m+1), ft_m(r) = r - 1.2
    Field f = Field::vector(g);
    for (int m = 0; m <= 2; ++m) {
        for (int i = 0; i < g->Nr; ++i) {
            double r = g->r_nodes[i];
            f.profile(m, 0, 0)[i] = r * r / (m + 1.0);
            f.profile(m, 0, 1)[i] = r - 1.2;
        }
    }
    Field pi = weak_neumann(f);

    const int nfd = 6000;
    for (int m = 0; m <= 2; ++m) {
        // div f for this mode: fr' + fr/r + i m ft / r with our real profiles
        // has real part fr' + fr/r and imaginary part m ft / r; solve the two
        // parts separately (the FD solver is real)
        auto rhs_re = [&](double r) { return 2.0 * r / (m + 1.0) + r / (m + 1.0); };
        auto rhs_im = [&](double r) { return m * (r - 1.2) / r; };
        double ga = a * a / (m + 1.0), gb = b * b / (m + 1.0);
        Eigen::VectorXd pre = fd_neumann_mode(m, a, b, nfd, rhs_re, ga, gb);
        Eigen::VectorXd pim = fd_neumann_mode(m, a, b, nfd, rhs_im, 0.0, 0.0);
        // compare gradients (gauge-free) at interior FD nodes against the
        // spectral solution interpolated barycentrically
        Eigen::VectorXd bw(g->Nr);
        for (int j = 0; j < g->Nr; ++j) {
            double s = (j % 2 == 0) ? 1.0 : -1.0;
            bw[j] = s * ((j == 0 || j == g->Nr - 1) ? 0.5 : 1.0);
        }
        auto interp = [&](const Eigen::VectorXcd& vals, double r) {
            Complex num = 0.0;
            double den = 0.0;
            for (int j = 0; j < g->Nr; ++j) {
                double diff = r - g->r_nodes[j];
                if (std::abs(diff) < 1e-14) return vals[j];
                num += bw[j] / diff * vals[j];
                den += bw[j] / diff;
            }
            return num / den;
        };
        Eigen::VectorXcd piprof = pi.profile_vec(m, 0, 0);
        const double h = (b - a) / (nfd - 1);
        double err = 0.0, scale = 0.0;
        for (int i = 10; i < nfd - 10; i += 37) {
            double r = a + i * h;
            Complex dspec = (interp(piprof, r + h) - interp(piprof, r - h)) / (2.0 * h);
            double dre = (pre[i + 1] - pre[i - 1]) / (2.0 * h);
            double dim = (pim[i + 1] - pim[i - 1]) / (2.0 * h);
            err = std::max(err, std::abs(dspec - Complex(dre, dim)));
            scale = std::max(scale, std::abs(dspec));
        }
        CHECK(err < 1e-5 * std::max(1.0, scale));
    }
}

TEST_CASE("projection annihilates gradients and fixes solenoidal fields") {
    auto g = grid2d();
    const auto& bas = basis2d();
    Field chi = Field::scalar(g);
    for (int m = -2; m <= 2; ++m) {
        for (int i = 0; i < g->Nr; ++i) {
            double r = g->r_nodes[i];
            chi.profile(m, 0, 0)[i] = Complex(r * r - m * r, 0.3 * r);
        }
    }
    Field gc = gradient(chi);
    CHECK(norm_l2(project(gc)) < 1e-8 * norm_l2(gc));

    Field z = bas.eigen_field(0);
    CHECK(norm_l2(project(z) - z) < 1e-9);

    // idempotence on a mixed field
    Field mixed = z + gc;
    Field p1 = project(mixed);
    Field p2 = project(p1);
    CHECK(norm_l2(p1 - p2) < 1e-9 * std::max(1.0, norm_l2(p1)));

    // orthogonality <Pf, grad chi> = 0
    CHECK(std::abs(inner(p1, gc)) < 1e-9 * norm_l2(p1) * norm_l2(gc));
}

TEST_CASE("flux splitting") {
    const auto& bas = basis2d();
    Field k0 = bas.kernel_field(0);
    Field z1 = bas.eigen_field(0);

    auto s1 = split_flux(bas, k0);
    CHECK(norm_l2(s1.w0 - k0) < 1e-9);
    CHECK(norm_l2(s1.u0_tilde) < 1e-9);

    auto s2 = split_flux(bas, z1);
    CHECK(norm_l2(s2.w0) < 1e-9);
    CHECK(norm_l2(s2.u0_tilde - z1) < 1e-9);

    Field mix = k0 + z1;
    auto s3 = split_flux(bas, mix);
    CHECK(norm_l2(s3.w0 - k0) < 1e-9);
    CHECK(norm_l2(s3.u0_tilde - z1) < 1e-9);

    // applying the split to u0_tilde is the identity on the zero-flux part
    auto s4 = split_flux(bas, s3.u0_tilde);
    CHECK(norm_l2(s4.w0) < 1e-10);
    CHECK(norm_l2(s4.u0_tilde - s3.u0_tilde) < 1e-12);

    // agreement with the L2-orthogonal projection onto the kernel complement
    Field u0 = 2.0 * k0 + z1;
    auto s5 = split_flux(bas, u0);
    Complex proj = inner(u0, k0) / inner(k0, k0);
    Field tilde_l2 = u0 - proj * k0;
    CHECK(norm_l2(s5.u0_tilde - tilde_l2) < 1e-8 * norm_l2(u0));
}
