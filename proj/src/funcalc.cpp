#include "stokeslab/funcalc.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "stokeslab/analysis.hpp"
#include "stokeslab/helmholtz.hpp"

namespace stokeslab {

namespace {

const Complex kI{0.0, 1.0};

void check_kernel_free(const StokesBasis& basis, const SpectralCoeffs& c, double fnorm) {
    for (int j = 0; j < basis.J(); ++j) {
        if (std::abs(c.alpha[j]) > 1e-9 * (1.0 + fnorm)) {
            throw KernelComponentPresent("shift = 0 requires kernel-orthogonal data; alpha[" +
                                         std::to_string(j) + "] = " + std::to_string(std::abs(c.alpha[j])));
        }
    }
}

}  // namespace

std::vector<Field> power_apply_many(const StokesBasis& basis, const std::vector<Complex>& alphas,
                                    const Field& f, double shift, const DunfordOptions& opts) {
    // spectrum of (shift + A): {shift} (kernel, when shift > 0) and
    // [shift + lambda_1, shift + lambda_max].  The cycle is an ellipse around
    // the continuous part plus, when shift > 0, a small circle around the
    // isolated kernel eigenvalue; each piece then converges geometrically.
    const double zl = shift + basis.lambda1() / 2.0;
    const double zr = shift + 2.0 * basis.lambda_max();
    if (!(zl > 0.0)) throw BranchCut("contour touches the branch point at 0");
    if (shift == 0.0) {
        SpectralCoeffs c = basis.expand(f, false);
        check_kernel_free(basis, c, norm_l2(f));
    }
    struct Piece {
        double cx, ax, ay;
        int N;
    };
    std::vector<Piece> pieces;
    pieces.push_back({0.5 * (zl + zr), 0.5 * (zr - zl), 0.5 * (zr - zl), opts.n_quad});
    if (shift > 0.0) {
        double rad = 0.5 * std::min(shift, basis.lambda1());
        pieces.push_back({shift, rad, rad, std::min(opts.n_quad, 400)});
    }
    std::vector<Field> out;
    for (size_t a = 0; a < alphas.size(); ++a) out.push_back(Field::vector(f.grid_ptr()));
    for (const Piece& pc : pieces) {
        for (int j = 0; j < pc.N; ++j) {
            // half-offset nodes keep the contour away from the real axis
            double phi = 2.0 * std::numbers::pi * (j + 0.5) / pc.N;
            Complex z = pc.cx + pc.ax * std::cos(phi) + kI * pc.ay * std::sin(phi);
            Complex dz = (-pc.ax * std::sin(phi) + kI * pc.ay * std::cos(phi)) *
                         (2.0 * std::numbers::pi / pc.N);
            // (z - shift - A)^{-1} = -((shift - z) + A)^{-1}
            Field rf = resolvent_apply(basis, shift - z, f, ResolventRoute::Direct);
            for (size_t a = 0; a < alphas.size(); ++a) {
                Complex w = -std::pow(z, alphas[a]) * dz / (2.0 * std::numbers::pi * kI);
                out[a] += w * rf;
            }
        }
    }
    return out;
}

Field power_apply(const StokesBasis& basis, Complex alpha, const Field& f, PowerRoute route, double shift,
                  const DunfordOptions& opts) {
    if (route == PowerRoute::Dunford) {
        return power_apply_many(basis, {alpha}, f, shift, opts)[0];
    }
    SpectralCoeffs c = basis.expand(f);
    if (shift == 0.0) {
        check_kernel_free(basis, c, norm_l2(f));
        c.alpha.setZero();
    } else {
        c.alpha *= std::pow(Complex(shift), alpha);
    }
    for (int k = 0; k < basis.size(); ++k) {
        c.beta[k] *= std::pow(Complex(shift + basis.eigs()[k].lambda), alpha);
    }
    return basis.synthesize(c);
}

Field random_probe(const StokesBasis& basis, unsigned seed, double decay) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    SpectralCoeffs c;
    c.alpha = Eigen::VectorXcd::Zero(basis.J());
    c.beta.resize(basis.size());
    const double l1 = basis.lambda1();
    for (int k = 0; k < basis.size(); ++k) {
        double w = std::pow(l1 / basis.eigs()[k].lambda, decay);
        c.beta[k] = Complex(dist(rng), dist(rng)) * w;
    }
    return basis.synthesize(c);
}

namespace {

// One ascent pass of the probe-based L^p operator-norm estimate for a
// diagonal spectral multiplier T: beta_k -> mult_k beta_k.  Duality maps are
// applied nodally, then the iterate is projected back into the basis span.
double multiplier_norm_lp(const StokesBasis& basis, const Eigen::VectorXcd& mult, double p, int n_probes,
                          unsigned seed, int n_iter = 20) {
    const double pdual = p / (p - 1.0);
    const SpectralGrid& g = basis.grid();
    const int Nt = 2 * (2 * g.Mmax + 1) + 1;
    const int Nz = g.domain.dim() == 2 ? 1 : 2 * (2 * g.Kmax + 1) + 1;

    auto apply = [&](const SpectralCoeffs& c, bool adjoint) {
        SpectralCoeffs r = c;
        for (int k = 0; k < basis.size(); ++k) r.beta[k] *= adjoint ? std::conj(mult[k]) : mult[k];
        return r;
    };
    auto duality_map = [&](const Field& u, double pp) {
        // J_pp(u) = |u|^{pp-2} u pointwise (vector magnitude)
        auto nodal = nodal_values(u, Nt, Nz);
        for (int i = 0; i < g.Nr; ++i) {
            for (Eigen::Index col = 0; col < nodal[0].cols(); ++col) {
                double mag2 = 0.0;
                for (const auto& compv : nodal) mag2 += std::norm(compv(i, col));
                double scale = mag2 > 0.0 ? std::pow(std::sqrt(mag2), pp - 2.0) : 0.0;
                for (auto& compv : nodal) compv(i, col) *= scale;
            }
        }
        return modal_from_nodal(u.grid_ptr(), nodal, Nt, Nz);
    };

    double best = 0.0;
    for (int probe = 0; probe < n_probes; ++probe) {
        SpectralCoeffs c = basis.expand(random_probe(basis, seed + 7919u * probe), false);
        c.alpha.setZero();
        for (int it = 0; it < n_iter; ++it) {
            double ng = lp_norm(basis.synthesize(c), p);
            if (ng == 0.0) break;
            Field u = basis.synthesize(apply(c, false));
            double ratio = lp_norm(u, p) / ng;
            best = std::max(best, ratio);
            // ascent: v = T^H J_p(T g), projected back into the span
            Field d = duality_map(u, p);
            SpectralCoeffs cd = basis.expand(project(d), false);
            cd.alpha.setZero();
            SpectralCoeffs next = apply(cd, true);
            double nn = lp_norm(basis.synthesize(next), pdual);
            if (nn == 0.0) break;
            // map back through the dual exponent to keep iterates tame
            Field nd = duality_map(basis.synthesize(next), pdual);
            c = basis.expand(project(nd), false);
            c.alpha.setZero();
            double nc = norm_l2(basis.synthesize(c));
            if (nc == 0.0) break;
            for (int k = 0; k < basis.size(); ++k) c.beta[k] /= nc;
        }
    }
    return best;
}

}  // namespace

GrowthFit imaginary_power_growth(const StokesBasis& basis, double p, const std::vector<double>& s_list,
                                 int n_probes, unsigned seed) {
    if (!(p > 1.0)) throw ExponentOutOfRange("imaginary_power_growth requires p in (1, inf)");
    GrowthFit fit;
    for (double s : s_list) {
        Eigen::VectorXcd mult(basis.size());
        for (int k = 0; k < basis.size(); ++k) {
            mult[k] = std::pow(Complex(basis.eigs()[k].lambda), Complex(0.0, s));
        }
        double nrm;
        if (s == 0.0) {
            nrm = 1.0;
        } else if (std::abs(p - 2.0) < 1e-14) {
            // unitary multiplier in the orthonormal basis; verify on probes
            nrm = 0.0;
            for (int i = 0; i < std::max(1, n_probes); ++i) {
                Field g0 = random_probe(basis, seed + 31u * i);
                SpectralCoeffs c = basis.expand(g0);
                for (int k = 0; k < basis.size(); ++k) c.beta[k] *= mult[k];
                nrm = std::max(nrm, norm_l2(basis.synthesize(c)) / norm_l2(g0));
            }
        } else {
            nrm = multiplier_norm_lp(basis, mult, p, n_probes, seed);
        }
        fit.s_values.push_back(s);
        fit.norms.push_back(nrm);
    }
    // least squares log(norm) = log K + theta |s|
    const int n = static_cast<int>(fit.s_values.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = std::abs(fit.s_values[i]), y = std::log(std::max(fit.norms[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-14) {
        fit.theta = 0.0;
        fit.K = std::exp(sy / std::max(n, 1));
    } else {
        fit.theta = (n * sxy - sx * sy) / denom;
        fit.K = std::exp((sy - fit.theta * sx) / n);
    }
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = std::log(std::max(fit.norms[i], 1e-300)) -
                   (std::log(fit.K) + fit.theta * std::abs(fit.s_values[i]));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / std::max(n, 1));
    return fit;
}

double sobolev_embedding_constant(const StokesBasis& basis, double alpha, double p, double q, int n_probes,
                                  unsigned seed) {
    const int d = basis.grid().domain.dim();
    if (!(p > 1.0) || !(q > p)) throw ExponentOutOfRange("need 1 < p < q");
    const double lhs = 1.0 / q;
    const double rhs = d == 3 ? 1.0 / p - 2.0 * alpha / 3.0 : 1.0 / p - alpha;
    if (std::abs(lhs - rhs) > 1e-9) {
        throw ExponentOutOfRange("exponent relation 1/q = 1/p - 2 alpha/d violated (d=" + std::to_string(d) +
                                 ")");
    }
    const double alpha_max = d == 3 ? 3.0 / (2.0 * p) : 1.0 / p;
    if (!(alpha > 0.0) || !(alpha < alpha_max)) {
        throw ExponentOutOfRange("alpha out of the admissible range (0, " + std::to_string(alpha_max) + ")");
    }
    double best = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        Field g0 = random_probe(basis, seed + 101u * i);
        Field ag = power_apply(basis, Complex(alpha), g0);
        double den = lp_norm(ag, p);
        if (den == 0.0) continue;
        best = std::max(best, lp_norm(g0, q) / den);
    }
    return best;
}

}  // namespace stokeslab
