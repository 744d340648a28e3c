#include "stokeslab/analysis.hpp"

#include <cmath>
#include <random>

#include "stokeslab/funcalc.hpp"
#include "stokeslab/spectral_ops.hpp"

namespace stokeslab {

namespace {

// Shared quadrature core; p >= 1 is fine numerically, the public entry
// point narrows to p > 1.
double lp_norm_impl(const Field& f, double p, int oversample) {
    const SpectralGrid& g = f.grid();
    const int Nt = oversample * (2 * g.Mmax + 1) + 1;
    const int Nz = g.domain.dim() == 2 ? 1 : oversample * (2 * g.Kmax + 1) + 1;
    auto nodal = nodal_values(f, Nt, Nz);
    const bool inf = p > 1e12;
    const double dtheta = 2.0 * std::numbers::pi / Nt;
    const double dz = g.domain.dim() == 2 ? 1.0 : g.domain.Lz / Nz;
    double acc = 0.0, mx = 0.0;
    for (int i = 0; i < g.Nr; ++i) {
        for (Eigen::Index col = 0; col < nodal[0].cols(); ++col) {
            double mag2 = 0.0;
            for (const auto& comp : nodal) mag2 += std::norm(comp(i, col));
            double mag = std::sqrt(mag2);
            if (inf) {
                mx = std::max(mx, mag);
            } else {
                acc += std::pow(mag, p) * g.w_rjac[i] * dtheta * dz;
            }
        }
    }
    return inf ? mx : std::pow(acc, 1.0 / p);
}

}  // namespace

double lp_norm(const Field& f, double p, int oversample) {
    if (!(p > 1.0)) throw ExponentOutOfRange("lp_norm requires p > 1, got p=" + std::to_string(p));
    return lp_norm_impl(f, p, oversample);
}

Field apply_vector_laplacian(const Field& f) {
    const SpectralGrid& g = f.grid();
    if (!f.is_vector()) throw DimensionMismatch("apply_vector_laplacian requires a vector field");
    Field out = Field::vector(f.grid_ptr());
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto fb = f.mode_block(m, k);
            if (fb.cwiseAbs().maxCoeff() == 0.0) continue;
            auto ops = scalar_mode_laplacian(g, {m, k});
            out.mode_block(m, k) = ops.Lvec * Eigen::VectorXcd(fb);  // Lvec is -Delta
        }
    }
    return out;
}

double w1p_norm(const Field& f, double p) { return lp_norm(f, p) + lp_norm(vector_curl(f), p); }

double w2p_norm(const Field& f, double p) { return lp_norm(f, p) + lp_norm(apply_vector_laplacian(f), p); }

double negative_norm(const StokesBasis& basis, const Field& f) {
    SpectralCoeffs c = basis.expand(f);
    double acc = 0.0;
    for (int k = 0; k < basis.size(); ++k) acc += std::norm(c.beta[k]) / basis.eigs()[k].lambda;
    // kernel part in L^2: alpha^H G alpha with the kernel Gram matrix
    acc += std::real(c.alpha.dot(basis.kernel_gram() * c.alpha));
    return std::sqrt(acc);
}

Field bump_datum(const StokesBasis& basis, double width) {
    // Directional Gaussian bump g = G(x) e_theta centered at (r0, 0[, 0]),
    // then projected onto the zero-flux solenoidal span.  The projected
    // coefficients are <g, z_k>, so the evolved field is a heat-kernel
    // column: its L^infty decay exhibits the L^1 -> L^infty operator rate.
    const SpectralGrid& g = basis.grid();
    GridPtr gp = basis.grid_ptr();
    const double a = g.domain.a, b = g.domain.b;
    const double r0 = 0.5 * (a + b);
    const double st = width / r0;                        // angular std (arc length ~ width)
    Field u = Field::vector(gp);
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        double am = std::exp(-0.5 * m * m * st * st);    // wrapped Gaussian Fourier coefficients
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            double kt = g.axial_wavenumber(k);
            double ak = g.domain.dim() == 2 ? 1.0 : std::exp(-0.5 * kt * kt * width * width);
            for (int i = 0; i < g.Nr; ++i) {
                double r = g.r_nodes[i];
                // taper kills the boundary values before projection
                double taper = (r - a) * (r - a) * (b - r) * (b - r) / std::pow(0.25 * (b - a) * (b - a), 2);
                u.profile(m, k, 1)[i] =
                    am * ak * taper * std::exp(-0.5 * (r - r0) * (r - r0) / (width * width));
            }
        }
    }
    // project into the basis span: the fit then sees exactly what the
    // semigroup can evolve
    SpectralCoeffs c = basis.expand(u, false);
    c.alpha.setZero();
    return basis.synthesize(c);
}

DecayFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 3) {
        throw WindowTooNarrow("power-law fit needs at least 3 samples");
    }
    const int n = static_cast<int>(times.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = std::log(times[i]), y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    DecayFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = std::log(values[i]) - (fit.intercept + fit.slope * std::log(times[i]));
        ss += r * r;
    }
    fit.stderr_slope = n > 2 ? std::sqrt(ss / (n - 2) * n / denom) : 0.0;
    fit.t_min = times.front();
    fit.t_max = times.back();
    return fit;
}

DecayFit fit_smoothing_exponent(const StokesBasis& basis, const Field& u0, double p, double q, double t_min,
                                double t_max, int n_samples) {
    if (!(t_max >= 10.0 * t_min)) throw WindowTooNarrow("fit window must span at least one decade of t");
    if (n_samples < 3) throw WindowTooNarrow("need at least 3 samples");
    const double mu = basis.lambda1() / 2.0;

    // remove the kernel part: the algebraic rate concerns u0_tilde only
    SpectralCoeffs c0 = basis.expand(u0);
    c0.alpha.setZero();
    Field u0t = basis.synthesize(c0);
    if (!(p >= 1.0)) throw ExponentOutOfRange("fit_smoothing_exponent requires p >= 1");
    const double n0 = lp_norm_impl(u0t, p, 2);

    std::vector<double> ts(n_samples), vals(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (n_samples - 1));
        SpectralCoeffs ct = c0;
        for (int k = 0; k < basis.size(); ++k) ct.beta[k] *= std::exp(-basis.eigs()[k].lambda * t);
        Field ut = basis.synthesize(ct);
        ts[i] = t;
        vals[i] = lp_norm(ut, q) * std::exp(mu * t) / n0;
    }
    return fit_power_law(ts, vals);
}

MaxRegResult maximal_regularity_constant(const StokesBasis& basis, double p, double q, double T_horizon,
                                         int n_trials, unsigned seed, int n_steps) {
    if (!(p > 1.0) || !(q > 1.0)) throw ExponentOutOfRange("maximal regularity needs p, q in (1, inf)");
    const int n = basis.size();
    std::vector<double> tgrid(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i) tgrid[i] = T_horizon * i / n_steps;

    auto lq_time = [&](const std::vector<double>& samples) {
        // trapezoid in t of samples^q, then the q-th root
        double acc = 0.0;
        for (int i = 0; i < n_steps; ++i) {
            double h = tgrid[i + 1] - tgrid[i];
            acc += 0.5 * h * (std::pow(samples[i], q) + std::pow(samples[i + 1], q));
        }
        return std::pow(acc, 1.0 / q);
    };

    MaxRegResult out;
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < n_trials; ++trial) {
        // forcing: smooth modal spectrum ~ lambda_k^{-1}, random low-order
        // polynomial dependence on t
        std::vector<SpectralCoeffs> fc(n_steps + 1);
        Eigen::VectorXcd base(n), slope(n);
        for (int k = 0; k < n; ++k) {
            double w = basis.lambda1() / basis.eigs()[k].lambda;
            base[k] = Complex(dist(rng), dist(rng)) * w;
            slope[k] = Complex(dist(rng), dist(rng)) * w;
        }
        double fnorm_probe = base.norm() + slope.norm();
        if (fnorm_probe == 0.0) {
            ++out.skipped;
            continue;
        }
        for (int i = 0; i <= n_steps; ++i) {
            double s = tgrid[i] / T_horizon;
            fc[i].alpha = Eigen::VectorXcd::Zero(basis.J());
            fc[i].beta = base + s * slope;
        }
        EvolutionResult ev = evolve_inhomogeneous(basis, tgrid, fc, tgrid);

        std::vector<double> nf(n_steps + 1), ndu(n_steps + 1), nlap(n_steps + 1);
        for (int i = 0; i <= n_steps; ++i) {
            Field ff = basis.synthesize(fc[i]);
            SpectralCoeffs du = ev.states[i];  // d_t u = f - A u per mode
            SpectralCoeffs lap = ev.states[i];
            for (int k = 0; k < n; ++k) {
                double lam = basis.eigs()[k].lambda;
                lap.beta[k] *= lam;
                du.beta[k] = fc[i].beta[k] - lam * ev.states[i].beta[k];
            }
            lap.alpha.setZero();
            du.alpha = fc[i].alpha;
            nf[i] = lp_norm(ff, p);
            ndu[i] = lp_norm(basis.synthesize(du), p);
            nlap[i] = lp_norm(basis.synthesize(lap), p);
        }
        double denom = lq_time(nf);
        if (denom < 1e-14) {
            ++out.skipped;
            continue;
        }
        double num = std::pow(std::pow(lq_time(ndu), q) + std::pow(lq_time(nlap), q), 1.0 / q);
        out.ratios.push_back(num / denom);
        out.max_ratio = std::max(out.max_ratio, num / denom);
    }
    return out;
}

std::vector<SweepRow> resolvent_sweep(const StokesBasis& basis, const std::vector<double>& angles,
                                      const std::vector<double>& magnitudes, double p, int n_probes,
                                      unsigned seed) {
    std::vector<SweepRow> rows;
    std::vector<Field> probes;
    std::vector<double> fnorms;
    for (int i = 0; i < n_probes; ++i) {
        probes.push_back(random_probe(basis, seed + 1000 * i));
        fnorms.push_back(lp_norm(probes.back(), p));
    }
    for (double ang : angles) {
        for (double mag : magnitudes) {
            Complex lambda = std::polar(mag, ang);
            double q1 = 0.0, q2 = 0.0, q3 = 0.0;
            for (int i = 0; i < n_probes; ++i) {
                Field u = resolvent_apply(basis, lambda, probes[i], ResolventRoute::Spectral);
                q1 = std::max(q1, mag * lp_norm(u, p) / fnorms[i]);
                q2 = std::max(q2, std::sqrt(mag) * lp_norm(vector_curl(u), p) / fnorms[i]);
                q3 = std::max(q3, w2p_norm(u, p) * mag / ((1.0 + mag) * fnorms[i]));
            }
            rows.push_back({ang, mag, "abslam_u", q1});
            rows.push_back({ang, mag, "sqrtlam_curl", q2});
            rows.push_back({ang, mag, "w2p", q3});
        }
    }
    return rows;
}

}  // namespace stokeslab
