#include "stokeslab/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "stokeslab/spectral_ops.hpp"

namespace stokeslab {

double phi1(double x) {
    if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0;
    return (1.0 - std::exp(-x)) / x;
}

double phi2(double x) {
    if (std::abs(x) < 1e-4) return 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
    return (1.0 - (1.0 + x) * std::exp(-x)) / (x * x);
}

EvolutionResult evolve_homogeneous(const StokesBasis& basis, const Field& u0, std::vector<double> times) {
    std::sort(times.begin(), times.end());
    if (!times.empty() && times.front() < 0.0) throw IllPosed("negative evolution time");
    SpectralCoeffs c0 = basis.expand(u0);
    EvolutionResult out;
    out.times = times;
    out.states.reserve(times.size());
    for (double t : times) {
        SpectralCoeffs ct = c0;
        for (int k = 0; k < basis.size(); ++k) ct.beta[k] *= std::exp(-basis.eigs()[k].lambda * t);
        out.states.push_back(std::move(ct));
    }
    return out;
}

EvolutionResult evolve_inhomogeneous(const StokesBasis& basis, const std::vector<double>& forcing_times,
                                     const std::vector<SpectralCoeffs>& forcing, std::vector<double> times) {
    if (forcing_times.size() != forcing.size() || forcing_times.size() < 2) {
        throw NonUniformSamples("forcing needs at least two time samples with matching sizes");
    }
    for (size_t i = 1; i < forcing_times.size(); ++i) {
        if (!(forcing_times[i] > forcing_times[i - 1])) {
            throw NonUniformSamples("forcing times must be strictly increasing");
        }
    }
    if (std::abs(forcing_times.front()) > 1e-14) throw NonUniformSamples("forcing samples must start at t = 0");
    std::sort(times.begin(), times.end());
    auto on_grid = [&](double t) {
        for (size_t i = 0; i < forcing_times.size(); ++i) {
            if (std::abs(forcing_times[i] - t) <= 1e-12 * (1.0 + std::abs(t))) return static_cast<int>(i);
        }
        return -1;
    };
    std::vector<int> out_index(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        out_index[i] = on_grid(times[i]);
        if (out_index[i] < 0) {
            throw NonUniformSamples("output time not on the forcing grid (forcing must be the evolution grid "
                                    "or finer)");
        }
    }

    const int J = basis.J();
    const int n = basis.size();
    SpectralCoeffs state;
    state.alpha = Eigen::VectorXcd::Zero(J);
    state.beta = Eigen::VectorXcd::Zero(n);

    EvolutionResult out;
    out.times = times;
    out.states.resize(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        if (out_index[i] == 0) out.states[i] = state;
    }

    for (size_t step = 1; step < forcing_times.size(); ++step) {
        const double h = forcing_times[step] - forcing_times[step - 1];
        const SpectralCoeffs& f0 = forcing[step - 1];
        const SpectralCoeffs& f1 = forcing[step];
        // beta(s1) = e^{-lam h} beta(s0) + h [ f1 (phi1 - phi2) + f0 phi2 ]
        for (int k = 0; k < n; ++k) {
            double x = basis.eigs()[k].lambda * h;
            state.beta[k] = std::exp(-x) * state.beta[k] +
                            h * (f1.beta[k] * (phi1(x) - phi2(x)) + f0.beta[k] * phi2(x));
        }
        // kernel: alpha' = f_alpha, trapezoid exact for linear interpolants
        state.alpha += 0.5 * h * (f0.alpha + f1.alpha);
        for (size_t i = 0; i < times.size(); ++i) {
            if (out_index[i] == static_cast<int>(step)) out.states[i] = state;
        }
    }
    return out;
}

namespace {

Field resolvent_direct(const StokesBasis& basis, Complex lambda, const Field& f) {
    const SpectralGrid& g = basis.grid();
    const int Nr = g.Nr, nc = g.ncomp();
    Field u = Field::vector(f.grid_ptr());
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto fb = f.mode_block(m, k);
            if (fb.cwiseAbs().maxCoeff() == 0.0) continue;
            auto ops = scalar_mode_laplacian(g, {m, k});
            Eigen::MatrixXcd A = ops.Lvec;
            A.diagonal().array() += lambda;
            apply_navier_bc(g, {m, k}, A);
            Eigen::VectorXcd rhs = fb;
            for (int row : ops.bc_rows) rhs[row] = 0.0;
            Eigen::VectorXcd sol;
            if (m == 0 && k == 0 && std::abs(lambda) < 1e-12) {
                // kernel modes live here: rank-deficient; minimum-norm solve,
                // then remove any kernel component w.r.t. the weighted metric
                Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
                sol = cod.solve(rhs);
                for (const auto& kp : basis.kernel()) {
                    Eigen::VectorXcd kv(static_cast<Eigen::Index>(nc) * Nr);
                    for (int c = 0; c < nc; ++c) kv.segment(c * Nr, Nr) = kp.coeffs.row(c).transpose();
                    Complex num = 0.0, den = 0.0;
                    for (int c = 0; c < nc; ++c) {
                        for (int i = 0; i < Nr; ++i) {
                            num += sol[c * Nr + i] * std::conj(kv[c * Nr + i]) * g.w_rjac[i];
                            den += kv[c * Nr + i] * std::conj(kv[c * Nr + i]) * g.w_rjac[i];
                        }
                    }
                    sol -= (num / den) * kv;
                }
            } else {
                Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
                sol = lu.solve(rhs);
                double res = (A * sol - rhs).norm() / (1.0 + rhs.norm());
                if (res > 1e-6) throw SolveFailure("direct resolvent mode solve residual " + std::to_string(res));
            }
            u.mode_block(m, k) = sol;
        }
    }
    return u;
}

}  // namespace

Field resolvent_apply(const StokesBasis& basis, Complex lambda, const Field& f, ResolventRoute route) {
    if (lambda.real() < 0.0) {
        for (const auto& p : basis.eigs()) {
            if (std::abs(lambda + p.lambda) < 1e-12) {
                throw IllPosed("lambda collides with -lambda_k at lambda_k = " + std::to_string(p.lambda));
            }
        }
    }
    const bool lambda_zero = std::abs(lambda) == 0.0;
    if (lambda_zero) {
        double fn = norm_l2(f);
        for (int j = 1; j <= basis.J(); ++j) {
            if (std::abs(cut_flux(f, j)) > 1e-10 * (1.0 + fn)) {
                throw SingularResolvent("lambda = 0 with a nonzero kernel component (flux through cut " +
                                        std::to_string(j) + ")");
            }
        }
    }
    if (route == ResolventRoute::Direct) return resolvent_direct(basis, lambda, f);

    SpectralCoeffs c = basis.expand(f);
    for (int k = 0; k < basis.size(); ++k) c.beta[k] /= (lambda + basis.eigs()[k].lambda);
    if (lambda_zero) {
        c.alpha.setZero();
    } else {
        c.alpha /= lambda;
    }
    return basis.synthesize(c);
}

}  // namespace stokeslab
