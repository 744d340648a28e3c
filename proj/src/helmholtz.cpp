#include "stokeslab/helmholtz.hpp"

#include "stokeslab/spectral_ops.hpp"

namespace stokeslab {

namespace {
const Complex kI{0.0, 1.0};
}

Field weak_neumann(const Field& f) {
    const SpectralGrid& g = f.grid();
    if (!f.is_vector()) throw DimensionMismatch("weak_neumann requires a vector field");
    const int Nr = g.Nr;
    Field pi = Field::scalar(f.grid_ptr());
    Field divf = vector_divergence(f);

    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto ops = scalar_mode_laplacian(g, {m, k});
            // Delta pi = div f  <=>  -Lm pi = div f, Neumann rows pi' = f_r
            Eigen::MatrixXcd A = (-ops.Lm).cast<Complex>();
            Eigen::VectorXcd rhs = divf.profile_vec(m, k, 0);
            for (int e : {0, Nr - 1}) {
                A.row(e) = g.D1.row(e).cast<Complex>();
                rhs[e] = f.profile(m, k, 0)[e];  // f_r trace
            }
            if (m == 0 && k == 0) {
                // constant nullspace: bordered system with the zero-mean gauge
                Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(Nr + 1, Nr + 1);
                B.topLeftCorner(Nr, Nr) = A;
                B.block(0, Nr, Nr, 1).setConstant(1.0);
                B(0, Nr) = 0.0;
                B(Nr - 1, Nr) = 0.0;  // keep the flux rows exact
                B.block(Nr, 0, 1, Nr) = g.w_rjac.transpose().cast<Complex>();
                Eigen::VectorXcd r2(Nr + 1);
                r2.head(Nr) = rhs;
                r2[Nr] = 0.0;
                Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
                Eigen::VectorXcd sol = lu.solve(r2);
                double res = (B * sol - r2).norm() / (1.0 + r2.norm());
                if (res > 1e-8) throw SolveFailure("weak Neumann (0,0) mode solve residual " + std::to_string(res));
                pi.profile_vec(0, 0, 0) = sol.head(Nr);
            } else {
                Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
                Eigen::VectorXcd sol = lu.solve(rhs);
                double res = (A * sol - rhs).norm() / (1.0 + rhs.norm());
                if (res > 1e-8) throw SolveFailure("weak Neumann mode solve residual " + std::to_string(res));
                pi.profile_vec(m, k, 0) = sol;
            }
        }
    }
    return pi;
}

Field project(const Field& f) {
    Field pi = weak_neumann(f);
    return f - gradient(pi);
}

FluxSplit split_flux(const StokesBasis& basis, const Field& u0) {
    const int J = basis.J();
    FluxSplit out;
    out.fluxes.resize(J);
    out.w0 = Field::vector(basis.grid_ptr());
    for (int j = 0; j < J; ++j) {
        out.fluxes[j] = cut_flux(u0, j + 1);
        Field kj = basis.kernel_field(j);
        out.w0 += out.fluxes[j] * kj;
    }
    out.u0_tilde = u0 - out.w0;
    return out;
}

}  // namespace stokeslab
