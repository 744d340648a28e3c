#include "stokeslab/spectral_ops.hpp"

namespace stokeslab {

namespace {
const Complex kI{0.0, 1.0};
}

ModeOperators scalar_mode_laplacian(const SpectralGrid& grid, ModeIndex mode) {
    grid.check_mode(mode.m, mode.k);
    const int Nr = grid.Nr;
    ModeOperators ops;
    ops.mode = mode;
    ops.D1 = grid.D1;
    ops.D2 = grid.D2;

    const Eigen::ArrayXd r = grid.r_nodes.array();
    const double kt = grid.axial_wavenumber(mode.k);
    const double m2 = static_cast<double>(mode.m) * mode.m;

    ops.Lm = -(grid.D2 + (1.0 / r).matrix().asDiagonal() * grid.D1);
    ops.Lm += (m2 / (r * r) + kt * kt).matrix().asDiagonal();

    const int nc = grid.ncomp();
    ops.Lvec = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nc) * Nr, static_cast<Eigen::Index>(nc) * Nr);
    Eigen::MatrixXcd Lc = ops.Lm.cast<Complex>();
    Eigen::VectorXcd inv_r2 = (1.0 / (r * r)).matrix().cast<Complex>();
    // -(Delta u)_r = Lm u_r + u_r/r^2 + (2 i m / r^2) u_theta
    ops.Lvec.block(0, 0, Nr, Nr) = Lc + Eigen::MatrixXcd(inv_r2.asDiagonal());
    ops.Lvec.block(0, Nr, Nr, Nr) = Eigen::MatrixXcd((2.0 * kI * static_cast<double>(mode.m) * inv_r2).asDiagonal());
    // -(Delta u)_theta = Lm u_theta + u_theta/r^2 - (2 i m / r^2) u_r
    ops.Lvec.block(Nr, 0, Nr, Nr) = Eigen::MatrixXcd((-2.0 * kI * static_cast<double>(mode.m) * inv_r2).asDiagonal());
    ops.Lvec.block(Nr, Nr, Nr, Nr) = Lc + Eigen::MatrixXcd(inv_r2.asDiagonal());
    if (nc == 3) {
        ops.Lvec.block(2 * Nr, 2 * Nr, Nr, Nr) = Lc;
    }
    ops.bc_rows = navier_bc_row_indices(grid);
    return ops;
}

std::vector<int> navier_bc_row_indices(const SpectralGrid& grid) {
    std::vector<int> rows;
    for (int c = 0; c < grid.ncomp(); ++c) {
        rows.push_back(c * grid.Nr);
        rows.push_back(c * grid.Nr + grid.Nr - 1);
    }
    return rows;
}

Eigen::MatrixXcd navier_constraint_rows(const SpectralGrid& grid, ModeIndex mode) {
    const int Nr = grid.Nr, nc = grid.ncomp();
    const double kt = grid.axial_wavenumber(mode.k);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(2 * nc, static_cast<Eigen::Index>(nc) * Nr);
    auto edge = [&](int s) { return s == 0 ? 0 : Nr - 1; };
    int row = 0;
    for (int c = 0; c < nc; ++c) {
        for (int s = 0; s < 2; ++s, ++row) {
            const int e = edge(s);
            const double re = grid.r_nodes[e];
            if (c == 0) {
                // u . n = 0  =>  u_r = 0
                C(row, e) = 1.0;
            } else if (c == 1) {
                // (curl u)_z = D1 u_theta + u_theta/r - (i m / r) u_r = 0
                C.block(row, Nr, 1, Nr) = grid.D1.row(e).cast<Complex>();
                C(row, Nr + e) += 1.0 / re;
                C(row, e) -= kI * static_cast<double>(mode.m) / re;
            } else {
                // (curl u)_theta = i kt u_r - D1 u_z = 0
                C(row, e) = kI * kt;
                C.block(row, 2 * Nr, 1, Nr) = -grid.D1.row(e).cast<Complex>();
            }
        }
    }
    return C;
}

void apply_navier_bc(const SpectralGrid& grid, ModeIndex mode, Eigen::MatrixXcd& A) {
    Eigen::MatrixXcd C = navier_constraint_rows(grid, mode);
    std::vector<int> rows = navier_bc_row_indices(grid);
    for (size_t i = 0; i < rows.size(); ++i) {
        A.row(rows[i]) = C.row(static_cast<Eigen::Index>(i));
    }
}

ModalField vector_curl(const ModalField& u) {
    const SpectralGrid& g = u.grid();
    if (!u.is_vector()) throw DimensionMismatch("vector_curl requires a vector field");
    const bool is2d = g.domain.dim() == 2;
    ModalField out(u.grid_ptr(), is2d ? 1 : 3);
    const Eigen::ArrayXd r = g.r_nodes.array();
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            const double kt = g.axial_wavenumber(k);
            auto ur = u.profile_vec(m, k, 0);
            auto ut = u.profile_vec(m, k, 1);
            Eigen::VectorXcd wz = g.D1.cast<Complex>() * ut;
            wz.array() += ut.array() / r - kI * static_cast<double>(m) * ur.array() / r;
            if (is2d) {
                out.profile_vec(m, k, 0) = wz;
            } else {
                auto uz = u.profile_vec(m, k, 2);
                out.profile_vec(m, k, 0) =
                    (kI * static_cast<double>(m) * uz.array() / r - kI * kt * ut.array()).matrix();
                out.profile_vec(m, k, 1) = (kI * kt * ur - g.D1.cast<Complex>() * uz);
                out.profile_vec(m, k, 2) = wz;
            }
        }
    }
    return out;
}

ModalField vector_divergence(const ModalField& u) {
    const SpectralGrid& g = u.grid();
    if (!u.is_vector()) throw DimensionMismatch("vector_divergence requires a vector field");
    ModalField out(u.grid_ptr(), 1);
    const Eigen::ArrayXd r = g.r_nodes.array();
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto ur = u.profile_vec(m, k, 0);
            auto ut = u.profile_vec(m, k, 1);
            Eigen::VectorXcd d = g.D1.cast<Complex>() * ur;
            d.array() += ur.array() / r + kI * static_cast<double>(m) * ut.array() / r;
            if (g.domain.dim() == 3) {
                d += kI * g.axial_wavenumber(k) * u.profile_vec(m, k, 2);
            }
            out.profile_vec(m, k, 0) = d;
        }
    }
    return out;
}

ModalField gradient(const ModalField& p) {
    const SpectralGrid& g = p.grid();
    if (p.ncomp() != 1) throw DimensionMismatch("gradient requires a scalar field");
    ModalField out = ModalField::vector(p.grid_ptr());
    const Eigen::ArrayXd r = g.r_nodes.array();
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto pm = p.profile_vec(m, k, 0);
            out.profile_vec(m, k, 0) = g.D1.cast<Complex>() * pm;
            out.profile_vec(m, k, 1) = (kI * static_cast<double>(m) * pm.array() / r).matrix();
            if (g.domain.dim() == 3) {
                out.profile_vec(m, k, 2) = kI * g.axial_wavenumber(k) * pm;
            }
        }
    }
    return out;
}

ModalField perp_gradient(const ModalField& psi) {
    const SpectralGrid& g = psi.grid();
    if (psi.ncomp() != 1) throw DimensionMismatch("perp_gradient requires a scalar field");
    ModalField out = ModalField::vector(psi.grid_ptr());
    const Eigen::ArrayXd r = g.r_nodes.array();
    for (int m = -g.Mmax; m <= g.Mmax; ++m) {
        for (int k = -g.Kmax; k <= g.Kmax; ++k) {
            auto pm = psi.profile_vec(m, k, 0);
            out.profile_vec(m, k, 0) = (kI * static_cast<double>(m) * pm.array() / r).matrix();
            out.profile_vec(m, k, 1) = -(g.D1.cast<Complex>() * pm);
        }
    }
    return out;
}

}  // namespace stokeslab
