#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>

#include "stokeslab/geometry.hpp"

namespace stokeslab {

using Complex = std::complex<double>;

// A modal field on a SpectralGrid: one complex radial profile per Fourier
// mode (m, k) and per component.  Vector fields carry the cylindrical
// components (u_r, u_theta[, u_z]); scalar fields carry one component.
// Divergence-free fields stay divergence-free under the modal operations
// because every operator acts per mode.
class ModalField {
public:
    ModalField() = default;
    ModalField(GridPtr grid, int ncomp);

    static ModalField vector(GridPtr grid) { return ModalField(grid, grid->ncomp()); }
    static ModalField scalar(GridPtr grid) { return ModalField(grid, 1); }

    const SpectralGrid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    int ncomp() const { return ncomp_; }
    bool is_vector() const { return grid_ && ncomp_ == grid_->ncomp(); }

    Eigen::VectorXcd& data() { return data_; }
    const Eigen::VectorXcd& data() const { return data_; }

    std::span<Complex> profile(int m, int k, int comp);
    std::span<const Complex> profile(int m, int k, int comp) const;
    Eigen::Map<Eigen::VectorXcd> profile_vec(int m, int k, int comp);
    Eigen::Map<const Eigen::VectorXcd> profile_vec(int m, int k, int comp) const;

    // Whole (m,k) mode block, ncomp*Nr coefficients, components contiguous.
    Eigen::Map<Eigen::VectorXcd> mode_block(int m, int k);
    Eigen::Map<const Eigen::VectorXcd> mode_block(int m, int k) const;

    ModalField& operator+=(const ModalField& o);
    ModalField& operator-=(const ModalField& o);
    ModalField& operator*=(Complex c);
    friend ModalField operator+(ModalField a, const ModalField& b) { return a += b; }
    friend ModalField operator-(ModalField a, const ModalField& b) { return a -= b; }
    friend ModalField operator*(Complex c, ModalField f) { return f *= c; }

private:
    GridPtr grid_;
    int ncomp_ = 0;
    Eigen::VectorXcd data_;  // [((mode)*ncomp + comp)*Nr + i]
};

using Field = ModalField;

// Discrete L2 inner product < u, v > = int u . conj(v) dx.
Complex inner(const ModalField& u, const ModalField& v);
double norm_l2(const ModalField& u);

// Nodal evaluation on the tensor grid (r_i, theta_j, z_l) with
// theta_j = 2*pi*j/Ntheta, z_l = Lz*l/Nz.  Result: one matrix per component,
// Nr rows, Ntheta*Nz columns (theta-major).
std::vector<Eigen::MatrixXcd> nodal_values(const ModalField& f, int Ntheta, int Nz);

// Inverse of nodal_values for band-limited data (trapezoid/DFT analysis).
// Requires Ntheta > 2*Mmax and Nz > 2*Kmax.
ModalField modal_from_nodal(GridPtr grid, const std::vector<Eigen::MatrixXcd>& nodal, int Ntheta, int Nz);

// Flux functional < u . n, 1 >_{Sigma_j}.  j is 1-based; j=1 is the cut
// {theta = 0}, j=2 (3D only) the annular cross-section {z = 0}.
Complex cut_flux(const ModalField& field, int j);
// Same functional across a cut rotated/translated to (theta0, z0); for
// divergence-free tangent fields the value is independent of the position.
Complex cut_flux_at(const ModalField& field, int j, double theta0, double z0);

}  // namespace stokeslab
