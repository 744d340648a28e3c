#pragma once

#include <Eigen/Dense>
#include <memory>

#include "stokeslab/errors.hpp"

namespace stokeslab {

enum class DomainKind { Annulus2D, AnnularCylinder3D };

// Geometry of a model domain: an annulus a < r < b, optionally extruded
// periodically in z with period Lz.  The annulus needs one cut
// (Sigma_1 = {theta = 0}) to become simply connected; the periodic annular
// cylinder needs a second one (Sigma_2 = {z = 0}).
struct DomainSpec {
    DomainKind kind = DomainKind::Annulus2D;
    double a = 1.0;  // inner radius
    double b = 2.0;  // outer radius
    double Lz = 0.0; // axial period, 3D only

    static DomainSpec annulus(double a, double b);
    static DomainSpec annular_cylinder(double a, double b, double Lz);

    int dim() const { return kind == DomainKind::Annulus2D ? 2 : 3; }
    int cuts() const { return kind == DomainKind::Annulus2D ? 1 : 2; }
    int ncomp() const { return dim() == 2 ? 2 : 3; }

    // |Omega| = pi (b^2 - a^2) (Lz if 3D)
    double volume() const;

    void validate() const;

    bool operator==(const DomainSpec&) const = default;
};

// Chebyshev-Gauss-Lobatto collocation grid on [a, b] with Fourier modes in
// theta (|m| <= Mmax) and, in 3D, in z (|k| <= Kmax).  Immutable after
// construction; shared read-only across workers.
struct SpectralGrid {
    DomainSpec domain;
    int Nr = 0;
    int Mmax = 0;
    int Kmax = 0;

    Eigen::VectorXd r_nodes;  // ascending, endpoints exactly a and b
    Eigen::VectorXd w_cc;     // Clenshaw-Curtis weights on [a, b] (no Jacobian)
    Eigen::VectorXd w_rjac;   // w_cc .* r
    Eigen::VectorXd w_quad;   // w_rjac * angular_factor (full measure weights)
    Eigen::MatrixXd D1, D2;   // dense radial differentiation matrices

    int n_mode_pairs() const { return (2 * Mmax + 1) * (2 * Kmax + 1); }
    int ncomp() const { return domain.ncomp(); }
    // 2*pi in 2D, 2*pi*Lz in 3D; the theta (and z) integral of a product of
    // matching Fourier modes.
    double angular_factor() const;
    // 2*pi*k/Lz in 3D, 0 in 2D
    double axial_wavenumber(int k) const;

    int mode_index(int m, int k) const;
    void check_mode(int m, int k) const;

    // Capacity bound for retained eigenpairs.
    int basis_capacity() const { return Nr * n_mode_pairs() / 4; }

    bool same_layout(const SpectralGrid& o) const;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

GridPtr make_grid(const DomainSpec& domain, int Nr, int Mmax, int Kmax);

// Chebyshev utilities (exposed for tests and oracles).
Eigen::VectorXd chebyshev_lobatto_nodes(double a, double b, int n);
Eigen::VectorXd clenshaw_curtis_weights(double a, double b, int n);
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes);

}  // namespace stokeslab
