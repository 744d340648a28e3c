#include "stokeslab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace stokeslab {

namespace {
constexpr double kPi = std::numbers::pi;
}

DomainSpec DomainSpec::annulus(double a, double b) {
    DomainSpec d;
    d.kind = DomainKind::Annulus2D;
    d.a = a;
    d.b = b;
    d.Lz = 0.0;
    d.validate();
    return d;
}

DomainSpec DomainSpec::annular_cylinder(double a, double b, double Lz) {
    DomainSpec d;
    d.kind = DomainKind::AnnularCylinder3D;
    d.a = a;
    d.b = b;
    d.Lz = Lz;
    d.validate();
    return d;
}

double DomainSpec::volume() const {
    double area = kPi * (b * b - a * a);
    return kind == DomainKind::Annulus2D ? area : area * Lz;
}

void DomainSpec::validate() const {
    if (!(a > 0.0)) throw InvalidGeometry("inner radius a must be positive, got a=" + std::to_string(a));
    if (!(b > a)) {
        throw InvalidGeometry("outer radius b must exceed inner radius a, got a=" + std::to_string(a) +
                              ", b=" + std::to_string(b));
    }
    if (kind == DomainKind::AnnularCylinder3D && !(Lz > 0.0)) {
        throw InvalidGeometry("axial period Lz must be positive, got Lz=" + std::to_string(Lz));
    }
}

double SpectralGrid::angular_factor() const {
    return domain.dim() == 2 ? 2.0 * kPi : 2.0 * kPi * domain.Lz;
}

double SpectralGrid::axial_wavenumber(int k) const {
    return domain.dim() == 2 ? 0.0 : 2.0 * kPi * static_cast<double>(k) / domain.Lz;
}

int SpectralGrid::mode_index(int m, int k) const {
    check_mode(m, k);
    return (m + Mmax) * (2 * Kmax + 1) + (k + Kmax);
}

void SpectralGrid::check_mode(int m, int k) const {
    if (std::abs(m) > Mmax || std::abs(k) > Kmax) {
        std::ostringstream os;
        os << "mode (m=" << m << ", k=" << k << ") outside grid bounds (Mmax=" << Mmax << ", Kmax=" << Kmax
           << ")";
        throw IndexOutOfRange(os.str());
    }
}

bool SpectralGrid::same_layout(const SpectralGrid& o) const {
    return domain == o.domain && Nr == o.Nr && Mmax == o.Mmax && Kmax == o.Kmax;
}

Eigen::VectorXd chebyshev_lobatto_nodes(double a, double b, int n) {
    Eigen::VectorXd r(n);
    const int N = n - 1;
    for (int j = 0; j <= N; ++j) {
        // ascending order; endpoints exact by construction
        double x = std::cos(kPi * static_cast<double>(N - j) / N);
        r[j] = a + (b - a) * 0.5 * (1.0 + x);
    }
    r[0] = a;
    r[n - 1] = b;
    return r;
}

Eigen::VectorXd clenshaw_curtis_weights(double a, double b, int n) {
    const int N = n - 1;
    Eigen::VectorXd w(n);
    for (int j = 0; j <= N; ++j) {
        // weight for node x_j = cos(j*pi/N) on [-1,1]
        double cj = (j == 0 || j == N) ? 1.0 : 2.0;
        double s = 1.0;
        for (int k = 1; k <= N / 2; ++k) {
            double bk = (2 * k == N) ? 1.0 : 2.0;
            s -= bk * std::cos(2.0 * k * j * kPi / N) / (4.0 * k * k - 1.0);
        }
        w[j] = cj * s / N;
    }
    // nodes were flipped to ascending order; weights are symmetric anyway
    w.reverseInPlace();
    return w * ((b - a) * 0.5);
}

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes) {
    const int n = static_cast<int>(nodes.size());
    // barycentric weights for Chebyshev-Lobatto points
    Eigen::VectorXd bw(n);
    for (int j = 0; j < n; ++j) {
        double s = (j % 2 == 0) ? 1.0 : -1.0;
        bw[j] = s * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
    }
    Eigen::MatrixXd D(n, n);
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double dij = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
            D(i, j) = dij;
            rowsum += dij;
        }
        D(i, i) = -rowsum;  // rows annihilate constants exactly
    }
    return D;
}

GridPtr make_grid(const DomainSpec& domain, int Nr, int Mmax, int Kmax) {
    domain.validate();
    if (Nr < 8) throw InvalidGeometry("Nr must be >= 8, got " + std::to_string(Nr));
    if (Mmax < 1) throw InvalidGeometry("Mmax must be >= 1, got " + std::to_string(Mmax));
    if (Kmax < 0) throw InvalidGeometry("Kmax must be >= 0, got " + std::to_string(Kmax));
    if (domain.dim() == 2 && Kmax != 0) {
        throw DimensionMismatch("Kmax > 0 requires a 3D domain (Annulus2D has no axial direction)");
    }
    auto g = std::make_shared<SpectralGrid>();
    g->domain = domain;
    g->Nr = Nr;
    g->Mmax = Mmax;
    g->Kmax = domain.dim() == 2 ? 0 : Kmax;
    g->r_nodes = chebyshev_lobatto_nodes(domain.a, domain.b, Nr);
    g->w_cc = clenshaw_curtis_weights(domain.a, domain.b, Nr);
    g->w_rjac = g->w_cc.cwiseProduct(g->r_nodes);
    g->w_quad = g->w_rjac * g->angular_factor();
    g->D1 = differentiation_matrix(g->r_nodes);
    g->D2 = g->D1 * g->D1;
    return g;
}

}  // namespace stokeslab
