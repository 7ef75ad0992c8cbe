#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <vector>

#include "dualchart/phase_space.hpp"

namespace dualchart {

using Cplx = std::complex<double>;

/// Abelian connection sampled on a regular N-dimensional grid: B^mu(x) at
/// every grid point, one component per axis. Grid coordinates are
/// x_mu = origin[mu] + i_mu * spacing[mu].
struct LatticeConnection {
    std::vector<int> dims;        ///< points per axis
    std::vector<double> spacing;  ///< lattice step per axis
    std::vector<double> origin;   ///< coordinate of index 0 per axis
    std::vector<double> B;        ///< npoints() * naxes(), component-major per point
    PhysicalConstants constants;

    int naxes() const { return static_cast<int>(dims.size()); }
    long npoints() const;
    long stride(int axis) const;             ///< flat-index stride of one step along axis
    long flat_index(const std::vector<int>& idx) const;
    std::vector<double> coordinates(const std::vector<int>& idx) const;

    double& Bcomp(long point, int mu) { return B[static_cast<size_t>(point) * naxes() + mu]; }
    double Bcomp(long point, int mu) const { return B[static_cast<size_t>(point) * naxes() + mu]; }

    /// Throws on non-positive spacing, non-finite samples, size mismatch.
    void validate() const;
};

/// Centered grid (origin at -(n/2)*a per axis) with zeroed connection.
LatticeConnection make_lattice(std::vector<int> dims, std::vector<double> spacing,
                               const PhysicalConstants& k);

/// A complex scalar field on the grid together with the number of boundary
/// rings that are invalid. Each derivative application widens the margin by
/// one; reductions must skip the margin.
struct MaskedField {
    std::vector<Cplx> values;
    int margin = 0;
};

/// Antisymmetric curvature components F^{mu nu}(x) at grid points, valid at
/// margin >= `margin` only. Storage covers mu < nu; access is antisymmetric
/// by construction.
struct CurvatureTensor {
    std::vector<int> dims;
    int naxes = 0;
    int margin = 0;
    std::vector<double> F;  ///< npoints * npairs, pair-major per point

    int npairs() const { return naxes * (naxes - 1) / 2; }
    int pair_slot(int mu, int nu) const;  ///< slot for mu < nu
    double at(long point, int mu, int nu) const;
    double& slot(long point, int mu, int nu);  ///< mu < nu only

    /// Maximum |F| over valid interior points and all pairs.
    double max_abs() const;
};

/// Covariant derivative (D^mu f)(x) = (d^mu f)(x) - (i/2m*chi) B^mu(x) f(x),
/// central differences along the axis. The output margin grows by one.
MaskedField covariant_derivative(const LatticeConnection& conn, const MaskedField& f, int mu);

/// Extracts F^{mu nu} from the commutator of covariant derivatives applied
/// to a nonvanishing test field: (D^mu D^nu - D^nu D^mu) f = -(i/2m*chi) F f.
/// Valid at margin 2. Throws DegenerateTestFieldError where |f| < 1e-12 at a
/// needed interior point.
CurvatureTensor curvature_from_commutator(const LatticeConnection& conn, const MaskedField& f);

/// Product of link phases exp(-(i/2m*chi) a B^mu) around the oriented a x a
/// plaquette based at grid index `x` in the (mu, nu) plane, links sampled at
/// their start points. arg(result) = -(1/2m*chi) F^{mu nu} a^2 + O(a^3).
Cplx plaquette_holonomy(const LatticeConnection& conn, const std::vector<int>& x, int mu, int nu);

// --- Analytic connection profiles used by tests and suites -----------------

/// Symmetric gauge for a uniform field F^{12} = b in the (0,1) plane:
/// B = (-b x^2 / 2, b x^1 / 2, 0, ...).
void fill_symmetric_gauge(LatticeConnection& conn, double b);

/// Pure gauge with constant B = grad(lambda), lambda linear. Zero curvature,
/// nonzero connection.
void fill_pure_gauge_constant(LatticeConnection& conn, const std::vector<double>& gradient);

/// Pure gauge from lambda(x) = x^1 x^2: B = (x^2, x^1, 0, ...).
void fill_pure_gauge_bilinear(LatticeConnection& conn);

/// B^mu(x) = amp[mu] * sin(k[mu] * x^{other axis}) in 2D: B1 depends on x^2,
/// B2 on x^1, giving curvature amp2*k2*cos(k2 x^1) - amp1*k1*cos(k1 x^2).
void fill_crossed_sine(LatticeConnection& conn, double amp1, double k1, double amp2, double k2);

/// Plane-wave test field f(x) = exp(i k.x) with margin 0.
MaskedField plane_wave_field(const LatticeConnection& conn, const std::vector<double>& kvec);

/// The default test field: k = 0.3/(10 a_mu) along every axis. Bounded away
/// from zero everywhere. NOTE: the wavevector is tied to the grid spacing,
/// so this field cannot measure convergence under refinement; pass a fixed
/// physical wavevector to plane_wave_field for order fits.
MaskedField default_test_field(const LatticeConnection& conn);

// --- Serialization (layout documented in docs/formats.md) ------------------

/// Flat binary ("DCGF"): header with dims, spacing, origin, component count.
void save_connection(const std::filesystem::path& file, const LatticeConnection& conn);
LatticeConnection load_connection(const std::filesystem::path& file, const PhysicalConstants& k);

/// CSV with a commented header carrying the same metadata.
void save_connection_csv(const std::filesystem::path& file, const LatticeConnection& conn);
LatticeConnection load_connection_csv(const std::filesystem::path& file, const PhysicalConstants& k);

}  // namespace dualchart
