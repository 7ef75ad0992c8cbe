#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dualchart/phase_space.hpp"

namespace dualchart {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Max-norm hermiticity defect |A - A^dagger|_max.
double hermiticity_defect(const CMat& A);

/// Oscillator frequencies that set the quadrature scales of the two ladder
/// truncations. Physics is scale-independent; tests vary these to prove it.
struct LadderScales {
    double particle = 1.0;
    double field = 1.0;
};

/// Truncated single-mode quadratures: X = sqrt(hbar/2mw)(a + a^dag),
/// P = i sqrt(hbar m w / 2)(a^dag - a), on d Fock levels.
CMat ladder_position(int d, double hbar, double mass, double freq);
CMat ladder_momentum(int d, double hbar, double mass, double freq);

/// The six operators on the particle (x) field tensor product. The kinetic
/// composites use the stated couplings, which default to (2m/c, c/2m) and can
/// be overridden (e.g. both zero for the exact decoupled limit, where
/// Q = q (x) 1 and pi = p (x) 1).
struct OperatorSet {
    int d_p = 0, d_f = 0;
    PhysicalConstants k;
    double momentum_coupling = 0.0;    ///< factor on B in pi = p - (.)B
    double coordinate_coupling = 0.0;  ///< factor on piB in Q = q - (.)piB
    CMat q, p, B, piB, Q, pi;

    int dim() const { return d_p * d_f; }
};

/// Builds the operator set. Requires d_p, d_f >= 8 (throws TruncationError).
OperatorSet build_operators(int d_p, int d_f, const PhysicalConstants& k,
                            LadderScales scales = {},
                            std::optional<std::pair<double, double>> coupling_override = {});

/// Flat indices of the tensor-basis states with Fock level < cut_p in the
/// particle factor and < cut_f in the field factor.
std::vector<int> interior_indices(int d_p, int d_f, int cut_p, int cut_f);

/// Operator norm of M restricted to the span of the given basis columns:
/// max ||M v|| over unit v supported on those columns.
double restricted_norm(const CMat& M, const std::vector<int>& columns);

struct CommutatorCheck {
    std::string identity;  ///< e.g. "[Q,pi] = 0"
    double defect = 0.0;   ///< restricted norm of (commutator - expected)
};

/// Verifies the commutator algebra on the interior subspace (Fock support
/// below the cuts in both factors): [q,pi] = [q,p] = ihbar g, [B,piB] =
/// ihbar g, [Q,pi] = 0, [Q,p] = ihbar g, [Q,Q] = 0.
std::vector<CommutatorCheck> commutator_suite(const OperatorSet& ops, int cut_p, int cut_f);

// --- Grid realization of the kinetic momentum (external-field form) --------

/// pi^mu = -i hbar d^mu - (2m/c) B^mu(x) on an n x n position grid over
/// [-half_width, half_width]^2, central differences, B a function of
/// position. Matrix-free: only operator applications are exposed.
class GridKineticOperators {
public:
    GridKineticOperators(int n, double half_width,
                         std::function<std::array<double, 2>(double, double)> B_profile,
                         const PhysicalConstants& k);

    int n() const { return n_; }
    double spacing() const { return a_; }
    double coordinate(int i) const { return -half_ + a_ * i; }

    /// pi^axis applied to psi (row-major n x n, zero beyond the boundary).
    CVec apply_pi(int axis, const CVec& psi) const;
    /// [pi^1, pi^2] psi.
    CVec apply_commutator(const CVec& psi) const;

    /// Relative defect || [pi1,pi2] psi - (2 i m hbar / c) F12(x) psi || /
    /// || (2 i m hbar / c) F12 psi ||, both restricted to points at least
    /// `margin` cells from the boundary.
    double commutator_defect(const CVec& psi, const std::function<double(double, double)>& F12,
                             int margin) const;

    /// Normalized Gaussian exp(-r^2 / 4 s^2) sampled on the grid.
    CVec gaussian(double s) const;

private:
    int n_;
    double half_, a_;
    PhysicalConstants k_;
    std::vector<double> B1_, B2_;  // sampled profile components
};

// --- Density operators and evolution ----------------------------------------

struct DensityOperator {
    CMat rho;

    static DensityOperator from_ensemble(const std::vector<double>& weights,
                                         const std::vector<CVec>& states);
    static DensityOperator pure(const CVec& psi);

    double trace_defect() const;       ///< |tr rho - 1|
    double hermiticity() const;        ///< max-norm defect
    double min_eigenvalue() const;
    double purity() const;             ///< tr rho^2
};

/// Eigendecomposition of a hermitian operator, cached for repeated
/// propagation. Throws on a non-hermitian input (max defect > 1e-10).
struct HamiltonianSpectrum {
    Eigen::VectorXd energies;
    CMat vectors;
};
HamiltonianSpectrum diagonalize(const CMat& H);

/// The quantized dynamics Hamiltonian on the tensor space:
/// pi^2/2m + (sigma^2 + omega0^2 B^2)/2 with sigma = piB - (2m/c)q.
CMat system_hamiltonian_matrix(const OperatorSet& ops, double omega0);

/// rho(t) = U rho U^dag with U = exp(-i H t / hbar), via the exact
/// eigendecomposition. Trace, hermiticity, positivity, purity are preserved
/// to rounding.
DensityOperator evolve_density(const DensityOperator& rho0, const HamiltonianSpectrum& spec,
                               double t, double hbar);
/// U(t) |psi>.
CVec evolve_state(const CVec& psi0, const HamiltonianSpectrum& spec, double t, double hbar);

// --- Joint eigenbasis, trajectory density, scatter --------------------------

struct JointBasis {
    CMat vectors;               ///< orthonormal columns
    Eigen::VectorXd Q_label, pi_label;
    Eigen::VectorXd residual_Q, residual_pi;  ///< ||A v - label v|| per column
    double gamma = 0.0;         ///< mixing weight actually used
    double defect_full = 0.0;   ///< ||[A,B]|| on the whole space
    double defect_interior = 0.0;
    int clusters = 0;
};

/// Simultaneous (approximate) eigenbasis of a commuting pair: diagonalize
/// A + gamma B for a generic gamma (seeded draw, scaled by the spectral
/// spreads), then re-diagonalize A within near-degenerate eigenvalue
/// clusters. Cluster width = spectral spread / n_clusters; n_clusters = 0
/// selects round(sqrt(dim)/2). Residuals per vector are reported, never
/// hidden: at finite truncation they are O(1) at the spectrum edges.
/// Refuses (TruncationError) unless the commutator defect restricted to the
/// interior subspace (Fock < half cutoff in both factors) is below
/// `tolerance`.
JointBasis joint_eigenbasis(const CMat& A, const CMat& B, int d_p, int d_f, double tolerance,
                            std::uint64_t seed, int n_clusters = 0);

/// Diagonal of rho in the joint basis: G_k = <v_k| rho |v_k> over the
/// eigenvalue grid (Q_k, pi_k). Sums to tr rho; nonnegative for positive rho.
struct TrajectoryDensity {
    Eigen::VectorXd Q, pi, G;
    double time = 0.0;
};
TrajectoryDensity trajectory_density(const DensityOperator& rho, const JointBasis& basis,
                                     double time = 0.0);

/// Standard deviations of the G-weighted marginals and their product.
struct ScatterStats {
    double dQ = 0.0, dpi = 0.0, product = 0.0;
};
ScatterStats scatter_statistics(const TrajectoryDensity& G);

// --- Operator container (layout documented in docs/formats.md) --------------

void save_operator_container(const std::filesystem::path& file,
                             const std::vector<std::pair<std::string, CMat>>& entries);
std::vector<std::pair<std::string, CMat>> load_operator_container(
    const std::filesystem::path& file);

}  // namespace dualchart
