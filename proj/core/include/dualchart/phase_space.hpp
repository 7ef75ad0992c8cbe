#pragma once

#include <Eigen/Core>
#include <vector>

#include "dualchart/errors.hpp"

namespace dualchart {

/// Physical constants of the particle--connection system. The particle
/// "charge" 2m and the coupling ratios are always derived, never stored, so
/// they cannot drift out of sync with m, c, chi.
struct PhysicalConstants {
    double m = 1.0;     ///< particle mass
    double c = 1.0;     ///< speed constant
    double chi = 1.0;   ///< field coupling in the connection Lagrangian
    double hbar = 1.0;  ///< reduced Planck constant

    double charge() const { return 2.0 * m; }
    /// Coupling of the kinetic momentum: pi = p - (2m/c) B.
    double momentum_coupling() const { return 2.0 * m / c; }
    /// Coupling of the kinetic coordinate: Q = q - (c/2m) piB.
    double coordinate_coupling() const { return c / (2.0 * m); }
    /// Coupling of the lattice covariant derivative: D = d - (i/2m*chi) B.
    double gauge_coupling() const { return 1.0 / (2.0 * m * chi); }

    /// Throws ConfigError if any constant is non-positive or non-finite.
    void validate() const;
};

/// Diagonal +-1 metric. g*g = identity holds by construction.
class Metric {
public:
    /// Euclidean metric (all +1) in `dim` dimensions.
    explicit Metric(int dim);
    /// Metric with an explicit signature; every entry must be +1 or -1.
    explicit Metric(std::vector<int> signature);

    int dim() const { return static_cast<int>(diag_.size()); }
    /// Diagonal entry g^{mu mu}.
    double g(int mu) const { return diag_[static_cast<size_t>(mu)]; }
    const std::vector<double>& diagonal() const { return diag_; }

private:
    std::vector<double> diag_;
};

/// Full state of the particle + one field mode per direction, in canonical
/// variables: particle (q, p) and field (B, piB). All four blocks share the
/// metric dimension N.
struct ExtendedState {
    Eigen::VectorXd q;    ///< particle coordinates
    Eigen::VectorXd p;    ///< particle canonical momenta
    Eigen::VectorXd B;    ///< field mode values
    Eigen::VectorXd piB;  ///< field mode momenta

    int dim() const { return static_cast<int>(q.size()); }

    static ExtendedState Zero(int n);

    /// Throws DimensionError on mismatched block lengths, NumericalError on
    /// non-finite entries.
    void validate() const;
};

/// Kinetic-chart image of a state: Q = q - (c/2m) piB, pi = p - (2m/c) B.
struct KineticChart {
    Eigen::VectorXd Q;
    Eigen::VectorXd pi;
};

/// pi = p - (2m/c) B, componentwise.
Eigen::VectorXd pullback_momentum(const Eigen::VectorXd& p, const Eigen::VectorXd& B,
                                  const PhysicalConstants& k);

/// Q = q - (c/2m) piB, componentwise.
Eigen::VectorXd pullback_coordinate(const Eigen::VectorXd& q, const Eigen::VectorXd& piB,
                                    const PhysicalConstants& k);

/// Both pullbacks applied to a full state.
KineticChart to_kinetic(const ExtendedState& s, const PhysicalConstants& k);

/// Inverts the pullbacks: recovers (q, p) from (Q, pi) and the field block.
/// Composing with to_kinetic is the identity to rounding.
ExtendedState inverse_pullbacks(const KineticChart& chart, const Eigen::VectorXd& B,
                                const Eigen::VectorXd& piB, const PhysicalConstants& k);

}  // namespace dualchart
