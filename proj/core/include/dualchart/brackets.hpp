#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "dualchart/phase_space.hpp"

namespace dualchart {

/// The literal antisymmetric pairing matrix: for half-dimension M the 2Mx2M
/// matrix with omega_{i,i+M} = -omega_{i+M,i} = 1 and zeros elsewhere.
/// Determinant 1, omega*omega = -I, and the stored inverse satisfies
/// omega^{IJ} omega_{JK} = delta^I_K exactly (entries are 0 and +-1).
class SymplecticMatrix {
public:
    static SymplecticMatrix build(int half_dim);

    int half_dim() const { return half_; }
    const Eigen::MatrixXd& form() const { return form_; }       ///< omega_IJ
    const Eigen::MatrixXd& inverse() const { return inverse_; } ///< omega^IJ

private:
    int half_ = 0;
    Eigen::MatrixXd form_, inverse_;
};

/// A real scalar function on the extended phase space, with an optional
/// analytic gradient in the flat ordering (q, B | p, piB). When the gradient
/// is absent the bracket engine falls back to central differences.
struct PhaseFunction {
    std::function<double(const ExtendedState&)> value;
    std::function<Eigen::VectorXd(const ExtendedState&)> gradient;  // may be empty
};

/// Flat ordering of the extended coordinate: coordinates first, conjugate
/// momenta second -- (q[0..N), B[N..2N), p[2N..3N), piB[3N..4N)).
Eigen::VectorXd flatten(const ExtendedState& s);
ExtendedState unflatten(const Eigen::VectorXd& x);

/// Central-difference gradient of F at `at` in the flat ordering, step h.
/// Throws NumericalError (with the flat coordinate index) on non-finite
/// evaluations.
Eigen::VectorXd numerical_gradient(const PhaseFunction& F, const ExtendedState& at, double h);

/// Poisson bracket of F and G at a state. The gradients (analytic when
/// supplied, otherwise central differences with step h) are contracted with
/// the pairing kernel W = [[0, G],[-G, 0]], G = blockdiag(g, g): this is the
/// inverse-form contraction re-expressed in the coordinates-first ordering,
/// and lands {q,p} = {q,pi} = {B,piB} = {Q,p} = g with {Q,Q} = {Q,pi} = 0.
/// For the Euclidean metric W coincides with the literal form matrix.
double poisson_bracket(const PhaseFunction& F, const PhaseFunction& G, const ExtendedState& at,
                       const Metric& g, double h = 1e-5);

/// One row of the canonical-algebra table.
struct BracketRow {
    std::string family;  ///< e.g. "{q,p}"
    int mu = 0, nu = 0;
    double value = 0.0;
    double expected = 0.0;
    double abs_error = 0.0;
};

/// Evaluates all six bracket families ({q,p}, {q,pi}, {B,piB}, {Q,Q},
/// {Q,pi}, {Q,p}) for every index pair at the given state, via finite
/// differences with step h. Returns value/expected/deviation per row.
std::vector<BracketRow> canonical_algebra_report(const ExtendedState& at, const Metric& g,
                                                 const PhysicalConstants& k, double h = 1e-5);

/// Coordinate functions used by the algebra report; exposed for tests and
/// for building custom brackets. Index mu < N.
PhaseFunction coordinate_q(int mu);
PhaseFunction coordinate_B(int mu);
PhaseFunction momentum_p(int mu);
PhaseFunction momentum_piB(int mu);
PhaseFunction kinetic_Q(int mu, const PhysicalConstants& k);
PhaseFunction kinetic_pi(int mu, const PhysicalConstants& k);

/// Canonical one-form theta = sum_pairs (momentum . coordinate-part of v),
/// covering the particle pair (p, dq) and the field pair (piB, dB).
/// v is a tangent vector in the flat ordering.
double canonical_one_form(const ExtendedState& at, const Eigen::VectorXd& v);

/// Two-form omega = -d(theta) evaluated by central differences of the
/// one-form; equals v^T omega_IJ w to O(h^2).
double two_form_finite_difference(const ExtendedState& at, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double h = 1e-5);

}  // namespace dualchart
