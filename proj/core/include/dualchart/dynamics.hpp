#pragma once

#include <string>
#include <vector>

#include "dualchart/phase_space.hpp"

namespace dualchart {

enum class ParticleModel { NonRelativistic, Relativistic };
enum class Chart { QPi, QP };  ///< integration variables: (q,pi) or (Q,p)

/// H = H_P(pi) + H_F, with H_P the particle term evaluated through the
/// kinetic momentum pi = p - (2m/c)B, and H_F the field-mode term
/// (sigma^2 + omega0^2 B^2)/2 evaluated on the shifted field momentum
/// sigma = piB - (2m/c)q = -(2m/c)Q. Both H_P and H_F are stand-ins (the
/// theory fixes only their arguments); the quadratic default makes the whole
/// flow linear and exactly solvable, which the tests exploit.
struct SystemHamiltonian {
    PhysicalConstants k;
    double omega0 = 1.0;  ///< field mode frequency; 0 = free mode
    ParticleModel model = ParticleModel::NonRelativistic;

    /// H_P(pi): pi.pi/2m, or sqrt(c^2 pi.pi + m^2 c^4) for the relativistic
    /// option.
    double particle_term(const Eigen::VectorXd& pi) const;
    /// dH_P/dpi.
    Eigen::VectorXd particle_velocity(const Eigen::VectorXd& pi) const;

    /// Energy from canonical variables: pi and sigma derived from (q,p,B,piB).
    double energy(const ExtendedState& s) const;
    /// Energy from the kinetic-chart image: sigma derived as -(2m/c)Q. Agrees
    /// with energy() to rounding on matching states.
    double energy_kinetic(const KineticChart& chart, const Eigen::VectorXd& B,
                          const Eigen::VectorXd& piB) const;
};

/// Sampled trajectory. States are stored in canonical variables regardless
/// of the chart that was integrated; chart_tag records which one was.
struct Trajectory {
    std::vector<double> times;
    std::vector<ExtendedState> states;
    std::string chart_tag;
};

/// One Strang step in the (q, pi, B, sigma) canonical chart:
/// half kick (sigma -= omega0^2 B dt/2), full drift (q, B advance at
/// constant pi, sigma), half kick. Second order, reversible, exactly
/// symplectic; every sub-flow is exact.
ExtendedState step_q_pi(const SystemHamiltonian& H, const ExtendedState& s, double dt);

/// One Strang step in the (Q, p, C, piB) canonical chart, C = B - (c/2m)p:
/// K3(dt/2) K2(dt/2) K1(dt) K2(dt/2) K3(dt/2) with K1 the particle term
/// (a function of C alone), K2 the sigma^2 term (a function of Q alone), K3
/// the omega0^2 B^2 term. Same properties as step_q_pi.
ExtendedState step_Q_p(const SystemHamiltonian& H, const ExtendedState& s, double dt);

/// Integrates n steps from s0, sampling every `sample_every` steps (always
/// including the initial and final states). Throws DivergenceError with the
/// step index if the state leaves the finite range.
Trajectory evolve_q_pi(const SystemHamiltonian& H, const ExtendedState& s0, double dt, long n,
                       long sample_every = 1);
Trajectory evolve_Q_p(const SystemHamiltonian& H, const ExtendedState& s0, double dt, long n,
                      long sample_every = 1);

/// Closed-form flow of the quadratic Hamiltonian (NonRelativistic model):
/// pi is conserved, (B, sigma) is a harmonic oscillator at omega0 (a free
/// drift when omega0 = 0), q drifts at pi/m. Used as the exact oracle in
/// tests. Throws for the relativistic model.
ExtendedState closed_form_state(const SystemHamiltonian& H, const ExtendedState& s0, double t);

/// Max-norm defect |J^T omega J - omega| of the n-step flow Jacobian,
/// computed by central differences of perturbed trajectories (step fd_step)
/// in the flat (q, B | p, piB) ordering. For the quadratic Hamiltonian the
/// step map is linear, so the finite difference is exact up to rounding.
double symplecticity_defect(const SystemHamiltonian& H, const ExtendedState& s0, double dt,
                            long n, Chart chart, double fd_step = 1e-4);

}  // namespace dualchart
