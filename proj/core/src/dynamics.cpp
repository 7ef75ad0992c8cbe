#include "dualchart/dynamics.hpp"

#include <cmath>

#include "dualchart/brackets.hpp"
#include "dualchart/errors.hpp"

namespace dualchart {

double SystemHamiltonian::particle_term(const Eigen::VectorXd& pi) const {
    const double pi2 = pi.squaredNorm();
    if (model == ParticleModel::Relativistic) {
        const double mc2 = k.m * k.c * k.c;
        return std::sqrt(k.c * k.c * pi2 + mc2 * mc2);
    }
    return pi2 / (2.0 * k.m);
}

Eigen::VectorXd SystemHamiltonian::particle_velocity(const Eigen::VectorXd& pi) const {
    if (model == ParticleModel::Relativistic) {
        return (k.c * k.c / particle_term(pi)) * pi;
    }
    return pi / k.m;
}

double SystemHamiltonian::energy(const ExtendedState& s) const {
    const double km = k.momentum_coupling();
    const Eigen::VectorXd pi = s.p - km * s.B;
    const Eigen::VectorXd sigma = s.piB - km * s.q;
    return particle_term(pi) + 0.5 * sigma.squaredNorm() + 0.5 * omega0 * omega0 * s.B.squaredNorm();
}

double SystemHamiltonian::energy_kinetic(const KineticChart& chart, const Eigen::VectorXd& B,
                                         const Eigen::VectorXd& /*piB*/) const {
    const Eigen::VectorXd sigma = -k.momentum_coupling() * chart.Q;
    return particle_term(chart.pi) + 0.5 * sigma.squaredNorm() +
           0.5 * omega0 * omega0 * B.squaredNorm();
}

namespace {

/// Kick in the (q, pi, B, sigma) chart: the omega0^2 B^2 / 2 term moves only
/// sigma (state variable piB); q, B and pi (hence p) are untouched.
void kick_field(const SystemHamiltonian& H, ExtendedState& s, double h) {
    s.piB -= (H.omega0 * H.omega0 * h) * s.B;
}

/// Drift in the (q, pi, B, sigma) chart: H_P(pi) + sigma^2/2 at constant pi
/// and sigma. q and B advance linearly; p and piB follow so that pi and
/// sigma stay put.
void drift_particle_field(const SystemHamiltonian& H, ExtendedState& s, double h) {
    const double km = H.k.momentum_coupling();
    const Eigen::VectorXd pi = s.p - km * s.B;
    const Eigen::VectorXd sigma = s.piB - km * s.q;
    s.q += h * H.particle_velocity(pi);
    s.B += h * sigma;
    s.p = pi + km * s.B;
    s.piB = sigma + km * s.q;
}

void require_finite(const ExtendedState& s, long step) {
    const double bound = 1e12;
    auto bad = [&](const Eigen::VectorXd& v) {
        return !v.allFinite() || v.cwiseAbs().maxCoeff() > bound;
    };
    if (bad(s.q) || bad(s.p) || bad(s.B) || bad(s.piB))
        throw DivergenceError(step, "state left the finite range");
}

template <typename Step>
Trajectory evolve(const SystemHamiltonian& H, const ExtendedState& s0, double dt, long n,
                  long sample_every, const char* tag, Step step) {
    if (sample_every < 1) throw Error("sample_every must be positive");
    s0.validate();
    H.k.validate();
    Trajectory traj;
    traj.chart_tag = tag;
    traj.times.push_back(0.0);
    traj.states.push_back(s0);
    ExtendedState s = s0;
    for (long i = 1; i <= n; ++i) {
        s = step(H, s, dt);
        require_finite(s, i);
        if (i % sample_every == 0 || i == n) {
            traj.times.push_back(i * dt);
            traj.states.push_back(s);
        }
    }
    return traj;
}

}  // namespace

ExtendedState step_q_pi(const SystemHamiltonian& H, const ExtendedState& s, double dt) {
    ExtendedState out = s;
    kick_field(H, out, 0.5 * dt);
    drift_particle_field(H, out, dt);
    kick_field(H, out, 0.5 * dt);
    return out;
}

ExtendedState step_Q_p(const SystemHamiltonian& H, const ExtendedState& s, double dt) {
    const double km = H.k.momentum_coupling();
    const double kc = H.k.coordinate_coupling();
    const double w2 = H.omega0 * H.omega0;

    // Chart variables: Q paired with p, C paired with piB.
    Eigen::VectorXd Q = s.q - kc * s.piB;
    Eigen::VectorXd p = s.p;
    Eigen::VectorXd C = s.B - kc * s.p;
    Eigen::VectorXd piB = s.piB;

    // K3 = omega0^2 B^2 / 2 with B = C + (c/2m) p: B is constant along its
    // own flow, so the sub-step is exact.
    auto k3 = [&](double h) {
        const Eigen::VectorXd B = C + kc * p;
        Q += (h * kc * w2) * B;
        piB -= (h * w2) * B;
    };
    // K2 = sigma^2/2 = (2m/c)^2 Q^2 / 2: moves p only.
    auto k2 = [&](double h) { p -= (h * km * km) * Q; };
    // K1 = H_P(pi), pi = -(2m/c) C: moves piB only.
    auto k1 = [&](double h) { piB += (h * km) * H.particle_velocity(-km * C); };

    k3(0.5 * dt);
    k2(0.5 * dt);
    k1(dt);
    k2(0.5 * dt);
    k3(0.5 * dt);

    ExtendedState out;
    out.p = p;
    out.piB = piB;
    out.q = Q + kc * piB;
    out.B = C + kc * p;
    return out;
}

Trajectory evolve_q_pi(const SystemHamiltonian& H, const ExtendedState& s0, double dt, long n,
                       long sample_every) {
    return evolve(H, s0, dt, n, sample_every, "q-pi", step_q_pi);
}

Trajectory evolve_Q_p(const SystemHamiltonian& H, const ExtendedState& s0, double dt, long n,
                      long sample_every) {
    return evolve(H, s0, dt, n, sample_every, "Q-p", step_Q_p);
}

ExtendedState closed_form_state(const SystemHamiltonian& H, const ExtendedState& s0, double t) {
    if (H.model != ParticleModel::NonRelativistic)
        throw Error("closed-form flow is only available for the quadratic particle term");
    const double km = H.k.momentum_coupling();
    const Eigen::VectorXd pi0 = s0.p - km * s0.B;
    const Eigen::VectorXd sigma0 = s0.piB - km * s0.q;

    ExtendedState out;
    out.q = s0.q + (t / H.k.m) * pi0;
    if (H.omega0 > 0.0) {
        const double cw = std::cos(H.omega0 * t);
        const double sw = std::sin(H.omega0 * t);
        out.B = cw * s0.B + (sw / H.omega0) * sigma0;
        out.piB = cw * sigma0 - (H.omega0 * sw) * s0.B;  // sigma(t), shifted below
    } else {
        out.B = s0.B + t * sigma0;
        out.piB = sigma0;
    }
    out.p = pi0 + km * out.B;
    out.piB += km * out.q;
    return out;
}

double symplecticity_defect(const SystemHamiltonian& H, const ExtendedState& s0, double dt,
                            long n, Chart chart, double fd_step) {
    const int dim = s0.dim();
    const int flat_dim = 4 * dim;
    auto advance = [&](const Eigen::VectorXd& x) {
        ExtendedState s = unflatten(x);
        for (long i = 0; i < n; ++i)
            s = chart == Chart::QPi ? step_q_pi(H, s, dt) : step_Q_p(H, s, dt);
        return flatten(s);
    };

    const Eigen::VectorXd x0 = flatten(s0);
    Eigen::MatrixXd J(flat_dim, flat_dim);
    for (int j = 0; j < flat_dim; ++j) {
        Eigen::VectorXd plus = x0;
        Eigen::VectorXd minus = x0;
        plus[j] += fd_step;
        minus[j] -= fd_step;
        J.col(j) = (advance(plus) - advance(minus)) / (2.0 * fd_step);
    }
    const Eigen::MatrixXd omega = SymplecticMatrix::build(2 * dim).form();
    return (J.transpose() * omega * J - omega).cwiseAbs().maxCoeff();
}

}  // namespace dualchart
