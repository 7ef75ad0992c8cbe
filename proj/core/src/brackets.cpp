#include "dualchart/brackets.hpp"

#include <cmath>

namespace dualchart {

SymplecticMatrix SymplecticMatrix::build(int half_dim) {
    if (half_dim < 1) throw DimensionError("symplectic half-dimension must be >= 1");
    SymplecticMatrix w;
    w.half_ = half_dim;
    const int n = 2 * half_dim;
    w.form_ = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < half_dim; ++i) {
        w.form_(i, i + half_dim) = 1.0;
        w.form_(i + half_dim, i) = -1.0;
    }
    w.inverse_ = -w.form_;  // omega^{-1} = -omega since omega*omega = -I
    return w;
}

Eigen::VectorXd flatten(const ExtendedState& s) {
    const int n = s.dim();
    Eigen::VectorXd x(4 * n);
    x.segment(0, n) = s.q;
    x.segment(n, n) = s.B;
    x.segment(2 * n, n) = s.p;
    x.segment(3 * n, n) = s.piB;
    return x;
}

ExtendedState unflatten(const Eigen::VectorXd& x) {
    if (x.size() % 4 != 0) throw DimensionError("flat state length must be a multiple of 4");
    const Eigen::Index n = x.size() / 4;
    ExtendedState s;
    s.q = x.segment(0, n);
    s.B = x.segment(n, n);
    s.p = x.segment(2 * n, n);
    s.piB = x.segment(3 * n, n);
    return s;
}

Eigen::VectorXd numerical_gradient(const PhaseFunction& F, const ExtendedState& at, double h) {
    const Eigen::VectorXd x0 = flatten(at);
    Eigen::VectorXd grad(x0.size());
    Eigen::VectorXd x = x0;
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
        x(i) = x0(i) + h;
        const double fp = F.value(unflatten(x));
        x(i) = x0(i) - h;
        const double fm = F.value(unflatten(x));
        x(i) = x0(i);
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericalError(i, "non-finite evaluation in numerical gradient");
        grad(i) = (fp - fm) / (2.0 * h);
    }
    return grad;
}

namespace {

Eigen::VectorXd gradient_of(const PhaseFunction& F, const ExtendedState& at, double h) {
    return F.gradient ? F.gradient(at) : numerical_gradient(F, at, h);
}

}  // namespace

double poisson_bracket(const PhaseFunction& F, const PhaseFunction& G, const ExtendedState& at,
                       const Metric& g, double h) {
    if (!(h > 0.0)) throw NumericalError(-1, "finite-difference step must be > 0");
    const Eigen::VectorXd gF = gradient_of(F, at, h);
    const Eigen::VectorXd gG = gradient_of(G, at, h);
    const Eigen::Index n = at.dim();
    if (gF.size() != 4 * n || gG.size() != 4 * n)
        throw DimensionError("gradient length must be 4N");
    // Contraction with W = [[0, diag(g,g)], [-diag(g,g), 0]] in the
    // (q, B | p, piB) ordering; see header for the sign convention.
    double sum = 0.0;
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        const double gii = g.g(static_cast<int>(i % n));
        sum += gii * (gF(i) * gG(i + 2 * n) - gF(i + 2 * n) * gG(i));
    }
    return sum;
}

PhaseFunction coordinate_q(int mu) {
    return {[mu](const ExtendedState& s) { return s.q(mu); }, nullptr};
}
PhaseFunction coordinate_B(int mu) {
    return {[mu](const ExtendedState& s) { return s.B(mu); }, nullptr};
}
PhaseFunction momentum_p(int mu) {
    return {[mu](const ExtendedState& s) { return s.p(mu); }, nullptr};
}
PhaseFunction momentum_piB(int mu) {
    return {[mu](const ExtendedState& s) { return s.piB(mu); }, nullptr};
}
PhaseFunction kinetic_Q(int mu, const PhysicalConstants& k) {
    const double cc = k.coordinate_coupling();
    return {[mu, cc](const ExtendedState& s) { return s.q(mu) - cc * s.piB(mu); }, nullptr};
}
PhaseFunction kinetic_pi(int mu, const PhysicalConstants& k) {
    const double mc = k.momentum_coupling();
    return {[mu, mc](const ExtendedState& s) { return s.p(mu) - mc * s.B(mu); }, nullptr};
}

std::vector<BracketRow> canonical_algebra_report(const ExtendedState& at, const Metric& g,
                                                 const PhysicalConstants& k, double h) {
    const int n = at.dim();
    std::vector<BracketRow> rows;
    rows.reserve(static_cast<size_t>(6 * n * n));
    struct Family {
        const char* name;
        std::function<PhaseFunction(int)> left, right;
        bool expect_metric;  // expected = g^{mu nu}, else 0
    };
    auto Q = [&k](int mu) { return kinetic_Q(mu, k); };
    auto Pi = [&k](int mu) { return kinetic_pi(mu, k); };
    const Family families[] = {
        {"{q,p}", coordinate_q, momentum_p, true},
        {"{q,pi}", coordinate_q, Pi, true},
        {"{B,piB}", coordinate_B, momentum_piB, true},
        {"{Q,Q}", Q, Q, false},
        {"{Q,pi}", Q, Pi, false},
        {"{Q,p}", Q, momentum_p, true},
    };
    for (const auto& fam : families) {
        for (int mu = 0; mu < n; ++mu) {
            for (int nu = 0; nu < n; ++nu) {
                BracketRow row;
                row.family = fam.name;
                row.mu = mu;
                row.nu = nu;
                row.value = poisson_bracket(fam.left(mu), fam.right(nu), at, g, h);
                row.expected = fam.expect_metric && mu == nu ? g.g(mu) : 0.0;
                row.abs_error = std::abs(row.value - row.expected);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

double canonical_one_form(const ExtendedState& at, const Eigen::VectorXd& v) {
    const Eigen::Index n = at.dim();
    if (v.size() != 4 * n) throw DimensionError("tangent vector length must be 4N");
    // theta = p . dq + piB . dB: momenta pair with the coordinate components
    // of v in the (q, B | p, piB) ordering.
    return at.p.dot(v.segment(0, n)) + at.piB.dot(v.segment(n, n));
}

double two_form_finite_difference(const ExtendedState& at, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double h) {
    // omega = -d(theta): omega(v, w) = w[theta(v)] - v[theta(w)] for constant
    // vector fields (directional derivatives of the one-form coefficients).
    // With theta = p.dq + piB.dB this equals v^T omega_IJ w to O(h^2).
    const Eigen::VectorXd x0 = flatten(at);
    auto theta = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& dir) {
        return canonical_one_form(unflatten(x), dir);
    };
    const double dv = (theta(x0 + h * v, w) - theta(x0 - h * v, w)) / (2.0 * h);
    const double dw = (theta(x0 + h * w, v) - theta(x0 - h * w, v)) / (2.0 * h);
    return dw - dv;
}

}  // namespace dualchart
