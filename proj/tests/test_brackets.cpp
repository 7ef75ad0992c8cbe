#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dualchart/brackets.hpp"
#include "dualchart/errors.hpp"

using namespace dualchart;

namespace {

ExtendedState seeded_state(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ExtendedState s = ExtendedState::Zero(dim);
    for (int i = 0; i < dim; ++i) {
        s.q[i] = u(rng);
        s.B[i] = u(rng);
        s.p[i] = u(rng);
        s.piB[i] = u(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("symplectic matrix pairs coordinates with momenta") {
    const SymplecticMatrix omega = SymplecticMatrix::build(2);
    CHECK(omega.half_dim() == 2);
    const Eigen::MatrixXd& w = omega.form();
    CHECK(w.rows() == 4);
    CHECK(w(0, 2) == 1.0);
    CHECK(w(2, 0) == -1.0);
    CHECK(w(1, 3) == 1.0);
    CHECK((w + w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    // omega * omega = -I, so the inverse is -omega and contracts to identity.
    CHECK((w * w + Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((omega.inverse() * w - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("flatten uses the coordinates-first ordering") {
    ExtendedState s = ExtendedState::Zero(2);
    s.q << 1, 2;
    s.B << 3, 4;
    s.p << 5, 6;
    s.piB << 7, 8;
    const Eigen::VectorXd x = flatten(s);
    for (int i = 0; i < 8; ++i) CHECK(x[i] == double(i + 1));

    const ExtendedState back = unflatten(x);
    CHECK((back.q - s.q).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.piB - s.piB).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(unflatten(Eigen::VectorXd::Zero(6)), DimensionError);
}

TEST_CASE("numerical gradient is exact on quadratics") {
    PhaseFunction F;
    F.value = [](const ExtendedState& s) { return s.q[0] * s.q[0] + 3.0 * s.p[1]; };
    ExtendedState at = ExtendedState::Zero(2);
    at.q << 0.7, 0.0;
    const Eigen::VectorXd grad = numerical_gradient(F, at, 1e-5);
    CHECK(grad[0] == doctest::Approx(1.4).epsilon(1e-9));   // d/dq0
    CHECK(grad[5] == doctest::Approx(3.0).epsilon(1e-12));  // d/dp1 (flat slot 2N+1)
    CHECK(std::abs(grad[1]) < 1e-9);
}

TEST_CASE("numerical gradient reports non-finite evaluations") {
    PhaseFunction F;
    F.value = [](const ExtendedState& s) { return std::sqrt(s.q[0]); };
    ExtendedState at = ExtendedState::Zero(1);  // the minus stencil leaves the domain
    at.q[0] = 1e-6;
    try {
        numerical_gradient(F, at, 1e-5);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.coordinate() == 0);
    }
}

TEST_CASE("elementary brackets against hand values") {
    const Metric g(2);
    PhysicalConstants k;
    std::mt19937_64 rng(7);
    const ExtendedState at = seeded_state(rng, 2);

    CHECK(poisson_bracket(coordinate_q(0), momentum_p(0), at, g) == doctest::Approx(1.0));
    CHECK(poisson_bracket(coordinate_q(0), momentum_p(1), at, g) ==
          doctest::Approx(0.0).epsilon(1e-10));
    CHECK(poisson_bracket(coordinate_B(1), momentum_piB(1), at, g) == doctest::Approx(1.0));
    CHECK(poisson_bracket(momentum_p(0), coordinate_q(0), at, g) == doctest::Approx(-1.0));
    CHECK(poisson_bracket(coordinate_q(0), coordinate_B(0), at, g) ==
          doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("indefinite signature lands on the metric") {
    const Metric g(std::vector<int>{1, -1});
    PhysicalConstants k;
    std::mt19937_64 rng(11);
    const ExtendedState at = seeded_state(rng, 2);
    CHECK(poisson_bracket(coordinate_q(1), momentum_p(1), at, g) == doctest::Approx(-1.0));
    CHECK(poisson_bracket(kinetic_Q(1, k), momentum_p(1), at, g) == doctest::Approx(-1.0));
    CHECK(poisson_bracket(coordinate_q(0), momentum_p(0), at, g) == doctest::Approx(1.0));
}

TEST_CASE("canonical algebra report covers the six families") {
    const Metric g(2);
    PhysicalConstants k;
    k.m = 1.3;
    k.c = 2.0;
    std::mt19937_64 rng(42);

    double worst = 0.0;
    int rows_per_state = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const ExtendedState at = seeded_state(rng, 2);
        const auto rows = canonical_algebra_report(at, g, k);
        rows_per_state = static_cast<int>(rows.size());
        for (const BracketRow& row : rows) {
            worst = std::max(worst, row.abs_error);
            const double expected =
                (row.family == "{Q,Q}" || row.family == "{Q,pi}")
                    ? 0.0
                    : (row.mu == row.nu ? g.g(row.mu) : 0.0);
            CHECK(row.expected == expected);
        }
    }
    CHECK(rows_per_state == 6 * 4);  // six families, all (mu, nu) pairs at N=2
    CHECK(worst < 1e-8);
}

TEST_CASE("bracket deviation scales as h^2 on a cubic probe") {
    // On linear coordinate functions the central difference is exact, so the
    // h^2 law must be measured where the third derivative is nonzero. For
    // F = q0^3, G = p0^3 the finite-difference bracket is (3q^2+h^2)(3p^2+h^2),
    // i.e. deviation 3h^2(q^2+p^2) + h^4 exactly.
    PhaseFunction F, G;
    F.value = [](const ExtendedState& s) { return std::pow(s.q[0], 3); };
    G.value = [](const ExtendedState& s) { return std::pow(s.p[0], 3); };
    ExtendedState at = ExtendedState::Zero(1);
    at.q[0] = 2.0;
    at.p[0] = 2.0;
    const Metric g(1);
    const double exact = 9.0 * std::pow(at.q[0], 2) * std::pow(at.p[0], 2);

    const double dev3 = std::abs(poisson_bracket(F, G, at, g, 1e-3) - exact);
    const double dev4 = std::abs(poisson_bracket(F, G, at, g, 1e-4) - exact);
    const double order = std::log10(dev3 / dev4);
    CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    CHECK(dev4 == doctest::Approx(3e-8 * (4.0 + 4.0)).epsilon(0.01));
}

TEST_CASE("kinetic factories implement the pullback combinations") {
    PhysicalConstants k;
    k.m = 1.3;
    k.c = 2.0;
    std::mt19937_64 rng(3);
    const ExtendedState at = seeded_state(rng, 2);
    CHECK(kinetic_Q(0, k).value(at) ==
          doctest::Approx(at.q[0] - k.coordinate_coupling() * at.piB[0]));
    CHECK(kinetic_pi(1, k).value(at) ==
          doctest::Approx(at.p[1] - k.momentum_coupling() * at.B[1]));
}

TEST_CASE("one-form pairs momenta with coordinate directions") {
    std::mt19937_64 rng(5);
    const ExtendedState at = seeded_state(rng, 2);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
    v[0] = 1.0;  // dq0
    CHECK(canonical_one_form(at, v) == doctest::Approx(at.p[0]));
    v.setZero();
    v[3] = 1.0;  // dB1
    CHECK(canonical_one_form(at, v) == doctest::Approx(at.piB[1]));
    v.setZero();
    v[4] = 1.0;  // dp0: no momentum pairs with a momentum direction
    CHECK(canonical_one_form(at, v) == 0.0);
}

TEST_CASE("finite-difference two-form reproduces the pairing matrix") {
    std::mt19937_64 rng(9);
    const ExtendedState at = seeded_state(rng, 2);
    const SymplecticMatrix omega = SymplecticMatrix::build(4);
    const Eigen::MatrixXd& w = omega.form();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(8), wv(8);
        for (int i = 0; i < 8; ++i) {
            v[i] = u(rng);
            wv[i] = u(rng);
        }
        const double expected = v.transpose() * w * wv;
        // theta is linear in the state, so the central difference is exact.
        CHECK(two_form_finite_difference(at, v, wv) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}
