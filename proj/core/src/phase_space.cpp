#include "dualchart/phase_space.hpp"

#include <cmath>

namespace dualchart {

void PhysicalConstants::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string("constants.") + name, "must be finite and > 0");
    };
    positive(m, "m");
    positive(c, "c");
    positive(chi, "chi");
    positive(hbar, "hbar");
}

Metric::Metric(int dim) {
    if (dim < 1) throw DimensionError("metric dimension must be >= 1");
    diag_.assign(static_cast<size_t>(dim), 1.0);
}

Metric::Metric(std::vector<int> signature) {
    if (signature.empty()) throw DimensionError("metric signature must be nonempty");
    diag_.reserve(signature.size());
    for (int s : signature) {
        if (s != 1 && s != -1) throw DimensionError("metric signature entries must be +1 or -1");
        diag_.push_back(static_cast<double>(s));
    }
}

ExtendedState ExtendedState::Zero(int n) {
    ExtendedState s;
    s.q = Eigen::VectorXd::Zero(n);
    s.p = Eigen::VectorXd::Zero(n);
    s.B = Eigen::VectorXd::Zero(n);
    s.piB = Eigen::VectorXd::Zero(n);
    return s;
}

void ExtendedState::validate() const {
    const auto n = q.size();
    if (p.size() != n || B.size() != n || piB.size() != n)
        throw DimensionError("ExtendedState blocks must share one length");
    const Eigen::VectorXd* blocks[] = {&q, &B, &p, &piB};
    for (int b = 0; b < 4; ++b)
        for (Eigen::Index i = 0; i < n; ++i)
            if (!std::isfinite((*blocks[b])(i)))
                throw NumericalError(b * n + i, "non-finite state entry");
}

Eigen::VectorXd pullback_momentum(const Eigen::VectorXd& p, const Eigen::VectorXd& B,
                                  const PhysicalConstants& k) {
    if (p.size() != B.size()) throw DimensionError("pullback_momentum: p and B lengths differ");
    return p - k.momentum_coupling() * B;
}

Eigen::VectorXd pullback_coordinate(const Eigen::VectorXd& q, const Eigen::VectorXd& piB,
                                    const PhysicalConstants& k) {
    if (q.size() != piB.size())
        throw DimensionError("pullback_coordinate: q and piB lengths differ");
    return q - k.coordinate_coupling() * piB;
}

KineticChart to_kinetic(const ExtendedState& s, const PhysicalConstants& k) {
    return {pullback_coordinate(s.q, s.piB, k), pullback_momentum(s.p, s.B, k)};
}

ExtendedState inverse_pullbacks(const KineticChart& chart, const Eigen::VectorXd& B,
                                const Eigen::VectorXd& piB, const PhysicalConstants& k) {
    if (chart.Q.size() != chart.pi.size() || chart.Q.size() != B.size() ||
        chart.Q.size() != piB.size())
        throw DimensionError("inverse_pullbacks: block lengths differ");
    ExtendedState s;
    s.q = chart.Q + k.coordinate_coupling() * piB;
    s.p = chart.pi + k.momentum_coupling() * B;
    s.B = B;
    s.piB = piB;
    return s;
}

}  // namespace dualchart
