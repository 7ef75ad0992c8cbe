#include "dualchart/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "dualchart/errors.hpp"

namespace dualchart {

namespace {

constexpr Cplx kI{0.0, 1.0};

CMat kron(const CMat& A, const CMat& B) {
    CMat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

/// Annihilation operator on d Fock levels: <n-1| a |n> = sqrt(n).
CMat annihilation(int d) {
    CMat a = CMat::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
    return a;
}

Eigen::VectorXd hermitian_eigenvalues(const CMat& A) {
    Eigen::SelfAdjointEigenSolver<CMat> solver(A, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// Portable uniform draw in [0,1) from the top 53 bits of one engine output.
double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double hermiticity_defect(const CMat& A) {
    return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

CMat ladder_position(int d, double hbar, double mass, double freq) {
    const CMat a = annihilation(d);
    return std::sqrt(hbar / (2.0 * mass * freq)) * (a + a.adjoint());
}

CMat ladder_momentum(int d, double hbar, double mass, double freq) {
    const CMat a = annihilation(d);
    return kI * std::sqrt(hbar * mass * freq / 2.0) * (a.adjoint() - a);
}

OperatorSet build_operators(int d_p, int d_f, const PhysicalConstants& k, LadderScales scales,
                            std::optional<std::pair<double, double>> coupling_override) {
    if (d_p < 8 || d_f < 8)
        throw TruncationError("operator truncation requires at least 8 Fock levels per factor");
    k.validate();
    if (!(scales.particle > 0.0) || !(scales.field > 0.0))
        throw TruncationError("ladder scales must be positive");

    OperatorSet ops;
    ops.d_p = d_p;
    ops.d_f = d_f;
    ops.k = k;
    ops.momentum_coupling = coupling_override ? coupling_override->first : k.momentum_coupling();
    ops.coordinate_coupling =
        coupling_override ? coupling_override->second : k.coordinate_coupling();

    const CMat Ip = CMat::Identity(d_p, d_p);
    const CMat If = CMat::Identity(d_f, d_f);
    ops.q = kron(ladder_position(d_p, k.hbar, k.m, scales.particle), If);
    ops.p = kron(ladder_momentum(d_p, k.hbar, k.m, scales.particle), If);
    ops.B = kron(Ip, ladder_position(d_f, k.hbar, 1.0, scales.field));
    ops.piB = kron(Ip, ladder_momentum(d_f, k.hbar, 1.0, scales.field));
    ops.Q = ops.q - ops.coordinate_coupling * ops.piB;
    ops.pi = ops.p - ops.momentum_coupling * ops.B;
    return ops;
}

std::vector<int> interior_indices(int d_p, int d_f, int cut_p, int cut_f) {
    if (cut_p < 1 || cut_f < 1 || cut_p > d_p || cut_f > d_f)
        throw TruncationError("interior cut must lie within the truncation");
    std::vector<int> idx;
    idx.reserve(static_cast<size_t>(cut_p) * cut_f);
    for (int np = 0; np < cut_p; ++np)
        for (int nf = 0; nf < cut_f; ++nf) idx.push_back(np * d_f + nf);
    return idx;
}

double restricted_norm(const CMat& M, const std::vector<int>& columns) {
    if (columns.empty()) return 0.0;
    CMat sub(M.rows(), static_cast<int>(columns.size()));
    for (size_t j = 0; j < columns.size(); ++j) {
        if (columns[j] < 0 || columns[j] >= M.cols())
            throw DimensionError("restricted-norm column out of range");
        sub.col(static_cast<int>(j)) = M.col(columns[j]);
    }
    // Largest singular value via the (hermitian) Gram matrix.
    const Eigen::VectorXd gram = hermitian_eigenvalues(sub.adjoint() * sub);
    return std::sqrt(std::max(0.0, gram.maxCoeff()));
}

std::vector<CommutatorCheck> commutator_suite(const OperatorSet& ops, int cut_p, int cut_f) {
    const std::vector<int> interior = interior_indices(ops.d_p, ops.d_f, cut_p, cut_f);
    const int dim = ops.dim();
    const CMat ihbar = kI * ops.k.hbar * CMat::Identity(dim, dim);
    auto comm = [](const CMat& A, const CMat& B) { return A * B - B * A; };

    std::vector<CommutatorCheck> checks;
    auto push = [&](const std::string& identity, const CMat& defect_op) {
        checks.push_back({identity, restricted_norm(defect_op, interior)});
    };
    push("[q,p] = ihbar", comm(ops.q, ops.p) - ihbar);
    push("[q,pi] = ihbar", comm(ops.q, ops.pi) - ihbar);
    push("[B,piB] = ihbar", comm(ops.B, ops.piB) - ihbar);
    push("[Q,pi] = 0", comm(ops.Q, ops.pi));
    push("[Q,p] = ihbar", comm(ops.Q, ops.p) - ihbar);
    push("[Q,Q] = 0", comm(ops.Q, ops.Q));
    return checks;
}

// --- Grid realization --------------------------------------------------------

GridKineticOperators::GridKineticOperators(
    int n, double half_width, std::function<std::array<double, 2>(double, double)> B_profile,
    const PhysicalConstants& k)
    : n_(n), half_(half_width), a_(2.0 * half_width / n), k_(k) {
    if (n < 8) throw TruncationError("grid realization requires at least 8 points per axis");
    if (!(half_width > 0.0)) throw DimensionError("grid half-width must be positive");
    k.validate();
    B1_.resize(static_cast<size_t>(n) * n);
    B2_.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto B = B_profile(coordinate(i), coordinate(j));
            B1_[static_cast<size_t>(i) * n + j] = B[0];
            B2_[static_cast<size_t>(i) * n + j] = B[1];
        }
    }
}

CVec GridKineticOperators::apply_pi(int axis, const CVec& psi) const {
    if (axis != 0 && axis != 1) throw DimensionError("grid axis must be 0 or 1");
    if (psi.size() != static_cast<long>(n_) * n_)
        throw DimensionError("grid state size does not match the grid");
    const std::vector<double>& B = axis == 0 ? B1_ : B2_;
    const double km = k_.momentum_coupling();
    const Cplx deriv_factor = -kI * k_.hbar / (2.0 * a_);

    CVec out(psi.size());
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const long flat = static_cast<long>(i) * n_ + j;
            Cplx fwd(0.0, 0.0), bwd(0.0, 0.0);
            if (axis == 0) {
                if (i + 1 < n_) fwd = psi[flat + n_];
                if (i - 1 >= 0) bwd = psi[flat - n_];
            } else {
                if (j + 1 < n_) fwd = psi[flat + 1];
                if (j - 1 >= 0) bwd = psi[flat - 1];
            }
            out[flat] = deriv_factor * (fwd - bwd) - km * B[flat] * psi[flat];
        }
    }
    return out;
}

CVec GridKineticOperators::apply_commutator(const CVec& psi) const {
    return apply_pi(0, apply_pi(1, psi)) - apply_pi(1, apply_pi(0, psi));
}

double GridKineticOperators::commutator_defect(const CVec& psi,
                                               const std::function<double(double, double)>& F12,
                                               int margin) const {
    const CVec comm = apply_commutator(psi);
    const Cplx factor = 2.0 * kI * k_.m * k_.hbar / k_.c;
    double num = 0.0, den = 0.0;
    for (int i = margin; i < n_ - margin; ++i) {
        for (int j = margin; j < n_ - margin; ++j) {
            const long flat = static_cast<long>(i) * n_ + j;
            const Cplx expected = factor * F12(coordinate(i), coordinate(j)) * psi[flat];
            num += std::norm(comm[flat] - expected);
            den += std::norm(expected);
        }
    }
    if (den == 0.0) throw DegenerateTestFieldError("expected commutator image vanishes");
    return std::sqrt(num / den);
}

CVec GridKineticOperators::gaussian(double s) const {
    CVec psi(static_cast<long>(n_) * n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            const double x = coordinate(i), y = coordinate(j);
            psi[static_cast<long>(i) * n_ + j] = std::exp(-(x * x + y * y) / (4.0 * s * s));
        }
    }
    return psi / psi.norm();
}

// --- Density operators and evolution ----------------------------------------

DensityOperator DensityOperator::from_ensemble(const std::vector<double>& weights,
                                               const std::vector<CVec>& states) {
    if (weights.empty() || weights.size() != states.size())
        throw DimensionError("ensemble weights and states must match and be nonempty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw NumericalError(-1, "ensemble weights must be nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw NumericalError(-1, "ensemble weights must not all vanish");

    DensityOperator out;
    out.rho = CMat::Zero(states[0].size(), states[0].size());
    for (size_t i = 0; i < states.size(); ++i) {
        if (states[i].size() != states[0].size())
            throw DimensionError("ensemble states must share one dimension");
        const CVec psi = states[i] / states[i].norm();
        out.rho += (weights[i] / total) * (psi * psi.adjoint());
    }
    return out;
}

DensityOperator DensityOperator::pure(const CVec& psi) {
    const CVec unit = psi / psi.norm();
    return DensityOperator{unit * unit.adjoint()};
}

double DensityOperator::trace_defect() const { return std::abs(rho.trace() - Cplx(1.0, 0.0)); }

double DensityOperator::hermiticity() const { return hermiticity_defect(rho); }

double DensityOperator::min_eigenvalue() const {
    return hermitian_eigenvalues(rho).minCoeff();
}

double DensityOperator::purity() const {
    // tr(rho^2) = ||rho||_F^2 for hermitian rho.
    return rho.squaredNorm();
}

HamiltonianSpectrum diagonalize(const CMat& H) {
    if (hermiticity_defect(H) > 1e-10)
        throw NumericalError(-1, "refusing to diagonalize a non-hermitian operator");
    Eigen::SelfAdjointEigenSolver<CMat> solver(H);
    if (solver.info() != Eigen::Success)
        throw NumericalError(-1, "hermitian eigendecomposition failed to converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

CMat system_hamiltonian_matrix(const OperatorSet& ops, double omega0) {
    const CMat sigma = ops.piB - ops.momentum_coupling * ops.q;
    return ops.pi * ops.pi / (2.0 * ops.k.m) + 0.5 * sigma * sigma +
           0.5 * omega0 * omega0 * ops.B * ops.B;
}

DensityOperator evolve_density(const DensityOperator& rho0, const HamiltonianSpectrum& spec,
                               double t, double hbar) {
    // In the eigenbasis, rho_ij picks up exp(-i (E_i - E_j) t / hbar).
    CMat W = spec.vectors.adjoint() * rho0.rho * spec.vectors;
    const long d = spec.energies.size();
    CVec phases(d);
    for (long i = 0; i < d; ++i) phases[i] = std::polar(1.0, -spec.energies[i] * t / hbar);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) W(i, j) *= phases[i] * std::conj(phases[j]);
    return DensityOperator{spec.vectors * W * spec.vectors.adjoint()};
}

CVec evolve_state(const CVec& psi0, const HamiltonianSpectrum& spec, double t, double hbar) {
    CVec w = spec.vectors.adjoint() * psi0;
    for (long i = 0; i < w.size(); ++i) w[i] *= std::polar(1.0, -spec.energies[i] * t / hbar);
    return spec.vectors * w;
}

// --- Joint eigenbasis, trajectory density, scatter --------------------------

JointBasis joint_eigenbasis(const CMat& A, const CMat& B, int d_p, int d_f, double tolerance,
                            std::uint64_t seed, int n_clusters) {
    const int dim = d_p * d_f;
    if (A.rows() != dim || A.cols() != dim || B.rows() != dim || B.cols() != dim)
        throw DimensionError("joint basis operators must be square of dimension d_p * d_f");

    JointBasis basis;
    const CMat K = A * B - B * A;
    std::vector<int> all(dim);
    for (int i = 0; i < dim; ++i) all[i] = i;
    basis.defect_full = restricted_norm(K, all);
    basis.defect_interior =
        restricted_norm(K, interior_indices(d_p, d_f, d_p / 2, d_f / 2));
    if (basis.defect_interior > tolerance)
        throw TruncationError(
            "operators do not commute on the interior subspace at this truncation "
            "(defect " + std::to_string(basis.defect_interior) + ")");

    // Generic mixing weight: scaled by the spectral spreads so the two
    // operators contribute comparably, jittered by the seed so no fixed
    // rational relation between spectra can produce accidental degeneracy.
    const Eigen::VectorXd specA = hermitian_eigenvalues(A);
    const Eigen::VectorXd specB = hermitian_eigenvalues(B);
    std::mt19937_64 rng(seed);
    const double gamma0 = 0.35 + 0.3 * unit_draw(rng);
    basis.gamma = gamma0 * (specA.maxCoeff() - specA.minCoeff()) /
                  (specB.maxCoeff() - specB.minCoeff());

    Eigen::SelfAdjointEigenSolver<CMat> solver(A + basis.gamma * B);
    if (solver.info() != Eigen::Success)
        throw NumericalError(-1, "joint-basis eigendecomposition failed to converge");
    const Eigen::VectorXd lambda = solver.eigenvalues();
    CMat V = solver.eigenvectors();

    // Truncation splits the degenerate continuum into near-degenerate bands;
    // re-diagonalizing A inside each band recovers joint eigenvectors the
    // one-shot mixture cannot see. Cluster width is set by the spectral
    // spread, not by a fixed gap, so the rule survives rescaling.
    if (n_clusters <= 0) n_clusters = static_cast<int>(std::lround(std::sqrt(double(dim)) / 2.0));
    n_clusters = std::max(1, n_clusters);
    const double width = (lambda[dim - 1] - lambda[0]) / n_clusters;
    int start = 0;
    basis.clusters = 0;
    for (int i = 1; i <= dim; ++i) {
        if (i < dim && lambda[i] - lambda[start] <= width) continue;
        const int len = i - start;
        if (len > 1) {
            const CMat sub = V.middleCols(start, len);
            Eigen::SelfAdjointEigenSolver<CMat> fine(CMat(sub.adjoint() * A * sub));
            V.middleCols(start, len) = sub * fine.eigenvectors();
        }
        ++basis.clusters;
        start = i;
    }

    basis.vectors = V;
    basis.Q_label.resize(dim);
    basis.pi_label.resize(dim);
    basis.residual_Q.resize(dim);
    basis.residual_pi.resize(dim);
    for (int i = 0; i < dim; ++i) {
        const CVec v = V.col(i);
        const CVec Av = A * v;
        const CVec Bv = B * v;
        basis.Q_label[i] = v.dot(Av).real();
        basis.pi_label[i] = v.dot(Bv).real();
        basis.residual_Q[i] = (Av - basis.Q_label[i] * v).norm();
        basis.residual_pi[i] = (Bv - basis.pi_label[i] * v).norm();
    }
    return basis;
}

TrajectoryDensity trajectory_density(const DensityOperator& rho, const JointBasis& basis,
                                     double time) {
    const int dim = static_cast<int>(basis.vectors.cols());
    if (rho.rho.rows() != dim)
        throw DimensionError("density dimension does not match the joint basis");
    TrajectoryDensity density;
    density.time = time;
    density.Q = basis.Q_label;
    density.pi = basis.pi_label;
    density.G.resize(dim);
    for (int i = 0; i < dim; ++i) {
        const CVec v = basis.vectors.col(i);
        density.G[i] = v.dot(rho.rho * v).real();
    }
    return density;
}

ScatterStats scatter_statistics(const TrajectoryDensity& G) {
    // Rounding can leave O(1e-16) negative weights; clamping keeps the
    // variance estimate well defined without moving it measurably.
    Eigen::VectorXd w = G.G.cwiseMax(0.0);
    const double total = w.sum();
    if (!(total > 0.0)) throw NumericalError(-1, "trajectory density has no weight");
    w /= total;

    ScatterStats stats;
    const double mQ = w.dot(G.Q);
    const double mpi = w.dot(G.pi);
    stats.dQ = std::sqrt(w.dot((G.Q.array() - mQ).square().matrix()));
    stats.dpi = std::sqrt(w.dot((G.pi.array() - mpi).square().matrix()));
    stats.product = stats.dQ * stats.dpi;
    return stats;
}

// --- Operator container ------------------------------------------------------

namespace {

constexpr char kOpMagic[4] = {'D', 'C', 'O', 'P'};
constexpr std::uint32_t kOpVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error("truncated operator container");
    return value;
}

}  // namespace

void save_operator_container(const std::filesystem::path& file,
                             const std::vector<std::pair<std::string, CMat>>& entries) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open '" + file.string() + "' for writing");
    out.write(kOpMagic, 4);
    write_pod(out, kOpVersion);
    write_pod(out, static_cast<std::uint32_t>(entries.size()));
    for (const auto& [name, matrix] : entries) {
        write_pod(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_pod(out, static_cast<std::uint32_t>(matrix.rows()));
        write_pod(out, static_cast<std::uint32_t>(matrix.cols()));
        out.write(reinterpret_cast<const char*>(matrix.data()),
                  static_cast<std::streamsize>(sizeof(Cplx) * matrix.size()));
    }
    if (!out) throw Error("failed writing '" + file.string() + "'");
}

std::vector<std::pair<std::string, CMat>> load_operator_container(
    const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open '" + file.string() + "' for reading");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kOpMagic, 4))
        throw Error("'" + file.string() + "' is not an operator container");
    if (read_pod<std::uint32_t>(in) != kOpVersion)
        throw Error("unsupported operator container version");
    const auto count = read_pod<std::uint32_t>(in);
    std::vector<std::pair<std::string, CMat>> entries;
    entries.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
        const auto name_len = read_pod<std::uint32_t>(in);
        if (name_len > 4096) throw Error("implausible name length in operator container");
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto rows = read_pod<std::uint32_t>(in);
        const auto cols = read_pod<std::uint32_t>(in);
        CMat matrix(rows, cols);
        in.read(reinterpret_cast<char*>(matrix.data()),
                static_cast<std::streamsize>(sizeof(Cplx) * matrix.size()));
        if (!in) throw Error("truncated operator container");
        entries.emplace_back(std::move(name), std::move(matrix));
    }
    return entries;
}

}  // namespace dualchart
