// Microbenchmarks for the hot paths: bracket tables, integrator steps,
// lattice curvature extraction, and the truncated-operator pipeline.

#include <benchmark/benchmark.h>

#include <array>
#include <complex>
#include <random>

#include "dualchart/brackets.hpp"
#include "dualchart/dynamics.hpp"
#include "dualchart/gauge.hpp"
#include "dualchart/quantum.hpp"

using namespace dualchart;

namespace {

PhysicalConstants bench_constants() {
    PhysicalConstants k;
    k.m = 1.3;
    k.c = 2.0;
    k.chi = 0.7;
    k.hbar = 0.7;
    return k;
}

ExtendedState bench_state() {
    ExtendedState s = ExtendedState::Zero(2);
    s.q << 0.3, -0.2;
    s.p << 0.1, 0.4;
    s.B << -0.3, 0.2;
    s.piB << 0.2, -0.1;
    return s;
}

}  // namespace

static void BM_bracket_report(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    const Metric g(2);
    const ExtendedState at = bench_state();
    for (auto _ : state) benchmark::DoNotOptimize(canonical_algebra_report(at, g, k));
}
BENCHMARK(BM_bracket_report);

static void BM_strang_steps(benchmark::State& state) {
    SystemHamiltonian H;
    H.k = bench_constants();
    const ExtendedState s0 = bench_state();
    const bool kinetic_chart = state.range(0) == 1;
    for (auto _ : state) {
        ExtendedState s = s0;
        for (int i = 0; i < 1000; ++i)
            s = kinetic_chart ? step_Q_p(H, s, 1e-3) : step_q_pi(H, s, 1e-3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_strang_steps)->Arg(0)->Arg(1);

static void BM_curvature_64(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    LatticeConnection conn = make_lattice({64, 64}, {0.05, 0.05}, k);
    fill_symmetric_gauge(conn, 1.0);
    const MaskedField f = plane_wave_field(conn, {0.6, 0.6});
    for (auto _ : state) benchmark::DoNotOptimize(curvature_from_commutator(conn, f));
}
BENCHMARK(BM_curvature_64);

static void BM_plaquette_sweep(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    LatticeConnection conn = make_lattice({64, 64}, {0.05, 0.05}, k);
    fill_crossed_sine(conn, 0.5, 0.3, 0.8, 0.4);
    for (auto _ : state) {
        std::complex<double> sum = 0.0;
        for (int i = 2; i < 62; ++i)
            for (int j = 2; j < 62; ++j) sum += plaquette_holonomy(conn, {i, j}, 0, 1);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_plaquette_sweep);

static void BM_build_operators(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_operators(d, d, k));
}
BENCHMARK(BM_build_operators)->Arg(16)->Arg(24);

static void BM_diagonalize_system(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    const int d = static_cast<int>(state.range(0));
    const OperatorSet ops = build_operators(d, d, k);
    const CMat H = system_hamiltonian_matrix(ops, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(H));
}
BENCHMARK(BM_diagonalize_system)->Arg(16)->Arg(24);

static void BM_trajectory_density(benchmark::State& state) {
    const PhysicalConstants k = bench_constants();
    const int d = 16;
    const OperatorSet ops = build_operators(d, d, k);
    const HamiltonianSpectrum spec = diagonalize(system_hamiltonian_matrix(ops, 1.0));
    const JointBasis basis = joint_eigenbasis(ops.Q, ops.pi, d, d, 1e-10, 42);
    const DensityOperator rho = DensityOperator::pure(spec.vectors.col(0));
    for (auto _ : state) benchmark::DoNotOptimize(trajectory_density(rho, basis));
}
BENCHMARK(BM_trajectory_density);

static void BM_grid_commutator(benchmark::State& state) {
    const GridKineticOperators grid(
        64, 6.0, [](double x, double y) { return std::array<double, 2>{-y / 2, x / 2}; },
        bench_constants());
    const CVec psi = grid.gaussian(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(grid.apply_commutator(psi));
}
BENCHMARK(BM_grid_commutator);

BENCHMARK_MAIN();
