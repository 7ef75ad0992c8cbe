#include "dualchart/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

#include "dualchart/brackets.hpp"
#include "dualchart/dynamics.hpp"
#include "dualchart/errors.hpp"
#include "dualchart/gauge.hpp"
#include "dualchart/quantum.hpp"

namespace dualchart {

namespace {

namespace fs = std::filesystem;

/// Portable uniform draw in [0,1) from the top 53 bits of one engine output.
double unit_draw(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

ExtendedState random_state(std::mt19937_64& rng, int dim) {
    ExtendedState s = ExtendedState::Zero(dim);
    for (int i = 0; i < dim; ++i) s.q[i] = unit_draw(rng) - 0.5;
    for (int i = 0; i < dim; ++i) s.B[i] = unit_draw(rng) - 0.5;
    for (int i = 0; i < dim; ++i) s.p[i] = unit_draw(rng) - 0.5;
    for (int i = 0; i < dim; ++i) s.piB[i] = unit_draw(rng) - 0.5;
    return s;
}

/// Truncated coherent state on d Fock levels, normalized.
CVec coherent_state(int d, Cplx alpha) {
    CVec v(d);
    v[0] = Cplx(1.0, 0.0);
    for (int n = 1; n < d; ++n) v[n] = v[n - 1] * alpha / std::sqrt(double(n));
    return v / v.norm();
}

CVec product_state(const CVec& particle, const CVec& field) {
    CVec psi(particle.size() * field.size());
    for (long i = 0; i < particle.size(); ++i)
        for (long j = 0; j < field.size(); ++j)
            psi[i * field.size() + j] = particle[i] * field[j];
    return psi;
}

std::vector<std::string> state_row(double t, const ExtendedState& s, const KineticChart& kin,
                                   double energy) {
    std::vector<std::string> cells;
    cells.push_back(format_double(t));
    auto append = [&](const Eigen::VectorXd& v) {
        for (int i = 0; i < v.size(); ++i) cells.push_back(format_double(v[i]));
    };
    append(s.q);
    append(s.p);
    append(s.B);
    append(s.piB);
    append(kin.Q);
    append(kin.pi);
    cells.push_back(format_double(energy));
    return cells;
}

// --- brackets ---------------------------------------------------------------

SuiteResult run_brackets(const ScenarioConfig& cfg, const fs::path& dir) {
    SuiteResult result;
    result.name = "brackets";
    const Metric g = cfg.metric();
    std::mt19937_64 rng(cfg.seed);

    CsvWriter csv(dir / "algebra.csv");
    csv.header({"state", "bracket_family", "mu", "nu", "value", "expected", "abs_error"});
    result.files.push_back("brackets/algebra.csv");

    std::map<std::string, double> worst;
    const int n_states = 5;
    for (int s = 0; s < n_states; ++s) {
        const ExtendedState at = random_state(rng, cfg.dimensions);
        for (const BracketRow& row : canonical_algebra_report(at, g, cfg.constants)) {
            worst[row.family] = std::max(worst[row.family], row.abs_error);
            csv.row({std::to_string(s), row.family, std::to_string(row.mu),
                     std::to_string(row.nu), format_double(row.value),
                     format_double(row.expected), format_double(row.abs_error)});
        }
    }
    for (const auto& [family, deviation] : worst)
        result.checks.push_back(check_upper("bracket " + family, deviation, 1e-8,
                                            "max deviation over seeded states"));
    return result;
}

// --- gauge -------------------------------------------------------------------

SuiteResult run_gauge(const ScenarioConfig& cfg, const fs::path& dir) {
    SuiteResult result;
    result.name = "gauge";
    const std::vector<int> dims{cfg.lattice_n, cfg.lattice_n};
    const std::vector<double> spacing{cfg.lattice_a, cfg.lattice_a};

    // Uniform field in symmetric gauge: commutator curvature against b.
    LatticeConnection conn = make_lattice(dims, spacing, cfg.constants);
    fill_symmetric_gauge(conn, 1.0);
    const MaskedField probe = plane_wave_field(conn, {0.6, 0.6});
    const CurvatureTensor curv = curvature_from_commutator(conn, probe);

    CsvWriter curvature_csv(dir / "curvature.csv");
    curvature_csv.header({"i1", "i2", "F12", "error"});
    result.files.push_back("gauge/curvature.csv");
    double worst_uniform = 0.0;
    for (int i = curv.margin; i < dims[0] - curv.margin; ++i) {
        for (int j = curv.margin; j < dims[1] - curv.margin; ++j) {
            const long flat = conn.flat_index({i, j});
            const double F = curv.at(flat, 0, 1);
            worst_uniform = std::max(worst_uniform, std::abs(F - 1.0));
            curvature_csv.row({std::to_string(i), std::to_string(j), format_double(F),
                               format_double(F - 1.0)});
        }
    }
    result.checks.push_back(
        check_upper("uniform-field curvature error", worst_uniform, 5e-3,
                    "max |F12 - b| over the interior, b = 1"));

    // Pure gauge: the connection is loud but the curvature must be flat.
    fill_pure_gauge_constant(conn, {0.3, 0.4});
    const CurvatureTensor flat_curv = curvature_from_commutator(conn, probe);
    double max_B = 0.0;
    for (double b : conn.B) max_B = std::max(max_B, std::abs(b));
    result.checks.push_back(check_upper("pure-gauge curvature", flat_curv.max_abs(), 1e-8,
                                        "max |F| for a constant-gradient pure gauge"));
    result.checks.push_back(
        check_lower("pure-gauge connection magnitude", max_B, 0.1, "max |B| must stay loud"));

    // Holonomy: oscillatory field with curvature bounded away from zero.
    const double amp1 = 0.5, k1 = 0.3, amp2 = 0.8, k2 = 0.4;
    fill_crossed_sine(conn, amp1, k1, amp2, k2);
    const double coup = cfg.constants.gauge_coupling();
    const double a = cfg.lattice_a;
    CsvWriter holonomy_csv(dir / "holonomy.csv");
    holonomy_csv.header({"i1", "i2", "arg", "predicted", "rel_error"});
    result.files.push_back("gauge/holonomy.csv");
    double worst_hol = 0.0;
    for (int i = 2; i < dims[0] - 2; ++i) {
        for (int j = 2; j < dims[1] - 2; ++j) {
            const std::vector<double> x = conn.coordinates({i, j});
            const double F = amp2 * k2 * std::cos(k2 * x[0]) - amp1 * k1 * std::cos(k1 * x[1]);
            const double arg = std::arg(plaquette_holonomy(conn, {i, j}, 0, 1));
            const double predicted = -coup * F * a * a;
            const double rel = std::abs(arg - predicted) / std::abs(predicted);
            worst_hol = std::max(worst_hol, rel);
            holonomy_csv.row({std::to_string(i), std::to_string(j), format_double(arg),
                              format_double(predicted), format_double(rel)});
        }
    }
    result.checks.push_back(check_upper("holonomy phase error", worst_hol, 5e-2,
                                        "max relative deviation from -F a^2 / (2 m chi)"));
    return result;
}

// --- dynamics ------------------------------------------------------------------

SuiteResult run_dynamics(const ScenarioConfig& cfg, const fs::path& dir) {
    SuiteResult result;
    result.name = "dynamics";
    SystemHamiltonian H{cfg.constants, cfg.omega0, ParticleModel::NonRelativistic};
    std::mt19937_64 rng(cfg.seed);

    const int n_states = 5;
    double worst_gap = 0.0, worst_drift = 0.0, worst_reversal = 0.0, worst_oracle = 0.0;
    const long sample_every = std::max(1L, cfg.steps / 100);
    for (int s = 0; s < n_states; ++s) {
        const ExtendedState s0 = random_state(rng, cfg.dimensions);
        const Trajectory a = evolve_q_pi(H, s0, cfg.dt, cfg.steps, sample_every);
        const Trajectory b = evolve_Q_p(H, s0, cfg.dt, cfg.steps, sample_every);
        const double E0 = H.energy(s0);
        for (size_t i = 0; i < a.states.size(); ++i) {
            const ExtendedState& sa = a.states[i];
            const ExtendedState& sb = b.states[i];
            const ExtendedState oracle = closed_form_state(H, s0, a.times[i]);
            auto gap = [](const ExtendedState& u, const ExtendedState& v) {
                return std::max({(u.q - v.q).cwiseAbs().maxCoeff(),
                                 (u.p - v.p).cwiseAbs().maxCoeff(),
                                 (u.B - v.B).cwiseAbs().maxCoeff(),
                                 (u.piB - v.piB).cwiseAbs().maxCoeff()});
            };
            worst_gap = std::max(worst_gap, gap(sa, sb));
            worst_drift = std::max(worst_drift, std::abs(H.energy(sa) - E0) / std::abs(E0));
            worst_oracle = std::max(worst_oracle, gap(sa, oracle));
        }
        // Reverse the final state back to t = 0.
        ExtendedState back = a.states.back();
        for (long i = 0; i < cfg.steps; ++i) back = step_q_pi(H, back, -cfg.dt);
        const double rev = std::max({(back.q - s0.q).cwiseAbs().maxCoeff(),
                                     (back.p - s0.p).cwiseAbs().maxCoeff(),
                                     (back.B - s0.B).cwiseAbs().maxCoeff(),
                                     (back.piB - s0.piB).cwiseAbs().maxCoeff()});
        worst_reversal = std::max(worst_reversal, rev);

        if (s == 0) {
            CsvWriter traj_csv(dir / "trajectory.csv");
            std::vector<std::string> cols{"t"};
            for (const char* block : {"q", "p", "B", "piB", "Q", "pi"})
                for (int i = 1; i <= cfg.dimensions; ++i)
                    cols.push_back(std::string(block) + std::to_string(i));
            cols.push_back("H");
            traj_csv.row(cols);
            result.files.push_back("dynamics/trajectory.csv");
            for (size_t i = 0; i < a.states.size(); ++i) {
                const ExtendedState& st = a.states[i];
                traj_csv.row(state_row(a.times[i], st, to_kinetic(st, cfg.constants),
                                       H.energy(st)));
            }
        }
    }
    const ExtendedState probe = random_state(rng, cfg.dimensions);
    const double defect_qpi = symplecticity_defect(H, probe, cfg.dt, 1, Chart::QPi);
    const double defect_Qp = symplecticity_defect(H, probe, cfg.dt, 1, Chart::QP);

    result.checks.push_back(check_upper("chart disagreement", worst_gap, 1e-6,
                                        "max gap between the two integrations"));
    result.checks.push_back(check_upper("energy drift", worst_drift, 1e-5,
                                        "max relative drift over sampled times"));
    result.checks.push_back(check_upper("reversal defect", worst_reversal, 1e-10));
    result.checks.push_back(check_upper("closed-form deviation", worst_oracle, 1e-4,
                                        "Strang vs exact flow of the quadratic H"));
    result.checks.push_back(check_upper("symplecticity defect (q,pi)", defect_qpi, 1e-10));
    result.checks.push_back(check_upper("symplecticity defect (Q,p)", defect_Qp, 1e-10));
    return result;
}

// --- quantum -------------------------------------------------------------------

SuiteResult run_quantum(const ScenarioConfig& cfg, const fs::path& dir) {
    SuiteResult result;
    result.name = "quantum";
    const OperatorSet ops = build_operators(cfg.d_p, cfg.d_f, cfg.constants);

    double worst_comm = 0.0;
    for (const CommutatorCheck& check : commutator_suite(ops, cfg.d_p / 2, cfg.d_f / 2))
        worst_comm = std::max(worst_comm, check.defect);
    result.checks.push_back(check_upper("interior commutator defect", worst_comm, 1e-10,
                                        "all canonical identities, Fock support below half cutoff"));

    const JointBasis basis =
        joint_eigenbasis(ops.Q, ops.pi, cfg.d_p, cfg.d_f, 1e-10, cfg.seed);
    const int dim = ops.dim();
    const double completeness =
        (basis.vectors * basis.vectors.adjoint() - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff();
    result.checks.push_back(check_upper("joint-basis completeness", completeness, 1e-10));

    const HamiltonianSpectrum spec = diagonalize(system_hamiltonian_matrix(ops, cfg.omega0));

    // Density invariants under unitary evolution, on a rank-3 mixed state.
    std::mt19937_64 rng(cfg.seed);
    auto draw_alpha = [&](double scale) {
        return Cplx(2.0 * unit_draw(rng) - 1.0, 2.0 * unit_draw(rng) - 1.0) * scale;
    };
    std::vector<CVec> members;
    for (int i = 0; i < 3; ++i)
        members.push_back(product_state(coherent_state(cfg.d_p, draw_alpha(0.8)),
                                        coherent_state(cfg.d_f, draw_alpha(0.8))));
    const DensityOperator mixed = DensityOperator::from_ensemble({0.5, 0.3, 0.2}, members);
    const double purity0 = mixed.purity();
    double worst_invariant = 0.0;
    for (double t : {0.0, 5.0, 10.0}) {
        const DensityOperator rt = evolve_density(mixed, spec, t, cfg.constants.hbar);
        worst_invariant = std::max({worst_invariant, rt.trace_defect(), rt.hermiticity(),
                                    std::max(0.0, -rt.min_eigenvalue()),
                                    std::abs(rt.purity() - purity0)});
    }
    result.checks.push_back(check_upper("density invariants under evolution", worst_invariant,
                                        1e-10, "trace, hermiticity, positivity, purity"));

    // Scatter of the coupled ground state, reported over the eigenvalue grid.
    const DensityOperator ground = DensityOperator::pure(spec.vectors.col(0));
    const TrajectoryDensity G0 = trajectory_density(ground, basis);
    result.checks.push_back(check_upper("G normalization", std::abs(G0.G.sum() - 1.0), 1e-10));
    result.checks.push_back(check_lower("G nonnegativity", G0.G.minCoeff(), -1e-12));
    const ScatterStats ground_stats = scatter_statistics(G0);
    const double floor = 0.99 * cfg.constants.hbar / 2.0;
    result.checks.push_back(check_lower("ground-state scatter product", ground_stats.product,
                                        floor, "dQ * dpi against hbar/2 less truncation bias"));

    CsvWriter density_csv(dir / "density.csv");
    density_csv.header({"t", "Q", "pi", "G"});
    result.files.push_back("quantum/density.csv");
    for (int k = 0; k < dim; ++k)
        density_csv.row({format_double(0.0), format_double(G0.Q[k]), format_double(G0.pi[k]),
                         format_double(G0.G[k])});

    CsvWriter scatter_csv(dir / "scatter.csv");
    scatter_csv.header({"state", "t", "dQ", "dpi", "product"});
    result.files.push_back("quantum/scatter.csv");
    scatter_csv.row({"ground", format_double(0.0), format_double(ground_stats.dQ),
                     format_double(ground_stats.dpi), format_double(ground_stats.product)});

    double worst_product = ground_stats.product;
    for (int s = 0; s < 3; ++s) {
        const CVec psi0 = product_state(coherent_state(cfg.d_p, draw_alpha(0.8)),
                                        coherent_state(cfg.d_f, draw_alpha(0.8)));
        for (double t : {0.0, 2.5, 5.0, 7.5, 10.0}) {
            const CVec psit = evolve_state(psi0, spec, t, cfg.constants.hbar);
            const TrajectoryDensity Gt =
                trajectory_density(DensityOperator::pure(psit), basis, t);
            const ScatterStats stats = scatter_statistics(Gt);
            worst_product = std::min(worst_product, stats.product);
            scatter_csv.row({"evolved" + std::to_string(s), format_double(t),
                             format_double(stats.dQ), format_double(stats.dpi),
                             format_double(stats.product)});
        }
    }
    result.checks.push_back(check_lower("evolved scatter product", worst_product, floor,
                                        "minimum over coherent states and sample times"));
    return result;
}

}  // namespace

bool SuiteResult::all_passed() const {
    if (failed_to_run) return false;
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"brackets", "gauge", "dynamics", "quantum"};
    return names;
}

SuiteResult run_suite(const std::string& name, const ScenarioConfig& cfg,
                      const fs::path& out_dir) {
    const fs::path dir = out_dir / name;
    fs::create_directories(dir);
    if (name == "brackets") return run_brackets(cfg, dir);
    if (name == "gauge") return run_gauge(cfg, dir);
    if (name == "dynamics") return run_dynamics(cfg, dir);
    if (name == "quantum") return run_quantum(cfg, dir);
    throw ConfigError("run.suites", "unknown suite '" + name + "'");
}

std::vector<SuiteResult> run_selected(const ScenarioConfig& cfg, const fs::path& out_dir) {
    std::vector<std::string> selection = cfg.suites;
    if (selection.empty() ||
        std::find(selection.begin(), selection.end(), "all") != selection.end())
        selection = suite_names();
    for (const std::string& name : selection)
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
            throw ConfigError("run.suites", "unknown suite '" + name + "'");

    fs::create_directories(out_dir);
    std::vector<SuiteResult> results;
    for (const std::string& name : selection) {
        try {
            results.push_back(run_suite(name, cfg, out_dir));
        } catch (const std::exception& failure) {
            SuiteResult broken;
            broken.name = name;
            broken.failed_to_run = true;
            broken.error = failure.what();
            results.push_back(std::move(broken));
        }
    }

    nlohmann::ordered_json summary;
    summary["schema_version"] = cfg.schema_version;
    summary["seed"] = cfg.seed;
    summary["suites"] = nlohmann::ordered_json::array();
    for (const SuiteResult& suite : results) {
        nlohmann::ordered_json entry;
        entry["name"] = suite.name;
        entry["passed"] = suite.all_passed();
        entry["failed_to_run"] = suite.failed_to_run;
        if (suite.failed_to_run) entry["error"] = suite.error;
        entry["checks"] = nlohmann::ordered_json::array();
        for (const CheckResult& check : suite.checks) {
            entry["checks"].push_back({{"name", check.name},
                                       {"pass", check.pass},
                                       {"measured", check.measured},
                                       {"budget", check.budget},
                                       {"note", check.note}});
        }
        entry["files"] = suite.files;
        summary["suites"].push_back(std::move(entry));
    }
    {
        std::ofstream out(out_dir / "summary.json", std::ios::binary);
        if (!out) throw Error("cannot open summary.json for writing");
        out << summary.dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir / "digest.txt", std::ios::binary);
        if (!out) throw Error("cannot open digest.txt for writing");
        bool all_ok = true;
        for (const SuiteResult& suite : results) {
            if (suite.failed_to_run) {
                out << "[FAIL] " << suite.name << ": did not run (" << suite.error << ")\n";
                all_ok = false;
                continue;
            }
            for (const CheckResult& check : suite.checks) {
                out << (check.pass ? "[PASS] " : "[FAIL] ") << suite.name << "/" << check.name
                    << ": measured " << format_double(check.measured) << " vs budget "
                    << format_double(check.budget) << " (" << check.note << ")\n";
                all_ok = all_ok && check.pass;
            }
        }
        out << "RESULT: " << (all_ok ? "PASS" : "FAIL") << '\n';
    }
    return results;
}

int exit_status(const std::vector<SuiteResult>& results) {
    for (const SuiteResult& suite : results)
        if (!suite.all_passed()) return 1;
    return 0;
}

}  // namespace dualchart
