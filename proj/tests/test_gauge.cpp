#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "dualchart/errors.hpp"
#include "dualchart/gauge.hpp"

using namespace dualchart;
namespace fs = std::filesystem;

namespace {

PhysicalConstants test_constants() {
    PhysicalConstants k;
    k.m = 1.3;
    k.c = 2.0;
    k.chi = 0.7;
    k.hbar = 0.7;
    return k;
}

double uniform_field_error(int n, double a) {
    LatticeConnection conn = make_lattice({n, n}, {a, a}, test_constants());
    fill_symmetric_gauge(conn, 1.0);
    const CurvatureTensor curv = curvature_from_commutator(conn, plane_wave_field(conn, {0.6, 0.6}));
    double worst = 0.0;
    for (int i = curv.margin; i < n - curv.margin; ++i)
        for (int j = curv.margin; j < n - curv.margin; ++j)
            worst = std::max(worst, std::abs(curv.at(conn.flat_index({i, j}), 0, 1) - 1.0));
    return worst;
}

}  // namespace

TEST_CASE("lattice geometry: strides, indices, centered origin") {
    LatticeConnection conn = make_lattice({4, 6, 5}, {0.1, 0.2, 0.3}, test_constants());
    CHECK(conn.naxes() == 3);
    CHECK(conn.npoints() == 120);
    CHECK(conn.stride(2) == 1);
    CHECK(conn.stride(1) == 5);
    CHECK(conn.stride(0) == 30);
    CHECK(conn.flat_index({1, 2, 3}) == 30 + 10 + 3);
    CHECK(conn.origin[0] == doctest::Approx(-0.2));  // -(4/2)*0.1
    const auto x = conn.coordinates({2, 3, 0});
    CHECK(x[0] == doctest::Approx(0.0));
    CHECK(x[1] == doctest::Approx(0.0));
    CHECK(x[2] == doctest::Approx(-0.6));
    CHECK_THROWS_AS(conn.flat_index({4, 0, 0}), DimensionError);
    CHECK_THROWS_AS(conn.flat_index({0, 0}), DimensionError);
}

TEST_CASE("lattice validation") {
    LatticeConnection conn = make_lattice({8, 8}, {0.1, 0.1}, test_constants());
    SUBCASE("wrong sample count") {
        conn.B.pop_back();
        CHECK_THROWS_AS(conn.validate(), DimensionError);
    }
    SUBCASE("non-finite sample") {
        conn.Bcomp(3, 1) = std::nan("");
        CHECK_THROWS_AS(conn.validate(), NumericalError);
    }
    SUBCASE("non-positive spacing") {
        conn.spacing[0] = 0.0;
        CHECK_THROWS_AS(conn.validate(), Error);
    }
}

TEST_CASE("covariant derivative reduces to the plain derivative at B = 0") {
    LatticeConnection conn = make_lattice({32, 32}, {0.05, 0.05}, test_constants());
    const MaskedField f = plane_wave_field(conn, {0.6, 0.0});
    const MaskedField df = covariant_derivative(conn, f, 0);
    CHECK(df.margin == 1);
    // d/dx exp(i k x) = i k exp(i k x), central difference: i sin(ka)/a factor.
    const double eff = std::sin(0.6 * 0.05) / 0.05;
    const long probe = conn.flat_index({16, 16});
    const Cplx expected = Cplx(0.0, eff) * f.values[probe];
    CHECK(std::abs(df.values[probe] - expected) < 1e-12);
}

TEST_CASE("uniform field in symmetric gauge: curvature error and order") {
    const double e1 = uniform_field_error(64, 0.05);
    const double e2 = uniform_field_error(128, 0.025);
    CHECK(e1 < 5e-3);  // measured ~4.5e-4, budget from the stated criterion
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.9);
}

TEST_CASE("pure gauges are flat while the connection stays loud") {
    LatticeConnection conn = make_lattice({64, 64}, {0.05, 0.05}, test_constants());
    const MaskedField probe = plane_wave_field(conn, {0.6, 0.6});

    SUBCASE("constant gradient") {
        fill_pure_gauge_constant(conn, {0.3, 0.4});
        const CurvatureTensor curv = curvature_from_commutator(conn, probe);
        CHECK(curv.max_abs() < 1e-8);
        double max_B = 0.0;
        for (double b : conn.B) max_B = std::max(max_B, std::abs(b));
        CHECK(max_B > 0.1);
    }
    SUBCASE("bilinear lambda = x1 x2") {
        fill_pure_gauge_bilinear(conn);
        const CurvatureTensor curv = curvature_from_commutator(conn, probe);
        CHECK(curv.max_abs() < 1e-8);
    }
}

TEST_CASE("degenerate test field is refused, not divided by") {
    LatticeConnection conn = make_lattice({16, 16}, {0.1, 0.1}, test_constants());
    fill_symmetric_gauge(conn, 1.0);
    MaskedField f = plane_wave_field(conn, {0.6, 0.6});
    f.values[conn.flat_index({8, 8})] = Cplx(0.0, 0.0);
    CHECK_THROWS_AS(curvature_from_commutator(conn, f), DegenerateTestFieldError);
}

TEST_CASE("curvature tensor pair bookkeeping") {
    CurvatureTensor curv;
    curv.dims = {4, 4, 4};
    curv.naxes = 3;
    curv.margin = 0;
    curv.F.assign(64 * 3, 0.0);
    CHECK(curv.npairs() == 3);
    CHECK(curv.pair_slot(0, 1) == 0);
    CHECK(curv.pair_slot(0, 2) == 1);
    CHECK(curv.pair_slot(1, 2) == 2);
    curv.slot(5, 0, 2) = 1.5;
    CHECK(curv.at(5, 0, 2) == 1.5);
    CHECK(curv.at(5, 2, 0) == -1.5);  // antisymmetric access
    CHECK(curv.at(5, 1, 1) == 0.0);
}

TEST_CASE("plaquette holonomy is exact for the uniform field") {
    const PhysicalConstants k = test_constants();
    LatticeConnection conn = make_lattice({32, 32}, {0.05, 0.05}, k);
    fill_symmetric_gauge(conn, 1.0);
    // For linear B the start-point link sum telescopes to exactly -coup*b*a^2.
    const double expected = -k.gauge_coupling() * 1.0 * 0.05 * 0.05;
    for (int i : {2, 15, 29}) {
        for (int j : {3, 16, 28}) {
            const double arg = std::arg(plaquette_holonomy(conn, {i, j}, 0, 1));
            CHECK(arg == doctest::Approx(expected).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(plaquette_holonomy(conn, {31, 5}, 0, 1), DimensionError);
    CHECK_THROWS_AS(plaquette_holonomy(conn, {5, 5}, 1, 1), DimensionError);
}

TEST_CASE("oscillatory holonomy meets the phase budget and improves") {
    const PhysicalConstants k = test_constants();
    auto worst_rel = [&](int n, double a) {
        LatticeConnection conn = make_lattice({n, n}, {a, a}, k);
        const double amp1 = 0.5, k1 = 0.3, amp2 = 0.8, k2 = 0.4;
        fill_crossed_sine(conn, amp1, k1, amp2, k2);
        double worst = 0.0;
        for (int i = 2; i < n - 2; ++i) {
            for (int j = 2; j < n - 2; ++j) {
                const auto x = conn.coordinates({i, j});
                const double F =
                    amp2 * k2 * std::cos(k2 * x[0]) - amp1 * k1 * std::cos(k1 * x[1]);
                const double predicted = -k.gauge_coupling() * F * a * a;
                const double arg = std::arg(plaquette_holonomy(conn, {i, j}, 0, 1));
                worst = std::max(worst, std::abs(arg - predicted) / std::abs(predicted));
            }
        }
        return worst;
    };
    const double r1 = worst_rel(64, 0.05);
    const double r2 = worst_rel(128, 0.025);
    CHECK(r1 < 5e-2);  // measured ~1.8e-2
    CHECK(r2 < r1);
}

TEST_CASE("default test field is bounded away from zero") {
    LatticeConnection conn = make_lattice({32, 32}, {0.05, 0.05}, test_constants());
    const MaskedField f = default_test_field(conn);
    double min_abs = 1e30;
    for (const Cplx& v : f.values) min_abs = std::min(min_abs, std::abs(v));
    CHECK(min_abs > 0.99);  // unit-modulus plane wave
}

TEST_CASE("binary connection file round-trips exactly") {
    const fs::path file = fs::temp_directory_path() / "dualchart_test_conn.bin";
    LatticeConnection conn = make_lattice({12, 9}, {0.05, 0.1}, test_constants());
    fill_crossed_sine(conn, 0.5, 0.3, 0.8, 0.4);
    save_connection(file, conn);

    const LatticeConnection back = load_connection(file, test_constants());
    CHECK(back.dims == conn.dims);
    CHECK(back.spacing == conn.spacing);
    CHECK(back.origin == conn.origin);
    REQUIRE(back.B.size() == conn.B.size());
    for (size_t i = 0; i < conn.B.size(); ++i) CHECK(back.B[i] == conn.B[i]);
    fs::remove(file);
}

TEST_CASE("binary loader rejects foreign files") {
    const fs::path file = fs::temp_directory_path() / "dualchart_test_not_conn.bin";
    {
        std::ofstream out(file, std::ios::binary);
        out << "not a connection";
    }
    CHECK_THROWS_AS(load_connection(file, test_constants()), Error);
    fs::remove(file);
    CHECK_THROWS_AS(load_connection(file, test_constants()), Error);  // missing file
}

TEST_CASE("csv connection file round-trips exactly") {
    const fs::path file = fs::temp_directory_path() / "dualchart_test_conn.csv";
    LatticeConnection conn = make_lattice({7, 5}, {0.05, 0.1}, test_constants());
    fill_symmetric_gauge(conn, 0.37);
    save_connection_csv(file, conn);

    const LatticeConnection back = load_connection_csv(file, test_constants());
    CHECK(back.dims == conn.dims);
    REQUIRE(back.B.size() == conn.B.size());
    // Shortest round-trip formatting makes the text loop lossless.
    for (size_t i = 0; i < conn.B.size(); ++i) CHECK(back.B[i] == conn.B[i]);
    fs::remove(file);
}

TEST_CASE("saving the same connection twice is byte-identical") {
    const fs::path f1 = fs::temp_directory_path() / "dualchart_det_1.bin";
    const fs::path f2 = fs::temp_directory_path() / "dualchart_det_2.bin";
    LatticeConnection conn = make_lattice({16, 16}, {0.05, 0.05}, test_constants());
    fill_crossed_sine(conn, 0.5, 0.3, 0.8, 0.4);
    save_connection(f1, conn);
    save_connection(f2, conn);
    std::ifstream a(f1, std::ios::binary), b(f2, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
    fs::remove(f1);
    fs::remove(f2);
}
