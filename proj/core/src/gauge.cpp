#include "dualchart/gauge.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "dualchart/errors.hpp"
#include "dualchart/report.hpp"

namespace dualchart {

namespace {

/// All index components at least `ring` away from every face.
bool in_interior(const std::vector<int>& idx, const std::vector<int>& dims, int ring) {
    for (size_t ax = 0; ax < dims.size(); ++ax) {
        if (idx[ax] < ring || idx[ax] > dims[ax] - 1 - ring) return false;
    }
    return true;
}

/// Walks every grid index in flat order, calling fn(flat, idx).
template <typename Fn>
void for_each_point(const std::vector<int>& dims, Fn&& fn) {
    const int naxes = static_cast<int>(dims.size());
    std::vector<int> idx(naxes, 0);
    long flat = 0;
    while (true) {
        fn(flat, idx);
        ++flat;
        int ax = naxes - 1;
        while (ax >= 0) {
            if (++idx[ax] < dims[ax]) break;
            idx[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
}

}  // namespace

long LatticeConnection::npoints() const {
    long n = 1;
    for (int d : dims) n *= d;
    return n;
}

long LatticeConnection::stride(int axis) const {
    long s = 1;
    for (size_t ax = axis + 1; ax < dims.size(); ++ax) s *= dims[ax];
    return s;
}

long LatticeConnection::flat_index(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != naxes())
        throw DimensionError("grid index rank does not match the lattice");
    long flat = 0;
    for (int ax = 0; ax < naxes(); ++ax) {
        if (idx[ax] < 0 || idx[ax] >= dims[ax])
            throw DimensionError("grid index out of range on axis " + std::to_string(ax));
        flat += idx[ax] * stride(ax);
    }
    return flat;
}

std::vector<double> LatticeConnection::coordinates(const std::vector<int>& idx) const {
    std::vector<double> x(naxes());
    for (int ax = 0; ax < naxes(); ++ax) x[ax] = origin[ax] + idx[ax] * spacing[ax];
    return x;
}

void LatticeConnection::validate() const {
    if (dims.empty()) throw DimensionError("lattice has no axes");
    if (spacing.size() != dims.size() || origin.size() != dims.size())
        throw DimensionError("lattice spacing/origin rank does not match dims");
    for (int d : dims)
        if (d < 1) throw DimensionError("lattice axis with fewer than one point");
    for (double a : spacing)
        if (!(a > 0.0) || !std::isfinite(a))
            throw Error("lattice spacing must be finite and positive");
    for (double o : origin)
        if (!std::isfinite(o)) throw Error("lattice origin must be finite");
    if (static_cast<long>(B.size()) != npoints() * naxes())
        throw DimensionError("connection sample count does not match the lattice");
    for (size_t i = 0; i < B.size(); ++i)
        if (!std::isfinite(B[i]))
            throw NumericalError(static_cast<int>(i % dims.size()),
                                 "non-finite connection sample");
    constants.validate();
}

LatticeConnection make_lattice(std::vector<int> dims, std::vector<double> spacing,
                               const PhysicalConstants& k) {
    LatticeConnection conn;
    conn.dims = std::move(dims);
    conn.spacing = std::move(spacing);
    conn.constants = k;
    conn.origin.resize(conn.dims.size());
    for (size_t ax = 0; ax < conn.dims.size(); ++ax)
        conn.origin[ax] = -(conn.dims[ax] / 2) * conn.spacing[ax];
    conn.B.assign(static_cast<size_t>(conn.npoints()) * conn.naxes(), 0.0);
    conn.validate();
    return conn;
}

int CurvatureTensor::pair_slot(int mu, int nu) const {
    if (!(0 <= mu && mu < nu && nu < naxes))
        throw DimensionError("curvature pair slot requires 0 <= mu < nu < naxes");
    // Pairs ordered (0,1), (0,2), ..., (0,n-1), (1,2), ...
    return mu * naxes - mu * (mu + 1) / 2 + (nu - mu - 1);
}

double CurvatureTensor::at(long point, int mu, int nu) const {
    if (mu == nu) return 0.0;
    const double sign = mu < nu ? 1.0 : -1.0;
    const int a = std::min(mu, nu);
    const int b = std::max(mu, nu);
    return sign * F[static_cast<size_t>(point) * npairs() + pair_slot(a, b)];
}

double& CurvatureTensor::slot(long point, int mu, int nu) {
    return F[static_cast<size_t>(point) * npairs() + pair_slot(mu, nu)];
}

double CurvatureTensor::max_abs() const {
    double worst = 0.0;
    for_each_point(dims, [&](long flat, const std::vector<int>& idx) {
        if (!in_interior(idx, dims, margin)) return;
        for (int s = 0; s < npairs(); ++s)
            worst = std::max(worst, std::abs(F[static_cast<size_t>(flat) * npairs() + s]));
    });
    return worst;
}

MaskedField covariant_derivative(const LatticeConnection& conn, const MaskedField& f, int mu) {
    if (mu < 0 || mu >= conn.naxes())
        throw DimensionError("derivative axis out of range");
    if (static_cast<long>(f.values.size()) != conn.npoints())
        throw DimensionError("test field size does not match the lattice");
    const long step = conn.stride(mu);
    const double inv2a = 1.0 / (2.0 * conn.spacing[mu]);
    const Cplx coupling(0.0, conn.constants.gauge_coupling());

    MaskedField out;
    out.margin = f.margin + 1;
    out.values.assign(f.values.size(), Cplx(0.0, 0.0));
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        if (idx[mu] < 1 || idx[mu] > conn.dims[mu] - 2) return;
        const Cplx grad = (f.values[flat + step] - f.values[flat - step]) * inv2a;
        out.values[flat] = grad - coupling * conn.Bcomp(flat, mu) * f.values[flat];
    });
    return out;
}

CurvatureTensor curvature_from_commutator(const LatticeConnection& conn, const MaskedField& f) {
    conn.validate();
    const int naxes = conn.naxes();
    CurvatureTensor curv;
    curv.dims = conn.dims;
    curv.naxes = naxes;
    curv.margin = f.margin + 2;
    curv.F.assign(static_cast<size_t>(conn.npoints()) * curv.npairs(), 0.0);

    // F is read off pointwise from [D^mu, D^nu] f = -(i/2m*chi) F^{mu nu} f,
    // i.e. F = Re(i * commutator / (gauge_coupling * f)); the imaginary part
    // of the ratio is pure discretization noise.
    const double inv_coupling = 1.0 / conn.constants.gauge_coupling();
    for (int mu = 0; mu < naxes; ++mu) {
        const MaskedField Dmu = covariant_derivative(conn, f, mu);
        for (int nu = mu + 1; nu < naxes; ++nu) {
            const MaskedField Dnu = covariant_derivative(conn, f, nu);
            const MaskedField DmuDnu = covariant_derivative(conn, Dnu, mu);
            const MaskedField DnuDmu = covariant_derivative(conn, Dmu, nu);
            for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
                if (!in_interior(idx, conn.dims, curv.margin)) return;
                if (std::abs(f.values[flat]) < 1e-12)
                    throw DegenerateTestFieldError(
                        "test field vanishes at an interior point; curvature "
                        "read-off is ill-conditioned there");
                const Cplx comm = DmuDnu.values[flat] - DnuDmu.values[flat];
                curv.slot(flat, mu, nu) =
                    (Cplx(0.0, inv_coupling) * comm / f.values[flat]).real();
            });
        }
    }
    return curv;
}

Cplx plaquette_holonomy(const LatticeConnection& conn, const std::vector<int>& x, int mu, int nu) {
    if (mu == nu || mu < 0 || nu < 0 || mu >= conn.naxes() || nu >= conn.naxes())
        throw DimensionError("plaquette plane requires two distinct axes");
    std::vector<int> idx = x;
    if (idx[mu] + 1 >= conn.dims[mu] || idx[nu] + 1 >= conn.dims[nu])
        throw DimensionError("plaquette leaves the grid");

    // Each link contributes exp(-(i/2m*chi) a_mu B^mu) sampled at the link's
    // start point; traversal is x -> x+mu -> x+mu+nu -> x+nu -> x.
    const double c = conn.constants.gauge_coupling();
    auto link = [&](const std::vector<int>& at, int axis, double direction) {
        const long flat = conn.flat_index(at);
        const double phase = -c * conn.spacing[axis] * conn.Bcomp(flat, axis) * direction;
        return std::polar(1.0, phase);
    };

    // U_mu(x) U_nu(x+mu) U_mu(x+nu)^{-1} U_nu(x)^{-1}: reverse legs are the
    // conjugates of the forward links based at x+nu and x.
    Cplx holonomy = link(idx, mu, +1.0);
    ++idx[mu];
    holonomy *= link(idx, nu, +1.0);
    --idx[mu];
    ++idx[nu];
    holonomy *= link(idx, mu, -1.0);
    --idx[nu];
    holonomy *= link(idx, nu, -1.0);
    return holonomy;
}

void fill_symmetric_gauge(LatticeConnection& conn, double b) {
    if (conn.naxes() < 2)
        throw DimensionError("symmetric gauge needs at least two axes");
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        const std::vector<double> x = conn.coordinates(idx);
        conn.Bcomp(flat, 0) = -0.5 * b * x[1];
        conn.Bcomp(flat, 1) = 0.5 * b * x[0];
        for (int ax = 2; ax < conn.naxes(); ++ax) conn.Bcomp(flat, ax) = 0.0;
    });
}

void fill_pure_gauge_constant(LatticeConnection& conn, const std::vector<double>& gradient) {
    if (static_cast<int>(gradient.size()) != conn.naxes())
        throw DimensionError("gradient rank does not match the lattice");
    for_each_point(conn.dims, [&](long flat, const std::vector<int>&) {
        for (int ax = 0; ax < conn.naxes(); ++ax) conn.Bcomp(flat, ax) = gradient[ax];
    });
}

void fill_pure_gauge_bilinear(LatticeConnection& conn) {
    if (conn.naxes() < 2)
        throw DimensionError("bilinear pure gauge needs at least two axes");
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        const std::vector<double> x = conn.coordinates(idx);
        conn.Bcomp(flat, 0) = x[1];
        conn.Bcomp(flat, 1) = x[0];
        for (int ax = 2; ax < conn.naxes(); ++ax) conn.Bcomp(flat, ax) = 0.0;
    });
}

void fill_crossed_sine(LatticeConnection& conn, double amp1, double k1, double amp2, double k2) {
    if (conn.naxes() != 2)
        throw DimensionError("crossed sine profile is two-dimensional");
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        const std::vector<double> x = conn.coordinates(idx);
        conn.Bcomp(flat, 0) = amp1 * std::sin(k1 * x[1]);
        conn.Bcomp(flat, 1) = amp2 * std::sin(k2 * x[0]);
    });
}

MaskedField plane_wave_field(const LatticeConnection& conn, const std::vector<double>& kvec) {
    if (static_cast<int>(kvec.size()) != conn.naxes())
        throw DimensionError("wavevector rank does not match the lattice");
    MaskedField f;
    f.margin = 0;
    f.values.resize(conn.npoints());
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        const std::vector<double> x = conn.coordinates(idx);
        double kx = 0.0;
        for (int ax = 0; ax < conn.naxes(); ++ax) kx += kvec[ax] * x[ax];
        f.values[flat] = std::polar(1.0, kx);
    });
    return f;
}

MaskedField default_test_field(const LatticeConnection& conn) {
    std::vector<double> kvec(conn.naxes());
    for (int ax = 0; ax < conn.naxes(); ++ax) kvec[ax] = 0.3 / (10.0 * conn.spacing[ax]);
    return plane_wave_field(conn, kvec);
}

// --- Serialization ----------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'D', 'C', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw Error("truncated connection file");
    return value;
}

}  // namespace

void save_connection(const std::filesystem::path& file, const LatticeConnection& conn) {
    conn.validate();
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error("cannot open '" + file.string() + "' for writing");
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint32_t>(conn.naxes()));
    for (int d : conn.dims) write_pod(out, static_cast<std::int64_t>(d));
    for (double a : conn.spacing) write_pod(out, a);
    for (double o : conn.origin) write_pod(out, o);
    write_pod(out, static_cast<std::uint64_t>(conn.B.size()));
    out.write(reinterpret_cast<const char*>(conn.B.data()),
              static_cast<std::streamsize>(conn.B.size() * sizeof(double)));
    if (!out) throw Error("failed writing '" + file.string() + "'");
}

LatticeConnection load_connection(const std::filesystem::path& file, const PhysicalConstants& k) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open '" + file.string() + "' for reading");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kMagic, 4))
        throw Error("'" + file.string() + "' is not a connection file");
    if (read_pod<std::uint32_t>(in) != kVersion)
        throw Error("unsupported connection file version");
    const auto naxes = read_pod<std::uint32_t>(in);
    if (naxes == 0 || naxes > 16) throw Error("implausible axis count in connection file");

    LatticeConnection conn;
    conn.constants = k;
    conn.dims.resize(naxes);
    for (auto& d : conn.dims) d = static_cast<int>(read_pod<std::int64_t>(in));
    conn.spacing.resize(naxes);
    for (auto& a : conn.spacing) a = read_pod<double>(in);
    conn.origin.resize(naxes);
    for (auto& o : conn.origin) o = read_pod<double>(in);
    const auto count = read_pod<std::uint64_t>(in);
    conn.B.resize(count);
    in.read(reinterpret_cast<char*>(conn.B.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw Error("truncated connection file");
    conn.validate();
    return conn;
}

void save_connection_csv(const std::filesystem::path& file, const LatticeConnection& conn) {
    conn.validate();
    std::ofstream out(file);
    if (!out) throw Error("cannot open '" + file.string() + "' for writing");
    out << "# dcgf-csv 1\n# dims:";
    for (int d : conn.dims) out << ' ' << d;
    out << "\n# spacing:";
    for (double a : conn.spacing) out << ' ' << format_double(a);
    out << "\n# origin:";
    for (double o : conn.origin) out << ' ' << format_double(o);
    out << '\n';
    for (int ax = 0; ax < conn.naxes(); ++ax) out << "i" << (ax + 1) << ',';
    for (int ax = 0; ax < conn.naxes(); ++ax)
        out << "B" << (ax + 1) << (ax + 1 < conn.naxes() ? ',' : '\n');
    for_each_point(conn.dims, [&](long flat, const std::vector<int>& idx) {
        for (int ax = 0; ax < conn.naxes(); ++ax) out << idx[ax] << ',';
        for (int ax = 0; ax < conn.naxes(); ++ax)
            out << format_double(conn.Bcomp(flat, ax)) << (ax + 1 < conn.naxes() ? ',' : '\n');
    });
    if (!out) throw Error("failed writing '" + file.string() + "'");
}

LatticeConnection load_connection_csv(const std::filesystem::path& file,
                                      const PhysicalConstants& k) {
    std::ifstream in(file);
    if (!in) throw Error("cannot open '" + file.string() + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line.rfind("# dcgf-csv", 0) != 0)
        throw Error("'" + file.string() + "' is not a connection CSV");

    LatticeConnection conn;
    conn.constants = k;
    auto parse_header = [&](const std::string& tag, auto push) {
        if (!std::getline(in, line) || line.rfind("# " + tag + ":", 0) != 0)
            throw Error("connection CSV missing '" + tag + "' header");
        std::istringstream fields(line.substr(tag.size() + 3));
        std::string token;
        while (fields >> token) push(token);
    };
    parse_header("dims", [&](const std::string& t) { conn.dims.push_back(std::stoi(t)); });
    parse_header("spacing", [&](const std::string& t) { conn.spacing.push_back(std::stod(t)); });
    parse_header("origin", [&](const std::string& t) { conn.origin.push_back(std::stod(t)); });
    if (!std::getline(in, line)) throw Error("connection CSV missing column header");

    conn.B.assign(static_cast<size_t>(conn.npoints()) * conn.naxes(), 0.0);
    const int naxes = conn.naxes();
    long rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        std::vector<int> idx(naxes);
        for (int ax = 0; ax < naxes; ++ax) {
            if (!std::getline(fields, cell, ',')) throw Error("short row in connection CSV");
            idx[ax] = std::stoi(cell);
        }
        const long flat = conn.flat_index(idx);
        for (int ax = 0; ax < naxes; ++ax) {
            if (!std::getline(fields, cell, ',')) throw Error("short row in connection CSV");
            conn.Bcomp(flat, ax) = std::stod(cell);
        }
        ++rows;
    }
    if (rows != conn.npoints()) throw Error("connection CSV row count does not match dims");
    conn.validate();
    return conn;
}

}  // namespace dualchart
