#include "pphi2/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "pphi2/fft.hpp"

namespace pphi2 {

void LatticeSpec::validate() const {
    if (!(beta > 0)) throw std::invalid_argument("lattice: beta must be > 0");
    if (!(length > 0)) throw std::invalid_argument("lattice: length must be > 0");
    if (!(mass > 0)) throw std::invalid_argument("lattice: mass must be > 0");
    if (nt < 4 || nt % 2 != 0) throw std::invalid_argument("lattice: nt must be even and >= 4");
    if (nx < 4 || nx % 2 != 0) throw std::invalid_argument("lattice: nx must be even and >= 4");
}

std::string LatticeSpec::to_json() const {
    nlohmann::json j{{"beta", beta}, {"length", length}, {"nt", nt}, {"nx", nx}, {"mass", mass}};
    return j.dump();
}

LatticeSpec LatticeSpec::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LatticeSpec s;
    s.beta = j.at("beta").get<double>();
    s.length = j.at("length").get<double>();
    s.nt = j.at("nt").get<int>();
    s.nx = j.at("nx").get<int>();
    s.mass = j.at("mass").get<double>();
    s.validate();
    return s;
}

double pair_field(const Field& q, const TestFunction& f) {
    if (!(q.spec == f.spec)) throw std::invalid_argument("pair_field: spec mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < q.v.size(); ++i) acc += q.v[i] * f.v[i];
    return acc * q.spec.site_weight();
}

namespace {

Spectrum to_spectrum(const Field& u) {
    Spectrum s(u.spec);
    for (size_t i = 0; i < u.v.size(); ++i) s.v[i] = u.v[i];
    return s;
}

// Alternating sign (-1)^k absorbs the site offset t_0 = -beta/2 (x_0 = -L),
// so the DFT index phase matches e^{-i nu_m t} at the true coordinates.
void alternate_rows(Spectrum& s) {
    for (int i = 0; i < s.spec.nt; ++i)
        if (i % 2) {
            for (int j = 0; j < s.spec.nx; ++j) s.at(i, j) = -s.at(i, j);
        }
}

void alternate_cols(Spectrum& s) {
    for (int i = 0; i < s.spec.nt; ++i)
        for (int j = 1; j < s.spec.nx; j += 2) s.at(i, j) = -s.at(i, j);
}

}  // namespace

Spectrum fourier_t(const Spectrum& u) {
    Spectrum s = u;
    fft::transform_cols(s.v.data(), s.spec.nt, s.spec.nx, -1);
    alternate_rows(s);
    double norm = s.spec.at() / std::sqrt(s.spec.beta);
    for (auto& z : s.v) z *= norm;
    return s;
}

Spectrum fourier_t(const Field& u) { return fourier_t(to_spectrum(u)); }

Spectrum inverse_fourier_t(const Spectrum& u) {
    Spectrum s = u;
    alternate_rows(s);
    fft::transform_cols(s.v.data(), s.spec.nt, s.spec.nx, +1);
    double norm = 1.0 / std::sqrt(s.spec.beta);
    for (auto& z : s.v) z *= norm;
    return s;
}

Spectrum fourier_x(const Spectrum& u) {
    Spectrum s = u;
    fft::transform_rows(s.v.data(), s.spec.nt, s.spec.nx, -1);
    alternate_cols(s);
    double norm = s.spec.ax() / std::sqrt(2.0 * M_PI);
    for (auto& z : s.v) z *= norm;
    return s;
}

Spectrum fourier_x(const Field& u) { return fourier_x(to_spectrum(u)); }

Spectrum inverse_fourier_x(const Spectrum& u) {
    Spectrum s = u;
    alternate_cols(s);
    fft::transform_rows(s.v.data(), s.spec.nt, s.spec.nx, +1);
    double norm = s.spec.dp() / std::sqrt(2.0 * M_PI);
    for (auto& z : s.v) z *= norm;
    return s;
}

Spectrum fourier_tx(const Field& u) { return fourier_x(fourier_t(to_spectrum(u))); }

Spectrum inverse_fourier_tx(const Spectrum& u) { return inverse_fourier_x(inverse_fourier_t(u)); }

Field real_part(const Spectrum& u) {
    Field f(u.spec);
    for (size_t i = 0; i < u.v.size(); ++i) f.v[i] = u.v[i].real();
    return f;
}

std::vector<cdouble> fourier_profile(const LatticeSpec& spec, Axis axis,
                                     const std::vector<double>& g) {
    int n = axis == Axis::Time ? spec.nt : spec.nx;
    if (static_cast<int>(g.size()) != n) throw std::invalid_argument("fourier_profile: size mismatch");
    std::vector<cdouble> z(g.begin(), g.end());
    fft::transform(z.data(), n, -1);
    double norm = axis == Axis::Time ? spec.at() / std::sqrt(spec.beta)
                                     : spec.ax() / std::sqrt(2.0 * M_PI);
    for (int k = 0; k < n; ++k) {
        z[k] *= norm;
        if (k % 2) z[k] = -z[k];
    }
    return z;
}

double sobolev_norm(const LatticeSpec& spec, Axis axis, const std::vector<double>& g,
                    double order) {
    if (order != -1.0 && order != -0.5 && order != 0.5)
        throw std::invalid_argument("sobolev_norm: unsupported order");
    auto z = fourier_profile(spec, axis, g);
    double m2 = spec.mass * spec.mass;
    double acc = 0.0;
    int n = axis == Axis::Time ? spec.nt : spec.nx;
    for (int k = 0; k < n; ++k) {
        double w = axis == Axis::Time ? spec.nu(k) : spec.p(k);
        acc += std::norm(z[k]) * std::pow(w * w + m2, order);
    }
    if (axis == Axis::Space) acc *= spec.dp();
    return std::sqrt(acc);
}

double bspline3(double u) {
    double a = std::abs(u);
    if (a >= 2.0) return 0.0;
    double c = std::pow(2.0 - a, 3);
    if (a < 1.0) c -= 4.0 * std::pow(1.0 - a, 3);
    return c / 6.0;
}

Mollifier make_mollifier(const LatticeSpec& spec, Axis kind, int k, int center) {
    Mollifier m{kind, k, center, {}};
    if (kind == Axis::Time) {
        if (k < 0 || k > spec.nt / 2) throw std::invalid_argument("mollifier: k out of range");
        m.profile.resize(spec.nt);
        for (int i = 0; i < spec.nt; ++i) {
            double s = spec.t(i) - spec.t(center);
            double acc = 1.0;  // n = 0
            int ktop = std::min(k, spec.nt / 2 - 1);
            for (int n = 1; n <= ktop; ++n) acc += 2.0 * std::cos(2.0 * M_PI * n * s / spec.beta);
            if (k == spec.nt / 2) acc += std::cos(2.0 * M_PI * (spec.nt / 2) * s / spec.beta);
            m.profile[i] = acc / spec.beta;
        }
    } else {
        if (k < 1) throw std::invalid_argument("mollifier: k must be >= 1");
        if (2.0 / k >= spec.length) throw std::invalid_argument("mollifier: support does not fit in box");
        m.profile.resize(spec.nx);
        double sum = 0.0;
        for (int j = 0; j < spec.nx; ++j) {
            double u = k * (spec.x(j) - spec.x(center));
            // fold into the periodic box
            double span = 2.0 * spec.length * k;
            u = std::remainder(u, span);
            m.profile[j] = k * bspline3(u);
            sum += m.profile[j];
        }
        double norm = 1.0 / (sum * spec.ax());
        for (auto& v : m.profile) v *= norm;
    }
    return m;
}

TestFunction tensor(const LatticeSpec& spec, const std::vector<double>& g,
                    const std::vector<double>& h) {
    if (static_cast<int>(g.size()) != spec.nt || static_cast<int>(h.size()) != spec.nx)
        throw std::invalid_argument("tensor: size mismatch");
    TestFunction f(spec);
    for (int i = 0; i < spec.nt; ++i)
        for (int j = 0; j < spec.nx; ++j) f.at(i, j) = g[i] * h[j];
    return f;
}

KgState kg_evolve(const LatticeSpec& spec, const KgState& s0, double t) {
    int n = spec.nx;
    if (static_cast<int>(s0.phi.size()) != n || static_cast<int>(s0.pi.size()) != n)
        throw std::invalid_argument("kg_evolve: size mismatch");
    std::vector<cdouble> ph(s0.phi.begin(), s0.phi.end());
    std::vector<cdouble> pj(s0.pi.begin(), s0.pi.end());
    fft::transform(ph.data(), n, -1);
    fft::transform(pj.data(), n, -1);
    for (int k = 0; k < n; ++k) {
        double eps = std::hypot(spec.p(k), spec.mass);
        double c = std::cos(eps * t), s = std::sin(eps * t);
        cdouble f = ph[k], g = pj[k];
        ph[k] = c * f - eps * s * g;
        pj[k] = c * g + s / eps * f;
    }
    fft::transform(ph.data(), n, +1);
    fft::transform(pj.data(), n, +1);
    KgState out;
    out.phi.resize(n);
    out.pi.resize(n);
    for (int j = 0; j < n; ++j) {
        out.phi[j] = ph[j].real() / n;
        out.pi[j] = pj[j].real() / n;
    }
    return out;
}

double kg_symplectic(const LatticeSpec& spec, const KgState& a, const KgState& b) {
    double acc = 0.0;
    for (int j = 0; j < spec.nx; ++j) acc += a.phi[j] * b.pi[j] - a.pi[j] * b.phi[j];
    return acc * spec.ax();
}

std::vector<double> kg_energy_density(const LatticeSpec& spec, const KgState& s) {
    int n = spec.nx;
    std::vector<cdouble> ph(s.phi.begin(), s.phi.end());
    std::vector<cdouble> pj(s.pi.begin(), s.pi.end());
    fft::transform(ph.data(), n, -1);
    fft::transform(pj.data(), n, -1);
    std::vector<cdouble> dtphi(n), dxphi(n);
    for (int k = 0; k < n; ++k) {
        double p = spec.p(k);
        double eps2 = p * p + spec.mass * spec.mass;
        dtphi[k] = -eps2 * pj[k];  // d/dt phi = -eps^2 pi
        dxphi[k] = cdouble(0, p) * ph[k];
    }
    fft::transform(dtphi.data(), n, +1);
    fft::transform(dxphi.data(), n, +1);
    std::vector<double> e(n);
    for (int j = 0; j < n; ++j) {
        double dt = dtphi[j].real() / n, dx = dxphi[j].real() / n;
        e[j] = 0.5 * (dt * dt + dx * dx + spec.mass * spec.mass * s.phi[j] * s.phi[j]);
    }
    return e;
}

namespace {
constexpr char kMagic[8] = {'P', 'P', 'H', 'I', '2', 'F', 'L', 'D'};

void put_u64(char* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_u64(const char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    return v;
}
}  // namespace

void dump_fields(std::ostream& os, const LatticeSpec& spec, const std::vector<Field>& fields) {
    std::string j = spec.to_json();
    char header[32] = {};
    std::memcpy(header, kMagic, 8);
    put_u64(header + 8, j.size());
    put_u64(header + 16, fields.size());
    os.write(header, 32);
    os.write(j.data(), static_cast<std::streamsize>(j.size()));
    for (const auto& f : fields) {
        if (!(f.spec == spec)) throw std::invalid_argument("dump_fields: spec mismatch");
        os.write(reinterpret_cast<const char*>(f.v.data()),
                 static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    }
}

std::vector<Field> load_fields(std::istream& is) {
    char header[32];
    is.read(header, 32);
    if (!is || std::memcmp(header, kMagic, 8) != 0)
        throw std::runtime_error("load_fields: bad magic");
    std::uint64_t jlen = get_u64(header + 8);
    std::uint64_t count = get_u64(header + 16);
    std::string j(jlen, '\0');
    is.read(j.data(), static_cast<std::streamsize>(jlen));
    LatticeSpec spec = LatticeSpec::from_json(j);
    std::vector<Field> fields;
    fields.reserve(count);
    for (std::uint64_t c = 0; c < count; ++c) {
        Field f(spec);
        is.read(reinterpret_cast<char*>(f.v.data()),
                static_cast<std::streamsize>(f.v.size() * sizeof(double)));
        if (!is) throw std::runtime_error("load_fields: truncated data");
        fields.push_back(std::move(f));
    }
    return fields;
}

}  // namespace pphi2
