#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace pphi2 {

using cdouble = std::complex<double>;

/// Discretization of the euclidean cylinder S_beta x [-L, L].
///
/// Sites: t_i = -beta/2 + i*at (i = 0..nt-1), x_j = -L + j*ax (j = 0..nx-1),
/// both directions periodic.  DFT index k maps to the integer mode
/// m = k for k < n/2, m = k - n for k >= n/2, so the time modes are the
/// Matsubara indices m in {-nt/2, ..., nt/2-1} with nu_m = 2 pi m / beta and
/// the spatial momenta are p_m = pi m / L.
///
/// Fourier conventions (lattice weights included):
///   time:   u_hat(m, x) = beta^{-1/2} * at * sum_i e^{-i nu_m t_i} u(t_i, x)
///           u(t, x)     = beta^{-1/2} * sum_m e^{+i nu_m t} u_hat(m, x)
///   space:  u_hat(t, m) = (2 pi)^{-1/2} * ax * sum_j e^{-i p_m x_j} u(t, x_j)
///           u(t, x)     = (2 pi)^{-1/2} * sum_m e^{+i p_m x} u_hat(t, m) * dp
/// with dp = pi / L.  Both are unitary: sum_i |u|^2 at = sum_m |u_hat|^2 and
/// sum_j |u|^2 ax = sum_m |u_hat|^2 dp.
struct LatticeSpec {
    double beta = 1.0;
    double length = 1.0;  // half extent L
    int nt = 4;
    int nx = 4;
    double mass = 1.0;

    double at() const { return beta / nt; }
    double ax() const { return 2.0 * length / nx; }
    double dp() const { return M_PI / length; }
    double site_weight() const { return at() * ax(); }

    int mode(int k, int n) const { return k < n / 2 ? k : k - n; }
    int tmode(int k) const { return mode(k, nt); }
    int xmode(int k) const { return mode(k, nx); }
    double nu(int k) const { return 2.0 * M_PI * tmode(k) / beta; }
    double p(int k) const { return M_PI * xmode(k) / length; }
    double t(int i) const { return -beta / 2 + i * at(); }
    double x(int j) const { return -length + j * ax(); }

    /// Site index of the time-reflection t -> -t (and analogously in x).
    int reflect_t(int i) const { return (nt - i) % nt; }
    int reflect_x(int j) const { return (nx - j) % nx; }

    bool operator==(const LatticeSpec&) const = default;

    void validate() const;
    std::string to_json() const;
    static LatticeSpec from_json(const std::string& text);
};

/// Real function on the lattice, row-major (t outer, x inner).
struct Field {
    LatticeSpec spec;
    std::vector<double> v;

    Field() = default;
    explicit Field(const LatticeSpec& s) : spec(s), v(static_cast<size_t>(s.nt) * s.nx, 0.0) {}

    double& at(int i, int j) { return v[static_cast<size_t>(i) * spec.nx + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * spec.nx + j]; }
};

/// Discretized test function f in S(S_beta x R); same storage as Field.
using TestFunction = Field;

/// Complex array over (mode or site) pairs, same layout as Field.
struct Spectrum {
    LatticeSpec spec;
    std::vector<cdouble> v;

    Spectrum() = default;
    explicit Spectrum(const LatticeSpec& s) : spec(s), v(static_cast<size_t>(s.nt) * s.nx, cdouble(0)) {}

    cdouble& at(int i, int j) { return v[static_cast<size_t>(i) * spec.nx + j]; }
    cdouble at(int i, int j) const { return v[static_cast<size_t>(i) * spec.nx + j]; }
};

/// <q, f> with the lattice measure weights at*ax.
double pair_field(const Field& q, const TestFunction& f);

/// Partial Fourier transforms; output indexed by DFT index (see LatticeSpec).
Spectrum fourier_t(const Field& u);
Spectrum fourier_t(const Spectrum& u);
Spectrum inverse_fourier_t(const Spectrum& u);
Spectrum fourier_x(const Field& u);
Spectrum fourier_x(const Spectrum& u);
Spectrum inverse_fourier_x(const Spectrum& u);
/// Both directions.
Spectrum fourier_tx(const Field& u);
Spectrum inverse_fourier_tx(const Spectrum& u);
Field real_part(const Spectrum& u);

/// 1d profiles (circle = nt samples, line = nx samples).
enum class Axis { Time, Space };

std::vector<cdouble> fourier_profile(const LatticeSpec& spec, Axis axis,
                                     const std::vector<double>& g);

/// Sobolev norm of a 1d profile; order in {-1, -1/2, +1/2}.
/// circle: multiplier (nu_n^2 + m^2)^s, counting measure over modes;
/// line:   multiplier (p_j^2 + m^2)^s, measure dp.
double sobolev_norm(const LatticeSpec& spec, Axis axis, const std::vector<double>& g,
                    double order);

/// Approximations of the Dirac delta (time: truncated Matsubara sum,
/// space: scaled cubic B-spline bump).
struct Mollifier {
    Axis kind;
    int k;
    int center;                   // site index
    std::vector<double> profile;  // nt or nx samples
};

/// Time kind: delta_k(s) = beta^{-1} sum_{|n|<=k} e^{i nu_n s}; at k = nt/2 the
/// unpaired Nyquist mode is included once, which reproduces the exact lattice
/// delta at^{-1} * delta_site.  Space kind: k*chi(k(x-c)) with chi the cubic
/// B-spline, renormalized so that sum(profile)*ax = 1 exactly.
Mollifier make_mollifier(const LatticeSpec& spec, Axis kind, int k, int center);

/// Normalized cubic B-spline bump, support |u| <= 2, integral 1.
double bspline3(double u);

/// f(t,x) = g(t) * h(x) as a TestFunction.
TestFunction tensor(const LatticeSpec& spec, const std::vector<double>& g,
                    const std::vector<double>& h);

/// Classical Klein-Gordon Cauchy data on the spatial lattice.
struct KgState {
    std::vector<double> phi;
    std::vector<double> pi;
};

/// Spectral (exact per momentum mode) evolution by time t of Cauchy data
/// (phi, pi), where pi is normalized so that (d/dt phi)|_0 = -eps^2 pi with
/// eps = (p^2 + m^2)^{1/2}.  One-parameter group; preserves the symplectic
/// form sigma = sum_j (phi1 pi2 - pi1 phi2) ax exactly up to rounding.
KgState kg_evolve(const LatticeSpec& spec, const KgState& s0, double t);

double kg_symplectic(const LatticeSpec& spec, const KgState& a, const KgState& b);

/// Energy density (1/2)[(dphi/dt)^2 + (grad phi)^2 + m^2 phi^2] per site,
/// spectral derivatives.
std::vector<double> kg_energy_density(const LatticeSpec& spec, const KgState& s);

/// Binary field dump: 32-byte header (magic "PPHI2FLD", u64le json length,
/// u64le field count, zero pad), then the spec JSON, then per field nt*nx
/// little-endian doubles, row-major (t outer, x inner).
void dump_fields(std::ostream& os, const LatticeSpec& spec, const std::vector<Field>& fields);
std::vector<Field> load_fields(std::istream& is);

}  // namespace pphi2
