#include "pphi2/covariance.hpp"

#include <cmath>
#include <ostream>

namespace pphi2 {

namespace {

double symbol_sq(double w, double a, Dispersion d) {
    if (d == Dispersion::Exact) return w * w;
    double s = 2.0 / a * std::sin(0.5 * w * a);
    return s * s;
}

}  // namespace

double CovKernel::site_variance() const {
    double acc = 0.0;
    for (double m : mult) acc += m;
    return acc / (spec.beta * 2.0 * spec.length);
}

CovKernel make_cov_kernel(const LatticeSpec& spec, Dispersion d, int time_cutoff) {
    spec.validate();
    CovKernel k{spec, d, time_cutoff, {}};
    k.mult.resize(static_cast<size_t>(spec.nt) * spec.nx);
    double m2 = spec.mass * spec.mass;
    for (int kt = 0; kt < spec.nt; ++kt) {
        bool masked = time_cutoff >= 0 && std::abs(spec.tmode(kt)) > time_cutoff;
        for (int kx = 0; kx < spec.nx; ++kx) {
            double v = masked ? 0.0
                              : 1.0 / (symbol_sq(spec.nu(kt), spec.at(), d) +
                                       symbol_sq(spec.p(kx), spec.ax(), d) + m2);
            k.mult[static_cast<size_t>(kt) * spec.nx + kx] = v;
        }
    }
    return k;
}

double quad_C_spectra(const CovKernel& k, const Spectrum& fhat, const Spectrum& ghat) {
    if (!(fhat.spec == k.spec) || !(ghat.spec == k.spec))
        throw std::invalid_argument("quad_C: spec mismatch");
    cdouble acc(0, 0);
    for (size_t i = 0; i < k.mult.size(); ++i)
        acc += std::conj(fhat.v[i]) * ghat.v[i] * k.mult[i];
    return acc.real() * k.spec.dp();
}

double quad_C(const CovKernel& k, const TestFunction& f, const TestFunction& g) {
    return quad_C_spectra(k, fourier_tx(f), fourier_tx(g));
}

void dump_kernel_csv(std::ostream& os, const CovKernel& k) {
    os << "n,j,multiplier\n";
    for (int kt = 0; kt < k.spec.nt; ++kt)
        for (int kx = 0; kx < k.spec.nx; ++kx)
            os << k.spec.tmode(kt) << ',' << k.spec.xmode(kx) << ',' << k.at(kt, kx) << '\n';
}

ThermalKernel make_thermal_kernel(const LatticeSpec& spec) {
    ThermalKernel t{spec, {}, {}, {}};
    t.epsilon.resize(spec.nx);
    t.rho.resize(spec.nx);
    t.b.resize(spec.nt);
    for (int kx = 0; kx < spec.nx; ++kx) {
        double eps = std::hypot(spec.p(kx), spec.mass);
        t.epsilon[kx] = eps;
        t.rho[kx] = 1.0 / std::expm1(spec.beta * eps);
    }
    for (int kt = 0; kt < spec.nt; ++kt) t.b[kt] = std::hypot(spec.nu(kt), spec.mass);
    return t;
}

double thermal_time_kernel(double dt, double eps, double beta) {
    double a = std::fmod(std::abs(dt), beta);
    return (std::exp(-a * eps) + std::exp(-(beta - a) * eps)) /
           (2.0 * eps * (1.0 - std::exp(-beta * eps)));
}

MatsubaraPair matsubara_identity(double t, double eps, double beta, long long N) {
    if (!(eps > 0) || !(beta > 0) || N < 1) throw std::invalid_argument("matsubara: bad arguments");
    if (std::abs(t) > beta) throw std::invalid_argument("matsubara: |t| must be <= beta");
    double e2 = eps * eps;
    double sum = 1.0 / e2;
    for (long long n = N; n >= 1; --n) {  // ascending magnitudes: sum small terms first
        double nu = 2.0 * M_PI * n / beta;
        sum += 2.0 * std::cos(nu * t) / (nu * nu + e2);
    }
    return {sum / beta, thermal_time_kernel(t, eps, beta)};
}

double c0_kernel(const LatticeSpec& spec, double t1, double t2, const std::vector<double>& h1,
                 const std::vector<double>& h2) {
    auto z1 = fourier_profile(spec, Axis::Space, h1);
    auto z2 = fourier_profile(spec, Axis::Space, h2);
    double acc = 0.0;
    for (int kx = 0; kx < spec.nx; ++kx) {
        double eps = std::hypot(spec.p(kx), spec.mass);
        acc += (std::conj(z1[kx]) * z2[kx]).real() * thermal_time_kernel(t1 - t2, eps, spec.beta);
    }
    return acc * spec.dp();
}

double cbeta_kernel(const LatticeSpec& spec, double x1, double x2, const std::vector<double>& g1,
                    const std::vector<double>& g2) {
    auto z1 = fourier_profile(spec, Axis::Time, g1);
    auto z2 = fourier_profile(spec, Axis::Time, g2);
    double acc = 0.0;
    for (int kt = 0; kt < spec.nt; ++kt) {
        double b = std::hypot(spec.nu(kt), spec.mass);
        acc += (std::conj(z1[kt]) * z2[kt]).real() * std::exp(-std::abs(x1 - x2) * b) / (2.0 * b);
    }
    return acc;
}

}  // namespace pphi2
