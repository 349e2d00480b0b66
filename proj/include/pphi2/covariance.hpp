#pragma once

#include <iosfwd>

#include "pphi2/lattice.hpp"

namespace pphi2 {

enum class Dispersion {
    Exact,             // continuum frequencies nu_n^2 + p_j^2 at lattice modes
    FiniteDifference,  // lattice symbols (2/a sin(w a/2))^2
};

/// Momentum-space multiplier of the free covariance
/// C = (D_t^2 + D_x^2 + m^2)^{-1}, stored over DFT indices (k_t, k_x).
///
/// time_cutoff >= 0 restricts the measure to Matsubara modes |n| <= cutoff
/// (multiplier zeroed outside); used to match a truncated Fock side.
struct CovKernel {
    LatticeSpec spec;
    Dispersion dispersion = Dispersion::Exact;
    int time_cutoff = -1;
    std::vector<double> mult;  // nt x nx row-major

    double at(int kt, int kx) const { return mult[static_cast<size_t>(kt) * spec.nx + kx]; }

    /// Exact lattice variance of the site field phi(t,x):
    /// (beta * 2L)^{-1} sum multiplier.  This is the Wick constant that makes
    /// lattice Wick identities exact.
    double site_variance() const;
};

CovKernel make_cov_kernel(const LatticeSpec& spec, Dispersion d = Dispersion::Exact,
                          int time_cutoff = -1);

/// C(f, g) = sum conj(f_hat) * mult * g_hat * dp over all modes.
double quad_C(const CovKernel& k, const TestFunction& f, const TestFunction& g);
/// Same, reusing precomputed spectra (fourier_tx outputs).
double quad_C_spectra(const CovKernel& k, const Spectrum& fhat, const Spectrum& ghat);

/// CSV dump: header "n,j,multiplier", one row per mode pair.
void dump_kernel_csv(std::ostream& os, const CovKernel& k);

/// Derived thermal kernels: eps(p) = (p^2+m^2)^{1/2} over spatial modes,
/// b(nu) = (nu^2+m^2)^{1/2} over circle modes, rho = (e^{beta eps}-1)^{-1}.
struct ThermalKernel {
    LatticeSpec spec;
    std::vector<double> epsilon;  // nx, by DFT index
    std::vector<double> b;        // nt, by DFT index
    std::vector<double> rho;      // nx
};

ThermalKernel make_thermal_kernel(const LatticeSpec& spec);

/// Truncated Matsubara sum beta^{-1} sum_{|n|<=N} e^{i nu_n t}/(nu_n^2+eps^2)
/// (paired +-n) and the closed form
/// (e^{-|t| eps} + e^{-(beta-|t|) eps}) / (2 eps (1 - e^{-beta eps})).
struct MatsubaraPair {
    double truncated_sum;
    double closed_form;
};

MatsubaraPair matsubara_identity(double t, double eps, double beta, long long N);

/// Scalar closed form above (|t| folded into [0, beta]).
double thermal_time_kernel(double dt, double eps, double beta);

/// Sharp-time covariance C_0(t1, h1, t2, h2), evaluated spectrally over the
/// spatial modes with the closed-form time kernel.
double c0_kernel(const LatticeSpec& spec, double t1, double t2, const std::vector<double>& h1,
                 const std::vector<double>& h2);

/// Sharp-space covariance C_beta(g1, x1, g2, x2) = (g1, e^{-|dx| b}/(2b) g2),
/// evaluated over circle modes.
double cbeta_kernel(const LatticeSpec& spec, double x1, double x2, const std::vector<double>& g1,
                    const std::vector<double>& g2);

}  // namespace pphi2
