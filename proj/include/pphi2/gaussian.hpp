#pragma once

#include <functional>

#include "pphi2/covariance.hpp"
#include "pphi2/estimate.hpp"

namespace pphi2 {

/// Sampler for the free Gaussian measure dphi_C.
///
/// Every field is a pure function of (seed, sample index): each retained mode
/// pair draws one Philox block keyed by the lexicographically smaller DFT
/// index, Hermitian symmetry fixes the partner, and the self-conjugate
/// (zero/Nyquist) modes are real.  Complex mode variance is mult/dp, split
/// evenly between real and imaginary parts for paired modes.
class GaussianSampler {
  public:
    GaussianSampler(CovKernel kernel, std::uint64_t seed);

    const CovKernel& kernel() const { return kernel_; }
    std::uint64_t seed() const { return seed_; }

    /// Field number `index` of the stream (bit-for-bit reproducible).
    Field field(std::uint64_t index) const;
    /// Raw mode coefficients of that field (what fourier_tx(field) returns).
    Spectrum modes(std::uint64_t index) const;

  private:
    CovKernel kernel_;
    std::uint64_t seed_;
    std::vector<double> sigma_;  // per-mode draw scale, 0 for masked/partner
};

std::vector<Field> sample_free(const CovKernel& kernel, std::uint64_t seed, std::uint64_t n);

/// Evaluate fn on samples [0, n); parallel over samples, results slotted by
/// index so the output is independent of thread count.
std::vector<double> map_samples(const GaussianSampler& s, std::uint64_t n, int threads,
                                const std::function<double(const Field&)>& fn);

/// Exact generating functional of dphi_C: e^{-C(f,f)/2}.
double generating_functional_free(const CovKernel& k, const TestFunction& f);
/// Companion MC estimator: mean of Re e^{i phi(f)} over n samples.
Estimate generating_functional_mc(const GaussianSampler& s, const TestFunction& f,
                                  std::uint64_t n, int threads = 1);

/// Exact Gaussian moment: 0 for odd p, (p-1)!! C(f,f)^{p/2} for even p.
double moment_free(const CovKernel& k, const TestFunction& f, int p);
/// Companion MC estimator of E[phi(f)^p].
Estimate moment_mc(const GaussianSampler& s, const TestFunction& f, int p, std::uint64_t n,
                   int threads = 1);

}  // namespace pphi2
