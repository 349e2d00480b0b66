#include "pphi2/gaussian.hpp"

#include <cmath>
#include <thread>

#include "pphi2/rng.hpp"

namespace pphi2 {

GaussianSampler::GaussianSampler(CovKernel kernel, std::uint64_t seed)
    : kernel_(std::move(kernel)), seed_(seed) {
    const auto& spec = kernel_.spec;
    size_t total = static_cast<size_t>(spec.nt) * spec.nx;
    sigma_.assign(total, 0.0);
    for (int kt = 0; kt < spec.nt; ++kt) {
        for (int kx = 0; kx < spec.nx; ++kx) {
            int pt = (spec.nt - kt) % spec.nt;
            int px = (spec.nx - kx) % spec.nx;
            size_t idx = static_cast<size_t>(kt) * spec.nx + kx;
            size_t part = static_cast<size_t>(pt) * spec.nx + px;
            if (part < idx) continue;  // partner draws
            double var = kernel_.mult[idx] / spec.dp();
            if (var == 0.0) continue;
            // self-conjugate modes hold one real gaussian, pairs hold a
            // complex one with half the variance in each component
            sigma_[idx] = part == idx ? std::sqrt(var) : std::sqrt(0.5 * var);
        }
    }
}

Spectrum GaussianSampler::modes(std::uint64_t index) const {
    const auto& spec = kernel_.spec;
    Spectrum z(spec);
    for (int kt = 0; kt < spec.nt; ++kt) {
        for (int kx = 0; kx < spec.nx; ++kx) {
            size_t idx = static_cast<size_t>(kt) * spec.nx + kx;
            if (sigma_[idx] == 0.0) continue;
            int pt = (spec.nt - kt) % spec.nt;
            int px = (spec.nx - kx) % spec.nx;
            size_t part = static_cast<size_t>(pt) * spec.nx + px;
            auto [g1, g2] = normal_pair(seed_, index, idx);
            if (part == idx) {
                z.v[idx] = sigma_[idx] * g1;
            } else {
                z.v[idx] = cdouble(sigma_[idx] * g1, sigma_[idx] * g2);
                z.v[part] = std::conj(z.v[idx]);
            }
        }
    }
    return z;
}

Field GaussianSampler::field(std::uint64_t index) const {
    return real_part(inverse_fourier_tx(modes(index)));
}

std::vector<Field> sample_free(const CovKernel& kernel, std::uint64_t seed, std::uint64_t n) {
    GaussianSampler s(kernel, seed);
    std::vector<Field> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(s.field(i));
    return out;
}

std::vector<double> map_samples(const GaussianSampler& s, std::uint64_t n, int threads,
                                const std::function<double(const Field&)>& fn) {
    std::vector<double> out(n);
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) out[i] = fn(s.field(i));
        return out;
    }
    std::vector<std::thread> pool;
    std::uint64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::uint64_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::uint64_t i = lo; i < hi; ++i) out[i] = fn(s.field(i));
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

double generating_functional_free(const CovKernel& k, const TestFunction& f) {
    return std::exp(-0.5 * quad_C(k, f, f));
}

Estimate generating_functional_mc(const GaussianSampler& s, const TestFunction& f,
                                  std::uint64_t n, int threads) {
    auto vals = map_samples(s, n, threads,
                            [&](const Field& q) { return std::cos(pair_field(q, f)); });
    return mean_estimate(vals, s.seed());
}

double moment_free(const CovKernel& k, const TestFunction& f, int p) {
    if (p < 1) throw std::invalid_argument("moment_free: p must be >= 1");
    if (p % 2) return 0.0;
    double c = quad_C(k, f, f);
    double dfact = 1.0;
    for (int m = p - 1; m > 1; m -= 2) dfact *= m;
    return dfact * std::pow(c, p / 2);
}

Estimate moment_mc(const GaussianSampler& s, const TestFunction& f, int p, std::uint64_t n,
                   int threads) {
    auto vals = map_samples(s, n, threads,
                            [&](const Field& q) { return std::pow(pair_field(q, f), p); });
    return mean_estimate(vals, s.seed());
}

}  // namespace pphi2
