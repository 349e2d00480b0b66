#include "pphi2/estimate.hpp"

#include <cmath>
#include <functional>

#include "json.hpp"
#include "pphi2/rng.hpp"

namespace pphi2 {

std::string Estimate::to_json() const {
    nlohmann::json j{{"value", value}, {"stderr", stderror}, {"n", n}, {"seed", seed}};
    return j.dump();
}

namespace {
double pairwise_range(const double* v, size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    size_t h = n / 2;
    return pairwise_range(v, h) + pairwise_range(v + h, n - h);
}
}  // namespace

double pairwise_sum(const std::vector<double>& v) { return pairwise_range(v.data(), v.size()); }

Estimate mean_estimate(const std::vector<double>& v, std::uint64_t seed) {
    Estimate e;
    e.n = v.size();
    e.seed = seed;
    if (v.empty()) return e;
    double mean = pairwise_sum(v) / static_cast<double>(v.size());
    std::vector<double> sq(v.size());
    for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
    double var = v.size() > 1 ? pairwise_sum(sq) / (static_cast<double>(v.size()) - 1) : 0.0;
    e.value = mean;
    e.stderror = std::sqrt(var / static_cast<double>(v.size()));
    return e;
}

Estimate weighted_mean_estimate(const std::vector<double>& v, const std::vector<double>& w,
                                std::uint64_t seed) {
    Estimate e;
    e.n = v.size();
    e.seed = seed;
    if (v.empty()) return e;
    double wsum = pairwise_sum(w);
    std::vector<double> vw(v.size());
    for (size_t i = 0; i < v.size(); ++i) vw[i] = v[i] * w[i];
    double mean = pairwise_sum(vw) / wsum;
    // variance of the ratio estimator; reduces to the plain formula for w = 1
    std::vector<double> dev(v.size());
    for (size_t i = 0; i < v.size(); ++i) dev[i] = w[i] * w[i] * (v[i] - mean) * (v[i] - mean);
    e.value = mean;
    e.stderror = std::sqrt(pairwise_sum(dev)) / wsum;
    return e;
}

double effective_sample_size(const std::vector<double>& w) {
    double s = pairwise_sum(w);
    std::vector<double> sq(w.size());
    for (size_t i = 0; i < w.size(); ++i) sq[i] = w[i] * w[i];
    double s2 = pairwise_sum(sq);
    return s2 > 0 ? s * s / s2 : 0.0;
}

double bootstrap_stderr(std::uint64_t n, std::uint64_t seed, int replicas,
                        const std::function<double(const std::vector<std::uint32_t>&)>& stat) {
    std::vector<double> vals(replicas);
    std::vector<std::uint32_t> idx(n);
    for (int r = 0; r < replicas; ++r) {
        for (std::uint64_t i = 0; i < n; ++i) {
            double u = uniform01(seed ^ 0xB00757u, r, i);
            idx[i] = static_cast<std::uint32_t>(u * static_cast<double>(n));
            if (idx[i] >= n) idx[i] = static_cast<std::uint32_t>(n - 1);
        }
        vals[r] = stat(idx);
    }
    Estimate e = mean_estimate(vals);
    return e.stderror * std::sqrt(static_cast<double>(replicas));
}

}  // namespace pphi2
