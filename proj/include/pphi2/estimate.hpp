#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pphi2 {

/// A Monte Carlo measurement with seed provenance.
struct Estimate {
    double value = 0.0;
    double stderror = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

/// Deterministic pairwise summation (independent of accumulation threads).
double pairwise_sum(const std::vector<double>& v);

/// Mean / standard error of the mean via pairwise sums.
Estimate mean_estimate(const std::vector<double>& v, std::uint64_t seed = 0);

/// Weighted mean with normalized weights w_i / sum(w); stderr from the
/// effective-sample-size formula.
Estimate weighted_mean_estimate(const std::vector<double>& v, const std::vector<double>& w,
                                std::uint64_t seed = 0);

/// (sum w)^2 / sum w^2.
double effective_sample_size(const std::vector<double>& w);

/// Bootstrap standard error of a statistic over per-sample rows.
/// `stat` maps resampled index lists to the statistic value.
double bootstrap_stderr(std::uint64_t n, std::uint64_t seed, int replicas,
                        const std::function<double(const std::vector<std::uint32_t>&)>& stat);

}  // namespace pphi2
