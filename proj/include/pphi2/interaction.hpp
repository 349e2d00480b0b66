#pragma once

#include "pphi2/gaussian.hpp"
#include "pphi2/wick.hpp"

namespace pphi2 {

/// Spatially cutoff Wick-ordered interaction lambda * :P(phi):_c with
/// c the exact lattice site variance of the sampling kernel, so that Wick
/// centering and Nelson symmetry hold exactly on the lattice.
struct InteractionSpec {
    WickPolyD poly;  // physical P in monomials, bounded below
    double lambda = 0.0;
    double cutoff_l = 1.0;
};

class LatticeInteraction {
  public:
    LatticeInteraction(const CovKernel& kernel, const InteractionSpec& spec);

    const InteractionSpec& spec() const { return spec_; }
    const LatticeSpec& lattice() const { return kernel_->spec; }
    const CovKernel& kernel() const { return *kernel_; }
    double wick_constant() const { return density_.wick_constant; }

    /// lambda * :P(x):_{c_lat} at a field value.
    double density(double x) const { return wick_eval(density_, x); }

    /// V_0-type slice: sum over |x| <= l of density(phi(t, x)) with trapezoid
    /// window weights (boundary sites on x = +-l count half).
    double eval_V0(const Field& q, int t_slice, double l) const;
    /// V_C-type slice: at * sum_t density(phi(t, x)).
    double eval_VC(const Field& q, int x_slice) const;

    /// log of the FKN weight over a window.
    /// Time window [a,b] in [-beta/2, beta/2]: -sum_i w_t(i) V0(slice i, l).
    /// Space window [a,b] in [-l, l]:          -sum_j w_x(j) VC(slice j).
    double fkn_log_weight(const Field& q, double a, double b, Axis which) const;

    /// Full-window action (equals both full fkn exponents; the Nelson
    /// symmetric double sum).
    double total_action(const Field& q) const;

  private:
    const CovKernel* kernel_;
    InteractionSpec spec_;
    WickPolyD density_;               // lambda * P in the Wick basis of c_lat
    std::vector<double> xwin_;        // window weights over x sites for [-l, l]
};

/// Quadrature weights for a window [a, b] on a periodic axis: full weight for
/// interior sites, half weight when the edge lands on a site.
std::vector<double> window_weights(const LatticeSpec& spec, Axis axis, double a, double b);

/// Gaussian ensemble with FKN reweighting: w_i = e^{log_weight_i}.
class WeightedEnsemble {
  public:
    WeightedEnsemble(const CovKernel& kernel, const LatticeInteraction& inter,
                     std::uint64_t seed, std::uint64_t n, int threads = 1,
                     double min_ess_fraction = 0.05);

    std::uint64_t size() const { return n_; }
    const std::vector<double>& log_weights() const { return logw_; }
    double ess() const { return ess_; }
    const GaussianSampler& sampler() const { return sampler_; }

    /// Unnormalized estimate of E_{dphi_C}[fn * e^{-S_int}]  (fn = 1 gives Z_l).
    Estimate unnormalized(const std::function<double(const Field&)>& fn, int threads = 1) const;
    /// Normalized (measure mu_l) estimates, one pass for many observables.
    std::vector<Estimate> normalized(const std::vector<std::function<double(const Field&)>>& fns,
                                     int threads = 1) const;
    /// Per-sample raw values of an observable (for bootstrap post-processing).
    std::vector<double> values(const std::function<double(const Field&)>& fn,
                               int threads = 1) const;
    std::vector<double> weights() const;  // normalized to sum 1

  private:
    GaussianSampler sampler_;
    const LatticeInteraction* inter_;
    std::uint64_t n_;
    std::vector<double> logw_;
    double ess_ = 0.0;
};

struct MetropolisConfig {
    std::uint64_t seed = 1;
    int chains = 2;
    int burnin_sweeps = 1000;
    int thin = 10;
    int samples_per_chain = 1000;
    double step = 1.0;
};

struct MetropolisRun {
    std::vector<std::vector<Field>> chains;  // thinned fields per chain
    double acceptance = 0.0;
    bool acceptance_in_band = true;  // [0.2, 0.8]

    /// Mean with between-chain variance included when chains > 1.
    Estimate estimate(const std::function<double(const Field&)>& fn) const;
};

MetropolisRun sample_interacting_metropolis(const CovKernel& kernel,
                                            const LatticeInteraction& inter,
                                            const MetropolisConfig& cfg);

/// Reflection Gram matrix M_ab = E[conj(Theta F_a) F_b] for the Weyl family
/// F_a = e^{i phi(delta_{t_a} (x) h_a)}, t_a in [0, beta/2].
struct OsFamilyMember {
    double t;                // time in [0, beta/2]
    std::vector<double> h;   // spatial profile (nx samples)
};

/// Exact free-field Gram via the closed-form thermal kernel; returns the
/// minimum eigenvalue (OS positivity predicts >= 0).
double os_gram_min_eig_free(const LatticeSpec& spec, const std::vector<OsFamilyMember>& family);

struct OsGramMc {
    double min_eig = 0.0;
    double bootstrap_se = 0.0;
};

/// Monte Carlo Gram under the reweighted interacting measure, with bootstrap
/// standard error of the minimum eigenvalue.
OsGramMc os_gram_min_eig_mc(const WeightedEnsemble& ens,
                            const std::vector<OsFamilyMember>& family, int bootstrap_replicas = 64,
                            int threads = 1);

}  // namespace pphi2
