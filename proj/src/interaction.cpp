#include "pphi2/interaction.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "pphi2/fft.hpp"
#include "pphi2/rng.hpp"

namespace pphi2 {

std::vector<double> window_weights(const LatticeSpec& spec, Axis axis, double a, double b) {
    int n = axis == Axis::Time ? spec.nt : spec.nx;
    double step = axis == Axis::Time ? spec.at() : spec.ax();
    double period = axis == Axis::Time ? spec.beta : 2.0 * spec.length;
    std::vector<double> w(n, 0.0);
    if (b < a) throw std::invalid_argument("window_weights: empty window");
    double tol = 1e-9 * step;
    if (b - a >= period - tol) {
        std::fill(w.begin(), w.end(), step);
        return w;
    }
    for (int i = 0; i < n; ++i) {
        double c = axis == Axis::Time ? spec.t(i) : spec.x(i);
        bool on_a = std::abs(c - a) < tol, on_b = std::abs(c - b) < tol;
        if (on_a || on_b)
            w[i] = (on_a && on_b) ? 0.0 : 0.5 * step;
        else if (c > a && c < b)
            w[i] = step;
    }
    return w;
}

LatticeInteraction::LatticeInteraction(const CovKernel& kernel, const InteractionSpec& spec)
    : kernel_(&kernel), spec_(spec) {
    if (!bounded_below(spec.poly))
        throw std::invalid_argument("interaction: polynomial must be bounded from below");
    if (spec.lambda < 0) throw std::invalid_argument("interaction: lambda must be >= 0");
    if (!(spec.cutoff_l > 0) || spec.cutoff_l > kernel.spec.length)
        throw std::invalid_argument("interaction: need 0 < l <= L");
    density_.wick_constant = kernel.site_variance();
    density_.coeffs.resize(spec.poly.coeffs.size());
    for (size_t k = 0; k < spec.poly.coeffs.size(); ++k)
        density_.coeffs[k] = spec.lambda * spec.poly.coeffs[k];
    xwin_ = window_weights(kernel.spec, Axis::Space, -spec.cutoff_l, spec.cutoff_l);
}

double LatticeInteraction::eval_V0(const Field& q, int t_slice, double l) const {
    const auto& spec = kernel_->spec;
    if (l > spec.length) throw std::invalid_argument("eval_V0: l exceeds the box");
    const std::vector<double>* w = &xwin_;
    std::vector<double> tmp;
    if (l != spec_.cutoff_l) {
        tmp = window_weights(spec, Axis::Space, -l, l);
        w = &tmp;
    }
    double acc = 0.0;
    for (int j = 0; j < spec.nx; ++j)
        if ((*w)[j] != 0.0) acc += (*w)[j] * density(q.at(t_slice, j));
    return acc;
}

double LatticeInteraction::eval_VC(const Field& q, int x_slice) const {
    const auto& spec = kernel_->spec;
    double acc = 0.0;
    for (int i = 0; i < spec.nt; ++i) acc += density(q.at(i, x_slice));
    return acc * spec.at();
}

double LatticeInteraction::fkn_log_weight(const Field& q, double a, double b, Axis which) const {
    const auto& spec = kernel_->spec;
    double acc = 0.0;
    if (which == Axis::Time) {
        auto wt = window_weights(spec, Axis::Time, a, b);
        for (int i = 0; i < spec.nt; ++i)
            if (wt[i] != 0.0) acc += wt[i] * eval_V0(q, i, spec_.cutoff_l);
    } else {
        if (a < -spec_.cutoff_l - 1e-12 || b > spec_.cutoff_l + 1e-12)
            throw std::invalid_argument("fkn_log_weight: window outside [-l, l]");
        auto wx = window_weights(spec, Axis::Space, a, b);
        for (int j = 0; j < spec.nx; ++j)
            if (wx[j] != 0.0) acc += wx[j] * eval_VC(q, j);
    }
    return -acc;
}

double LatticeInteraction::total_action(const Field& q) const {
    const auto& spec = kernel_->spec;
    double acc = 0.0;
    for (int i = 0; i < spec.nt; ++i) {
        double row = 0.0;
        for (int j = 0; j < spec.nx; ++j)
            if (xwin_[j] != 0.0) row += xwin_[j] * density(q.at(i, j));
        acc += row;
    }
    return acc * spec.at();
}

WeightedEnsemble::WeightedEnsemble(const CovKernel& kernel, const LatticeInteraction& inter,
                                   std::uint64_t seed, std::uint64_t n, int threads,
                                   double min_ess_fraction)
    : sampler_(kernel, seed), inter_(&inter), n_(n) {
    logw_ = map_samples(sampler_, n, threads,
                        [&](const Field& q) { return -inter.total_action(q); });
    double mx = *std::max_element(logw_.begin(), logw_.end());
    std::vector<double> w(n);
    for (std::uint64_t i = 0; i < n; ++i) w[i] = std::exp(logw_[i] - mx);
    ess_ = effective_sample_size(w);
    if (ess_ < min_ess_fraction * static_cast<double>(n))
        throw std::runtime_error(
            "reweighting effective sample size below threshold; use the metropolis sampler");
}

std::vector<double> WeightedEnsemble::weights() const {
    double mx = *std::max_element(logw_.begin(), logw_.end());
    std::vector<double> w(n_);
    for (std::uint64_t i = 0; i < n_; ++i) w[i] = std::exp(logw_[i] - mx);
    double s = pairwise_sum(w);
    for (auto& v : w) v /= s;
    return w;
}

Estimate WeightedEnsemble::unnormalized(const std::function<double(const Field&)>& fn,
                                        int threads) const {
    auto vals = map_samples(sampler_, n_, threads, fn);
    for (std::uint64_t i = 0; i < n_; ++i) vals[i] *= std::exp(logw_[i]);
    return mean_estimate(vals, sampler_.seed());
}

std::vector<Estimate> WeightedEnsemble::normalized(
    const std::vector<std::function<double(const Field&)>>& fns, int threads) const {
    std::vector<std::vector<double>> vals(fns.size());
    for (size_t f = 0; f < fns.size(); ++f) vals[f] = map_samples(sampler_, n_, threads, fns[f]);
    double mx = *std::max_element(logw_.begin(), logw_.end());
    std::vector<double> w(n_);
    for (std::uint64_t i = 0; i < n_; ++i) w[i] = std::exp(logw_[i] - mx);
    std::vector<Estimate> out;
    out.reserve(fns.size());
    for (auto& v : vals) out.push_back(weighted_mean_estimate(v, w, sampler_.seed()));
    return out;
}

std::vector<double> WeightedEnsemble::values(const std::function<double(const Field&)>& fn,
                                             int threads) const {
    return map_samples(sampler_, n_, threads, fn);
}

namespace {

// Real-space kernel of the inverse covariance symbol: the free action is
// (1/2) at ax sum_s phi_s (K * phi)_s with K = IDFT(1/mult)/N.
std::vector<double> inverse_symbol_kernel(const CovKernel& k) {
    const auto& spec = k.spec;
    size_t total = static_cast<size_t>(spec.nt) * spec.nx;
    std::vector<cdouble> buf(total);
    for (size_t i = 0; i < total; ++i) {
        if (k.mult[i] == 0.0)
            throw std::invalid_argument("metropolis: mode-masked kernels are not supported");
        buf[i] = 1.0 / k.mult[i];
    }
    fft::transform_cols(buf.data(), spec.nt, spec.nx, +1);
    fft::transform_rows(buf.data(), spec.nt, spec.nx, +1);
    std::vector<double> out(total);
    for (size_t i = 0; i < total; ++i) out[i] = buf[i].real() / static_cast<double>(total);
    return out;
}

}  // namespace

MetropolisRun sample_interacting_metropolis(const CovKernel& kernel,
                                            const LatticeInteraction& inter,
                                            const MetropolisConfig& cfg) {
    const auto& spec = kernel.spec;
    int nt = spec.nt, nx = spec.nx, total = nt * nx;
    std::vector<double> K = inverse_symbol_kernel(kernel);
    auto kval = [&](int di, int dj) { return K[static_cast<size_t>(di) * nx + dj]; };
    double w_site = spec.site_weight();
    auto xwin = window_weights(spec, Axis::Space, -inter.spec().cutoff_l, inter.spec().cutoff_l);
    std::vector<double> wint(total);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j) wint[static_cast<size_t>(i) * nx + j] = spec.at() * xwin[j];

    MetropolisRun run;
    run.chains.resize(cfg.chains);
    std::uint64_t accepted = 0, proposed = 0;

    for (int chain = 0; chain < cfg.chains; ++chain) {
        RngStream rng(cfg.seed, 0x5EED0000ull + chain);
        GaussianSampler init(kernel, cfg.seed ^ 0xC0FFEEull);
        Field q = init.field(chain);
        // running convolution (K * phi)
        std::vector<double> conv(total, 0.0);
        for (int s = 0; s < total; ++s) {
            int si = s / nx, sj = s % nx;
            double acc = 0.0;
            for (int u = 0; u < total; ++u) {
                int ui = u / nx, uj = u % nx;
                acc += kval((si - ui + nt) % nt, (sj - uj + nx) % nx) * q.v[u];
            }
            conv[s] = acc;
        }
        double step = cfg.step;
        int total_sweeps = cfg.burnin_sweeps + cfg.samples_per_chain * cfg.thin;
        for (int sweep = 0; sweep < total_sweeps; ++sweep) {
            int acc_sweep = 0;
            for (int s = 0; s < total; ++s) {
                double delta = step * rng.normal();
                double phi = q.v[s];
                double dS = w_site * (delta * conv[s] + 0.5 * delta * delta * kval(0, 0));
                if (wint[s] != 0.0)
                    dS += wint[s] * (inter.density(phi + delta) - inter.density(phi));
                ++proposed;
                if (dS <= 0 || rng.uniform() < std::exp(-dS)) {
                    q.v[s] += delta;
                    int si = s / nx, sj = s % nx;
                    for (int u = 0; u < total; ++u) {
                        int ui = u / nx, uj = u % nx;
                        conv[u] += delta * kval((ui - si + nt) % nt, (uj - sj + nx) % nx);
                    }
                    ++accepted;
                    ++acc_sweep;
                }
            }
            // crude step tuning during the first half of burn-in
            if (sweep < cfg.burnin_sweeps / 2 && sweep % 20 == 19) {
                double rate = static_cast<double>(acc_sweep) / total;
                if (rate < 0.35) step *= 0.85;
                if (rate > 0.65) step *= 1.15;
            }
            if (sweep >= cfg.burnin_sweeps && (sweep - cfg.burnin_sweeps) % cfg.thin == 0)
                run.chains[chain].push_back(q);
        }
    }
    run.acceptance = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    run.acceptance_in_band = run.acceptance >= 0.2 && run.acceptance <= 0.8;
    return run;
}

Estimate MetropolisRun::estimate(const std::function<double(const Field&)>& fn) const {
    std::vector<double> chain_means;
    std::uint64_t n = 0;
    std::vector<double> all;
    for (const auto& c : chains) {
        if (c.empty()) continue;
        std::vector<double> vals(c.size());
        for (size_t i = 0; i < c.size(); ++i) vals[i] = fn(c[i]);
        chain_means.push_back(mean_estimate(vals).value);
        all.insert(all.end(), vals.begin(), vals.end());
        n += c.size();
    }
    Estimate e;
    e.n = n;
    if (chain_means.empty()) return e;
    if (chain_means.size() == 1) return mean_estimate(all);
    Estimate between = mean_estimate(chain_means);
    e.value = between.value;
    e.stderror = between.stderror;  // between-chain variance dominates thinning effects
    return e;
}

namespace {

int slice_index(const LatticeSpec& spec, double t) {
    double u = (t + spec.beta / 2) / spec.at();
    int i = static_cast<int>(std::lround(u));
    i = ((i % spec.nt) + spec.nt) % spec.nt;
    if (std::abs(spec.t(i) - t) > 1e-9 * spec.at())
        throw std::invalid_argument("os family: time must sit on a lattice slice");
    return i;
}

double sharp_time_pairing(const LatticeSpec& spec, const Field& q, int slice,
                          const std::vector<double>& h) {
    double acc = 0.0;
    for (int j = 0; j < spec.nx; ++j) acc += q.at(slice, j) * h[j];
    return acc * spec.ax();
}

}  // namespace

double os_gram_min_eig_free(const LatticeSpec& spec, const std::vector<OsFamilyMember>& family) {
    int F = static_cast<int>(family.size());
    Eigen::MatrixXd M(F, F);
    for (int a = 0; a < F; ++a) {
        for (int b = 0; b < F; ++b) {
            // Q(f_b - theta f_a) with theta the time reflection
            double qaa = c0_kernel(spec, -family[a].t, -family[a].t, family[a].h, family[a].h);
            double qbb = c0_kernel(spec, family[b].t, family[b].t, family[b].h, family[b].h);
            double qab = c0_kernel(spec, -family[a].t, family[b].t, family[a].h, family[b].h);
            M(a, b) = std::exp(-0.5 * (qaa + qbb - 2.0 * qab));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    return es.eigenvalues().minCoeff();
}

OsGramMc os_gram_min_eig_mc(const WeightedEnsemble& ens, const std::vector<OsFamilyMember>& family,
                            int bootstrap_replicas, int threads) {
    const auto& spec = ens.sampler().kernel().spec;
    int F = static_cast<int>(family.size());
    std::uint64_t n = ens.size();
    if (n < static_cast<std::uint64_t>(F))
        throw std::invalid_argument("os gram: fewer samples than family size");
    std::vector<int> slices(F), refl(F);
    for (int a = 0; a < F; ++a) {
        slices[a] = slice_index(spec, family[a].t);
        refl[a] = spec.reflect_t(slices[a]);
    }
    // per-sample sharp-time pairings at the slice and its reflection
    std::vector<std::vector<double>> u(F), v(F);
    for (int a = 0; a < F; ++a) {
        u[a] = ens.values(
            [&](const Field& q) { return sharp_time_pairing(spec, q, refl[a], family[a].h); },
            threads);
        v[a] = ens.values(
            [&](const Field& q) { return sharp_time_pairing(spec, q, slices[a], family[a].h); },
            threads);
    }
    auto wts = ens.weights();
    auto gram_min = [&](const std::vector<std::uint32_t>* idx) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(F, F);
        double wsum = 0.0;
        std::uint64_t count = idx ? idx->size() : n;
        for (std::uint64_t r = 0; r < count; ++r) {
            std::uint64_t i = idx ? (*idx)[r] : r;
            double w = wts[i];
            wsum += w;
            for (int a = 0; a < F; ++a)
                for (int b = 0; b < F; ++b)
                    M(a, b) += w * 0.5 *
                               (std::cos(v[b][i] - u[a][i]) + std::cos(v[a][i] - u[b][i]));
        }
        M /= wsum;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        return es.eigenvalues().minCoeff();
    };
    OsGramMc out;
    out.min_eig = gram_min(nullptr);
    out.bootstrap_se = bootstrap_stderr(
        n, ens.sampler().seed(), bootstrap_replicas,
        [&](const std::vector<std::uint32_t>& idx) { return gram_min(&idx); });
    return out;
}

}  // namespace pphi2
