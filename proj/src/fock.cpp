#include "pphi2/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pphi2/rng.hpp"

namespace pphi2 {

namespace {
constexpr int kPackBits = 6;  // occupations up to 63 per mode
}

FockBasis::FockBasis(const FockBasisSpec& spec) : spec_(spec) {
    if (spec.mode_cutoff < 0) throw std::invalid_argument("fock: mode_cutoff must be >= 0");
    if (spec.occupation_cap < 0 || spec.occupation_cap > 63)
        throw std::invalid_argument("fock: occupation_cap must be in [0, 63]");
    modes_ = 2 * spec.mode_cutoff + 1;
    if (modes_ * kPackBits > 60) throw std::invalid_argument("fock: too many modes to index");
    if (!(spec.beta > 0) || !(spec.mass > 0))
        throw std::invalid_argument("fock: beta and mass must be > 0");
    b_.resize(modes_);
    for (int m = 0; m < modes_; ++m) b_[m] = std::hypot(nu(m), spec.mass);

    // graded enumeration: total quanta ascending, then lexicographic
    std::vector<std::vector<std::uint8_t>> states;
    for (int total = 0; total <= spec.occupation_cap; ++total) {
        std::vector<std::uint8_t> cur(modes_, 0);
        std::function<void(int, int)> gen = [&](int m, int left) {
            if (m == modes_ - 1) {
                cur[m] = static_cast<std::uint8_t>(left);
                states.push_back(cur);
                return;
            }
            for (int q = left; q >= 0; --q) {
                cur[m] = static_cast<std::uint8_t>(q);
                gen(m + 1, left - q);
            }
        };
        gen(0, total);
        if (static_cast<int>(states.size()) > spec.hard_cap)
            throw std::invalid_argument("fock: dimension exceeds the configured hard cap");
    }
    dim_ = static_cast<int>(states.size());
    occ_.resize(static_cast<size_t>(dim_) * modes_);
    for (int s = 0; s < dim_; ++s)
        std::copy(states[s].begin(), states[s].end(), occ_.begin() + static_cast<size_t>(s) * modes_);
    index_.reserve(dim_ * 2);
    for (int s = 0; s < dim_; ++s) index_[pack(&occ_[static_cast<size_t>(s) * modes_])] = s;
}

std::uint64_t FockBasis::pack(const std::uint8_t* o) const {
    std::uint64_t key = 0;
    for (int m = 0; m < modes_; ++m) key = (key << kPackBits) | o[m];
    return key;
}

int FockBasis::total_quanta(int state) const {
    int t = 0;
    for (int m = 0; m < modes_; ++m) t += occ(state, m);
    return t;
}

int FockBasis::shifted_index(int state, int m, int delta) const {
    int q = occ(state, m) + delta;
    if (q < 0) return -1;
    std::vector<std::uint8_t> o(occ_.begin() + static_cast<size_t>(state) * modes_,
                                occ_.begin() + static_cast<size_t>(state + 1) * modes_);
    o[m] = static_cast<std::uint8_t>(q);
    auto it = index_.find(pack(o.data()));
    return it == index_.end() ? -1 : it->second;
}

int FockBasis::momentum_index(int state) const {
    int p = 0;
    for (int m = 0; m < modes_; ++m) p += occ(state, m) * mode_n(m);
    return p;
}

double FockBasis::free_energy(int state) const {
    double e = 0.0;
    for (int m = 0; m < modes_; ++m) e += occ(state, m) * b_[m];
    return e;
}

double FockBasis::cutoff_variance() const {
    double c = 0.0;
    for (int m = 0; m < modes_; ++m) c += 1.0 / (2.0 * b_[m]);
    return c / spec_.beta;
}

SpMat FockBasis::annihilator(int m) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(dim_);
    for (int s = 0; s < dim_; ++s) {
        int q = occ(s, m);
        if (q == 0) continue;
        int target = shifted_index(s, m, -1);
        trip.emplace_back(target, s, std::sqrt(static_cast<double>(q)));
    }
    SpMat a(dim_, dim_);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
}

Eigen::VectorXd build_free(const FockBasis& basis) {
    Eigen::VectorXd d(basis.dim());
    for (int s = 0; s < basis.dim(); ++s) d(s) = basis.free_energy(s);
    return d;
}

Eigen::VectorXd build_momentum(const FockBasis& basis) {
    Eigen::VectorXd d(basis.dim());
    for (int s = 0; s < basis.dim(); ++s)
        d(s) = 2.0 * M_PI * basis.momentum_index(s) / basis.spec().beta;
    return d;
}

Eigen::VectorXcd circle_modes(const FockBasis& basis, const LatticeSpec& spec,
                              const std::vector<double>& g, bool project) {
    auto z = fourier_profile(spec, Axis::Time, g);
    int K = basis.spec().mode_cutoff;
    Eigen::VectorXcd out(2 * K + 1);
    double norm_all = 0.0, norm_out = 0.0;
    for (int k = 0; k < spec.nt; ++k) {
        int n = spec.tmode(k);
        norm_all += std::norm(z[k]);
        if (std::abs(n) > K) norm_out += std::norm(z[k]);
    }
    if (!project && norm_out > 1e-20 * std::max(norm_all, 1e-300))
        throw std::invalid_argument("circle_modes: profile has modes beyond the cutoff");
    for (int n = -K; n <= K; ++n) {
        int k = n >= 0 ? n : n + spec.nt;
        out(n + K) = (std::abs(n) <= spec.nt / 2 - 1) ? z[k] : cdouble(0);
    }
    return out;
}

SpMatC field_operator(const FockBasis& basis, const Eigen::VectorXcd& ghat) {
    if (ghat.size() != basis.num_modes())
        throw std::invalid_argument("field_operator: mode count mismatch");
    std::vector<Eigen::Triplet<cdouble>> trip;
    trip.reserve(static_cast<size_t>(basis.dim()) * basis.num_modes());
    for (int s = 0; s < basis.dim(); ++s) {
        for (int m = 0; m < basis.num_modes(); ++m) {
            double scale = 1.0 / std::sqrt(2.0 * basis.b(m));
            int q = basis.occ(s, m);
            if (q > 0) {
                int t = basis.shifted_index(s, m, -1);
                trip.emplace_back(t, s, std::conj(ghat(m)) * scale * std::sqrt(double(q)));
            }
            int t = basis.shifted_index(s, m, +1);
            if (t >= 0) trip.emplace_back(t, s, ghat(m) * scale * std::sqrt(double(q + 1)));
        }
    }
    SpMatC phi(basis.dim(), basis.dim());
    phi.setFromTriplets(trip.begin(), trip.end());
    return phi;
}

SpMat field_operator_real(const FockBasis& basis, const Eigen::VectorXcd& ghat) {
    SpMatC phi = field_operator(basis, ghat);
    SpMatC imag_part = SpMatC((phi - SpMatC(phi.adjoint())));
    double herm = 0.0;
    for (int k = 0; k < imag_part.outerSize(); ++k)
        for (SpMatC::InnerIterator it(imag_part, k); it; ++it) herm = std::max(herm, std::abs(it.value()));
    if (herm > 1e-12)
        throw std::invalid_argument("field_operator_real: profile is not real");
    return phi.real();
}

namespace {

// coefficient of a_m in the cutoff sharp field at circle position t
cdouble node_alpha(const FockBasis& basis, int m, double t) {
    return std::exp(cdouble(0, basis.nu(m) * t)) /
           std::sqrt(basis.spec().beta * 2.0 * basis.b(m));
}

int vc_nodes(int deg, int K) { return std::max(4 * deg * K, 8) + 1; }

SpMat realify(const SpMatC& m, const char* what) {
    double imax = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SpMatC::InnerIterator it(m, k); it; ++it)
            imax = std::max(imax, std::abs(it.value().imag()));
    if (imax > 1e-10) throw std::runtime_error(std::string(what) + ": unexpected imaginary part");
    return m.real();
}

SpMat build_vc_quadrature(const FockBasis& basis, const WickPolyD& tilde) {
    int deg = std::max(tilde.degree(), 0);
    int K = basis.spec().mode_cutoff;
    int nq = vc_nodes(deg, K);
    double beta = basis.spec().beta;
    double w = beta / nq;
    int D = basis.dim();
    SpMatC acc(D, D);
    SpMatC id(D, D);
    id.setIdentity();
    for (int qn = 0; qn < nq; ++qn) {
        double t = -beta / 2 + qn * beta / nq;
        // lowering part A of the sharp field at t
        std::vector<Eigen::Triplet<cdouble>> trip;
        for (int s = 0; s < D; ++s)
            for (int m = 0; m < basis.num_modes(); ++m) {
                int q = basis.occ(s, m);
                if (q == 0) continue;
                trip.emplace_back(basis.shifted_index(s, m, -1), s,
                                  node_alpha(basis, m, t) * std::sqrt(double(q)));
            }
        SpMatC A(D, D);
        A.setFromTriplets(trip.begin(), trip.end());
        std::vector<SpMatC> pow(deg + 1);
        pow[0] = id;
        for (int j = 1; j <= deg; ++j) pow[j] = (A * pow[j - 1]).pruned();
        SpMatC node(D, D);
        for (int k = 0; k <= deg; ++k) {
            if (tilde.coeffs[k] == 0.0) continue;
            double binom = 1.0;
            for (int r = 0; r <= k; ++r) {
                SpMatC term = SpMatC(pow[r].adjoint()) * pow[k - r];
                node += tilde.coeffs[k] * binom * term;
                binom = binom * (k - r) / (r + 1);
            }
        }
        acc += w * node;
    }
    return realify(acc.pruned(), "build_VC");
}

// multisets of `size` over `modes` modes, as occupation vectors
void enumerate_multisets(int modes, int size, std::vector<std::vector<int>>& out) {
    std::vector<int> cur(modes, 0);
    std::function<void(int, int)> rec = [&](int m, int left) {
        if (m == modes - 1) {
            cur[m] = left;
            out.push_back(cur);
            return;
        }
        for (int q = left; q >= 0; --q) {
            cur[m] = q;
            rec(m + 1, left - q);
        }
    };
    if (size == 0) {
        out.push_back(cur);
        return;
    }
    rec(0, size);
}

double multinomial(int n, const std::vector<int>& parts) {
    double v = 1.0;
    int left = n;
    for (int p : parts) {
        for (int i = 1; i <= p; ++i) v *= static_cast<double>(left - p + i) / i;
        left -= p;
    }
    return v;
}

SpMat build_vc_delta(const FockBasis& basis, const WickPolyD& tilde) {
    int deg = std::max(tilde.degree(), 0);
    int M = basis.num_modes();
    int D = basis.dim();
    double beta = basis.spec().beta;
    std::vector<Eigen::Triplet<double>> trip;
    // per-mode amplitude of the lowering part (t-independent modulus)
    std::vector<double> amp(M);
    for (int m = 0; m < M; ++m) amp[m] = 1.0 / std::sqrt(beta * 2.0 * basis.b(m));

    std::vector<std::vector<std::vector<int>>> multis(deg + 1);
    for (int sz = 0; sz <= deg; ++sz) enumerate_multisets(M, sz, multis[sz]);

    for (int k = 0; k <= deg; ++k) {
        if (k >= static_cast<int>(tilde.coeffs.size()) || tilde.coeffs[k] == 0.0) continue;
        double binom = 1.0;
        for (int r = 0; r <= k; ++r) {
            int ann = k - r;
            for (const auto& mu : multis[ann]) {
                int pmu = 0;
                double amu = multinomial(ann, mu);
                for (int m = 0; m < M; ++m) {
                    pmu += mu[m] * basis.mode_n(m);
                    for (int i = 0; i < mu[m]; ++i) amu *= amp[m];
                }
                for (const auto& ka : multis[r]) {
                    int pka = 0;
                    double aka = multinomial(r, ka);
                    for (int m = 0; m < M; ++m) {
                        pka += ka[m] * basis.mode_n(m);
                        for (int i = 0; i < ka[m]; ++i) aka *= amp[m];
                    }
                    if (pka != pmu) continue;  // t-integral kills unbalanced terms
                    double coeff = beta * tilde.coeffs[k] * binom * amu * aka;
                    // apply a^mu then a^dagger^ka to every state
                    for (int s = 0; s < D; ++s) {
                        double factor = 1.0;
                        bool ok = true;
                        for (int m = 0; m < M && ok; ++m) {
                            int q = basis.occ(s, m);
                            if (q < mu[m]) {
                                ok = false;
                                break;
                            }
                            for (int i = 0; i < mu[m]; ++i) factor *= std::sqrt(double(q - i));
                        }
                        if (!ok) continue;
                        int total_after = basis.total_quanta(s) - ann + r;
                        if (total_after > basis.spec().occupation_cap) continue;
                        // locate target state and creation factors
                        std::vector<std::uint8_t> o(M);
                        for (int m = 0; m < M; ++m)
                            o[m] = static_cast<std::uint8_t>(basis.occ(s, m) - mu[m]);
                        for (int m = 0; m < M; ++m) {
                            for (int i = 0; i < ka[m]; ++i) {
                                factor *= std::sqrt(double(o[m] + 1));
                                ++o[m];
                            }
                        }
                        // recover the index by walking shifted_index from s
                        int t = s;
                        for (int m = 0; m < M && t >= 0; ++m)
                            if (mu[m]) t = basis.shifted_index(t, m, -mu[m]);
                        for (int m = 0; m < M && t >= 0; ++m)
                            if (ka[m]) t = basis.shifted_index(t, m, +ka[m]);
                        if (t < 0) continue;
                        trip.emplace_back(t, s, coeff * factor);
                    }
                }
            }
            binom = binom * (k - r) / (r + 1);
        }
    }
    SpMat v(D, D);
    v.setFromTriplets(trip.begin(), trip.end());
    v.prune(0.0);
    return v;
}

}  // namespace

SpMat build_VC(const FockBasis& basis, const WickPolyD& poly, VcAssembly assembly) {
    if (!bounded_below(poly) && poly.degree() > 1)
        throw std::invalid_argument("build_VC: polynomial must be bounded from below");
    WickPolyD tilde = wick_reorder(poly, basis.cutoff_variance());
    if (tilde.degree() < 0) return SpMat(basis.dim(), basis.dim());
    return assembly == VcAssembly::Quadrature ? build_vc_quadrature(basis, tilde)
                                              : build_vc_delta(basis, tilde);
}

SpMat hamiltonian(const FockBasis& basis, const SpMat& vc) {
    SpMat h = vc;
    Eigen::VectorXd d = build_free(basis);
    for (int s = 0; s < basis.dim(); ++s) h.coeffRef(s, s) += d(s);
    h.makeCompressed();
    return h;
}

namespace {

// Lanczos with full reorthogonalization; returns the lowest `want` Ritz pairs.
struct LanczosResult {
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;
    int iterations = 0;
    bool converged = false;
};

LanczosResult lanczos_lowest(const SpMat& h, int want, double tol, int max_iter) {
    int n = static_cast<int>(h.rows());
    LanczosResult res;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 0.5 + uniform01(0x1A2B3C4Dull, 7, i);
    v.normalize();
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    Eigen::VectorXd w;
    int m = std::min(max_iter, n);
    for (int j = 0; j < m; ++j) {
        basis.push_back(v);
        w = h * v;
        double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (j > 0) w -= beta.back() * basis[j - 1];
        // full reorthogonalization, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) w -= u.dot(w) * u;
        double nb = w.norm();
        res.iterations = j + 1;
        bool breakdown = nb < 1e-13;
        if (!breakdown) {
            beta.push_back(nb);
            v = w / nb;
        }
        // check convergence periodically once we have enough Ritz values
        int k = j + 1;
        if (breakdown || k == m || (k >= std::max(2 * want, 8) && k % 10 == 0)) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            int have = std::min(want, k);
            bool ok = true;
            if (!breakdown && k < m) {
                for (int i = 0; i < have; ++i) {
                    double resid = std::abs(beta.back() * es.eigenvectors()(k - 1, i));
                    if (resid > tol * std::max(1.0, std::abs(es.eigenvalues()(i)))) ok = false;
                }
            }
            if (ok || breakdown || k == m) {
                res.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + have);
                res.vectors.clear();
                for (int i = 0; i < have; ++i) {
                    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                    for (int r = 0; r < k; ++r) x += es.eigenvectors()(r, i) * basis[r];
                    x.normalize();
                    res.vectors.push_back(x);
                }
                res.converged = ok || breakdown;
                return res;
            }
        }
        if (breakdown) break;
    }
    return res;
}

}  // namespace

GroundState ground_state(const SpMat& h, int dense_threshold, double tol, int max_iter) {
    GroundState gs;
    int n = static_cast<int>(h.rows());
    if (n <= dense_threshold) {
        Eigen::MatrixXd hd(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
        gs.energy = es.eigenvalues()(0);
        gs.gap = n > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : 0.0;
        gs.omega = es.eigenvectors().col(0);
        gs.converged = true;
        gs.iterations = 0;
    } else {
        LanczosResult lr = lanczos_lowest(h, 3, tol, max_iter);
        if (!lr.converged) throw std::runtime_error("ground_state: lanczos did not converge");
        gs.energy = lr.values[0];
        gs.gap = lr.values[1] - lr.values[0];
        gs.omega = lr.vectors[0];
        gs.converged = true;
        gs.iterations = lr.iterations;
    }
    if (gs.omega(0) < 0) gs.omega = -gs.omega;  // phase: positive vacuum overlap
    return gs;
}

std::vector<double> lowest_eigenvalues(const SpMat& h, int k, double tol) {
    int n = static_cast<int>(h.rows());
    if (n <= 1200) {
        Eigen::MatrixXd hd(h);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
        std::vector<double> v(std::min(k, n));
        for (size_t i = 0; i < v.size(); ++i) v[i] = es.eigenvalues()(static_cast<int>(i));
        return v;
    }
    LanczosResult lr = lanczos_lowest(h, k, tol, 600);
    if (!lr.converged) throw std::runtime_error("lowest_eigenvalues: lanczos did not converge");
    return lr.values;
}

BoundCheckReport bound_checks(const FockBasis& basis, const SpMat& h, double c_shift,
                              const std::vector<Eigen::VectorXcd>& g_family,
                              double uniformity_factor) {
    int n = static_cast<int>(h.rows());
    if (n > 2000) throw std::invalid_argument("bound_checks: dense path limited to dim <= 2000");
    Eigen::MatrixXd hd(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hd);
    if (es.eigenvalues()(0) + c_shift <= 0)
        throw std::invalid_argument("bound_checks: c_shift must make H + c positive");
    auto power = [&](double expo) {
        Eigen::VectorXd d = (es.eigenvalues().array() + c_shift).pow(expo).matrix();
        return Eigen::MatrixXd(es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose());
    };
    Eigen::MatrixXd inv_half = power(-0.5);
    Eigen::MatrixXd inv_quarter = power(-0.25);

    BoundCheckReport rep;
    rep.c_shift = c_shift;
    Eigen::VectorXd num = build_free(basis).array() + 1.0;
    {
        Eigen::MatrixXd mid = inv_half * num.asDiagonal() * inv_half;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(mid);
        rep.compactness_constant = s.eigenvalues().maxCoeff();
    }
    double m2 = basis.spec().mass * basis.spec().mass;
    for (const auto& g : g_family) {
        SpMat phi = field_operator_real(basis, g);
        Eigen::MatrixXd phid(phi);
        double nhalf = 0.0, none = 0.0;
        for (int m = 0; m < basis.num_modes(); ++m) {
            double w2 = basis.nu(m) * basis.nu(m) + m2;
            nhalf += std::norm(g(m)) / std::sqrt(w2);
            none += std::norm(g(m)) / w2;
        }
        nhalf = std::sqrt(nhalf);
        none = std::sqrt(none);
        {
            Eigen::MatrixXd mid = inv_quarter * phid * inv_quarter;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(mid);
            double c = std::max(std::abs(s.eigenvalues().minCoeff()),
                                std::abs(s.eigenvalues().maxCoeff()));
            rep.halfpower.push_back({nhalf, c / nhalf});
        }
        {
            Eigen::MatrixXd mid = inv_half * phid * inv_half;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s(mid);
            double c = std::max(std::abs(s.eigenvalues().minCoeff()),
                                std::abs(s.eigenvalues().maxCoeff()));
            rep.fullpower.push_back({none, c / none});
        }
    }
    auto ratio = [](const std::vector<OperatorBoundFit>& v) {
        double lo = 1e300, hi = 0.0;
        for (const auto& f : v) {
            lo = std::min(lo, f.constant);
            hi = std::max(hi, f.constant);
        }
        return v.empty() ? 1.0 : hi / lo;
    };
    rep.uniformity_ratio = std::max(ratio(rep.halfpower), ratio(rep.fullpower));
    rep.uniform = std::isfinite(rep.uniformity_ratio) && rep.uniformity_ratio <= uniformity_factor;
    return rep;
}

ConeCheckReport spectrum_cone_check(const FockBasis& basis, const SpMat& h, double energy_window,
                                    double eta) {
    ConeCheckReport rep;
    int n = static_cast<int>(h.rows());
    Eigen::VectorXd mom = build_momentum(basis);
    // commutator check: sum |H_ij|^2 (p_i - p_j)^2
    double comm = 0.0;
    for (int k = 0; k < h.outerSize(); ++k)
        for (SpMat::InnerIterator it(h, k); it; ++it) {
            double dp = mom(it.row()) - mom(it.col());
            comm += it.value() * it.value() * dp * dp;
        }
    rep.commutator_norm = std::sqrt(comm);
    if (rep.commutator_norm > 1e-10) {
        rep.pass = false;
        return rep;
    }
    // momentum sectors
    std::unordered_map<int, std::vector<int>> sectors;
    for (int s = 0; s < n; ++s) sectors[basis.momentum_index(s)].push_back(s);
    double e0 = 1e300;
    std::vector<std::pair<double, double>> pairs;  // (energy, momentum)
    for (const auto& [q, idx] : sectors) {
        Eigen::MatrixXd block(idx.size(), idx.size());
        for (size_t a = 0; a < idx.size(); ++a)
            for (size_t b = 0; b < idx.size(); ++b) block(a, b) = h.coeff(idx[a], idx[b]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block);
        double p = 2.0 * M_PI * q / basis.spec().beta;
        for (int i = 0; i < es.eigenvalues().size(); ++i) pairs.emplace_back(es.eigenvalues()(i), p);
        e0 = std::min(e0, es.eigenvalues()(0));
    }
    rep.pass = true;
    for (auto& [e, p] : pairs) {
        double eren = e - e0;
        if (eren > energy_window) continue;
        ConePoint pt{eren, p, std::abs(p) <= eren * (1.0 + eta) + 1e-9};
        if (!pt.inside) rep.pass = false;
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace pphi2
