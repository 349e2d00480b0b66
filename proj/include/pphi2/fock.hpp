#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <unordered_map>

#include "pphi2/lattice.hpp"
#include "pphi2/wick.hpp"

namespace pphi2 {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cdouble>;

/// Truncated bosonic Fock space over circle Matsubara modes |n| <= K with a
/// total-quanta cap N_max.  Mode m = n + K indexes n in {-K..K};
/// b_n = (nu_n^2 + mass^2)^{1/2}.
struct FockBasisSpec {
    double beta = 1.0;
    double mass = 1.0;
    int mode_cutoff = 1;     // K
    int occupation_cap = 4;  // N_max
    int hard_cap = 20000;    // refuse bigger bases
};

class FockBasis {
  public:
    explicit FockBasis(const FockBasisSpec& spec);

    const FockBasisSpec& spec() const { return spec_; }
    int dim() const { return dim_; }
    int num_modes() const { return modes_; }
    int mode_n(int m) const { return m - spec_.mode_cutoff; }
    double nu(int m) const { return 2.0 * M_PI * mode_n(m) / spec_.beta; }
    double b(int m) const { return b_[m]; }

    int occ(int state, int m) const { return occ_[static_cast<size_t>(state) * modes_ + m]; }
    int total_quanta(int state) const;
    /// Index of a modified occupation, or -1 when capped out / invalid.
    int shifted_index(int state, int m, int delta) const;
    int vacuum() const { return 0; }

    /// sum_m occ_m * n_m (momentum sector label).
    int momentum_index(int state) const;
    /// sum_m occ_m * b_m.
    double free_energy(int state) const;

    /// Vacuum variance of the cutoff sharp field phi_Lambda(t, 0):
    /// c_Lambda = sum_{|n|<=K} beta^{-1} / (2 b_n).
    double cutoff_variance() const;

    /// Annihilation operator of mode m.
    SpMat annihilator(int m) const;

  private:
    FockBasisSpec spec_;
    int modes_;
    int dim_;
    std::vector<double> b_;
    std::vector<std::uint8_t> occ_;              // dim x modes
    std::unordered_map<std::uint64_t, int> index_;
    std::uint64_t pack(const std::uint8_t* o) const;
};

/// dGamma(b): diagonal free Hamiltonian.
Eigen::VectorXd build_free(const FockBasis& basis);
/// dGamma(nu): circle momentum, diagonal.
Eigen::VectorXd build_momentum(const FockBasis& basis);

/// Circle-mode coefficients g_hat_n (n = -K..K) of a lattice circle profile;
/// throws if the profile has content beyond the cutoff unless project = true.
Eigen::VectorXcd circle_modes(const FockBasis& basis, const LatticeSpec& spec,
                              const std::vector<double>& g, bool project = false);

/// Field operator phi_F(g) = sum_n [conj(g_hat_n) (2 b_n)^{-1/2} a_n + h.c.];
/// Hermitian for real g, and
/// (Omega, phi_F(g) phi_F(h) Omega) = sum_n conj(g_hat_n) h_hat_n / (2 b_n).
SpMatC field_operator(const FockBasis& basis, const Eigen::VectorXcd& ghat);
/// Real version for profiles with g_hat_{-n} = conj(g_hat_n).
SpMat field_operator_real(const FockBasis& basis, const Eigen::VectorXcd& ghat);

enum class VcAssembly {
    MomentumDelta,  // analytic t-integral (momentum conservation); default
    Quadrature,     // n_q-point trapezoid over S_beta, n_q = max(4 deg K, 8)+1
};

/// V_C = integral over S_beta of the normal-ordered polynomial of the cutoff
/// sharp field.  `poly` carries its own Wick constant; it is reordered to the
/// cutoff variance c_Lambda internally, so the operator represents the same
/// function of the field that the lattice side evaluates.
SpMat build_VC(const FockBasis& basis, const WickPolyD& poly,
               VcAssembly assembly = VcAssembly::MomentumDelta);

/// H_C = dGamma(b) + V_C as a sparse matrix.
SpMat hamiltonian(const FockBasis& basis, const SpMat& vc);

struct GroundState {
    double energy = 0.0;         // E_C
    double gap = 0.0;            // second eigenvalue - E_C
    Eigen::VectorXd omega;       // ground vector, (omega, fock vacuum) > 0
    int iterations = 0;
    bool converged = false;
};

/// Lowest eigenpair via dense diagonalization (dim <= dense_threshold) or
/// Lanczos with full reorthogonalization.
GroundState ground_state(const SpMat& h, int dense_threshold = 1200, double tol = 1e-10,
                         int max_iter = 600);

/// k smallest eigenvalues (Lanczos / dense fallback).
std::vector<double> lowest_eigenvalues(const SpMat& h, int k, double tol = 1e-10);

struct OperatorBoundFit {
    double norm_g = 0.0;       // relevant Sobolev norm of g
    double constant = 0.0;     // fitted smallest admissible C
};

struct BoundCheckReport {
    double c_shift = 0.0;                    // the c in (H + c)
    double compactness_constant = 0.0;       // dGamma(b)+1 <= C (H+c)
    std::vector<OperatorBoundFit> halfpower; // +-phi(g) <= C ||g||_{-1/2} (H+c)^{1/2}
    std::vector<OperatorBoundFit> fullpower; // +-phi(g) <= C ||g||_{-1}   (H+c)
    bool uniform = false;                    // fitted constants bounded across family
    double uniformity_ratio = 0.0;
};

/// Fits the smallest constants in the operator inequalities relating phi_F(g)
/// and dGamma(b) to powers of (H_C + c), over a family of profiles.
/// Dense functional calculus; dim <= 2000.
BoundCheckReport bound_checks(const FockBasis& basis, const SpMat& h, double c_shift,
                              const std::vector<Eigen::VectorXcd>& g_family,
                              double uniformity_factor = 10.0);

struct ConePoint {
    double energy = 0.0;    // renormalized
    double momentum = 0.0;
    bool inside = false;
};

struct ConeCheckReport {
    double commutator_norm = 0.0;  // ||[H, P]||_F, should vanish
    std::vector<ConePoint> points;
    bool pass = false;
};

/// Joint spectrum of (H_C^ren, P_C) below an energy window; asserts
/// |p| <= e (1 + eta).  H must commute with the momentum (checked).
ConeCheckReport spectrum_cone_check(const FockBasis& basis, const SpMat& h, double energy_window,
                                    double eta = 0.1);

}  // namespace pphi2
