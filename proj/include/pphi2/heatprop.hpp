#pragma once

#include <functional>

#include "pphi2/fock.hpp"

namespace pphi2 {

/// dU/dx = -(H + i lambda R(x)) U with H >= 0 and R(x) = phi_F(f_x).
/// The envelope maps a spatial position to the circle-mode coefficients of
/// f_x; it must vanish for |x| > support_radius.
struct PropagatorProblem {
    const FockBasis* basis = nullptr;
    SpMatC h;
    std::vector<SpMatC> lowering;  // cached annihilators a_m
    std::function<Eigen::VectorXcd(double)> envelope;
    double support_radius = 0.0;
    cdouble lambda{1.0, 0.0};

    int dim() const { return static_cast<int>(h.rows()); }
    /// out = R(x) * in  (columnwise)
    void apply_R(double x, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;
    /// out = -(H + i lambda R(x)) * u
    void apply_rhs(double x, const Eigen::MatrixXcd& u, Eigen::MatrixXcd& out) const;
    /// Dense Hermitian R(x) (test/trotter paths).
    Eigen::MatrixXcd dense_R(double x) const;
};

PropagatorProblem make_propagator_problem(const FockBasis& basis, const SpMat& h,
                                          std::function<Eigen::VectorXcd(double)> envelope,
                                          double support_radius, cdouble lambda = cdouble(1, 0));

struct OdeResult {
    Eigen::MatrixXcd u;
    int steps = 0;
    int rejected = 0;
    double tol = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integration of the heat equation from x = s
/// to x = t applied to the initial block u0 (a vector or the identity).
OdeResult solve_U(const PropagatorProblem& p, double s, double t, const Eigen::MatrixXcd& u0,
                  double tol = 1e-10);

/// Time-ordered product approximation
/// prod_{j=n-1..0} (e^{-dx H / p} e^{-i dx R(x_j) / p})^p, dense path.
Eigen::MatrixXcd trotter_U(const PropagatorProblem& p, double s, double t, int n, int steps_p);

/// (left, W_{[a,b]}(f) right) with W = U(b,a)^*; one vector solve.
cdouble w_matrix_element(const PropagatorProblem& p, double a, double b,
                         const Eigen::VectorXcd& left, const Eigen::VectorXcd& right,
                         double tol = 1e-10, OdeResult* stats = nullptr);

/// Derivatives d^k/d lambda^k (omega, U_lambda(+inf,-inf) omega) at lambda=0
/// for k = 1..nmax, via the Duhamel chain psi_k' = -H psi_k - i R psi_{k-1}
/// (psi_0 = omega, requires H omega = 0); equals the ordered-integral formula.
std::vector<cdouble> lambda_derivatives(const PropagatorProblem& p, const Eigen::VectorXd& omega,
                                        int nmax, double tol = 1e-11);

/// n-th moment route: i^n * n-th derivative; real for real envelopes.
double ordered_moment(const PropagatorProblem& p, const Eigen::VectorXd& omega, int n,
                      double tol = 1e-11);

struct ClusterBound {
    double lhs = 0.0;
    double bound = 0.0;
};

/// Appendix-style clustering: R1, R2 supported in [-T, T], H with spectral gap
/// `gap` and ground state omega; compares
/// |(O, U^inf(R1 + R2(.-t)) O) - (O, U^inf(R1) O)(O, U^inf(R2) O)|
/// against e^{-(|t|-2T) gap}.
ClusterBound clustering_bound(const FockBasis& basis, const SpMat& h, const Eigen::VectorXd& omega,
                              double gap, const std::function<Eigen::VectorXcd(double)>& env1,
                              const std::function<Eigen::VectorXcd(double)>& env2, double T,
                              double tshift, double tol = 1e-9);

/// e^{-tau H} v for symmetric positive semidefinite sparse H (Lanczos).
Eigen::VectorXd expmv(const SpMat& h, double tau, const Eigen::VectorXd& v, int krylov = 60);
Eigen::VectorXcd expmv(const SpMat& h, double tau, const Eigen::VectorXcd& v, int krylov = 60);

}  // namespace pphi2
