#include "pphi2/heatprop.hpp"

#include <cmath>

namespace pphi2 {

void PropagatorProblem::apply_R(double x, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
    out.setZero();
    if (std::abs(x) > support_radius) return;
    Eigen::VectorXcd g = envelope(x);
    for (int m = 0; m < static_cast<int>(lowering.size()); ++m) {
        if (g(m) == cdouble(0)) continue;
        double scale = 1.0 / std::sqrt(2.0 * basis->b(m));
        cdouble clow = std::conj(g(m)) * scale;
        cdouble craise = g(m) * scale;
        out.noalias() += clow * (lowering[m] * in);
        out.noalias() += craise * (lowering[m].adjoint() * in);
    }
}

void PropagatorProblem::apply_rhs(double x, const Eigen::MatrixXcd& u, Eigen::MatrixXcd& out) const {
    out.noalias() = -(h * u);
    if (lambda != cdouble(0) && std::abs(x) <= support_radius) {
        Eigen::MatrixXcd r(u.rows(), u.cols());
        apply_R(x, u, r);
        out.noalias() -= cdouble(0, 1) * lambda * r;
    }
}

Eigen::MatrixXcd PropagatorProblem::dense_R(double x) const {
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim(), dim());
    Eigen::MatrixXcd out(dim(), dim());
    apply_R(x, id, out);
    return out;
}

PropagatorProblem make_propagator_problem(const FockBasis& basis, const SpMat& h,
                                          std::function<Eigen::VectorXcd(double)> envelope,
                                          double support_radius, cdouble lambda) {
    PropagatorProblem p;
    p.basis = &basis;
    p.h = h.cast<cdouble>();
    p.lowering.reserve(basis.num_modes());
    for (int m = 0; m < basis.num_modes(); ++m) p.lowering.push_back(basis.annihilator(m).cast<cdouble>());
    p.envelope = std::move(envelope);
    p.support_radius = support_radius;
    p.lambda = lambda;
    return p;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult solve_U(const PropagatorProblem& p, double s, double t, const Eigen::MatrixXcd& u0,
                  double tol) {
    if (t < s) throw std::invalid_argument("solve_U: requires s <= t");
    OdeResult res;
    res.tol = tol;
    res.u = u0;
    if (t == s) return res;
    Eigen::MatrixXcd u = u0;
    int rows = static_cast<int>(u.rows()), cols = static_cast<int>(u.cols());
    Eigen::MatrixXcd k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols),
        k5(rows, cols), k6(rows, cols), k7(rows, cols), utmp(rows, cols), unew(rows, cols);

    // initial step from the scale of H
    double hscale = 1.0;
    for (int k = 0; k < p.h.outerSize(); ++k)
        for (SpMatC::InnerIterator it(p.h, k); it; ++it)
            if (it.row() == it.col()) hscale = std::max(hscale, std::abs(it.value()));
    double x = s;
    double dx = std::min((t - s) * 0.1, 1.0 / hscale);
    bool have_k1 = false;
    double unorm_floor = std::max(1.0, u.cwiseAbs().maxCoeff());
    while (x < t) {
        dx = std::min(dx, t - x);
        if (dx < 1e-14 * std::max(1.0, std::abs(t - s)))
            throw std::runtime_error("solve_U: step underflow (stiff problem; split the interval)");
        if (!have_k1) {
            p.apply_rhs(x, u, k1);
            have_k1 = true;
        }
        utmp = u + dx * (a21 * k1);
        p.apply_rhs(x + c2 * dx, utmp, k2);
        utmp = u + dx * (a31 * k1 + a32 * k2);
        p.apply_rhs(x + c3 * dx, utmp, k3);
        utmp = u + dx * (a41 * k1 + a42 * k2 + a43 * k3);
        p.apply_rhs(x + c4 * dx, utmp, k4);
        utmp = u + dx * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        p.apply_rhs(x + c5 * dx, utmp, k5);
        utmp = u + dx * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        p.apply_rhs(x + dx, utmp, k6);
        unew = u + dx * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        p.apply_rhs(x + dx, unew, k7);
        double err = (dx * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7))
                         .cwiseAbs()
                         .maxCoeff();
        double scale = tol * std::max(unorm_floor, std::max(u.cwiseAbs().maxCoeff(),
                                                            unew.cwiseAbs().maxCoeff()));
        if (err <= scale) {
            x += dx;
            u.swap(unew);
            k1.swap(k7);  // FSAL
            ++res.steps;
        } else {
            ++res.rejected;
            have_k1 = true;  // k1 still valid at x
        }
        double ratio = err > 0 ? std::pow(scale / err, 0.2) : 5.0;
        dx *= std::min(5.0, std::max(0.2, 0.9 * ratio));
    }
    res.u = u;
    return res;
}

Eigen::MatrixXcd trotter_U(const PropagatorProblem& p, double s, double t, int n, int steps_p) {
    int d = p.dim();
    if (n < 1 || steps_p < 1) throw std::invalid_argument("trotter_U: n, p must be >= 1");
    if (p.lambda.imag() != 0.0)
        throw std::invalid_argument("trotter_U: requires real lambda (selfadjoint R)");
    Eigen::MatrixXd hd = Eigen::MatrixXd(p.h.real());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(hd);
    double dx = (t - s) / n;
    Eigen::VectorXd exph = (-dx / steps_p * eh.eigenvalues().array()).exp();
    Eigen::MatrixXd eH = eh.eigenvectors() * exph.asDiagonal() * eh.eigenvectors().transpose();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    for (int j = 0; j < n; ++j) {
        double xj = s + j * dx;
        Eigen::MatrixXcd r = p.dense_R(xj);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> er(r);
        Eigen::VectorXcd phase(d);
        for (int i = 0; i < d; ++i)
            phase(i) = std::exp(cdouble(0, -(dx / steps_p) * (p.lambda.real() * er.eigenvalues()(i))));
        Eigen::MatrixXcd eR = er.eigenvectors() * phase.asDiagonal() * er.eigenvectors().adjoint();
        Eigen::MatrixXcd factor = eH * eR;
        Eigen::MatrixXcd block = factor;
        for (int q = 1; q < steps_p; ++q) block = factor * block;
        u = block * u;  // later factors act on the left
    }
    return u;
}

cdouble w_matrix_element(const PropagatorProblem& p, double a, double b,
                         const Eigen::VectorXcd& left, const Eigen::VectorXcd& right, double tol,
                         OdeResult* stats) {
    OdeResult r = solve_U(p, a, b, left, tol);
    if (stats) *stats = r;
    return r.u.col(0).dot(right);
}

std::vector<cdouble> lambda_derivatives(const PropagatorProblem& p, const Eigen::VectorXd& omega,
                                        int nmax, double tol) {
    if (nmax < 1 || nmax > 3) throw std::invalid_argument("lambda_derivatives: order must be 1..3");
    int d = p.dim();
    // residual of H omega = 0
    Eigen::VectorXcd oc = omega.cast<cdouble>();
    if ((p.h * oc).norm() > 1e-8 * std::max(1.0, oc.norm()))
        throw std::invalid_argument("lambda_derivatives: omega must be the H-kernel vector");
    // Duhamel chain solved as one block ODE; psi_0 = omega is constant.
    struct ChainProblem {
        const PropagatorProblem* base;
        const Eigen::VectorXcd* omega;
        int nmax;
    } chain{&p, &oc, nmax};
    double r = p.support_radius;
    auto rhs = [&](double x, const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
        out.noalias() = -(chain.base->h * in);
        Eigen::MatrixXcd prev(d, chain.nmax);
        prev.col(0) = *chain.omega;
        for (int k = 1; k < chain.nmax; ++k) prev.col(k) = in.col(k - 1);
        Eigen::MatrixXcd rprev(d, chain.nmax);
        chain.base->apply_R(x, prev, rprev);
        out.noalias() -= cdouble(0, 1) * rprev;
    };
    // DOPRI loop (same tableau as solve_U)
    double s = -r, tend = r;
    double x = s;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, nmax);
    Eigen::MatrixXcd k1(d, nmax), k2(d, nmax), k3(d, nmax), k4(d, nmax), k5(d, nmax),
                    k6(d, nmax), k7(d, nmax), utmp(d, nmax), unew(d, nmax);
    double hscale = 1.0;
    for (int k = 0; k < p.h.outerSize(); ++k)
        for (SpMatC::InnerIterator it(p.h, k); it; ++it)
            if (it.row() == it.col()) hscale = std::max(hscale, std::abs(it.value()));
    double dx = std::min((tend - s) * 0.05, 1.0 / hscale);
    bool have_k1 = false;
    while (x < tend) {
        dx = std::min(dx, tend - x);
        if (dx < 1e-15 * (tend - s)) throw std::runtime_error("lambda_derivatives: step underflow");
        if (!have_k1) {
            rhs(x, u, k1);
            have_k1 = true;
        }
        utmp = u + dx * (a21 * k1);
        rhs(x + c2 * dx, utmp, k2);
        utmp = u + dx * (a31 * k1 + a32 * k2);
        rhs(x + c3 * dx, utmp, k3);
        utmp = u + dx * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(x + c4 * dx, utmp, k4);
        utmp = u + dx * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(x + c5 * dx, utmp, k5);
        utmp = u + dx * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(x + dx, utmp, k6);
        unew = u + dx * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(x + dx, unew, k7);
        double err = (dx * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7))
                         .cwiseAbs()
                         .maxCoeff();
        double scale = tol * std::max(1.0, std::max(u.cwiseAbs().maxCoeff(), unew.cwiseAbs().maxCoeff()));
        if (err <= scale) {
            x += dx;
            u.swap(unew);
            k1.swap(k7);
        } else {
            have_k1 = true;
        }
        double ratio = err > 0 ? std::pow(scale / err, 0.2) : 5.0;
        dx *= std::min(5.0, std::max(0.2, 0.9 * ratio));
    }
    std::vector<cdouble> out(nmax);
    double fact = 1.0;
    for (int k = 1; k <= nmax; ++k) {
        fact *= k;
        out[k - 1] = fact * oc.dot(u.col(k - 1));
    }
    return out;
}

double ordered_moment(const PropagatorProblem& p, const Eigen::VectorXd& omega, int n, double tol) {
    auto d = lambda_derivatives(p, omega, n, tol);
    cdouble val = std::pow(cdouble(0, 1), n) * d[n - 1];
    if (std::abs(val.imag()) > 1e-6 * std::max(1.0, std::abs(val.real())))
        throw std::runtime_error("ordered_moment: unexpected imaginary part");
    return val.real();
}

ClusterBound clustering_bound(const FockBasis& basis, const SpMat& h, const Eigen::VectorXd& omega,
                              double gap, const std::function<Eigen::VectorXcd(double)>& env1,
                              const std::function<Eigen::VectorXcd(double)>& env2, double T,
                              double tshift, double tol) {
    if (!(gap > 0)) throw std::invalid_argument("clustering_bound: gap must be > 0");
    Eigen::VectorXcd oc = omega.cast<cdouble>();
    double pad = 0.5;
    auto value = [&](const std::function<Eigen::VectorXcd(double)>& env, double lo, double hi) {
        PropagatorProblem p = make_propagator_problem(basis, h, env, std::max(std::abs(lo), std::abs(hi)), cdouble(1, 0));
        OdeResult r = solve_U(p, lo, hi, oc, tol);
        return oc.dot(r.u.col(0));
    };
    cdouble v1 = value(env1, -T - pad, T + pad);
    cdouble v2 = value(env2, -T - pad, T + pad);
    auto sum_env = [&](double x) -> Eigen::VectorXcd {
        Eigen::VectorXcd g = env1(x);
        g += env2(x - tshift);
        return g;
    };
    double lo = -T - pad, hi = tshift + T + pad;
    cdouble v12 = value(sum_env, std::min(lo, -T - pad), std::max(hi, T + pad));
    ClusterBound out;
    out.lhs = std::abs(v12 - v1 * v2);
    out.bound = std::exp(-(std::abs(tshift) - 2.0 * T) * gap);
    return out;
}

namespace {

Eigen::VectorXd expmv_impl(const SpMat& h, double tau, const Eigen::VectorXd& v, int krylov) {
    double nv = v.norm();
    if (nv == 0) return v;
    int n = static_cast<int>(h.rows());
    int m = std::min(krylov, n);
    Eigen::MatrixXd V(n, m);
    Eigen::VectorXd alpha(m), beta(m);
    V.col(0) = v / nv;
    int used = m;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = h * V.col(j);
        alpha(j) = V.col(j).dot(w);
        w -= alpha(j) * V.col(j);
        if (j > 0) w -= beta(j - 1) * V.col(j - 1);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i) w -= V.col(i).dot(w) * V.col(i);
        double nb = w.norm();
        if (j + 1 < m) {
            if (nb < 1e-13) {
                used = j + 1;
                break;
            }
            beta(j) = nb;
            V.col(j + 1) = w / nb;
        }
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(used, used);
    for (int i = 0; i < used; ++i) {
        T(i, i) = alpha(i);
        if (i + 1 < used) T(i, i + 1) = T(i + 1, i) = beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    Eigen::VectorXd expt =
        (es.eigenvectors() *
         ((-tau * es.eigenvalues().array()).exp().matrix().asDiagonal() *
          es.eigenvectors().transpose().col(0)))
            .eval();
    return nv * V.leftCols(used) * expt;
}

}  // namespace

Eigen::VectorXd expmv(const SpMat& h, double tau, const Eigen::VectorXd& v, int krylov) {
    return expmv_impl(h, tau, v, krylov);
}

Eigen::VectorXcd expmv(const SpMat& h, double tau, const Eigen::VectorXcd& v, int krylov) {
    Eigen::VectorXd re = expmv_impl(h, tau, v.real(), krylov);
    Eigen::VectorXd im = expmv_impl(h, tau, v.imag(), krylov);
    return re.cast<cdouble>() + cdouble(0, 1) * im.cast<cdouble>();
}

}  // namespace pphi2
