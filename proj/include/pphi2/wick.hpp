#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace pphi2 {

/// Polynomial in a single field variable together with the covariance
/// constant it is Wick ordered against.  coeffs[k] multiplies :phi^k:_c;
/// c = 0 means plain monomials.  Coeff is double (hot paths) or mpq_class
/// (exact reordering algebra).
template <class Coeff>
struct WickPolynomial {
    std::vector<Coeff> coeffs;
    Coeff wick_constant{};

    int degree() const {
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
            if (coeffs[k] != Coeff(0)) return k;
        return -1;
    }
};

using WickPolyD = WickPolynomial<double>;
using WickPolyQ = WickPolynomial<mpq_class>;

/// :phi^n:_c expanded in plain monomials,
/// sum_{m<=n/2} n!/(m!(n-2m)!) (-c/2)^m phi^{n-2m}.
WickPolyD wick_order(int n, double c);
WickPolyQ wick_order(int n, const mpq_class& c);

/// Re-express P (ordered against c_from) in the Wick basis of c_to; the same
/// function of phi, degree preserved.
WickPolyD wick_reorder(const WickPolyD& p, double c_to);
WickPolyQ wick_reorder(const WickPolyQ& p, const mpq_class& c_to);

/// E[:phi(f)^n:_C :phi(g)^m:_C] = delta_{nm} n! C(f,g)^n under dphi_C.
double wick_pairing(int n, int m, double cfg);

/// Evaluate sum_k coeffs[k] :x^k:_c at a field value via the recurrence
/// :x^{k+1}: = x :x^k: - k c :x^{k-1}:.
double wick_eval(const WickPolyD& p, double x);

/// :x^n:_c at a point (same recurrence).
double wick_power_eval(int n, double c, double x);

/// Parse "1*x^4 + 0.5*x^2 - 3" style strings into a plain polynomial
/// (wick_constant 0).  Grammar: sum of terms [coeff][*][x[^k]] with
/// optional signs; coeff is any double literal; "x" alone means x^1.
WickPolyD parse_polynomial(const std::string& text);

/// True when deg is even and the leading coefficient is positive
/// (admissible interaction).
bool bounded_below(const WickPolyD& p);

}  // namespace pphi2
