#include "pphi2/wick.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace pphi2 {

namespace {

// :phi^n:_{c_from} = sum_m n!/(m!(n-2m)!) ((c_to - c_from)/2)^m :phi^{n-2m}:_{c_to}
template <class Coeff>
WickPolynomial<Coeff> reorder_impl(const WickPolynomial<Coeff>& p, const Coeff& c_to) {
    int deg = p.degree();
    WickPolynomial<Coeff> out;
    out.wick_constant = c_to;
    out.coeffs.assign(deg < 0 ? 1 : deg + 1, Coeff(0));
    if (deg < 0) return out;
    Coeff half_shift = (c_to - p.wick_constant) / 2;
    for (int n = 0; n <= deg; ++n) {
        if (p.coeffs[n] == Coeff(0)) continue;
        Coeff term = p.coeffs[n];  // m = 0: n!/(0!(n)!) = 1
        for (int m = 0; 2 * m <= n; ++m) {
            out.coeffs[n - 2 * m] += term;
            // ratio from m to m+1: (n-2m)(n-2m-1)/(m+1) * shift
            Coeff num = Coeff((n - 2 * m) * (n - 2 * m - 1)) * half_shift;
            term = term * num / Coeff(m + 1);
        }
    }
    return out;
}

template <class Coeff>
WickPolynomial<Coeff> order_impl(int n, const Coeff& c) {
    if (n < 0) throw std::invalid_argument("wick_order: n must be >= 0");
    WickPolynomial<Coeff> p;
    p.wick_constant = c;
    p.coeffs.assign(n + 1, Coeff(0));
    p.coeffs[n] = Coeff(1);
    return reorder_impl(p, Coeff(0));
}

}  // namespace

WickPolyD wick_order(int n, double c) { return order_impl<double>(n, c); }
WickPolyQ wick_order(int n, const mpq_class& c) { return order_impl<mpq_class>(n, c); }

WickPolyD wick_reorder(const WickPolyD& p, double c_to) { return reorder_impl(p, c_to); }
WickPolyQ wick_reorder(const WickPolyQ& p, const mpq_class& c_to) { return reorder_impl(p, c_to); }

double wick_pairing(int n, int m, double cfg) {
    if (n < 0 || m < 0) throw std::invalid_argument("wick_pairing: negative degree");
    if (n != m) return 0.0;
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    return fact * std::pow(cfg, n);
}

double wick_eval(const WickPolyD& p, double x) {
    double hm1 = 0.0, h = 1.0;  // :x^0: = 1
    double acc = p.coeffs.empty() ? 0.0 : p.coeffs[0];
    for (int k = 1; k < static_cast<int>(p.coeffs.size()); ++k) {
        double hp = x * h - (k - 1) * p.wick_constant * hm1;
        hm1 = h;
        h = hp;
        acc += p.coeffs[k] * h;
    }
    return acc;
}

double wick_power_eval(int n, double c, double x) {
    double hm1 = 0.0, h = 1.0;
    for (int k = 1; k <= n; ++k) {
        double hp = x * h - (k - 1) * c * hm1;
        hm1 = h;
        h = hp;
    }
    return h;
}

WickPolyD parse_polynomial(const std::string& text) {
    WickPolyD p;
    p.wick_constant = 0.0;
    size_t i = 0;
    auto skip = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip();
    if (i == text.size()) throw std::invalid_argument("polynomial: empty input");
    while (i < text.size()) {
        double sign = 1.0;
        skip();
        while (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            if (text[i] == '-') sign = -sign;
            ++i;
            skip();
        }
        if (i == text.size()) throw std::invalid_argument("polynomial: dangling sign");
        double coeff = 1.0;
        bool have_coeff = false;
        if (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.') {
            size_t used = 0;
            coeff = std::stod(text.substr(i), &used);
            i += used;
            have_coeff = true;
            skip();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip();
            }
        }
        int power = 0;
        if (i < text.size() && text[i] == 'x') {
            ++i;
            power = 1;
            skip();
            if (i < text.size() && text[i] == '^') {
                ++i;
                skip();
                if (i == text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
                    throw std::invalid_argument("polynomial: missing exponent");
                size_t used = 0;
                power = std::stoi(text.substr(i), &used);
                i += used;
            }
        } else if (!have_coeff) {
            throw std::invalid_argument("polynomial: expected coefficient or x");
        }
        if (static_cast<int>(p.coeffs.size()) <= power) p.coeffs.resize(power + 1, 0.0);
        p.coeffs[power] += sign * coeff;
        skip();
    }
    return p;
}

bool bounded_below(const WickPolyD& p) {
    int deg = p.degree();
    if (deg < 0) return true;   // zero polynomial
    if (deg == 0) return true;  // constant
    return deg % 2 == 0 && p.coeffs[deg] > 0;
}

}  // namespace pphi2
