#include "kgds/special_functions.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_psi.h>

#include "kgds/error.hpp"

namespace kgds {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

void silence_gsl() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

bool is_exact_pole(Complex z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

Complex snap_if_polynomial(Complex v) {
    if (near_nonpositive_integer(v)) return Complex(std::round(v.real()), 0.0);
    return v;
}

std::string describe(const Hyp2F1Params& p) {
    std::ostringstream os;
    os.precision(17);
    os << "2F1(a=" << p.a << ", b=" << p.b << ", c=" << p.c << ", z=" << p.z << ")";
    return os.str();
}

// Sum_k (a)_k (b)_k / ((c)_k k!) x^k. Terminates exactly when a term vanishes.
Complex sum_series(Complex a, Complex b, Complex c, double x, double tol, const Hyp2F1Params& origin) {
    Complex sum = 1.0;
    Complex term = 1.0;
    if (x == 0.0) return sum;
    int small = 0;
    for (int k = 0; k < kHyp2F1MaxTerms; ++k) {
        double kd = static_cast<double>(k);
        term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * x;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= tol * std::abs(sum)) {
            if (++small >= 2) return sum;
        } else {
            small = 0;
        }
    }
    fail(ErrorKind::NonConvergence, "power series did not converge for " + describe(origin));
}

// c = a + b + m with integer m >= 0, w = 1 - z <= 1/2 (logarithmic case of the 1 - z expansion).
Complex log_case(Complex a, Complex b, int m, double w, double tol, const Hyp2F1Params& origin) {
    Complex c = a + b + static_cast<double>(m);
    double md = static_cast<double>(m);

    Complex finite = 0.0;
    if (m > 0) {
        Complex poch = 1.0;
        double fact_ratio = std::tgamma(md);  // (m-k-1)!/k! at k = 0
        double mw = -w;
        double mw_pow = 1.0;
        for (int k = 0; k < m; ++k) {
            finite += poch * fact_ratio * mw_pow;
            double kd = static_cast<double>(k);
            poch *= (a + kd) * (b + kd);
            if (k + 1 < m) fact_ratio *= 1.0 / ((md - kd - 1.0) * (kd + 1.0));
            mw_pow *= mw;
        }
    }

    double log_w = std::log(w);
    Complex psi_a = digamma(a + md);
    Complex psi_b = digamma(b + md);
    double psi_k1 = -kEulerGamma;  // psi(k+1)
    double psi_km1 = -kEulerGamma; // psi(k+m+1)
    for (int j = 1; j <= m; ++j) psi_km1 += 1.0 / j;
    double coeff = 1.0 / std::tgamma(md + 1.0);
    Complex p = coeff;
    Complex tail = 0.0;
    int small = 0;
    bool done = false;
    for (int k = 0; k < kHyp2F1MaxTerms; ++k) {
        double kd = static_cast<double>(k);
        Complex bracket = log_w - psi_k1 - psi_km1 + psi_a + psi_b;
        Complex term = p * bracket;
        tail += term;
        if (p == 0.0) {
            done = true;
            break;
        }
        if (std::abs(term) <= tol * std::abs(tail)) {
            if (++small >= 2) {
                done = true;
                break;
            }
        } else {
            small = 0;
        }
        p *= (a + md + kd) * (b + md + kd) / ((kd + 1.0) * (kd + md + 1.0)) * w;
        psi_k1 += 1.0 / (kd + 1.0);
        psi_km1 += 1.0 / (kd + md + 1.0);
        psi_a += 1.0 / (a + md + kd);
        psi_b += 1.0 / (b + md + kd);
    }
    if (!done) fail(ErrorKind::NonConvergence, "logarithmic expansion did not converge for " + describe(origin));

    Complex gamma_c = std::exp(log_gamma(c));
    Complex first = rgamma(a + md) * rgamma(b + md) * finite;
    Complex second = std::pow(-w, m) * rgamma(a) * rgamma(b) * tail;
    return gamma_c * (first - second);
}

void validate(const Hyp2F1Params& p, double one_minus_z, double tol) {
    if (!(tol > 0.0)) fail(ErrorKind::InvalidParams, "tolerance must be positive");
    if (near_nonpositive_integer(p.c, 1e-14))
        fail(ErrorKind::InvalidParams, "c is a non-positive integer in " + describe(p));
    // z itself may round to 1 when the caller supplies a positive 1 - z.
    if (!(p.z >= 0.0 && p.z <= 1.0) || !(one_minus_z > 0.0 && one_minus_z <= 1.0))
        fail(ErrorKind::InvalidParams, "z must lie in [0,1) for " + describe(p));
}

Complex general_expansion(Complex a, Complex b, Complex c, double w, double tol, const Hyp2F1Params& origin) {
    Complex cab = c - a - b;
    Complex log_gc = log_gamma(c);
    Complex first = 0.0;
    Complex r1 = rgamma(c - a) * rgamma(c - b);
    if (r1 != 0.0) {
        first = std::exp(log_gc + log_gamma(cab)) * r1 * sum_series(a, b, 1.0 - cab, w, tol, origin);
    }
    Complex second = 0.0;
    Complex r2 = rgamma(a) * rgamma(b);
    if (r2 != 0.0) {
        second = std::exp(log_gc + log_gamma(-cab) + cab * std::log(w)) * r2 *
                 sum_series(c - a, c - b, 1.0 + cab, w, tol, origin);
    }
    return first + second;
}

// c = a + b + m exactly.
Complex integer_gap_expansion(Complex a, Complex b, int m, double w, double tol, const Hyp2F1Params& origin) {
    if (m < 0) {
        // Euler transformation moves the integer gap to -m > 0.
        Complex c = a + b + static_cast<double>(m);
        Complex factor = std::exp(static_cast<double>(m) * std::log(w));
        return factor * log_case(c - a, c - b, -m, w, tol, origin);
    }
    return log_case(a, b, m, w, tol, origin);
}

Complex complement_expansion(Complex a, Complex b, Complex c, double w, double tol, const Hyp2F1Params& origin) {
    Complex cab = c - a - b;
    double m_round = std::round(cab.real());
    Complex delta = cab - Complex(m_round, 0.0);
    if (std::abs(delta) >= kLogCaseTolerance) return general_expansion(a, b, c, w, tol, origin);
    int m = static_cast<int>(m_round);
    Complex exact = integer_gap_expansion(a, b, m, w, tol, origin);
    if (delta == 0.0) return exact;
    // Off the integer by delta: quadratic interpolation in c through the integer-gap value at
    // c - delta and general-formula values at c - delta +- h, where the cancellation is mild.
    const double h = 1e-4;
    Complex up = general_expansion(a, b, c - delta + h, w, tol, origin);
    Complex down = general_expansion(a, b, c - delta - h, w, tol, origin);
    Complex tau = delta / h;
    return (1.0 - tau * tau) * exact + 0.5 * tau * (tau + 1.0) * up + 0.5 * tau * (tau - 1.0) * down;
}

}  // namespace

bool near_nonpositive_integer(Complex z, double tol) {
    double r = std::round(z.real());
    return r <= 0.0 && std::abs(z.real() - r) < tol && std::abs(z.imag()) < tol;
}

Complex log_gamma(Complex z) {
    silence_gsl();
    gsl_sf_result lnr;
    gsl_sf_result arg;
    int status = gsl_sf_lngamma_complex_e(z.real(), z.imag(), &lnr, &arg);
    if (status != GSL_SUCCESS) {
        std::ostringstream os;
        os << "log_gamma undefined at " << z;
        fail(ErrorKind::DomainViolation, os.str());
    }
    return {lnr.val, arg.val};
}

Complex rgamma(Complex z) {
    if (is_exact_pole(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

Complex digamma(Complex z) {
    silence_gsl();
    if (is_exact_pole(z)) {
        std::ostringstream os;
        os << "digamma pole at " << z;
        fail(ErrorKind::DomainViolation, os.str());
    }
    gsl_sf_result re;
    gsl_sf_result im;
    if (z.imag() == 0.0) {
        int status = gsl_sf_psi_e(z.real(), &re);
        if (status != GSL_SUCCESS) fail(ErrorKind::DomainViolation, "digamma failed");
        return {re.val, 0.0};
    }
    int status = gsl_sf_complex_psi_e(z.real(), z.imag(), &re, &im);
    if (status != GSL_SUCCESS) fail(ErrorKind::DomainViolation, "digamma failed");
    return {re.val, im.val};
}

Complex hyp2f1_power_series(const Hyp2F1Params& p, double tol) {
    validate(p, 1.0 - p.z, tol);
    return sum_series(snap_if_polynomial(p.a), snap_if_polynomial(p.b), p.c, p.z, tol, p);
}

Complex hyp2f1_complement_expansion(const Hyp2F1Params& p, double one_minus_z, double tol) {
    validate(p, one_minus_z, tol);
    if (near_nonpositive_integer(p.a) || near_nonpositive_integer(p.b))
        return sum_series(snap_if_polynomial(p.a), snap_if_polynomial(p.b), p.c, p.z, tol, p);
    return complement_expansion(p.a, p.b, p.c, one_minus_z, tol, p);
}

Complex gauss_2f1_complement(const Hyp2F1Params& p, double one_minus_z, double tol) {
    validate(p, one_minus_z, tol);
    if (p.z == 0.0) return 1.0;
    Complex a = snap_if_polynomial(p.a);
    Complex b = snap_if_polynomial(p.b);
    bool polynomial = near_nonpositive_integer(a) || near_nonpositive_integer(b);
    if (polynomial || p.z <= kHyp2F1Switch) return sum_series(a, b, p.c, p.z, tol, p);
    return complement_expansion(a, b, p.c, one_minus_z, tol, p);
}

Complex gauss_2f1(const Hyp2F1Params& p, double tol) { return gauss_2f1_complement(p, 1.0 - p.z, tol); }

}  // namespace kgds
