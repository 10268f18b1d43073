#pragma once

#include <complex>

namespace kgds {

using Complex = std::complex<double>;

struct Hyp2F1Params {
    Complex a;
    Complex b;
    Complex c;
    double z = 0.0;
};

// Below this z the power series is summed directly; above it the 1 - z expansion is used.
inline constexpr double kHyp2F1Switch = 0.5;
// |c - a - b - m| below this (m integer) selects the logarithmic 1 - z expansion.
inline constexpr double kLogCaseTolerance = 1e-8;
inline constexpr int kHyp2F1MaxTerms = 10000;

// Gauss hypergeometric function 2F1(a,b;c;z) for real z in [0,1).
// Throws InvalidParams when c is a non-positive integer or z is outside [0,1),
// NonConvergence when a series does not reach tol within kHyp2F1MaxTerms terms.
Complex gauss_2f1(const Hyp2F1Params& p, double tol = 1e-15);

// Same function with 1 - z passed separately. Callers that know 1 - z to full relative
// precision (kernel arguments close to 1) use this to avoid the cancellation in 1 - z.
Complex gauss_2f1_complement(const Hyp2F1Params& p, double one_minus_z, double tol = 1e-15);

// The two evaluation paths, exposed for cross-checks at the switch point.
Complex hyp2f1_power_series(const Hyp2F1Params& p, double tol = 1e-15);
Complex hyp2f1_complement_expansion(const Hyp2F1Params& p, double one_minus_z, double tol = 1e-15);

Complex log_gamma(Complex z);
// 1/Gamma(z); exactly zero at the poles z = 0, -1, -2, ...
Complex rgamma(Complex z);
Complex digamma(Complex z);

// True when z is within tol of a non-positive integer (imaginary part included).
bool near_nonpositive_integer(Complex z, double tol = 1e-12);

}  // namespace kgds
