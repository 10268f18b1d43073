#include "kgds/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgds/error.hpp"

namespace kgds {

namespace {

const double kLog4 = std::log(4.0);

void check_times(double t, double b, double H) {
    if (!(H > 0.0)) fail(ErrorKind::InvalidParams, "kernels need H > 0");
    if (!(b >= 0.0) || !(t >= b) || !std::isfinite(t)) {
        std::ostringstream os;
        os << "kernel times need 0 <= b <= t, got t=" << t << " b=" << b;
        fail(ErrorKind::DomainViolation, os.str());
    }
}

Complex hyp(Complex a, Complex b, double c, const ConeGeometry& g) {
    return gauss_2f1_complement(Hyp2F1Params{a, b, Complex(c, 0.0), g.zeta}, g.one_minus_zeta);
}

KernelEval pack(const ConeGeometry& g, double t, double b, Complex value) {
    KernelEval e;
    e.r = g.r;
    e.t = t;
    e.b = b;
    e.value = value;
    e.zeta = g.zeta;
    return e;
}

// 4^{-mu} e^{M (b + t)} Q^{mu - 1/2}
Complex prefactor(const ConeGeometry& g, double t, double b, Complex M, double H) {
    Complex mu = M / H;
    return std::exp(-mu * kLog4 + M * (b + t) + (mu - 0.5) * std::log(g.Q));
}

}  // namespace

std::string_view to_string(MassRegime regime) {
    switch (regime) {
        case MassRegime::LargeMass: return "LargeMass";
        case MassRegime::SmallLight: return "SmallLight";
        case MassRegime::Critical: return "Critical";
        case MassRegime::Intermediate: return "Intermediate";
        case MassRegime::Supercritical: return "Supercritical";
    }
    return "Unknown";
}

MassRegime classify_mass(Complex M, double H) {
    double re = M.real();
    if (re <= 1e-14 * H) return MassRegime::LargeMass;
    if (std::abs(M - Complex(0.5 * H, 0.0)) <= 1e-12 * H) return MassRegime::Critical;
    if (re < 0.5 * H) return MassRegime::SmallLight;
    if (re <= 1.5 * H) return MassRegime::Intermediate;
    return MassRegime::Supercritical;
}

CurvedMass CurvedMass::from_mu_sq(double mu_sq, double H) {
    CurvedMass m;
    m.mu_sq = mu_sq;
    m.M = mu_sq >= 0.0 ? Complex(std::sqrt(mu_sq), 0.0) : Complex(0.0, std::sqrt(-mu_sq));
    m.regime = classify_mass(m.M, H);
    return m;
}

CurvedMass CurvedMass::from_value(Complex M, double H) {
    CurvedMass m;
    m.M = M;
    m.mu_sq = (M * M).real();
    m.regime = classify_mass(M, H);
    return m;
}

double phi(double t, double H) { return -std::expm1(-H * t) / H; }

ConeGeometry cone_from_gap(double gap, double t, double b, double H) {
    check_times(t, b, H);
    ConeGeometry g;
    g.beta = std::exp(-H * b);
    g.tau = std::exp(-H * t);
    g.A = -g.beta * std::expm1(-H * (t - b));
    double hd = H * gap;
    if (!(gap >= 0.0) || hd > g.A * (1.0 + 1e-14)) {
        std::ostringstream os;
        os << "point outside the cone: gap=" << gap << " cone length=" << g.A / H;
        fail(ErrorKind::DomainViolation, os.str());
    }
    hd = std::min(hd, g.A);
    g.gap = hd / H;
    g.y = g.A - hd;
    g.r = g.y / H;
    double B = g.beta + g.tau;
    g.P = hd * (g.A + g.y);
    g.Q = (2.0 * g.tau + hd) * (B + g.y);
    if (!(g.Q > 0.0)) fail(ErrorKind::DomainViolation, "light-cone factor is not positive");
    g.zeta = g.P / g.Q;
    g.one_minus_zeta = 4.0 * g.beta * g.tau / g.Q;
    return g;
}

ConeGeometry cone_from_radius(double r, double t, double b, double H) {
    check_times(t, b, H);
    double length = -std::exp(-H * b) * std::expm1(-H * (t - b)) / H;
    if (!(r >= 0.0)) fail(ErrorKind::DomainViolation, "negative radius");
    double gap = length - r;
    if (gap < 0.0) {
        if (gap < -1e-13 * std::max(length, 1e-300)) {
            std::ostringstream os;
            os << "radius " << r << " beyond the cone edge " << length;
            fail(ErrorKind::DomainViolation, os.str());
        }
        gap = 0.0;
    }
    return cone_from_gap(gap, t, b, H);
}

Complex kernel_E(const ConeGeometry& g, double t, double b, const CurvedMass& M, double H) {
    Complex a = 0.5 - M.M / H;
    return prefactor(g, t, b, M.M, H) * hyp(a, a, 1.0, g);
}

Complex kernel_K0(const ConeGeometry& g, double t, const CurvedMass& M, double H) {
    Complex mu = M.M / H;
    Complex a = 0.5 - mu;
    Complex pre = prefactor(g, t, 0.0, M.M, H);
    double tau = g.tau;
    Complex f1 = hyp(a, a, 1.0, g);
    Complex coef1 = M.M - (2.0 * M.M - H) * (1.0 + tau) / g.Q;
    Complex result = coef1 * f1;
    if (a != 0.0) {
        double one_minus_tau_sq = -std::expm1(-2.0 * H * t);
        Complex coef2 = 4.0 * H * tau * a * a * (one_minus_tau_sq + g.y * g.y) / (g.Q * g.Q);
        result -= coef2 * hyp(a + 1.0, a + 1.0, 2.0, g);
    }
    return -pre * result;
}

Complex kernel_dtE(const ConeGeometry& g, double t, double b, const CurvedMass& M, double H) {
    Complex mu = M.M / H;
    Complex a = 0.5 - mu;
    Complex pre = prefactor(g, t, b, M.M, H);
    double dQ = -2.0 * H * g.tau * (g.beta + g.tau);
    Complex result = (M.M + (mu - 0.5) * dQ / g.Q) * hyp(a, a, 1.0, g);
    if (a != 0.0) {
        double dzeta = 4.0 * H * g.beta * g.tau * (2.0 * g.tau * g.A + g.P) / (g.Q * g.Q);
        result += a * a * dzeta * hyp(a + 1.0, a + 1.0, 2.0, g);
    }
    return pre * result;
}

KernelEval eval_E(double r, double t, double b, const CurvedMass& M, double H) {
    ConeGeometry g = cone_from_radius(r, t, b, H);
    return pack(g, t, b, kernel_E(g, t, b, M, H));
}

KernelEval eval_K1(double r, double t, const CurvedMass& M, double H) { return eval_E(r, t, 0.0, M, H); }

KernelEval eval_K0_direct(double r, double t, const CurvedMass& M, double H) {
    ConeGeometry g = cone_from_radius(r, t, 0.0, H);
    return pack(g, t, 0.0, kernel_K0(g, t, M, H));
}

KernelEval eval_K0_alt(double r, double t, const CurvedMass& M, double H) {
    ConeGeometry g = cone_from_radius(r, t, 0.0, H);
    if (!(std::abs(g.P) > 1e-300)) {
        std::ostringstream os;
        os << "second K0 form is singular on the cone edge r=" << r << " t=" << t;
        fail(ErrorKind::DenominatorSingular, os.str());
    }
    Complex mu = M.M / H;
    Complex a = 0.5 - mu;
    Complex Mv = M.M;
    double tau = g.tau;
    double y2 = g.y * g.y;
    Complex coef1 = H * tau - H + Mv * tau * tau - Mv - Mv * y2;
    Complex coef2 = (0.5 * H + Mv) * (y2 - tau * tau + 1.0);
    Complex f1 = hyp(a, a, 1.0, g);
    Complex f2 = hyp(-0.5 - mu, a, 1.0, g);
    Complex value = prefactor(g, t, 0.0, Mv, H) / g.P * (coef1 * f1 + coef2 * f2);
    return pack(g, t, 0.0, value);
}

Complex eval_dtE(double r, double t, double b, const CurvedMass& M, double H) {
    ConeGeometry g = cone_from_radius(r, t, b, H);
    return kernel_dtE(g, t, b, M, H);
}

}  // namespace kgds
