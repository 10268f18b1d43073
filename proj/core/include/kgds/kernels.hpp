#pragma once

#include <string_view>

#include "kgds/special_functions.hpp"

namespace kgds {

enum class MassRegime { LargeMass, SmallLight, Critical, Intermediate, Supercritical };

std::string_view to_string(MassRegime regime);

// Curved mass M with M^2 = mu_sq = 9H^2/4 - m^2 c^4 / h^2 (principal root).
struct CurvedMass {
    double mu_sq = 0.0;
    Complex M;
    MassRegime regime = MassRegime::SmallLight;

    static CurvedMass from_mu_sq(double mu_sq, double H);
    // Direct complex value, used for corner cases such as M = 0.3 + 0.5i in kernel tests.
    static CurvedMass from_value(Complex M, double H);
};

MassRegime classify_mass(Complex M, double H);

// phi(t) = (1 - e^{-Ht}) / H
double phi(double t, double H);

struct KernelEval {
    double r = 0.0;
    double t = 0.0;
    double b = 0.0;
    Complex value;
    double zeta = 0.0;
};

// Geometry of the point r inside the cone of (t, b), described by the gap between r and
// the cone edge phi(t) - phi(b). All derived quantities keep relative precision as gap -> 0
// and as t - b grows.
struct ConeGeometry {
    double beta = 1.0;   // e^{-Hb}
    double tau = 1.0;    // e^{-Ht}
    double A = 0.0;      // beta - tau
    double y = 0.0;      // H r
    double P = 0.0;      // (beta - tau)^2 - y^2
    double Q = 0.0;      // (beta + tau)^2 - y^2
    double zeta = 0.0;   // P / Q
    double one_minus_zeta = 1.0;
    double r = 0.0;
    double gap = 0.0;
};

ConeGeometry cone_from_radius(double r, double t, double b, double H);
ConeGeometry cone_from_gap(double gap, double t, double b, double H);

KernelEval eval_E(double r, double t, double b, const CurvedMass& M, double H);
KernelEval eval_K1(double r, double t, const CurvedMass& M, double H);
// Closed form of -dE/db at b = 0.
KernelEval eval_K0_direct(double r, double t, const CurvedMass& M, double H);
// Second form with the (1 - e^{-Ht})^2 - H^2 r^2 denominator; DenominatorSingular on the edge.
KernelEval eval_K0_alt(double r, double t, const CurvedMass& M, double H);
Complex eval_dtE(double r, double t, double b, const CurvedMass& M, double H);

// Same kernels evaluated on a precomputed cone point.
Complex kernel_E(const ConeGeometry& g, double t, double b, const CurvedMass& M, double H);
Complex kernel_K0(const ConeGeometry& g, double t, const CurvedMass& M, double H);
Complex kernel_dtE(const ConeGeometry& g, double t, double b, const CurvedMass& M, double H);

}  // namespace kgds
