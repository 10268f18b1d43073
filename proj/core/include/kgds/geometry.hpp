#pragma once

#include <array>
#include <complex>
#include <functional>

namespace kgds {

using Vec3 = std::array<double, 3>;

struct PhysicalParams {
    double H = 1.0;
    double c = 1.0;
    double G = 1.0;
    double M_bh = 0.5;
    double h = 1.0;
    double m_sq = 0.0;

    double schwarzschild_radius() const { return 2.0 * G * M_bh / (c * c); }
    // m^2 c^4 / h^2, the zero-order coefficient of the field equation.
    double mass_term() const { return m_sq * c * c * c * c / (h * h); }
    // 9H^2/4 - m^2 c^4 / h^2
    double curved_mass_sq() const { return 2.25 * H * H - mass_term(); }

    // Units with c = G = h = 1, given Hubble constant, Schwarzschild radius and m^2.
    static PhysicalParams natural(double H, double R_sch, double m_sq);
};

// Conformal time A(t) = int_0^t ds / a(s) of the scale factor.
using ConformalTime = std::function<double(double)>;
ConformalTime de_sitter_conformal_time(double H);
ConformalTime static_conformal_time();

double lapse_F(double r, const PhysicalParams& p);

// Principal symbol -c^2 F(|x|) (|xi|^2 - R (x.xi)^2 / |x|^3) of the spatial operator.
double principal_symbol(const Vec3& x, const Vec3& xi, const PhysicalParams& p);
// Coefficient s of the first-order part, which enters the full symbol as i*s.
double lower_order_symbol(const Vec3& x, const Vec3& xi, const PhysicalParams& p);
double char_speed_bound(const Vec3& x, const PhysicalParams& p);
double char_speed_bound(double r, const PhysicalParams& p);

// Quintic smoothstep cutoff: 0 for |x| < R + eps/2, 1 for |x| > R + eps.
double cutoff_chi(double radius, double eps, const PhysicalParams& p);
// Symbol of the auxiliary operator that replaces the near-horizon region by the
// constant-coefficient d'Alembertian.
std::complex<double> aux_symbol(const Vec3& x, const Vec3& xi, double eps, const PhysicalParams& p);

// r-derivative of the damping ratio for a scale factor a(t) and black-hole mass Mb(t).
double damping_gradient(double a, double a_dot, double Mb, double Mb_dot, double r, const PhysicalParams& p);

// Null radial geodesic r(t) starting at R_ID, from the implicit relation
// R_ID - r - R ln(1 - (R_ID - r)/(R_ID - R)) = c A(t). Residual below tol.
double geodesic_radius(double t, double R_ID, const PhysicalParams& p, double tol = 1e-12);
double geodesic_radius(double t, double R_ID, const PhysicalParams& p, double tol, const ConformalTime& A);
// Residual of the implicit relation at (t, r).
double geodesic_residual(double t, double r, double R_ID, const PhysicalParams& p);
double geodesic_residual(double t, double r, double R_ID, const PhysicalParams& p, const ConformalTime& A);
// Limit radius r(inf) for de Sitter and the margin eps = r(inf) - R_Sch above the horizon.
double geodesic_limit_radius(double R_ID, const PhysicalParams& p, double tol = 1e-12);
double support_margin(double R_ID, const PhysicalParams& p);

// Straight-line bound R_ID - c phi(t).
double influence_radius(double t, double R_ID, const PhysicalParams& p);

}  // namespace kgds
