#include "kgds/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgds/error.hpp"
#include "kgds/kernels.hpp"

namespace kgds {

namespace {

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

ConformalTime default_conformal_time(const PhysicalParams& p) {
    return p.H > 0.0 ? de_sitter_conformal_time(p.H) : static_conformal_time();
}

}  // namespace

PhysicalParams PhysicalParams::natural(double H, double R_sch, double m_sq) {
    PhysicalParams p;
    p.H = H;
    p.c = 1.0;
    p.G = 1.0;
    p.h = 1.0;
    p.M_bh = 0.5 * R_sch;
    p.m_sq = m_sq;
    return p;
}

ConformalTime de_sitter_conformal_time(double H) {
    return [H](double t) { return std::isinf(t) ? 1.0 / H : phi(t, H); };
}

ConformalTime static_conformal_time() {
    return [](double t) { return t; };
}

double lapse_F(double r, const PhysicalParams& p) { return 1.0 - p.schwarzschild_radius() / r; }

double principal_symbol(const Vec3& x, const Vec3& xi, const PhysicalParams& p) {
    double R = p.schwarzschild_radius();
    double rx = norm(x);
    double xd = dot(x, xi);
    return -p.c * p.c * lapse_F(rx, p) * (dot(xi, xi) - R * xd * xd / (rx * rx * rx));
}

double lower_order_symbol(const Vec3& x, const Vec3& xi, const PhysicalParams& p) {
    double R = p.schwarzschild_radius();
    double rx = norm(x);
    return -p.c * p.c * lapse_F(rx, p) * R * dot(x, xi) / (rx * rx * rx);
}

double char_speed_bound(double r, const PhysicalParams& p) { return p.c * lapse_F(r, p); }

double char_speed_bound(const Vec3& x, const PhysicalParams& p) { return char_speed_bound(norm(x), p); }

double cutoff_chi(double radius, double eps, const PhysicalParams& p) {
    double R = p.schwarzschild_radius();
    double s = (radius - (R + 0.5 * eps)) / (0.5 * eps);
    s = std::clamp(s, 0.0, 1.0);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

std::complex<double> aux_symbol(const Vec3& x, const Vec3& xi, double eps, const PhysicalParams& p) {
    double R = p.schwarzschild_radius();
    double rx = norm(x);
    double chi = cutoff_chi(rx, eps, p);
    double xd = dot(x, xi);
    double r3 = rx * rx * rx;
    double c2 = p.c * p.c;
    double damp = 1.0 - chi * R / rx;
    return {c2 * damp * (-dot(xi, xi) + chi * R * xd * xd / r3), -c2 * damp * chi * R * xd / r3};
}

double damping_gradient(double a, double a_dot, double Mb, double Mb_dot, double r, const PhysicalParams& p) {
    double c2 = p.c * p.c;
    double den = c2 * r * a - 2.0 * p.G * Mb;
    return 2.0 * c2 * p.G * (Mb * a_dot - a * Mb_dot) / (den * den);
}

double geodesic_residual(double t, double r, double R_ID, const PhysicalParams& p, const ConformalTime& A) {
    double R = p.schwarzschild_radius();
    double z = R_ID - r;
    double log_term = R > 0.0 ? R * std::log1p(-z / (R_ID - R)) : 0.0;
    return z - log_term - p.c * A(t);
}

double geodesic_residual(double t, double r, double R_ID, const PhysicalParams& p) {
    return geodesic_residual(t, r, R_ID, p, default_conformal_time(p));
}

double geodesic_radius(double t, double R_ID, const PhysicalParams& p, double tol, const ConformalTime& A) {
    double R = p.schwarzschild_radius();
    if (!(R_ID > R)) fail(ErrorKind::InvalidParams, "geodesic start must lie outside the horizon");
    if (!(tol > 0.0)) fail(ErrorKind::InvalidParams, "geodesic tolerance must be positive");
    double target = p.c * A(t);
    if (!(target >= 0.0)) fail(ErrorKind::InvalidParams, "conformal time must be non-negative");
    if (target == 0.0) return R_ID;
    if (R == 0.0) return R_ID - target;

    double D = R_ID - R;
    auto g = [&](double z) { return z - R * std::log1p(-z / D) - target; };
    double lo = 0.0;
    double hi = D;
    double fh = -1.0;
    for (int k = 1; k <= 1074; ++k) {
        hi = D * (1.0 - std::ldexp(1.0, -k));
        if (hi >= D) break;
        fh = g(hi);
        if (fh > 0.0) break;
    }
    if (!(fh > 0.0)) {
        std::ostringstream os;
        os << "no bracket for geodesic at t=" << t << " R_ID=" << R_ID;
        fail(ErrorKind::BracketFailure, os.str());
    }
    double z = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        z = 0.5 * (lo + hi);
        double fz = g(z);
        if (std::abs(fz) < tol || hi - lo < 1e-16 * D) break;
        if (fz > 0.0) hi = z;
        else lo = z;
    }
    for (int it = 0; it < 3; ++it) {
        double dz = g(z) / (1.0 + R / (D - z));
        double next = z - dz;
        if (next > lo && next < hi) z = next;
    }
    double res = std::abs(g(z));
    if (!(res < tol)) {
        std::ostringstream os;
        os << "geodesic root residual " << res << " above tolerance " << tol;
        fail(ErrorKind::BracketFailure, os.str());
    }
    return R_ID - z;
}

double geodesic_radius(double t, double R_ID, const PhysicalParams& p, double tol) {
    return geodesic_radius(t, R_ID, p, tol, default_conformal_time(p));
}

double geodesic_limit_radius(double R_ID, const PhysicalParams& p, double tol) {
    if (!(p.H > 0.0)) fail(ErrorKind::InvalidParams, "the geodesic limit needs H > 0");
    return geodesic_radius(std::numeric_limits<double>::infinity(), R_ID, p, tol);
}

double support_margin(double R_ID, const PhysicalParams& p) {
    return geodesic_limit_radius(R_ID, p) - p.schwarzschild_radius();
}

double influence_radius(double t, double R_ID, const PhysicalParams& p) {
    if (p.H > 0.0) return R_ID - p.c * (std::isinf(t) ? 1.0 / p.H : phi(t, p.H));
    return R_ID - p.c * t;
}

}  // namespace kgds
