#pragma once

#include <functional>
#include <vector>

namespace kgds {

enum class QuadratureRule { Trapezoid, Simpson, GaussLegendre };

struct QuadratureNodes {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre rule on [-1, 1]; cached, safe for concurrent use.
const QuadratureNodes& gauss_legendre(int n);

// n-point rule of the given family mapped to [a, b]. Simpson rounds n up to an odd count.
QuadratureNodes rule_on_interval(QuadratureRule rule, int n, double a, double b);

// Breakpoints 0 = d_0 < d_1 < ... < d_K = length for a distance-from-edge variable d whose
// integrand has a singularity at d = -gap. Panels grow geometrically (factor ratio) away from
// the edge so each panel sees the singularity at a fixed relative distance.
std::vector<double> graded_breakpoints(double length, double gap, double ratio = 4.0);

// Composite rule: n nodes of the family on each interval between consecutive breakpoints.
QuadratureNodes composite_rule(QuadratureRule rule, int n, const std::vector<double>& breakpoints);

// Lagrange basis values l_j(x) for the nodes xs.
void lagrange_basis(const std::vector<double>& xs, double x, std::vector<double>& out);

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Globally adaptive Gauss-Kronrod integration (15 or 31 point pairs) with relative tolerance.
AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  int kronrod_points = 15, int max_intervals = 2000);

}  // namespace kgds
