#include "kgds/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "kgds/error.hpp"

namespace kgds {

namespace {

QuadratureNodes build_gauss_legendre(int n) {
    QuadratureNodes q;
    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<std::pair<double, double>> nodes;
    for (double x : zeros) {
        double dp = boost::math::legendre_p_prime<double>(n, x);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.emplace_back(x, w);
        if (x != 0.0) nodes.emplace_back(-x, w);
    }
    std::sort(nodes.begin(), nodes.end());
    for (auto& [x, w] : nodes) {
        q.x.push_back(x);
        q.w.push_back(w);
    }
    return q;
}

}  // namespace

const QuadratureNodes& gauss_legendre(int n) {
    if (n < 1) fail(ErrorKind::InvalidParams, "Gauss-Legendre rule needs at least one node");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadratureNodes>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, std::make_unique<QuadratureNodes>(build_gauss_legendre(n))).first;
    return *it->second;
}

QuadratureNodes rule_on_interval(QuadratureRule rule, int n, double a, double b) {
    QuadratureNodes q;
    double len = b - a;
    switch (rule) {
        case QuadratureRule::GaussLegendre: {
            const QuadratureNodes& ref = gauss_legendre(n);
            double half = 0.5 * len;
            double mid = 0.5 * (a + b);
            for (std::size_t i = 0; i < ref.size(); ++i) {
                q.x.push_back(mid + half * ref.x[i]);
                q.w.push_back(half * ref.w[i]);
            }
            break;
        }
        case QuadratureRule::Trapezoid: {
            if (n < 2) fail(ErrorKind::InvalidParams, "trapezoid rule needs at least two nodes");
            double h = len / (n - 1);
            for (int i = 0; i < n; ++i) {
                q.x.push_back(a + h * i);
                q.w.push_back((i == 0 || i == n - 1) ? 0.5 * h : h);
            }
            break;
        }
        case QuadratureRule::Simpson: {
            int m = std::max(n, 3);
            if (m % 2 == 0) ++m;
            double h = len / (m - 1);
            for (int i = 0; i < m; ++i) {
                q.x.push_back(a + h * i);
                double c = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                q.w.push_back(c * h / 3.0);
            }
            break;
        }
    }
    return q;
}

std::vector<double> graded_breakpoints(double length, double gap, double ratio) {
    std::vector<double> edges{0.0};
    if (!(length > 0.0)) return edges;
    double d = std::max(gap, 0.0);
    if (d > 0.0) {
        while (d < length) {
            if (d > 1e-300) edges.push_back(d);
            d *= ratio;
        }
    }
    // Drop a last panel that would be much thinner than its neighbour.
    if (edges.size() > 1 && (length - edges.back()) < 0.25 * (edges.back() - edges[edges.size() - 2]))
        edges.pop_back();
    edges.push_back(length);
    return edges;
}

QuadratureNodes composite_rule(QuadratureRule rule, int n, const std::vector<double>& breakpoints) {
    QuadratureNodes q;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        if (!(breakpoints[k + 1] > breakpoints[k])) continue;
        QuadratureNodes part = rule_on_interval(rule, n, breakpoints[k], breakpoints[k + 1]);
        q.x.insert(q.x.end(), part.x.begin(), part.x.end());
        q.w.insert(q.w.end(), part.w.begin(), part.w.end());
    }
    return q;
}

void lagrange_basis(const std::vector<double>& xs, double x, std::vector<double>& out) {
    std::size_t n = xs.size();
    out.assign(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        double v = 1.0;
        for (std::size_t m = 0; m < n; ++m) {
            if (m != j) v *= (x - xs[m]) / (xs[j] - xs[m]);
        }
        out[j] = v;
    }
}

AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  int kronrod_points, int max_intervals) {
    AdaptiveResult r;
    if (a == b) return r;
    int key;
    if (kronrod_points == 15) key = GSL_INTEG_GAUSS15;
    else if (kronrod_points == 31) key = GSL_INTEG_GAUSS31;
    else fail(ErrorKind::InvalidParams, "Gauss-Kronrod supports 15 or 31 points");
    static std::once_flag silenced;
    std::call_once(silenced, [] { gsl_set_error_handler_off(); });
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(max_intervals), &gsl_integration_workspace_free);
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    F.params = const_cast<std::function<double(double)>*>(&f);
    // Global error control; a non-zero status leaves the best estimate for the caller to judge.
    gsl_integration_qag(&F, a, b, 0.0, rel_tol, max_intervals, key, ws.get(), &r.value, &r.error_estimate);
    return r;
}

}  // namespace kgds
