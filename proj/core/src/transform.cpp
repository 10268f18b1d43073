#include "kgds/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "kgds/error.hpp"
#include "kgds/parallel.hpp"

namespace kgds {

namespace {

constexpr double kFourPi = 12.566370614359172954;

std::vector<double> unique_sorted(std::vector<double> v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    for (double x : v) {
        if (out.empty() || x - out.back() > tol) out.push_back(x);
    }
    return out;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool real_equation(const CurvedMass& M) { return std::abs((M.M * M.M).imag()) <= 1e-14 * (1.0 + std::abs(M.M * M.M)); }

void check_times(std::span<const double> t_out) {
    if (t_out.empty()) fail(ErrorKind::InvalidParams, "no output times");
    for (std::size_t i = 0; i < t_out.size(); ++i) {
        if (!(t_out[i] >= 0.0) || !std::isfinite(t_out[i])) fail(ErrorKind::InvalidParams, "output times must be finite and >= 0");
        if (i > 0 && !(t_out[i] > t_out[i - 1])) fail(ErrorKind::InvalidParams, "output times must increase strictly");
    }
}

void check_strict_data(const TransformConfig& cfg, std::initializer_list<const RadialField*> data) {
    const PhysicalParams& p = cfg.params;
    double R = p.schwarzschild_radius();
    if (!(cfg.R_ID > p.c / p.H + R)) {
        std::ostringstream os;
        os << "strict support needs R_ID > c/H + R_Sch, got R_ID=" << cfg.R_ID;
        fail(ErrorKind::InvalidParams, os.str());
    }
    for (const RadialField* f : data) {
        double inner = f->support_inner_radius();
        if (inner + 1e-12 < cfg.R_ID) {
            std::ostringstream os;
            os << "data support reaches r=" << inner << " below R_ID=" << cfg.R_ID;
            fail(ErrorKind::DomainViolation, os.str());
        }
    }
}

void check_strict_output(const TransformConfig& cfg, const SpaceTimeField& psi) {
    if (!support_confined(psi, cfg.R_ID, cfg.params)) {
        fail(ErrorKind::DomainViolation, "solution support dropped below R_Sch + eps");
    }
}

void accumulate(std::vector<double>& re, std::vector<double>& im, const std::vector<double>& v, Complex c) {
    double a = c.real();
    double b = c.imag();
    for (std::size_t i = 0; i < v.size(); ++i) {
        re[i] += a * v[i];
        im[i] += b * v[i];
    }
}

}  // namespace

void SpaceTimeField::validate() const {
    if (times.size() != snapshots.size()) fail(ErrorKind::InvalidParams, "times and snapshots differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0 && !(times[i] > times[i - 1])) fail(ErrorKind::InvalidParams, "snapshot times must increase strictly");
        if (!(snapshots[i].grid == snapshots[0].grid)) fail(ErrorKind::InvalidParams, "snapshots must share one grid");
    }
}

CurvedMass curved_mass(const PhysicalParams& p) {
    if (!(p.H > 0.0)) fail(ErrorKind::InvalidParams, "curved mass needs H > 0");
    return CurvedMass::from_mu_sq(p.curved_mass_sq(), p.H);
}

SpaceTimeField liouville(const SpaceTimeField& f, LiouvilleDirection direction, const PhysicalParams& p) {
    SpaceTimeField out = f;
    double sign = direction == LiouvilleDirection::ToU ? 1.0 : -1.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        double scale = std::exp(sign * 1.5 * p.H * out.times[k]);
        for (double& v : out.snapshots[k].values) v *= scale;
    }
    return out;
}

TransformConfig TransformConfig::from_params(const PhysicalParams& p) {
    TransformConfig cfg;
    cfg.params = p;
    cfg.mass = curved_mass(p);
    return cfg;
}

void TransformConfig::validate() const {
    if (!(params.H > 0.0)) fail(ErrorKind::InvalidParams, "transform needs H > 0");
    if (n_b < 8 || n_r < 8) fail(ErrorKind::InvalidParams, "n_b and n_r must be at least 8");
    if (kernel_nodes < 4) fail(ErrorKind::InvalidParams, "kernel_nodes must be at least 4");
    if (!(panel_width > 0.0)) fail(ErrorKind::InvalidParams, "panel_width must be positive");
    if (!(quad_tol > 0.0)) fail(ErrorKind::InvalidParams, "quad_tol must be positive");
}

StaticTimeLayout StaticTimeLayout::build(QuadratureRule rule, int n_r) {
    StaticTimeLayout L;
    if (n_r < 2) fail(ErrorKind::InvalidParams, "need at least two static-time nodes");
    if (rule == QuadratureRule::GaussLegendre) {
        int P = std::max(1, n_r / 8);
        int base = n_r / P;
        int extra = n_r % P;
        L.edges.push_back(0.0);
        for (int p = 0; p < P; ++p) {
            double a = static_cast<double>(p) / P;
            double b = static_cast<double>(p + 1) / P;
            L.edges.push_back(b);
            int m = base + (p < extra ? 1 : 0);
            QuadratureNodes q = rule_on_interval(QuadratureRule::GaussLegendre, m, a, b);
            std::vector<int> idx;
            for (double x : q.x) {
                idx.push_back(static_cast<int>(L.u.size()));
                L.u.push_back(x);
            }
            L.panels.push_back(std::move(idx));
        }
        L.edges.back() = 1.0;
        return L;
    }
    int step = rule == QuadratureRule::Simpson ? 2 : 1;
    int n = n_r;
    if (step == 2 && n % 2 == 0) ++n;
    for (int i = 0; i < n; ++i) L.u.push_back(static_cast<double>(i) / (n - 1));
    for (int i = 0; i + step < n; i += step) {
        std::vector<int> idx;
        for (int k = 0; k <= step; ++k) idx.push_back(i + k);
        L.panels.push_back(std::move(idx));
        L.edges.push_back(L.u[i]);
    }
    L.edges.push_back(1.0);
    return L;
}

LagWeights compute_lag_weights(double tau, const StaticTimeLayout& layout, const CurvedMass& M, double H,
                               int kernel_nodes, bool with_k0) {
    LagWeights w;
    w.tau = tau;
    std::size_t n = layout.u.size();
    w.k1.assign(n, Complex(0.0));
    if (with_k0) w.k0_k1.assign(n, Complex(0.0));
    if (!(tau > 0.0)) return w;
    double L = phi(tau, H);
    w.length = L;

    // The kernel varies on the gap scale e^{-H tau}/H next to the cone edge.
    std::vector<double> cuts;
    for (double e : layout.edges) cuts.push_back(e * L);
    double g = 2.0 * std::exp(-H * tau) / H;
    for (double d = g; d < L; d *= 4.0) cuts.push_back(L - d);
    cuts = unique_sorted(std::move(cuts), 1e-13 * L);
    cuts.front() = 0.0;
    cuts.back() = L;

    const QuadratureNodes& gl = gauss_legendre(kernel_nodes);
    std::vector<double> basis;
    std::vector<double> panel_u;
    std::size_t panel = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double sa = cuts[k];
        double sb = cuts[k + 1];
        double um = 0.5 * (sa + sb) / L;
        while (panel + 1 < layout.panels.size() && um >= layout.edges[panel + 1]) ++panel;
        const std::vector<int>& idx = layout.panels[panel];
        panel_u.resize(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) panel_u[j] = layout.u[idx[j]];
        double half = 0.5 * (sb - sa);
        double tail = L - sb;
        for (std::size_t q = 0; q < gl.size(); ++q) {
            double x = gl.x[q];
            double s = sa + half * (1.0 + x);
            double gap = tail + half * (1.0 - x);
            ConeGeometry cone = cone_from_gap(gap, tau, 0.0, H);
            Complex k1 = kernel_E(cone, tau, 0.0, M, H) * (half * gl.w[q]);
            Complex comb;
            if (with_k0) comb = (2.0 * kernel_K0(cone, tau, M, H)) * (half * gl.w[q]) + 3.0 * H * k1;
            lagrange_basis(panel_u, s / L, basis);
            for (std::size_t j = 0; j < idx.size(); ++j) {
                w.k1[idx[j]] += basis[j] * k1;
                if (with_k0) w.k0_k1[idx[j]] += basis[j] * comb;
            }
        }
    }
    return w;
}

LagWeightCache::LagWeightCache(const CurvedMass& M, double H, QuadratureRule rule, int n_r, int kernel_nodes)
    : M_(M), H_(H), kernel_nodes_(kernel_nodes), layout_(StaticTimeLayout::build(rule, n_r)) {}

std::shared_ptr<const LagWeights> LagWeightCache::get(double tau, bool with_k0) const {
    long long key = std::llround(tau * 1e12);
    auto& table = with_k0 ? full_ : k1_only_;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        if (!with_k0) {
            auto jt = full_.find(key);
            if (jt != full_.end()) return jt->second;
        }
    }
    auto w = std::make_shared<const LagWeights>(compute_lag_weights(tau, layout_, M_, H_, kernel_nodes_, with_k0));
    std::lock_guard<std::mutex> lock(mutex_);
    return table.emplace(key, std::move(w)).first->second;
}

std::size_t LagWeightCache::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return k1_only_.size() + full_.size();
}

namespace {

using CacheKey = std::tuple<double, double, double, int, int, int>;
std::mutex g_cache_mutex;
std::map<CacheKey, std::shared_ptr<const LagWeightCache>> g_caches;

}  // namespace

std::shared_ptr<const LagWeightCache> shared_lag_cache(const CurvedMass& M, double H, QuadratureRule rule, int n_r,
                                                       int kernel_nodes) {
    CacheKey key{M.M.real(), M.M.imag(), H, static_cast<int>(rule), n_r, kernel_nodes};
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_caches.find(key);
    if (it != g_caches.end()) return it->second;
    auto cache = std::make_shared<const LagWeightCache>(M, H, rule, n_r, kernel_nodes);
    g_caches.emplace(key, cache);
    return cache;
}

void clear_shared_lag_caches() {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    g_caches.clear();
}

SpaceTimeField solve_linear_homogeneous(const RadialField& psi0, const RadialField& psi1,
                                        std::span<const double> t_out, const TransformConfig& cfg) {
    cfg.validate();
    check_times(t_out);
    if (!(psi0.grid == psi1.grid)) fail(ErrorKind::InvalidParams, "initial fields must share a grid");
    if (cfg.strict_support) check_strict_data(cfg, {&psi0, &psi1});
    const PhysicalParams& p = cfg.params;
    const RadialGrid& grid = psi0.grid;
    double H = p.H;
    double T = phi(t_out.back(), H);

    RadialField zero = RadialField::zeros(grid);
    StaticSolution v0 = solve_static(psi0, zero, T, cfg.cfl, p);
    bool has_v1 = max_abs(psi1.values) > 0.0;
    StaticSolution v1 = has_v1 ? solve_static(psi1, zero, T, cfg.cfl, p) : StaticSolution{};

    auto coarse = shared_lag_cache(cfg.mass, H, cfg.rule, cfg.n_r, cfg.kernel_nodes);
    std::shared_ptr<const LagWeightCache> fine;
    if (cfg.richardson_check) fine = shared_lag_cache(cfg.mass, H, cfg.rule, 2 * cfg.n_r, cfg.kernel_nodes);

    int n = grid.n;
    auto evaluate = [&](double t, const LagWeightCache& cache, std::vector<double>& re, std::vector<double>& im) {
        re.assign(n, 0.0);
        im.assign(n, 0.0);
        if (t == 0.0) {
            re = psi0.values;
            return;
        }
        double L = phi(t, H);
        v0.sample(L, re.data());
        double damp = std::exp(-H * t);
        for (double& x : re) x *= damp;
        auto w = cache.get(t, true);
        double outer = std::exp(-1.5 * H * t);
        std::vector<double> buf(n);
        const std::vector<double>& u = cache.layout().u;
        for (std::size_t j = 0; j < u.size(); ++j) {
            v0.sample(L * u[j], buf.data());
            accumulate(re, im, buf, outer * w->k0_k1[j]);
            if (has_v1) {
                v1.sample(L * u[j], buf.data());
                accumulate(re, im, buf, 2.0 * outer * w->k1[j]);
            }
        }
    };

    std::size_t N = t_out.size();
    std::vector<std::vector<double>> re(N), im(N), re_fine(N), im_fine(N);
    parallel_for(N, [&](std::size_t k) {
        evaluate(t_out[k], *coarse, re[k], im[k]);
        if (fine) evaluate(t_out[k], *fine, re_fine[k], im_fine[k]);
    });

    SpaceTimeField out;
    double scale = 0.0;
    double imag = 0.0;
    double diff = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        scale = std::max(scale, max_abs(re[k]));
        imag = std::max(imag, max_abs(im[k]));
        if (fine) {
            for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(re[k][i] - re_fine[k][i]));
        }
        out.times.push_back(t_out[k]);
        out.snapshots.push_back(RadialField{grid, std::move(re[k]), t_out[k]});
    }
    out.max_imag_residue = imag;
    if (fine && diff > cfg.quad_tol * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "static-time quadrature changes by " << diff << " (field scale " << scale << ") between n_r=" << cfg.n_r
           << " and " << 2 * cfg.n_r;
        fail(ErrorKind::QuadratureUnderResolved, os.str());
    }
    if (real_equation(cfg.mass) && imag > 1e-9 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "imaginary residue " << imag << " in a real problem (field scale " << scale << ")";
        fail(ErrorKind::DomainViolation, os.str());
    }
    if (cfg.strict_support) check_strict_output(cfg, out);
    return out;
}

TimeMesh::TimeMesh(double t_max, double panel_width, int n_b, QuadratureRule rule) : rule_(rule), n_b_(n_b) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail(ErrorKind::InvalidParams, "time mesh needs 0 < t_max < inf");
    if (!(panel_width > 0.0)) fail(ErrorKind::InvalidParams, "panel width must be positive");
    if (n_b < 2) fail(ErrorKind::InvalidParams, "need at least two nodes per panel");
    int K = std::max(1, static_cast<int>(std::ceil(t_max / panel_width - 1e-9)));
    double width = t_max / K;
    for (int k = 0; k <= K; ++k) edges_.push_back(k == K ? t_max : width * k);
    std::vector<double> all = edges_;
    for (int k = 0; k < K; ++k) {
        panel_start_.push_back(static_cast<int>(nodes_.size()));
        QuadratureNodes q = rule_on_interval(rule, n_b, edges_[k], edges_[k + 1]);
        for (std::size_t i = 0; i < q.size(); ++i) {
            nodes_.push_back(q.x[i]);
            weights_.push_back(q.w[i]);
            node_panel_.push_back(k);
            all.push_back(q.x[i]);
        }
    }
    panel_start_.push_back(static_cast<int>(nodes_.size()));
    for (int j = 0; j < static_cast<int>(nodes_.size()); ++j) node_ids_.push_back(j);
    eval_times_ = unique_sorted(std::move(all), 1e-12 * std::max(1.0, t_max));
}

std::span<const int> TimeMesh::panel_nodes(int k) const {
    return std::span<const int>(node_ids_).subspan(panel_start_[k], panel_start_[k + 1] - panel_start_[k]);
}

int TimeMesh::panel_of(double t) const {
    int K = panels();
    double width = edges_[1] - edges_[0];
    int k = std::clamp(static_cast<int>(std::floor(t / width)), 0, K - 1);
    while (k > 0 && t < edges_[k]) --k;
    while (k < K - 1 && t >= edges_[k + 1]) ++k;
    return k;
}

DuhamelEngine::DuhamelEngine(const TransformConfig& cfg, const RadialGrid& grid, double t_max)
    : cfg_(cfg), grid_(grid), mesh_(t_max, cfg.panel_width / cfg.params.H, cfg.n_b, cfg.rule) {
    cfg_.validate();
    coarse_ = shared_lag_cache(cfg.mass, cfg.params.H, cfg.rule, cfg.n_r, cfg.kernel_nodes);
    fine_ = shared_lag_cache(cfg.mass, cfg.params.H, cfg.rule, 2 * cfg.n_r, cfg.kernel_nodes);
    solutions_.resize(mesh_.nodes().size());
}

void DuhamelEngine::set_source(int node, const RadialField& f) {
    if (node < 0 || node >= static_cast<int>(solutions_.size())) fail(ErrorKind::InvalidParams, "source node out of range");
    if (!(f.grid == grid_)) fail(ErrorKind::InvalidParams, "source grid does not match the engine grid");
    if (max_abs(f.values) == 0.0) {
        solutions_[node].reset();
        return;
    }
    double H = cfg_.params.H;
    double start = mesh_.edge(mesh_.node_panel(node));
    double T = std::max(0.0, phi(mesh_.t_max(), H) - phi(start, H));
    solutions_[node] = std::make_shared<const StaticSolution>(solve_static(f, RadialField::zeros(grid_), T, cfg_.cfl, cfg_.params));
}

void DuhamelEngine::set_sources(const std::vector<RadialField>& f) {
    if (f.size() != solutions_.size()) fail(ErrorKind::InvalidParams, "one source per mesh node required");
    parallel_for(f.size(), [&](std::size_t j) { set_source(static_cast<int>(j), f[j]); });
}

void DuhamelEngine::clear_sources() {
    for (auto& s : solutions_) s.reset();
}

DuhamelEngine::Value DuhamelEngine::evaluate(double t) const { return evaluate_with(t, *coarse_, 0, mesh_.panels()); }

DuhamelEngine::Value DuhamelEngine::evaluate_panels(double t, int k_begin, int k_end) const {
    return evaluate_with(t, *coarse_, std::max(0, k_begin), std::min(k_end, mesh_.panels()));
}

DuhamelEngine::Value DuhamelEngine::evaluate_refined(double t) const { return evaluate_with(t, *fine_, 0, mesh_.panels()); }

DuhamelEngine::Value DuhamelEngine::evaluate_with(double t, const LagWeightCache& cache, int k_begin, int k_end) const {
    int n = grid_.n;
    std::vector<double> re(n, 0.0), im(n, 0.0), buf(n);
    double H = cfg_.params.H;
    double slack = 1e-12 * std::max(1.0, mesh_.t_max());
    if (!(t >= 0.0) || t > mesh_.t_max() + slack) fail(ErrorKind::DomainViolation, "evaluation time outside the source mesh");
    const std::vector<double>& u = cache.layout().u;
    const std::vector<double>& nodes = mesh_.nodes();
    const std::vector<double>& weights = mesh_.weights();

    auto add_node = [&](const StaticSolution& sol, double b, double coef) {
        double tau = t - b;
        if (!(tau > 0.0)) return;
        auto w = cache.get(tau, false);
        double c = 2.0 * coef * std::exp(-1.5 * H * tau);
        double scale = std::exp(-H * b) * w->length;
        for (std::size_t j = 0; j < u.size(); ++j) {
            sol.sample(scale * u[j], buf.data());
            accumulate(re, im, buf, c * w->k1[j]);
        }
    };

    for (int k = k_begin; k < k_end; ++k) {
        double a = mesh_.edge(k);
        double b = mesh_.edge(k + 1);
        if (a >= t - slack) break;
        std::span<const int> idx = mesh_.panel_nodes(k);
        std::vector<int> ids(idx.begin(), idx.end());
        if (b <= t + slack) {
            for (int j : ids) {
                if (solutions_[j]) add_node(*solutions_[j], nodes[j], weights[j]);
            }
            continue;
        }
        // Partial panel [a, t]: static solutions at sub-nodes from b-interpolation of the panel's nodes.
        std::vector<double> xs;
        for (int j : ids) xs.push_back(nodes[j]);
        QuadratureNodes sub = rule_on_interval(mesh_.rule(), mesh_.n_b(), a, t);
        std::vector<double> ell;
        for (std::size_t q = 0; q < sub.size(); ++q) {
            lagrange_basis(xs, sub.x[q], ell);
            for (std::size_t m = 0; m < ids.size(); ++m) {
                if (solutions_[ids[m]]) add_node(*solutions_[ids[m]], sub.x[q], sub.w[q] * ell[m]);
            }
        }
        break;
    }
    Value v;
    v.field = RadialField{grid_, std::move(re), t};
    v.max_imag = max_abs(im);
    return v;
}

double DuhamelEngine::richardson_estimate(std::span<const double> times) const {
    std::vector<double> diff(times.size(), 0.0);
    parallel_for(times.size(), [&](std::size_t k) {
        Value a = evaluate(times[k]);
        Value b = evaluate_refined(times[k]);
        for (int i = 0; i < grid_.n; ++i) diff[k] = std::max(diff[k], std::abs(a.field.values[i] - b.field.values[i]));
    });
    return diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
}

SpaceTimeField apply_G(const SourceFunction& f, const RadialGrid& grid, std::span<const double> t_out,
                       const TransformConfig& cfg) {
    cfg.validate();
    check_times(t_out);
    double t_max = std::max(t_out.back(), 1e-12);
    DuhamelEngine engine(cfg, grid, t_max);
    std::vector<RadialField> sources;
    for (double b : engine.mesh().nodes()) {
        RadialField s = f(b);
        if (cfg.strict_support && !(max_abs(s.values) == 0.0)) {
            double inner = s.support_inner_radius();
            double guard = influence_radius(b, cfg.R_ID, cfg.params);
            if (inner + 1e-12 < std::min(guard, cfg.R_ID)) {
                std::ostringstream os;
                os << "source support at b=" << b << " reaches r=" << inner << " inside the influence radius " << guard;
                fail(ErrorKind::DomainViolation, os.str());
            }
        }
        sources.push_back(std::move(s));
    }
    engine.set_sources(sources);

    std::size_t N = t_out.size();
    std::vector<DuhamelEngine::Value> values(N);
    parallel_for(N, [&](std::size_t k) { values[k] = engine.evaluate(t_out[k]); });

    SpaceTimeField out;
    double scale = 0.0;
    double imag = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        scale = std::max(scale, max_abs(values[k].field.values));
        imag = std::max(imag, values[k].max_imag);
        out.times.push_back(t_out[k]);
        out.snapshots.push_back(std::move(values[k].field));
    }
    out.max_imag_residue = imag;
    if (cfg.richardson_check) {
        double diff = engine.richardson_estimate(t_out);
        if (diff > cfg.quad_tol * std::max(scale, 1e-300)) {
            std::ostringstream os;
            os << "Duhamel quadrature changes by " << diff << " (field scale " << scale << ") between n_r=" << cfg.n_r
               << " and " << 2 * cfg.n_r;
            fail(ErrorKind::QuadratureUnderResolved, os.str());
        }
    }
    if (real_equation(cfg.mass) && imag > 1e-9 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "imaginary residue " << imag << " in a real problem (field scale " << scale << ")";
        fail(ErrorKind::DomainViolation, os.str());
    }
    return out;
}

namespace {

double uniform_step(const SpaceTimeField& psi) {
    psi.validate();
    if (psi.size() < 5) fail(ErrorKind::InvalidParams, "need at least 5 snapshots");
    double dt = psi.times[1] - psi.times[0];
    for (std::size_t k = 1; k + 1 < psi.size(); ++k) {
        if (std::abs(psi.times[k + 1] - psi.times[k] - dt) > 1e-9 * dt)
            fail(ErrorKind::InvalidParams, "time grid must be uniform");
    }
    return dt;
}

}  // namespace

double residual(const SpaceTimeField& psi, const SpaceTimeField* source, const PhysicalParams& p,
                const PotentialFunction& potential) {
    double dt = uniform_step(psi);
    if (source && source->size() != psi.size()) fail(ErrorKind::InvalidParams, "source and field differ in length");
    const RadialGrid& g = psi.grid();
    double mass = p.mass_term();
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < psi.size(); ++k) {
        double t = psi.times[k];
        const std::vector<double>& a = psi.snapshots[k - 1].values;
        const std::vector<double>& b = psi.snapshots[k].values;
        const std::vector<double>& c = psi.snapshots[k + 1].values;
        RadialField op = radial_operator_apply(psi.snapshots[k], p);
        double expand = std::exp(-2.0 * p.H * t);
        for (int i = 1; i < g.n - 1; ++i) {
            double tt = (c[i] - 2.0 * b[i] + a[i]) / (dt * dt);
            double t1 = (c[i] - a[i]) / (2.0 * dt);
            double V = potential ? potential(g.r(i), t) : 0.0;
            double f = source ? source->snapshots[k].values[i] : 0.0;
            double res = tt + 3.0 * p.H * t1 - expand * op.values[i] + mass * b[i] + V * b[i] - f;
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

SpaceTimeField time_derivative(const SpaceTimeField& psi) {
    double dt = uniform_step(psi);
    std::size_t N = psi.size();
    int n = psi.grid().n;
    SpaceTimeField out = psi;
    out.max_imag_residue = 0.0;
    auto f = [&](std::size_t k, int i) { return psi.snapshots[k].values[i]; };
    double h = 12.0 * dt;
    for (std::size_t k = 0; k < N; ++k) {
        for (int i = 0; i < n; ++i) {
            double d;
            if (k >= 2 && k + 2 < N) {
                d = (-f(k + 2, i) + 8.0 * f(k + 1, i) - 8.0 * f(k - 1, i) + f(k - 2, i)) / h;
            } else if (k == 0) {
                d = (-25.0 * f(0, i) + 48.0 * f(1, i) - 36.0 * f(2, i) + 16.0 * f(3, i) - 3.0 * f(4, i)) / h;
            } else if (k == 1) {
                d = (-3.0 * f(0, i) - 10.0 * f(1, i) + 18.0 * f(2, i) - 6.0 * f(3, i) + f(4, i)) / h;
            } else if (k == N - 1) {
                d = (25.0 * f(N - 1, i) - 48.0 * f(N - 2, i) + 36.0 * f(N - 3, i) - 16.0 * f(N - 4, i) + 3.0 * f(N - 5, i)) / h;
            } else {
                d = (3.0 * f(N - 1, i) + 10.0 * f(N - 2, i) - 18.0 * f(N - 3, i) + 6.0 * f(N - 4, i) - f(N - 5, i)) / h;
            }
            out.snapshots[k].values[i] = d;
        }
    }
    return out;
}

SpaceTimeField mesh_time_derivative(const SpaceTimeField& psi, const TimeMesh& mesh) {
    psi.validate();
    const std::vector<double>& te = mesh.eval_times();
    if (psi.size() != te.size()) fail(ErrorKind::InvalidParams, "field is not sampled on the mesh eval times");
    for (std::size_t k = 0; k < te.size(); ++k) {
        if (std::abs(psi.times[k] - te[k]) > 1e-10 * std::max(1.0, te.back()))
            fail(ErrorKind::InvalidParams, "field is not sampled on the mesh eval times");
    }
    int n = psi.grid().n;
    SpaceTimeField out = psi;
    out.max_imag_residue = 0.0;
    for (auto& s : out.snapshots) std::fill(s.values.begin(), s.values.end(), 0.0);
    std::vector<int> hits(te.size(), 0);
    double slack = 1e-12 * std::max(1.0, te.back());
    for (int k = 0; k < mesh.panels(); ++k) {
        std::vector<int> idx;
        for (std::size_t e = 0; e < te.size(); ++e) {
            if (te[e] >= mesh.edge(k) - slack && te[e] <= mesh.edge(k + 1) + slack) idx.push_back(static_cast<int>(e));
        }
        std::size_t m = idx.size();
        std::vector<double> bw(m, 1.0);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = 0; b < m; ++b) {
                if (a != b) bw[a] *= te[idx[a]] - te[idx[b]];
            }
            bw[a] = 1.0 / bw[a];
        }
        for (std::size_t a = 0; a < m; ++a) {
            std::vector<double>& dst = out.snapshots[idx[a]].values;
            double diag = 0.0;
            for (std::size_t b = 0; b < m; ++b) {
                if (a == b) continue;
                double D = (bw[b] / bw[a]) / (te[idx[a]] - te[idx[b]]);
                diag -= D;
                const std::vector<double>& src = psi.snapshots[idx[b]].values;
                for (int i = 0; i < n; ++i) dst[i] += D * src[i];
            }
            const std::vector<double>& self = psi.snapshots[idx[a]].values;
            for (int i = 0; i < n; ++i) dst[i] += diag * self[i];
            ++hits[idx[a]];
        }
    }
    for (std::size_t e = 0; e < te.size(); ++e) {
        if (hits[e] > 1) {
            for (double& v : out.snapshots[e].values) v /= hits[e];
        }
    }
    return out;
}

double l2_norm(const RadialField& f) {
    const RadialGrid& g = f.grid;
    double sum = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double w = (i == 0 || i == g.n - 1) ? 0.5 * g.dr : g.dr;
        double r = g.r(i);
        sum += w * f.values[i] * f.values[i] * r * r;
    }
    return std::sqrt(kFourPi * sum);
}

bool support_confined(const SpaceTimeField& psi, double R_ID, const PhysicalParams& p, double tol) {
    double floor = p.schwarzschild_radius() + support_margin(R_ID, p);
    for (const RadialField& s : psi.snapshots) {
        if (s.support_inner_radius(tol) < floor) return false;
    }
    return true;
}

}  // namespace kgds
