#include "kgds/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgds/error.hpp"
#include "kgds/parallel.hpp"

namespace kgds {

namespace {

constexpr double kFourPi = 12.566370614359172954;

double trapezoid_r2(const RadialGrid& g, const std::vector<double>& f) {
    double sum = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double w = (i == 0 || i == g.n - 1) ? 0.5 * g.dr : g.dr;
        double r = g.r(i);
        sum += w * f[i] * f[i] * r * r;
    }
    return kFourPi * sum;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_gamma(const CurvedMass& M, double H, double gamma, const Nonlinearity& nl, bool with_potential) {
    double alpha = nl.is_zero() ? 0.0 : nl.alpha;
    std::ostringstream os;
    switch (M.regime) {
        case MassRegime::LargeMass:
        case MassRegime::SmallLight:
        case MassRegime::Critical:
            if (!(gamma < H) || (with_potential && !(gamma > 0.0))) {
                os << "gamma=" << gamma << " outside (0, H) for the " << to_string(M.regime) << " regime";
                fail(ErrorKind::InvalidParams, os.str());
            }
            break;
        case MassRegime::Intermediate:
        case MassRegime::Supercritical: {
            double bound = (1.5 * H - M.M.real()) / (1.0 + alpha);
            if (!(gamma < bound)) {
                os << "gamma=" << gamma << " must stay below (3H/2 - Re M)/(1 + alpha) = " << bound;
                fail(ErrorKind::InvalidParams, os.str());
            }
            break;
        }
    }
}

// c^2 F Psi(Phi) - V Phi at time t.
RadialField source_term(const RadialField& phi_t, double t, const Nonlinearity& nl, const PotentialFunction& V,
                        const PhysicalParams& p) {
    const RadialGrid& g = phi_t.grid;
    RadialField s{g, std::vector<double>(g.n, 0.0), t};
    double R = p.schwarzschild_radius();
    double c2 = p.c * p.c;
    for (int i = 0; i < g.n; ++i) {
        double r = g.r(i);
        double u = phi_t.values[i];
        double v = 0.0;
        if (!nl.is_zero()) v = c2 * (1.0 - R / r) * nl(u);
        if (V) v -= V(r, t) * u;
        s.values[i] = v;
    }
    return s;
}

std::vector<int> node_eval_index(const TimeMesh& mesh) {
    const std::vector<double>& te = mesh.eval_times();
    double tol = 1e-11 * std::max(1.0, mesh.t_max());
    std::vector<int> out;
    for (double b : mesh.nodes()) {
        auto it = std::lower_bound(te.begin(), te.end(), b - tol);
        if (it == te.end() || std::abs(*it - b) > tol) fail(ErrorKind::InvalidParams, "mesh node missing from eval times");
        out.push_back(static_cast<int>(it - te.begin()));
    }
    return out;
}

}  // namespace

double Nonlinearity::operator()(double psi) const {
    if (zero_) return 0.0;
    switch (kind) {
        case NonlinearityKind::PowerAbs: return std::pow(std::abs(psi), 1.0 + alpha);
        case NonlinearityKind::PowerSigned: return psi * std::pow(std::abs(psi), alpha);
        case NonlinearityKind::Custom:
            if (!custom) fail(ErrorKind::InvalidParams, "custom nonlinearity without a function");
            return custom(psi);
    }
    return 0.0;
}

double Nonlinearity::difference(double b, double delta) const {
    if (zero_ || delta == 0.0) return 0.0;
    double a = b + delta;
    // Large relative steps have no cancellation, and |b|^{1+alpha} can underflow against them.
    if (kind == NonlinearityKind::Custom || !(std::abs(delta) < 0.5 * std::abs(b))) return (*this)(a) - (*this)(b);
    // a and b share the sign of b, so |a| - |b| = sign(b) delta.
    double sign = b > 0.0 ? 1.0 : -1.0;
    double ab = std::abs(b);
    double rel = sign * delta / ab;
    double change = std::pow(ab, 1.0 + alpha) * std::expm1((1.0 + alpha) * std::log1p(rel));
    return kind == NonlinearityKind::PowerSigned ? sign * change : change;
}

Nonlinearity Nonlinearity::none() {
    Nonlinearity nl;
    nl.kind = NonlinearityKind::Custom;
    nl.alpha = 0.0;
    nl.custom = [](double) { return 0.0; };
    nl.zero_ = true;
    return nl;
}

double Potential::value(double r, double t, const PhysicalParams& p) const {
    switch (kind) {
        case PotentialKind::None: return 0.0;
        case PotentialKind::Gravitational: return -p.mass_term() * p.schwarzschild_radius() / r;
        case PotentialKind::Yukawa: return -coupling_sq * std::exp(-range * r) / r;
        case PotentialKind::ExpDecaying: {
            double c4 = p.c * p.c * p.c * p.c;
            return -higgs_sq * c4 / (p.h * p.h) * std::exp(-2.0 * p.H * t);
        }
        case PotentialKind::Custom:
            if (!custom) fail(ErrorKind::InvalidParams, "custom potential without a function");
            return custom(r, t);
    }
    return 0.0;
}

PotentialFunction Potential::bind(const PhysicalParams& p) const {
    if (kind == PotentialKind::None) return {};
    Potential self = *this;
    return [self, p](double r, double t) { return self.value(r, t, p); };
}

std::string_view to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::None: return "none";
        case PotentialKind::Gravitational: return "gravitational";
        case PotentialKind::Yukawa: return "yukawa";
        case PotentialKind::ExpDecaying: return "exp_decaying";
        case PotentialKind::Custom: return "custom";
    }
    return "unknown";
}

std::string_view to_string(NonlinearityKind kind) {
    switch (kind) {
        case NonlinearityKind::PowerAbs: return "power_abs";
        case NonlinearityKind::PowerSigned: return "power_signed";
        case NonlinearityKind::Custom: return "custom";
    }
    return "unknown";
}

std::string_view to_string(NormKind kind) {
    switch (kind) {
        case NormKind::L2: return "L2";
        case NormKind::H1: return "H1";
        case NormKind::H2Discrete: return "H2_discrete";
    }
    return "unknown";
}

double potential_eps0(const Potential& V, const RadialGrid& grid, const PhysicalParams& p, double r_guard) {
    if (!V.active()) return 0.0;
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double r = grid.r(i);
        if (r + 1e-12 * std::abs(r) < r_guard) continue;
        worst = std::max(worst, std::abs(V.value(r, 0.0, p)));
    }
    return worst;
}

double field_norm(const RadialField& f, NormKind kind) {
    const RadialGrid& g = f.grid;
    double sum = trapezoid_r2(g, f.values);
    if (kind != NormKind::L2) sum += trapezoid_r2(g, radial_gradient(f.values, g.dr));
    if (kind == NormKind::H2Discrete) sum += trapezoid_r2(g, radial_second_derivative(f.values, g.dr));
    return std::sqrt(sum);
}

void WeightedNormState::push(double t, double norm) { history.emplace_back(t, std::exp(gamma * t) * norm); }

double WeightedNormState::sup() const {
    double s = 0.0;
    for (const auto& h : history) {
        if (std::isnan(h.second)) return h.second;
        s = std::max(s, h.second);
    }
    return s;
}

WeightedNormState weighted_history(const SpaceTimeField& field, double gamma, NormKind kind) {
    WeightedNormState st;
    st.gamma = gamma;
    st.norm_kind = kind;
    for (std::size_t k = 0; k < field.size(); ++k) st.push(field.times[k], field_norm(field.snapshots[k], kind));
    return st;
}

double weighted_norm(const SpaceTimeField& field, double gamma, NormKind kind) {
    return weighted_history(field, gamma, kind).sup();
}

double weighted_distance(const SpaceTimeField& a, const SpaceTimeField& b, double gamma, NormKind kind) {
    if (a.size() != b.size()) fail(ErrorKind::InvalidParams, "fields differ in length");
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        RadialField diff = a.snapshots[k];
        for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= b.snapshots[k].values[i];
        d = std::max(d, std::exp(gamma * a.times[k]) * field_norm(diff, kind));
    }
    return d;
}

SpaceTimeField psi_id(const RadialField& psi0, const RadialField& psi1, std::span<const double> t_out,
                      const TransformConfig& cfg) {
    return solve_linear_homogeneous(psi0, psi1, t_out, cfg);
}

PicardResult picard_iterate(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl,
                            const Potential& V, const PicardOptions& options, const TransformConfig& cfg) {
    cfg.validate();
    const PhysicalParams& p = cfg.params;
    double H = p.H;
    check_gamma(cfg.mass, H, options.gamma, nl, V.active());
    if (options.max_iter < 1 || !(options.tol > 0.0)) fail(ErrorKind::InvalidParams, "invalid iteration controls");
    double t_max = options.t_max > 0.0 ? options.t_max : 8.0 / H;
    double data = field_norm(psi0, options.norm) + field_norm(psi1, options.norm);
    double eps = options.eps > 0.0 ? options.eps : data;
    if (data > eps * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "data norm " << data << " exceeds the ball radius eps=" << eps;
        fail(ErrorKind::InvalidParams, os.str());
    }

    const RadialGrid& grid = psi0.grid;
    DuhamelEngine engine(cfg, grid, t_max);
    const TimeMesh& mesh = engine.mesh();
    const std::vector<double>& te = mesh.eval_times();
    std::vector<int> node_idx = node_eval_index(mesh);
    PotentialFunction Vf = V.bind(p);

    PicardResult result;
    PicardDiagnostics& diag = result.diagnostics;
    diag.eps = eps;
    diag.eps0 = potential_eps0(V, grid, p, cfg.strict_support ? cfg.R_ID : grid.r_min);

    SpaceTimeField free = solve_linear_homogeneous(psi0, psi1, te, cfg);
    diag.max_imag = free.max_imag_residue;
    SpaceTimeField current = free;

    double R = p.schwarzschild_radius();
    double c2 = p.c * p.c;
    // G applied to per-node sources, returned on the eval times.
    auto apply_G_nodes = [&](const std::vector<RadialField>& sources) {
        engine.set_sources(sources);
        SpaceTimeField g = free;
        std::vector<double> imag(te.size(), 0.0);
        parallel_for(te.size(), [&](std::size_t k) {
            DuhamelEngine::Value v = engine.evaluate(te[k]);
            g.snapshots[k].values = std::move(v.field.values);
            imag[k] = v.max_imag;
        });
        for (double x : imag) diag.max_imag = std::max(diag.max_imag, x);
        return g;
    };
    auto full_sources = [&](const SpaceTimeField& phi_n) {
        std::vector<RadialField> sources;
        sources.reserve(node_idx.size());
        for (std::size_t j = 0; j < node_idx.size(); ++j) {
            sources.push_back(source_term(phi_n.snapshots[node_idx[j]], mesh.nodes()[j], nl, Vf, p));
        }
        return sources;
    };
    // source(prev + delta) - source(prev) at the nodes.
    auto increment_sources = [&](const SpaceTimeField& prev, const SpaceTimeField& delta) {
        std::vector<RadialField> sources;
        sources.reserve(node_idx.size());
        for (std::size_t j = 0; j < node_idx.size(); ++j) {
            const RadialField& b = prev.snapshots[node_idx[j]];
            const RadialField& d = delta.snapshots[node_idx[j]];
            double t = mesh.nodes()[j];
            RadialField s{grid, std::vector<double>(grid.n, 0.0), t};
            for (int i = 0; i < grid.n; ++i) {
                double r = grid.r(i);
                double v = c2 * (1.0 - R / r) * nl.difference(b.values[i], d.values[i]);
                if (Vf) v -= Vf(r, t) * d.values[i];
                s.values[i] = v;
            }
            sources.push_back(std::move(s));
        }
        return sources;
    };
    auto add_into = [](SpaceTimeField& dst, const SpaceTimeField& inc) {
        for (std::size_t k = 0; k < dst.size(); ++k) {
            for (std::size_t i = 0; i < dst.snapshots[k].values.size(); ++i) dst.snapshots[k].values[i] += inc.snapshots[k].values[i];
        }
    };

    int bad = 0;
    SpaceTimeField previous;
    SpaceTimeField delta;
    for (int n = 0; n < options.max_iter; ++n) {
        SpaceTimeField inc = n == 0 ? apply_G_nodes(full_sources(current)) : apply_G_nodes(increment_sources(previous, delta));
        previous = current;
        add_into(current, inc);
        delta = std::move(inc);
        double d = weighted_norm(delta, options.gamma, options.norm);
        double size = weighted_norm(current, options.gamma, options.norm);
        if (!std::isfinite(d) || !std::isfinite(size)) fail(ErrorKind::NonConvergence, "Picard iterate is not finite");
        diag.distances.push_back(d);
        if (n >= 1) {
            double prev = diag.distances[n - 1];
            if (prev >= 1e-13 * size && prev > 0.0) {
                double q = d / prev;
                diag.contraction.push_back(q);
                diag.max_contraction = std::max(diag.max_contraction, q);
                bad = q >= 1.0 ? bad + 1 : 0;
                if (bad >= 3) {
                    std::ostringstream os;
                    os << "contraction factor >= 1 for 3 consecutive iterations (last q=" << q << ")";
                    fail(ErrorKind::NoContraction, os.str());
                }
            }
        }
        diag.iterations = n + 1;
        if (d <= options.tol * size) {
            diag.converged = true;
            break;
        }
    }

    diag.history = weighted_history(current, options.gamma, options.norm);
    diag.weighted_sup = diag.history.sup();
    diag.ball_bound = diag.weighted_sup < 2.0 * eps;
    if (cfg.strict_support) diag.support_confined = support_confined(current, cfg.R_ID, p);

    if (cfg.richardson_check || options.residual_dt > 0.0) engine.set_sources(full_sources(current));
    if (cfg.richardson_check) {
        double scale = 0.0;
        for (const auto& s : current.snapshots) scale = std::max(scale, max_abs(s.values));
        diag.richardson = engine.richardson_estimate(te);
        if (diag.richardson > cfg.quad_tol * std::max(scale, 1e-300)) {
            std::ostringstream os;
            os << "Duhamel quadrature changes by " << diag.richardson << " (field scale " << scale << ") between n_r="
               << cfg.n_r << " and " << 2 * cfg.n_r;
            fail(ErrorKind::QuadratureUnderResolved, os.str());
        }
    }
    if (options.residual_dt > 0.0) {
        int steps = static_cast<int>(std::floor(t_max / options.residual_dt + 1e-9));
        if (steps < 4) fail(ErrorKind::InvalidParams, "residual_dt too coarse for the run length");
        std::vector<double> tu;
        for (int k = 0; k <= steps; ++k) tu.push_back(options.residual_dt * k);
        SpaceTimeField uniform = solve_linear_homogeneous(psi0, psi1, tu, cfg);
        parallel_for(tu.size(), [&](std::size_t k) {
            DuhamelEngine::Value g = engine.evaluate(tu[k]);
            for (int i = 0; i < grid.n; ++i) uniform.snapshots[k].values[i] += g.field.values[i];
        });
        SpaceTimeField forcing = uniform;
        double scale = 0.0;
        for (std::size_t k = 0; k < tu.size(); ++k) {
            scale = std::max(scale, max_abs(uniform.snapshots[k].values));
            forcing.snapshots[k] = source_term(uniform.snapshots[k], tu[k], nl, {}, p);
        }
        diag.residual = residual(uniform, &forcing, p, Vf);
        diag.residual_scale = scale;
        result.uniform = std::move(uniform);
    }
    result.psi = std::move(current);
    return result;
}

LifespanResult lifespan_run(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl, double gamma,
                            double eps, const TransformConfig& cfg, const LifespanOptions& options) {
    cfg.validate();
    const PhysicalParams& p = cfg.params;
    double H = p.H;
    if (cfg.mass.regime != MassRegime::Supercritical)
        fail(ErrorKind::InvalidParams, "lifespan probing needs the supercritical regime Re M > 3H/2");
    check_gamma(cfg.mass, H, gamma, nl, false);
    if (!nl.is_zero() && !(gamma < 0.0)) fail(ErrorKind::InvalidParams, "lifespan probing needs gamma < 0");
    if (!(eps > 0.0)) fail(ErrorKind::InvalidParams, "eps must be positive");
    if (max_abs(psi0.values) == 0.0 && max_abs(psi1.values) == 0.0)
        fail(ErrorKind::HorizonExceeded, "zero data never reaches the 2 eps threshold");

    double t_cap = options.t_cap / H;
    const RadialGrid& grid = psi0.grid;
    DuhamelEngine engine(cfg, grid, t_cap);
    const TimeMesh& mesh = engine.mesh();
    const std::vector<double>& te = mesh.eval_times();
    std::vector<int> node_idx = node_eval_index(mesh);
    double threshold = 2.0 * eps;
    double log_threshold = std::log(threshold);

    LifespanResult out;
    out.history.gamma = gamma;
    out.history.norm_kind = options.norm;
    out.history.push(0.0, field_norm(psi0, options.norm));
    double prev_t = 0.0;
    double prev_w = out.history.history.back().second;

    std::size_t e = 1;
    for (int k = 0; k < mesh.panels(); ++k) {
        std::vector<double> times;
        std::vector<int> eval_ids;
        while (e < te.size() && te[e] <= mesh.edge(k + 1) + 1e-12 * std::max(1.0, t_cap)) {
            times.push_back(te[e]);
            eval_ids.push_back(static_cast<int>(e));
            ++e;
        }
        if (times.empty()) continue;
        SpaceTimeField base = solve_linear_homogeneous(psi0, psi1, times, cfg);
        for (std::size_t m = 0; m < times.size(); ++m) {
            DuhamelEngine::Value past = engine.evaluate_panels(times[m], 0, k);
            for (int i = 0; i < grid.n; ++i) base.snapshots[m].values[i] += past.field.values[i];
        }

        std::span<const int> nodes = mesh.panel_nodes(k);
        std::vector<int> local(nodes.size());
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            auto it = std::find(eval_ids.begin(), eval_ids.end(), node_idx[nodes[q]]);
            local[q] = static_cast<int>(it - eval_ids.begin());
        }
        std::vector<RadialField> guess;
        for (int q : local) guess.push_back(base.snapshots[q]);

        bool converged = false;
        double prev_diff = std::numeric_limits<double>::infinity();
        int growing = 0;
        for (int it = 0; it < options.local_max_iter; ++it) {
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                engine.set_source(nodes[q], source_term(guess[q], mesh.nodes()[nodes[q]], nl, {}, p));
            }
            double diff = 0.0;
            double scale = 0.0;
            bool finite = true;
            for (std::size_t q = 0; q < nodes.size(); ++q) {
                DuhamelEngine::Value c = engine.evaluate_panels(times[local[q]], k, k + 1);
                const std::vector<double>& b = base.snapshots[local[q]].values;
                for (int i = 0; i < grid.n; ++i) {
                    double v = b[i] + c.field.values[i];
                    if (!std::isfinite(v)) finite = false;
                    diff = std::max(diff, std::abs(v - guess[q].values[i]));
                    scale = std::max(scale, std::abs(v));
                    guess[q].values[i] = v;
                }
            }
            if (!finite || scale > 1e150) break;
            if (diff <= options.local_tol * std::max(scale, 1e-300)) {
                converged = true;
                break;
            }
            growing = diff > prev_diff ? growing + 1 : 0;
            if (growing >= 3) break;
            prev_diff = diff;
        }
        if (!converged) {
            out.T = 0.5 * (mesh.edge(k) + mesh.edge(k + 1));
            out.inside_blowup_panel = true;
            return out;
        }
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            engine.set_source(nodes[q], source_term(guess[q], mesh.nodes()[nodes[q]], nl, {}, p));
        }
        for (std::size_t m = 0; m < times.size(); ++m) {
            DuhamelEngine::Value c = engine.evaluate_panels(times[m], k, k + 1);
            RadialField psi = base.snapshots[m];
            for (int i = 0; i < grid.n; ++i) psi.values[i] += c.field.values[i];
            double w = std::exp(gamma * times[m]) * field_norm(psi, options.norm);
            out.history.history.emplace_back(times[m], w);
            if (w >= threshold) {
                double lp = std::log(prev_w);
                double lw = std::log(w);
                double frac = lw > lp ? (log_threshold - lp) / (lw - lp) : 1.0;
                out.T = prev_t + std::clamp(frac, 0.0, 1.0) * (times[m] - prev_t);
                return out;
            }
            prev_t = times[m];
            prev_w = w;
        }
    }
    std::ostringstream os;
    os << "weighted norm stayed below 2 eps up to t_cap=" << t_cap;
    fail(ErrorKind::HorizonExceeded, os.str());
}

double lifespan_probe(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl, double gamma,
                      double eps, const TransformConfig& cfg, const LifespanOptions& options) {
    return lifespan_run(psi0, psi1, nl, gamma, eps, cfg, options).T;
}

}  // namespace kgds
