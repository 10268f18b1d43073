#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include <kgds/error.hpp>

namespace kgds::app {

namespace {

using json = nlohmann::json;

[[noreturn]] void invalid(const std::string& where, const std::string& what) {
    fail(ErrorKind::ConfigInvalid, where + ": " + what);
}

// Typed access to one JSON object; every key must be consumed or listed.
class Section {
public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) invalid(where_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) {
        for (const char* k : keys) allowed_.insert(k);
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!allowed_.count(it.key())) invalid(where_, "unknown key '" + it.key() + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string path(const char* key) const { return where_ + "." + key; }
    const json& raw(const char* key) const { return j_.at(key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_number()) invalid(path(key), "expected a number");
        out = j_.at(key).get<double>();
        if (!std::isfinite(out)) invalid(path(key), "must be finite");
    }
    void integer(const char* key, int& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_number_integer()) invalid(path(key), "expected an integer");
        out = j_.at(key).get<int>();
    }
    void flag(const char* key, bool& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_boolean()) invalid(path(key), "expected true or false");
        out = j_.at(key).get<bool>();
    }
    void text(const char* key, std::string& out) const {
        if (!has(key)) return;
        if (!j_.at(key).is_string()) invalid(path(key), "expected a string");
        out = j_.at(key).get<std::string>();
    }
    Section child(const char* key) const { return Section(j_.at(key), path(key)); }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> allowed_;
};

Complex parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    invalid(where, "expected a number or [re, im]");
}

void parse_times(const Section& s, TimeSpec& out) {
    Section t = s;
    if (t.has("times")) {
        const json& arr = t.raw("times");
        if (!arr.is_array()) invalid(t.path("times"), "expected an array of numbers");
        for (const auto& v : arr) {
            if (!v.is_number()) invalid(t.path("times"), "expected an array of numbers");
            out.times.push_back(v.get<double>());
        }
    }
    t.number("t_min", out.t_min);
    t.number("t_max", out.t_max);
    t.integer("count", out.count);
}

QuadratureRule rule_from_string(const std::string& s, const std::string& where) {
    if (s == "gauss_legendre") return QuadratureRule::GaussLegendre;
    if (s == "trapezoid") return QuadratureRule::Trapezoid;
    if (s == "simpson") return QuadratureRule::Simpson;
    invalid(where, "unknown rule '" + s + "' (gauss_legendre, trapezoid, simpson)");
}

void check_writable(const std::string& path, const std::string& where) {
    if (path.empty()) return;
    std::filesystem::path p(path);
    std::filesystem::path dir = p.parent_path().empty() ? std::filesystem::path(".") : p.parent_path();
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) invalid(where, "directory of '" + path + "' does not exist");
    if (::access(dir.c_str(), W_OK) != 0) invalid(where, "directory of '" + path + "' is not writable");
}

void parse_root(const json& root, RunConfig& cfg) {
    Section s(root, "config");
    s.allow({"schema_version", "rng_seed", "params", "mass", "grid", "data", "transform", "semilinear", "times",
             "kernels", "geodesic", "static", "output"});
    if (!s.has("schema_version")) invalid("config", "missing schema_version");
    s.integer("schema_version", cfg.schema_version);
    if (cfg.schema_version != kSchemaVersion)
        invalid("config.schema_version", "unsupported version " + std::to_string(cfg.schema_version));
    if (s.has("rng_seed")) {
        if (!s.raw("rng_seed").is_number_unsigned()) invalid("config.rng_seed", "expected a non-negative integer");
        cfg.rng_seed = s.raw("rng_seed").get<std::uint64_t>();
    }

    if (s.has("params")) {
        Section p = s.child("params");
        p.allow({"H", "c", "G", "M_bh", "h", "m_sq", "R_sch"});
        p.number("H", cfg.params.H);
        p.number("c", cfg.params.c);
        p.number("G", cfg.params.G);
        p.number("M_bh", cfg.params.M_bh);
        p.number("h", cfg.params.h);
        p.number("m_sq", cfg.params.m_sq);
        if (p.has("R_sch")) {
            if (p.has("M_bh")) invalid("config.params", "give either M_bh or R_sch");
            double R = 0.0;
            p.number("R_sch", R);
            cfg.params.M_bh = 0.5 * R * cfg.params.c * cfg.params.c / cfg.params.G;
        }
        if (!(cfg.params.H > 0.0) || !(cfg.params.c > 0.0) || !(cfg.params.G > 0.0) || !(cfg.params.h > 0.0))
            invalid("config.params", "H, c, G and h must be positive");
        if (!(cfg.params.M_bh >= 0.0)) invalid("config.params", "M_bh must be non-negative");
    }
    if (s.has("mass")) {
        Section m = s.child("mass");
        m.allow({"m_sq", "M"});
        if (m.has("m_sq") == m.has("M")) invalid("config.mass", "give exactly one of m_sq and M");
        if (m.has("m_sq")) {
            m.number("m_sq", cfg.params.m_sq);
        } else {
            cfg.mass_from_M = true;
            cfg.M = parse_complex(m.raw("M"), m.path("M"));
            Complex sq = cfg.M * cfg.M;
            // Real M^2 fixes the physical mass; complex M is only meaningful for kernel sampling.
            if (std::abs(sq.imag()) <= 1e-14 * std::max(1.0, std::abs(sq))) {
                double c4 = std::pow(cfg.params.c, 4);
                double H = cfg.params.H;
                cfg.params.m_sq = (2.25 * H * H - sq.real()) * cfg.params.h * cfg.params.h / c4;
            }
        }
    }
    if (s.has("grid")) {
        Section g = s.child("grid");
        g.allow({"r_min", "r_max", "n"});
        double r_min = cfg.grid.r_min, r_max = cfg.grid.r_max;
        int n = cfg.grid.n;
        g.number("r_min", r_min);
        g.number("r_max", r_max);
        g.integer("n", n);
        if (!(r_max > r_min) || n < 2) invalid("config.grid", "need r_max > r_min and n >= 2");
        cfg.grid = RadialGrid::uniform(r_min, r_max, n);
    }
    if (s.has("data")) {
        Section d = s.child("data");
        d.allow({"kind", "profile", "center", "half_width", "amplitude", "velocity_amplitude", "normalize_to"});
        std::string kind = "bump", profile = "poly6";
        d.text("kind", kind);
        d.text("profile", profile);
        try {
            cfg.data.kind = data_kind_from_string(kind);
        } catch (const Error& e) {
            invalid(d.path("kind"), e.what());
        }
        if (profile == "poly6") cfg.data.profile = BumpProfile::Poly6;
        else if (profile == "smooth") cfg.data.profile = BumpProfile::Smooth;
        else invalid(d.path("profile"), "unknown profile '" + profile + "' (poly6, smooth)");
        d.number("center", cfg.data.center);
        d.number("half_width", cfg.data.half_width);
        d.number("amplitude", cfg.data.amplitude);
        d.number("velocity_amplitude", cfg.data.velocity_amplitude);
        d.number("normalize_to", cfg.data.normalize_to);
        if (!(cfg.data.half_width > 0.0)) invalid("config.data.half_width", "must be positive");
    }
    if (s.has("transform")) {
        Section t = s.child("transform");
        t.allow({"n_b", "n_r", "rule", "panel_width", "cfl", "quad_tol", "richardson_check", "strict_support", "R_ID",
                 "kernel_nodes"});
        TransformConfig& tc = cfg.transform;
        t.integer("n_b", tc.n_b);
        t.integer("n_r", tc.n_r);
        std::string rule;
        t.text("rule", rule);
        if (!rule.empty()) tc.rule = rule_from_string(rule, t.path("rule"));
        t.number("panel_width", tc.panel_width);
        t.number("cfl", tc.cfl);
        t.number("quad_tol", tc.quad_tol);
        t.flag("richardson_check", tc.richardson_check);
        t.flag("strict_support", tc.strict_support);
        t.number("R_ID", tc.R_ID);
        t.integer("kernel_nodes", tc.kernel_nodes);
    }
    if (s.has("semilinear")) {
        Section sl = s.child("semilinear");
        sl.allow({"mode", "nonlinearity", "potential", "gamma", "eps", "t_max", "max_iter", "tol", "norm", "residual_dt",
                  "t_cap", "local_tol", "local_max_iter"});
        SemilinearSpec& sp = cfg.semilinear;
        sl.text("mode", sp.mode);
        if (sp.mode != "picard" && sp.mode != "lifespan") invalid(sl.path("mode"), "expected picard or lifespan");
        if (sl.has("nonlinearity")) {
            Section n = sl.child("nonlinearity");
            n.allow({"kind", "alpha"});
            std::string kind = "power_signed";
            n.text("kind", kind);
            n.number("alpha", sp.nonlinearity.alpha);
            if (kind == "power_signed") sp.nonlinearity.kind = NonlinearityKind::PowerSigned;
            else if (kind == "power_abs") sp.nonlinearity.kind = NonlinearityKind::PowerAbs;
            else if (kind == "none") sp.nonlinearity = Nonlinearity::none();
            else invalid(n.path("kind"), "unknown nonlinearity '" + kind + "' (power_signed, power_abs, none)");
            if (!(sp.nonlinearity.alpha > 0.0)) invalid(n.path("alpha"), "must be positive");
        }
        if (sl.has("potential")) {
            Section v = sl.child("potential");
            v.allow({"kind", "coupling_sq", "range", "higgs_sq"});
            std::string kind = "none";
            v.text("kind", kind);
            if (kind == "none") sp.potential.kind = PotentialKind::None;
            else if (kind == "gravitational") sp.potential.kind = PotentialKind::Gravitational;
            else if (kind == "yukawa") sp.potential.kind = PotentialKind::Yukawa;
            else if (kind == "exp_decaying") sp.potential.kind = PotentialKind::ExpDecaying;
            else invalid(v.path("kind"), "unknown potential '" + kind + "' (none, gravitational, yukawa, exp_decaying)");
            v.number("coupling_sq", sp.potential.coupling_sq);
            v.number("range", sp.potential.range);
            v.number("higgs_sq", sp.potential.higgs_sq);
        }
        sl.number("gamma", sp.picard.gamma);
        sl.number("eps", sp.picard.eps);
        sp.lifespan_eps = sp.picard.eps > 0.0 ? sp.picard.eps : sp.lifespan_eps;
        sl.number("t_max", sp.picard.t_max);
        sl.integer("max_iter", sp.picard.max_iter);
        sl.number("tol", sp.picard.tol);
        std::string norm;
        sl.text("norm", norm);
        if (!norm.empty()) {
            try {
                sp.picard.norm = norm_from_string(norm);
            } catch (const Error& e) {
                invalid(sl.path("norm"), e.what());
            }
            sp.lifespan.norm = sp.picard.norm;
        }
        sl.number("residual_dt", sp.picard.residual_dt);
        sl.number("t_cap", sp.lifespan.t_cap);
        sl.number("local_tol", sp.lifespan.local_tol);
        sl.integer("local_max_iter", sp.lifespan.local_max_iter);
    }
    if (s.has("times")) {
        Section t = s.child("times");
        t.allow({"times", "t_min", "t_max", "count"});
        parse_times(t, cfg.times);
    }
    if (s.has("kernels")) {
        Section k = s.child("kernels");
        k.allow({"kind", "t", "b", "n"});
        k.text("kind", cfg.kernels.kind);
        k.number("t", cfg.kernels.t);
        k.number("b", cfg.kernels.b);
        k.integer("n", cfg.kernels.n);
        static const std::set<std::string> kinds{"E", "K0", "K0_alt", "K1", "dtE"};
        if (!kinds.count(cfg.kernels.kind)) invalid(k.path("kind"), "unknown kernel '" + cfg.kernels.kind + "' (E, K0, K0_alt, K1, dtE)");
        if (cfg.kernels.n < 1) invalid(k.path("n"), "must be at least 1");
    }
    if (s.has("geodesic")) {
        Section g = s.child("geodesic");
        g.allow({"R_ID", "times", "t_min", "t_max", "count"});
        g.number("R_ID", cfg.geodesic.R_ID);
        parse_times(g, cfg.geodesic.times);
    }
    if (s.has("static")) {
        Section st = s.child("static");
        st.allow({"T", "cfl", "sample_every", "snapshot"});
        st.number("T", cfg.statics.T);
        st.number("cfl", cfg.statics.cfl);
        st.number("sample_every", cfg.statics.sample_every);
        st.text("snapshot", cfg.statics.snapshot_path);
        if (!(cfg.statics.sample_every > 0.0)) invalid(st.path("sample_every"), "must be positive");
    }
    if (s.has("output")) {
        Section o = s.child("output");
        o.allow({"csv", "diagnostics", "manifest"});
        o.text("csv", cfg.output.csv);
        o.text("diagnostics", cfg.output.diagnostics);
        o.text("manifest", cfg.output.manifest);
    }
    check_writable(cfg.output.csv, "config.output.csv");
    check_writable(cfg.output.diagnostics, "config.output.diagnostics");
    check_writable(cfg.output.manifest, "config.output.manifest");
    check_writable(cfg.statics.snapshot_path, "config.static.snapshot");
    for (const TimeSpec* t : {&cfg.times, &cfg.geodesic.times}) {
        if (t->times.empty() && (t->count < 1 || !(t->t_max >= t->t_min)))
            invalid("config.times", "need count >= 1 and t_max >= t_min");
    }
}

}  // namespace

std::vector<double> TimeSpec::resolve() const {
    if (!times.empty()) return times;
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = count == 1 ? t_min : t_min + (t_max - t_min) * i / (count - 1);
    return v;
}

DataKind data_kind_from_string(const std::string& s) {
    if (s == "zero") return DataKind::Zero;
    if (s == "constant") return DataKind::Constant;
    if (s == "bump") return DataKind::Bump;
    fail(ErrorKind::ConfigInvalid, "unknown data kind '" + s + "' (zero, constant, bump)");
}

NormKind norm_from_string(const std::string& s) {
    if (s == "L2") return NormKind::L2;
    if (s == "H1") return NormKind::H1;
    if (s == "H2_discrete") return NormKind::H2Discrete;
    fail(ErrorKind::ConfigInvalid, "unknown norm '" + s + "' (L2, H1, H2_discrete)");
}

CurvedMass RunConfig::curved_mass() const {
    if (mass_from_M) return CurvedMass::from_value(M, params.H);
    return kgds::curved_mass(params);
}

TransformConfig RunConfig::transform_config() const {
    TransformConfig cfg = transform;
    cfg.params = params;
    if (mass_from_M) {
        Complex sq = M * M;
        if (std::abs(sq.imag()) > 1e-14 * std::max(1.0, std::abs(sq)))
            fail(ErrorKind::ConfigInvalid, "config.mass.M: field solves need a real M^2");
    }
    cfg.mass = kgds::curved_mass(params);
    return cfg;
}

std::pair<RadialField, RadialField> RunConfig::initial_data() const {
    RadialField psi0 = RadialField::zeros(grid), psi1 = RadialField::zeros(grid);
    for (int i = 0; i < grid.n; ++i) {
        double shape = 0.0;
        if (data.kind == DataKind::Constant) {
            shape = 1.0;
        } else if (data.kind == DataKind::Bump) {
            double x = (grid.r(i) - data.center) / data.half_width;
            if (std::abs(x) < 1.0) {
                double q = 1.0 - x * x;
                shape = data.profile == BumpProfile::Poly6 ? std::pow(q, 6) : std::exp(1.0 - 1.0 / q);
            }
        }
        psi0.values[i] = data.amplitude * shape;
        psi1.values[i] = data.velocity_amplitude * shape;
    }
    if (data.normalize_to > 0.0) {
        NormKind norm = semilinear.picard.norm;
        double size = field_norm(psi0, norm) + field_norm(psi1, norm);
        if (!(size > 0.0)) fail(ErrorKind::ConfigInvalid, "config.data.normalize_to: data vanish");
        double k = data.normalize_to / size;
        for (int i = 0; i < grid.n; ++i) {
            psi0.values[i] *= k;
            psi1.values[i] *= k;
        }
    }
    return {psi0, psi1};
}

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::ConfigInvalid, origin + ": malformed JSON: " + e.what());
    }
    RunConfig cfg;
    try {
        parse_root(root, cfg);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigInvalid) fail(ErrorKind::ConfigInvalid, origin + ": " + e.what());
        throw;
    } catch (const json::exception& e) {
        fail(ErrorKind::ConfigInvalid, origin + ": " + e.what());
    }
    cfg.source_text = root.dump();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorKind::ConfigInvalid, "config file not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::IoError, "cannot read config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str(), path);
}

}  // namespace kgds::app
