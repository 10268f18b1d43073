#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include <kgds/error.hpp>
#include <kgds/geometry.hpp>
#include <kgds/kernels.hpp>
#include <kgds/semilinear.hpp>
#include <kgds/static_wave.hpp>
#include <kgds/transform.hpp>
#include <kgds/verify.hpp>

#include "output.hpp"

namespace kgds::app {

namespace {

using ojson = nlohmann::ordered_json;

class Timer {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Paths {
    std::string csv, diagnostics, manifest;
};

Paths resolve_paths(const RunConfig& cfg, const OutputOverrides& o) {
    Paths p;
    p.csv = o.csv.empty() ? cfg.output.csv : o.csv;
    p.diagnostics = o.diagnostics.empty() ? cfg.output.diagnostics : o.diagnostics;
    p.manifest = o.manifest.empty() ? cfg.output.manifest : o.manifest;
    if (p.csv.empty()) fail(ErrorKind::ConfigInvalid, "no CSV output path (config.output.csv or --out)");
    if (p.manifest.empty()) p.manifest = p.csv + ".manifest.json";
    return p;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(cfg.source_text); }

// Writes CSV, optional diagnostics with the config hash, and the manifest.
CommandOutcome finish(const std::string& command, const RunConfig& cfg, const Paths& paths, const CsvTable& table,
                      ojson diagnostics, const Timer& timer, std::string summary,
                      const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    CommandOutcome out;
    std::string hash = config_hash(cfg);
    write_text_file(paths.csv, table.str());
    out.artifacts.push_back(paths.csv);
    for (const auto& e : extra) out.artifacts.push_back(e.first);
    if (!paths.diagnostics.empty()) {
        ojson doc;
        doc["command"] = command;
        doc["config_hash"] = hash;
        for (auto it = diagnostics.begin(); it != diagnostics.end(); ++it) doc[it.key()] = it.value();
        write_text_file(paths.diagnostics, doc.dump(2) + "\n");
        out.artifacts.push_back(paths.diagnostics);
    }
    Manifest m{command, hash, cfg.rng_seed, timer.seconds(), out.artifacts};
    write_manifest(paths.manifest, m);
    out.artifacts.push_back(paths.manifest);
    out.summary = std::move(summary);
    return out;
}

// Rows (t, r, value, derivative) for every node of every snapshot.
void add_field_rows(CsvTable& table, const SpaceTimeField& f, const SpaceTimeField& df) {
    for (std::size_t k = 0; k < f.size(); ++k) {
        const RadialField& s = f.snapshots[k];
        const RadialField& d = df.snapshots[k];
        for (int i = 0; i < s.grid.n; ++i) table.add({f.times[k], s.grid.r(i), s.values[i], d.values[i]});
    }
}

bool uniform_times(const std::vector<double>& t) {
    if (t.size() < 5) return false;
    double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (std::abs(t[k] - (t.front() + h * static_cast<double>(k))) > 1e-9 * std::max(1.0, std::abs(t.back()))) return false;
    }
    return true;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    std::string::size_type dot = path.rfind('.');
    std::string::size_type slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

CommandOutcome run_hyp2f1(Complex a, Complex b, Complex c, double z, const std::string& out) {
    Complex v = gauss_2f1({a, b, c, z});
    CommandOutcome res;
    std::ostringstream os;
    os << format_double(v.real()) << " " << format_double(v.imag());
    res.summary = os.str();
    if (!out.empty()) {
        CsvTable t({"a_re", "a_im", "b_re", "b_im", "c_re", "c_im", "z", "re", "im"});
        t.add({a.real(), a.imag(), b.real(), b.imag(), c.real(), c.imag(), z, v.real(), v.imag()});
        write_text_file(out, t.str());
        res.artifacts.push_back(out);
    }
    return res;
}

CommandOutcome run_kernels_sample(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    const KernelSpec& k = cfg.kernels;
    double H = cfg.params.H;
    CurvedMass M = cfg.curved_mass();
    double b = k.b;
    double L = phi(k.t, H) - phi(b, H);
    if (!(L > 0.0)) fail(ErrorKind::ConfigInvalid, "config.kernels: need t > b");
    bool alt = k.kind == "K0_alt";
    bool with_dt = k.kind == "dtE";
    std::vector<std::string> header = {"r", "t", "b", "M_re", "M_im", "E_re", "E_im", "K0_re", "K0_im", "K1_re", "K1_im", "zeta"};
    if (with_dt) {
        header.push_back("dtE_re");
        header.push_back("dtE_im");
    }
    CsvTable table(header);
    for (int i = 0; i < k.n; ++i) {
        // Cell midpoints keep the samples off the cone edge.
        double r = L * (i + 0.5) / k.n;
        KernelEval e = eval_E(r, k.t, b, M, H);
        Complex k0 = alt ? eval_K0_alt(r, k.t, M, H).value : eval_K0_direct(r, k.t, M, H).value;
        Complex k1 = eval_K1(r, k.t, M, H).value;
        std::vector<double> row = {r, k.t, b, M.M.real(), M.M.imag(), e.value.real(), e.value.imag(),
                                   k0.real(), k0.imag(), k1.real(), k1.imag(), e.zeta};
        if (with_dt) {
            Complex d = eval_dtE(r, k.t, b, M, H);
            row.push_back(d.real());
            row.push_back(d.imag());
        }
        table.add(row);
    }
    ojson d;
    d["K0_form"] = alt ? "alt" : "direct";
    d["t"] = k.t;
    d["b"] = b;
    d["M"] = ojson::array({M.M.real(), M.M.imag()});
    d["regime"] = std::string(to_string(M.regime));
    d["rows"] = table.rows();
    return finish("kernels sample", cfg, paths, table, d, timer, std::to_string(table.rows()) + " kernel samples");
}

CommandOutcome run_geodesic(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    double R_ID = cfg.geodesic.R_ID;
    CsvTable table({"t", "r", "influence_radius"});
    double worst = 0.0;
    for (double t : cfg.geodesic.times.resolve()) {
        double r = geodesic_radius(t, R_ID, cfg.params);
        worst = std::max(worst, std::abs(geodesic_residual(t, r, R_ID, cfg.params)));
        table.add({t, r, influence_radius(t, R_ID, cfg.params)});
    }
    ojson d;
    d["R_ID"] = R_ID;
    d["R_sch"] = cfg.params.schwarzschild_radius();
    d["limit_radius"] = geodesic_limit_radius(R_ID, cfg.params);
    d["support_margin"] = support_margin(R_ID, cfg.params);
    d["max_abs_residual"] = worst;
    return finish("geodesic", cfg, paths, table, d, timer, "max residual " + format_double(worst));
}

CommandOutcome run_solve_static(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    auto [v0, v1] = cfg.initial_data();
    StaticSolution sol = solve_static(v0, v1, cfg.statics.T, cfg.statics.cfl, cfg.params);
    CsvTable table({"t", "r", "v", "v_t"});
    int count = static_cast<int>(std::floor(cfg.statics.T / cfg.statics.sample_every + 1e-9));
    SpaceTimeField f, ft;
    for (int k = 0; k <= count; ++k) {
        double s = std::min(k * cfg.statics.sample_every, cfg.statics.T);
        f.times.push_back(s);
        f.snapshots.push_back(sol.at(s));
        ft.times.push_back(s);
        ft.snapshots.push_back(sol.velocity_at(s));
    }
    add_field_rows(table, f, ft);
    CommandOutcome out;
    if (!cfg.statics.snapshot_path.empty()) sol.write_binary(cfg.statics.snapshot_path);
    ojson d;
    d["dt"] = sol.dt();
    d["steps"] = sol.steps();
    d["energy_drift"] = sol.energy_drift();
    if (!cfg.statics.snapshot_path.empty()) d["snapshot"] = cfg.statics.snapshot_path;
    out = finish("solve-static", cfg, paths, table, d, timer, "energy drift " + format_double(sol.energy_drift()));
    if (!cfg.statics.snapshot_path.empty()) out.artifacts.push_back(cfg.statics.snapshot_path);
    return out;
}

CommandOutcome run_solve_linear(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    TransformConfig tc = cfg.transform_config();
    auto [psi0, psi1] = cfg.initial_data();
    std::vector<double> times = cfg.times.resolve();
    if (!uniform_times(times)) fail(ErrorKind::ConfigInvalid, "config.times: solve-linear needs at least 5 uniformly spaced times");
    SpaceTimeField psi = solve_linear_homogeneous(psi0, psi1, times, tc);
    CsvTable table({"t", "r", "psi", "dpsi_dt"});
    add_field_rows(table, psi, time_derivative(psi));
    ojson d;
    d["M"] = ojson::array({tc.mass.M.real(), tc.mass.M.imag()});
    d["regime"] = std::string(to_string(tc.mass.regime));
    d["max_imag_residue"] = psi.max_imag_residue;
    ojson norms = ojson::array();
    for (std::size_t k = 0; k < psi.size(); ++k) norms.push_back(ojson::array({psi.times[k], l2_norm(psi.snapshots[k])}));
    d["l2_norm"] = norms;
    if (tc.R_ID > 0.0) d["support_confined"] = support_confined(psi, tc.R_ID, tc.params);
    return finish("solve-linear", cfg, paths, table, d, timer, std::to_string(psi.size()) + " snapshots");
}

CommandOutcome run_solve_semilinear(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    TransformConfig tc = cfg.transform_config();
    auto [psi0, psi1] = cfg.initial_data();
    const SemilinearSpec& sp = cfg.semilinear;
    ojson d;
    d["mode"] = sp.mode;
    d["nonlinearity"] = std::string(to_string(sp.nonlinearity.kind));
    d["alpha"] = sp.nonlinearity.alpha;
    d["potential"] = std::string(to_string(sp.potential.kind));
    d["norm"] = std::string(to_string(sp.picard.norm));
    CsvTable table({"t", "weighted_norm"});
    std::vector<std::pair<std::string, std::string>> extra;
    std::string summary;
    if (sp.mode == "lifespan") {
        LifespanResult r = lifespan_run(psi0, psi1, sp.nonlinearity, sp.picard.gamma, sp.lifespan_eps, tc, sp.lifespan);
        for (const auto& [t, w] : r.history.history) table.add({t, w});
        d["gamma"] = sp.picard.gamma;
        d["eps"] = sp.lifespan_eps;
        d["lifespan"] = r.T;
        d["inside_blowup_panel"] = r.inside_blowup_panel;
        summary = "lifespan " + format_double(r.T);
    } else {
        PicardResult r = picard_iterate(psi0, psi1, sp.nonlinearity, sp.potential, sp.picard, tc);
        const PicardDiagnostics& g = r.diagnostics;
        for (const auto& [t, w] : g.history.history) table.add({t, w});
        ojson qtable = ojson::array();
        for (std::size_t n = 0; n < g.distances.size(); ++n) {
            ojson row;
            row["iteration"] = n + 1;
            row["distance"] = g.distances[n];
            if (n >= 1 && n - 1 < g.contraction.size()) row["q"] = g.contraction[n - 1];
            qtable.push_back(row);
        }
        d["gamma"] = sp.picard.gamma;
        d["iterations"] = g.iterations;
        d["converged"] = g.converged;
        d["max_contraction"] = g.max_contraction;
        d["q_table"] = qtable;
        CsvTable q({"iteration", "distance", "q"});
        for (std::size_t n = 0; n < g.distances.size(); ++n) {
            double qn = n >= 1 && n - 1 < g.contraction.size() ? g.contraction[n - 1] : std::nan("");
            q.add({static_cast<double>(n + 1), g.distances[n], qn});
        }
        extra.emplace_back(sibling_path(paths.csv, "_q"), q.str());
        d["weighted_sup"] = g.weighted_sup;
        d["eps"] = g.eps;
        d["ball_bound"] = g.ball_bound;
        d["support_confined"] = g.support_confined;
        d["max_imag"] = g.max_imag;
        d["richardson"] = g.richardson;
        d["residual"] = g.residual;
        d["residual_scale"] = g.residual_scale;
        d["eps0"] = g.eps0;
        summary = "converged=" + std::string(g.converged ? "true" : "false") + " iterations=" + std::to_string(g.iterations) +
                  " max_q=" + format_double(g.max_contraction);
    }
    for (const auto& [path, text] : extra) write_text_file(path, text);
    CommandOutcome out = finish("solve-semilinear", cfg, paths, table, d, timer, summary, extra);
    return out;
}

CommandOutcome run_decay_fit(const RunConfig& cfg, const OutputOverrides& o) {
    Timer timer;
    Paths paths = resolve_paths(cfg, o);
    TransformConfig tc = cfg.transform_config();
    auto [psi0, psi1] = cfg.initial_data();
    std::vector<double> times = cfg.times.resolve();
    SpaceTimeField psi = solve_linear_homogeneous(psi0, psi1, times, tc);
    CsvTable table({"t", "l2_norm"});
    std::vector<double> norms;
    for (std::size_t k = 0; k < psi.size(); ++k) {
        norms.push_back(l2_norm(psi.snapshots[k]));
        table.add({psi.times[k], norms.back()});
    }
    ExponentFit fit = fit_exponent(psi.times, norms);
    double expected = tc.mass.M.real() - 1.5 * tc.params.H;
    ojson d;
    d["M"] = ojson::array({tc.mass.M.real(), tc.mass.M.imag()});
    d["regime"] = std::string(to_string(tc.mass.regime));
    d["fitted_exponent"] = fit.slope;
    d["r2"] = fit.r2;
    d["constant_data_exponent"] = expected;
    return finish("decay-fit", cfg, paths, table, d, timer, "fitted exponent " + format_double(fit.slope));
}

CommandOutcome run_verify(const std::vector<std::string>& lemmas, const std::string& out, std::uint64_t seed,
                          const std::string& manifest) {
    Timer timer;
    if (out.empty()) fail(ErrorKind::ConfigInvalid, "verify needs --out");
    std::vector<BoundId> ids;
    bool all = lemmas.empty();
    for (const auto& l : lemmas) {
        if (l == "all") {
            all = true;
            continue;
        }
        try {
            ids.push_back(bound_id_from_string(l));
        } catch (const Error& e) {
            fail(ErrorKind::ConfigInvalid, std::string("--lemma: ") + e.what());
        }
    }
    if (all) ids.clear();
    std::vector<BoundReport> reports = run_sweep(ids);

    ojson request;
    request["lemmas"] = all ? std::vector<std::string>{"all"} : lemmas;
    request["rng_seed"] = seed;
    std::string hash = sha256_hex(request.dump());
    ojson body = ojson::parse(reports_to_json(reports));
    ojson doc;
    doc["config_hash"] = hash;
    doc["rng_seed"] = seed;
    doc["count"] = reports.size();
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    write_text_file(out, doc.dump(2) + "\n");

    CommandOutcome res;
    res.artifacts.push_back(out);
    std::string mpath = manifest.empty() ? out + ".manifest.json" : manifest;
    write_manifest(mpath, Manifest{"verify", hash, seed, timer.seconds(), res.artifacts});
    res.artifacts.push_back(mpath);
    std::size_t passed = 0;
    for (const auto& r : reports) passed += r.pass ? 1 : 0;
    res.summary = std::to_string(passed) + "/" + std::to_string(reports.size()) + " bounds pass";
    for (const auto& r : reports) {
        if (!r.pass) res.summary += "\n  " + r.failure;
    }
    res.exit_code = passed == reports.size() ? 0 : 1;
    return res;
}

}  // namespace kgds::app
