#include "kgds/static_wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "kgds/error.hpp"

namespace kgds {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr char kSnapshotMagic[8] = {'K', 'G', 'D', 'S', 'S', 'N', 'P', '1'};

void check_grid(const RadialGrid& g, const PhysicalParams& p) {
    double R = p.schwarzschild_radius();
    if (g.n < 16) fail(ErrorKind::InvalidParams, "radial grid needs at least 16 nodes");
    if (!(g.r_min > 0.0) || g.r_min < R * (1.0 + 1e-6))
        fail(ErrorKind::InvalidParams, "radial grid must start outside the horizon");
    if (!(g.r_max > g.r_min)) fail(ErrorKind::InvalidParams, "radial grid needs r_max > r_min");
}

bool all_zero(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void cubic_weights(double u, double w[4]) {
    w[0] = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    w[1] = u * (u - 2.0) * (u - 3.0) / 2.0;
    w[2] = -u * (u - 1.0) * (u - 3.0) / 2.0;
    w[3] = u * (u - 1.0) * (u - 2.0) / 6.0;
}

void cubic_weight_derivatives(double u, double w[4]) {
    w[0] = -((u - 2.0) * (u - 3.0) + (u - 1.0) * (u - 3.0) + (u - 1.0) * (u - 2.0)) / 6.0;
    w[1] = ((u - 2.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 2.0)) / 2.0;
    w[2] = -((u - 1.0) * (u - 3.0) + u * (u - 3.0) + u * (u - 1.0)) / 2.0;
    w[3] = ((u - 1.0) * (u - 2.0) + u * (u - 2.0) + u * (u - 1.0)) / 6.0;
}

}  // namespace

RadialGrid RadialGrid::uniform(double r_min, double r_max, int n) {
    if (n < 2 || !(r_max > r_min)) fail(ErrorKind::InvalidParams, "invalid radial grid");
    RadialGrid g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n = n;
    g.dr = (r_max - r_min) / (n - 1);
    return g;
}

std::vector<double> RadialGrid::nodes() const {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = r(i);
    return out;
}

RadialField RadialField::zeros(const RadialGrid& grid, double time) {
    return RadialField{grid, std::vector<double>(grid.n, 0.0), time};
}

std::pair<int, int> RadialField::support(double tol) const {
    int first = -1;
    int last = -1;
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        if (std::abs(values[i]) > tol) {
            if (first < 0) first = i;
            last = i;
        }
    }
    return {first, last};
}

double RadialField::support_inner_radius(double tol) const {
    auto [first, last] = support(tol);
    (void)last;
    return first < 0 ? std::numeric_limits<double>::infinity() : grid.r(first);
}

std::vector<double> radial_gradient(std::span<const double> f, double dr) {
    std::size_t n = f.size();
    std::vector<double> g(n, 0.0);
    if (n < 3) return g;
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - f[i - 1]) / (2.0 * dr);
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dr);
    g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dr);
    return g;
}

std::vector<double> radial_second_derivative(std::span<const double> f, double dr) {
    std::size_t n = f.size();
    std::vector<double> g(n, 0.0);
    if (n < 4) return g;
    double h2 = dr * dr;
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    g[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return g;
}

RadialField radial_operator_apply(const RadialField& f, const PhysicalParams& p) {
    const RadialGrid& g = f.grid;
    std::vector<double> fr = radial_gradient(f.values, g.dr);
    std::vector<double> frr = radial_second_derivative(f.values, g.dr);
    double R = p.schwarzschild_radius();
    double c2 = p.c * p.c;
    RadialField out{g, std::vector<double>(g.n, 0.0), f.time};
    for (int i = 0; i < g.n; ++i) {
        double r = g.r(i);
        double F = 1.0 - R / r;
        out.values[i] = c2 * (F * F * frr[i] + (2.0 / r) * (1.0 - 0.5 * R / r) * F * fr[i]);
    }
    return out;
}

double energy(const RadialField& f, const RadialField& f_t, const PhysicalParams& p, bool include_mass) {
    if (!(f.grid == f_t.grid)) fail(ErrorKind::InvalidParams, "energy needs fields on one grid");
    const RadialGrid& g = f.grid;
    std::vector<double> fr = radial_gradient(f.values, g.dr);
    double R = p.schwarzschild_radius();
    double c2 = p.c * p.c;
    double mass = include_mass ? p.mass_term() : 0.0;
    double sum = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double r = g.r(i);
        double F = 1.0 - R / r;
        double w = (i == 0 || i == g.n - 1) ? 0.5 * g.dr : g.dr;
        double density = f_t.values[i] * f_t.values[i] / F + c2 * F * fr[i] * fr[i] + mass * f.values[i] * f.values[i];
        sum += w * density * r * r;
    }
    return kFourPi * sum;
}

LeapfrogStepper::LeapfrogStepper(const RadialGrid& grid, const PhysicalParams& p, double dt)
    : grid_(grid), c2_(p.c * p.c), dt_(dt) {
    check_grid(grid, p);
    int n = grid.n;
    double R = p.schwarzschild_radius();
    double dr = grid.dr;
    up_.assign(n, 0.0);
    down_.assign(n, 0.0);
    weight_.assign(n, 0.0);
    kappa_.assign(n, 0.0);
    for (int e = 0; e + 1 < n; ++e) {
        double rh = grid.r_min + dr * (e + 0.5);
        kappa_[e] = (1.0 - R / rh) * rh * rh;
    }
    for (int i = 0; i < n; ++i) {
        double r = grid.r(i);
        double F = 1.0 - R / r;
        weight_[i] = r * r * dr / F;
        if (i > 0 && i < n - 1) {
            double s = c2_ * F / (r * r * dr * dr);
            up_[i] = s * kappa_[i];
            down_[i] = s * kappa_[i - 1];
        }
    }
}

void LeapfrogStepper::apply_operator(std::span<const double> v, std::vector<double>& out) const {
    int n = grid_.n;
    out.assign(n, 0.0);
    for (int i = 1; i < n - 1; ++i) out[i] = up_[i] * (v[i + 1] - v[i]) - down_[i] * (v[i] - v[i - 1]);
}

double LeapfrogStepper::stability_limit() const {
    double lam = 0.0;
    for (int i = 1; i < grid_.n - 1; ++i) lam = std::max(lam, 2.0 * (up_[i] + down_[i]));
    return lam > 0.0 ? 2.0 / std::sqrt(lam) : std::numeric_limits<double>::infinity();
}

void LeapfrogStepper::set_edges(std::vector<double>& v, double t) const {
    int n = grid_.n;
    v[0] = edge0_[0] + t * edge1_[0];
    v[n - 1] = edge0_[1] + t * edge1_[1];
}

void LeapfrogStepper::start(std::span<const double> v0, std::span<const double> v1) {
    int n = grid_.n;
    if (static_cast<int>(v0.size()) != n || static_cast<int>(v1.size()) != n)
        fail(ErrorKind::InvalidParams, "initial data size does not match the grid");
    edge0_ = {v0[0], v0[n - 1]};
    edge1_ = {v1[0], v1[n - 1]};
    prev_.assign(v0.begin(), v0.end());
    apply_operator(v0, work_);
    cur_.resize(n);
    for (int i = 0; i < n; ++i) cur_[i] = v0[i] + dt_ * v1[i] + 0.5 * dt_ * dt_ * work_[i];
    time_ = dt_;
    direction_ = 1.0;
    set_edges(cur_, time_);
    steps_ = 1;
}

void LeapfrogStepper::step() {
    int n = grid_.n;
    apply_operator(cur_, work_);
    next_.resize(n);
    double dt2 = dt_ * dt_;
    for (int i = 1; i < n - 1; ++i) next_[i] = 2.0 * cur_[i] - prev_[i] + dt2 * work_[i];
    time_ += direction_ * dt_;
    set_edges(next_, time_);
    std::swap(prev_, cur_);
    std::swap(cur_, next_);
    ++steps_;
}

void LeapfrogStepper::reverse() {
    std::swap(prev_, cur_);
    time_ -= direction_ * dt_;
    direction_ = -direction_;
}

double LeapfrogStepper::staggered_energy() const {
    int n = grid_.n;
    double kinetic = 0.0;
    for (int i = 1; i < n - 1; ++i) {
        double d = (cur_[i] - prev_[i]) / dt_;
        kinetic += weight_[i] * d * d;
    }
    double potential = 0.0;
    for (int e = 0; e + 1 < n; ++e) potential += kappa_[e] * (cur_[e + 1] - cur_[e]) * (prev_[e + 1] - prev_[e]);
    potential *= c2_ / grid_.dr;
    return kFourPi * (kinetic + potential);
}

double static_time_step(const RadialGrid& grid, const PhysicalParams& p, double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        std::ostringstream os;
        os << "cfl must lie in (0,1], got " << cfl;
        fail(ErrorKind::CFLViolation, os.str());
    }
    double cmax = 0.0;
    for (int i = 0; i < grid.n; ++i) cmax = std::max(cmax, char_speed_bound(grid.r(i), p));
    double dt = cfl * grid.dr / cmax;
    LeapfrogStepper probe(grid, p, dt);
    if (dt > probe.stability_limit()) {
        std::ostringstream os;
        os << "time step " << dt << " exceeds the stability limit " << probe.stability_limit();
        fail(ErrorKind::CFLViolation, os.str());
    }
    return dt;
}

StaticSolution solve_static(const RadialField& v0, const RadialField& v1, double T, double cfl, const PhysicalParams& p,
                            const StaticOptions& options) {
    if (!(v0.grid == v1.grid)) fail(ErrorKind::InvalidParams, "initial fields must share a grid");
    const RadialGrid& grid = v0.grid;
    check_grid(grid, p);
    if (!(T >= 0.0) || !std::isfinite(T)) fail(ErrorKind::InvalidParams, "static time must be finite and >= 0");
    if (p.H > 0.0 && T > (1.0 + 1e-9) / p.H)
        fail(ErrorKind::InvalidParams, "static time beyond the horizon 1/H is never needed");
    double dt = static_time_step(grid, p, cfl);
    int n = grid.n;

    StaticSolution sol;
    sol.grid_ = grid;
    sol.dt_ = dt;
    sol.steps_ = static_cast<int>(std::ceil(T / dt)) + 2;
    bool v1_zero = all_zero(v1.values);
    bool v0_zero = all_zero(v0.values);
    sol.parity_ = v1_zero ? 1 : (v0_zero ? -1 : 0);
    sol.data_.resize(static_cast<std::size_t>(sol.steps_ + 1) * n);
    std::copy(v0.values.begin(), v0.values.end(), sol.data_.begin());
    if (v0_zero && v1_zero) {
        std::fill(sol.data_.begin(), sol.data_.end(), 0.0);
        if (options.track_energy) sol.energy_.push_back({0.5 * dt, 0.0});
        return sol;
    }

    LeapfrogStepper stepper(grid, p, dt);
    stepper.start(v0.values, v1.values);
    const int probe[4] = {1, 2, n - 3, n - 2};
    auto check = [&](const std::vector<double>& v, double t) {
        if (!options.check_boundary) return;
        for (int i : probe) {
            double expected = v0.values[i] + t * v1.values[i];
            if (std::abs(v[i] - expected) > options.support_tol) {
                std::ostringstream os;
                os << "solution reached the grid end at r=" << grid.r(i) << " (static time " << t << ")";
                fail(ErrorKind::BoundaryContamination, os.str());
            }
        }
    };
    for (int k = 1; k <= sol.steps_; ++k) {
        if (k > 1) stepper.step();
        const std::vector<double>& cur = stepper.current();
        check(cur, stepper.time());
        std::copy(cur.begin(), cur.end(), sol.data_.begin() + static_cast<std::ptrdiff_t>(k) * n);
        if (options.track_energy) sol.energy_.push_back({stepper.time() - 0.5 * dt, stepper.staggered_energy()});
    }
    return sol;
}

std::span<const double> StaticSolution::step_values(int k) const {
    if (k < 0 || k > steps_) fail(ErrorKind::DomainViolation, "step index out of range");
    return {data_.data() + static_cast<std::size_t>(k) * grid_.n, static_cast<std::size_t>(grid_.n)};
}

void StaticSolution::stencil(double s, int& base, double w[4], int idx[4], double sign[4]) const {
    double x = s / dt_;
    if (!(x >= -1e-9) || x > steps_ + 1e-9) {
        std::ostringstream os;
        os << "static time " << s << " outside the stored history [0, " << dt_ * steps_ << "]";
        fail(ErrorKind::DomainViolation, os.str());
    }
    x = std::clamp(x, 0.0, static_cast<double>(steps_));
    int i = static_cast<int>(std::floor(x));
    base = i - 1;
    if (base < 0 && parity_ == 0) base = 0;
    if (base + 3 > steps_) base = steps_ - 3;
    cubic_weights(x - base, w);
    for (int k = 0; k < 4; ++k) {
        int j = base + k;
        sign[k] = 1.0;
        if (j < 0) {
            j = -j;
            sign[k] = static_cast<double>(parity_);
        }
        idx[k] = j;
    }
}

void StaticSolution::sample(double s, double* out) const {
    int base;
    double w[4];
    int idx[4];
    double sign[4];
    stencil(s, base, w, idx, sign);
    int n = grid_.n;
    const double* rows[4];
    double c[4];
    for (int k = 0; k < 4; ++k) {
        rows[k] = data_.data() + static_cast<std::size_t>(idx[k]) * n;
        c[k] = w[k] * sign[k];
    }
    for (int i = 0; i < n; ++i) out[i] = c[0] * rows[0][i] + c[1] * rows[1][i] + c[2] * rows[2][i] + c[3] * rows[3][i];
}

double StaticSolution::sample_node(double s, int i) const {
    int base;
    double w[4];
    int idx[4];
    double sign[4];
    stencil(s, base, w, idx, sign);
    int n = grid_.n;
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += w[k] * sign[k] * data_[static_cast<std::size_t>(idx[k]) * n + i];
    return v;
}

RadialField StaticSolution::at(double s) const {
    RadialField f{grid_, std::vector<double>(grid_.n), s};
    sample(s, f.values.data());
    return f;
}

RadialField StaticSolution::velocity_at(double s) const {
    int base;
    double w[4];
    int idx[4];
    double sign[4];
    stencil(s, base, w, idx, sign);
    cubic_weight_derivatives(s / dt_ - base, w);
    int n = grid_.n;
    RadialField f{grid_, std::vector<double>(n, 0.0), s};
    for (int k = 0; k < 4; ++k) {
        const double* row = data_.data() + static_cast<std::size_t>(idx[k]) * n;
        double c = w[k] * sign[k] / dt_;
        for (int i = 0; i < n; ++i) f.values[i] += c * row[i];
    }
    return f;
}

std::vector<RadialField> StaticSolution::at(std::span<const double> times) const {
    std::vector<RadialField> out;
    out.reserve(times.size());
    for (double s : times) out.push_back(at(s));
    return out;
}

double StaticSolution::energy_drift() const {
    if (energy_.empty() || energy_.front().E == 0.0) return 0.0;
    double e0 = energy_.front().E;
    double drift = 0.0;
    for (const auto& e : energy_) drift = std::max(drift, std::abs(e.E - e0) / e0);
    return drift;
}

void StaticSolution::write_binary(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
    os.write(kSnapshotMagic, sizeof kSnapshotMagic);
    auto put = [&](const auto& v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(grid_.r_min);
    put(grid_.r_max);
    put(grid_.n);
    put(dt_);
    put(steps_);
    put(parity_);
    os.write(reinterpret_cast<const char*>(data_.data()), static_cast<std::streamsize>(data_.size() * sizeof(double)));
    if (!os) fail(ErrorKind::IoError, "failed writing " + path);
}

StaticSolution StaticSolution::read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::IoError, "cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0)
        fail(ErrorKind::IoError, path + " is not a snapshot file");
    StaticSolution sol;
    auto get = [&](auto& v) { is.read(reinterpret_cast<char*>(&v), sizeof v); };
    double r_min, r_max;
    int n;
    get(r_min);
    get(r_max);
    get(n);
    get(sol.dt_);
    get(sol.steps_);
    get(sol.parity_);
    if (!is || n < 2 || sol.steps_ < 3) fail(ErrorKind::IoError, "corrupt snapshot header in " + path);
    sol.grid_ = RadialGrid::uniform(r_min, r_max, n);
    sol.data_.resize(static_cast<std::size_t>(sol.steps_ + 1) * n);
    is.read(reinterpret_cast<char*>(sol.data_.data()), static_cast<std::streamsize>(sol.data_.size() * sizeof(double)));
    if (!is) fail(ErrorKind::IoError, "truncated snapshot file " + path);
    return sol;
}

}  // namespace kgds
