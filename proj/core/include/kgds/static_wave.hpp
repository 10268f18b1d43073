#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgds/geometry.hpp"

namespace kgds {

inline constexpr double kSupportTol = 1e-12;

struct RadialGrid {
    double r_min = 1.0;
    double r_max = 2.0;
    int n = 16;
    double dr = 1.0 / 15.0;

    static RadialGrid uniform(double r_min, double r_max, int n);
    double r(int i) const { return r_min + dr * i; }
    std::vector<double> nodes() const;
    bool operator==(const RadialGrid& o) const { return r_min == o.r_min && r_max == o.r_max && n == o.n; }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> values;
    double time = 0.0;

    static RadialField zeros(const RadialGrid& grid, double time = 0.0);
    // First and last index with |value| > tol, or {-1, -1} when the field vanishes.
    std::pair<int, int> support(double tol = kSupportTol) const;
    // Smallest radius with |value| > tol; +inf for a vanishing field.
    double support_inner_radius(double tol = kSupportTol) const;
};

struct EnergySample {
    double t = 0.0;
    double E = 0.0;
};

// Second-order finite differences; one-sided second-order stencils at the ends.
std::vector<double> radial_gradient(std::span<const double> f, double dr);
std::vector<double> radial_second_derivative(std::span<const double> f, double dr);

// c^2 [F^2 f_rr + (2/r)(1 - R/(2r)) F f_r] by central differences.
RadialField radial_operator_apply(const RadialField& f, const PhysicalParams& p);

// 4 pi sum_i w_i [F^{-1} f_t^2 + c^2 F f_r^2 + (m^2 c^4/h^2) f^2] r_i^2 with trapezoid weights.
double energy(const RadialField& f, const RadialField& f_t, const PhysicalParams& p, bool include_mass);

// Explicit leapfrog on the flux form c^2 F r^{-2} d/dr(F r^2 d/dr). The end nodes follow
// v0 + s v1 (frozen for compactly supported data).
class LeapfrogStepper {
public:
    LeapfrogStepper(const RadialGrid& grid, const PhysicalParams& p, double dt);

    void start(std::span<const double> v0, std::span<const double> v1);
    void step();
    // Swap the two time levels so subsequent steps run backwards in time.
    void reverse();

    const std::vector<double>& current() const { return cur_; }
    const std::vector<double>& previous() const { return prev_; }
    double time() const { return time_; }
    double dt() const { return dt_; }
    int steps_taken() const { return steps_; }

    // Discrete energy between the previous and current level, exactly conserved by the scheme.
    double staggered_energy() const;
    void apply_operator(std::span<const double> v, std::vector<double>& out) const;
    // Largest stable step for this grid (Gershgorin bound on the operator).
    double stability_limit() const;

private:
    RadialGrid grid_;
    double c2_;
    double dt_;
    double time_ = 0.0;
    int steps_ = 0;
    double direction_ = 1.0;
    std::vector<double> up_, down_, weight_, kappa_;
    std::vector<double> prev_, cur_, next_, work_;
    std::vector<double> edge0_, edge1_;
    void set_edges(std::vector<double>& v, double t) const;
};

struct StaticOptions {
    double support_tol = kSupportTol;
    bool check_boundary = true;
    bool track_energy = true;
};

// Time history of one static solve, stored at every step.
class StaticSolution {
public:
    const RadialGrid& grid() const { return grid_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }
    double max_time() const { return dt_ * (steps_ - 2); }
    std::span<const double> step_values(int k) const;

    // Four-point Lagrange interpolation in time; writes grid().n values.
    void sample(double s, double* out) const;
    // Interpolated value at a single node.
    double sample_node(double s, int i) const;
    RadialField at(double s) const;
    RadialField velocity_at(double s) const;
    std::vector<RadialField> at(std::span<const double> times) const;

    const std::vector<EnergySample>& energy_history() const { return energy_; }
    double energy_drift() const;

    void write_binary(const std::string& path) const;
    static StaticSolution read_binary(const std::string& path);

private:
    friend StaticSolution solve_static(const RadialField&, const RadialField&, double, double, const PhysicalParams&,
                                       const StaticOptions&);
    RadialGrid grid_;
    double dt_ = 0.0;
    int steps_ = 0;
    int parity_ = 0;  // +1 even in s, -1 odd, 0 generic
    std::vector<double> data_;
    std::vector<EnergySample> energy_;
    void stencil(double s, int& base, double w[4], int idx[4], double sign[4]) const;
};

double static_time_step(const RadialGrid& grid, const PhysicalParams& p, double cfl);

// v_ss = A v with v(0) = v0, v_s(0) = v1, integrated to static time T (plus two guard steps).
StaticSolution solve_static(const RadialField& v0, const RadialField& v1, double T, double cfl, const PhysicalParams& p,
                            const StaticOptions& options = {});

}  // namespace kgds
