#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "kgds/kernels.hpp"
#include "kgds/quadrature.hpp"
#include "kgds/static_wave.hpp"

namespace kgds {

struct SpaceTimeField {
    std::vector<double> times;
    std::vector<RadialField> snapshots;
    // Largest |Im| dropped when the complex quadrature was reduced to a real field.
    double max_imag_residue = 0.0;

    std::size_t size() const { return times.size(); }
    const RadialGrid& grid() const { return snapshots.front().grid; }
    // Throws InvalidParams unless times increase strictly and all snapshots share a grid.
    void validate() const;
};

CurvedMass curved_mass(const PhysicalParams& p);

enum class LiouvilleDirection { ToU, ToPsi };
// u = e^{3Ht/2} psi (ToU) and back (ToPsi).
SpaceTimeField liouville(const SpaceTimeField& f, LiouvilleDirection direction, const PhysicalParams& p);

struct TransformConfig {
    PhysicalParams params;
    CurvedMass mass;
    int n_b = 8;              // source-time nodes per panel
    int n_r = 32;             // static-time interpolation nodes
    QuadratureRule rule = QuadratureRule::GaussLegendre;
    double panel_width = 0.5; // source-time panel width in units of 1/H
    double cfl = 0.5;
    double quad_tol = 1e-5;   // Richardson tolerance relative to the field scale
    bool richardson_check = true;
    bool strict_support = false;
    double R_ID = 0.0;        // inner support radius of the data, used in strict mode
    int kernel_nodes = 16;    // Gauss nodes per kernel subinterval

    // Mass taken from params (principal root).
    static TransformConfig from_params(const PhysicalParams& p);
    void validate() const;
};

// Interpolation layout of the normalized static time u = s / phi(tau) on [0, 1]: panels of
// Lagrange nodes (8 Gauss nodes per panel, hat functions for trapezoid, quadratics for Simpson).
struct StaticTimeLayout {
    std::vector<double> u;
    std::vector<double> edges;              // panel edges, edges.front() = 0, edges.back() = 1
    std::vector<std::vector<int>> panels;   // node indices per panel

    static StaticTimeLayout build(QuadratureRule rule, int n_r);
};

// Product-integration weights for lag tau:
//   int_0^{phi(tau)} K(s, tau) g(s) ds ~ sum_j w_j g(phi(tau) u_j).
struct LagWeights {
    double tau = 0.0;
    double length = 0.0;          // phi(tau)
    std::vector<Complex> k1;      // K = K1
    std::vector<Complex> k0_k1;   // K = 2 K0 + 3H K1 (homogeneous solution only)
};

LagWeights compute_lag_weights(double tau, const StaticTimeLayout& layout, const CurvedMass& M, double H,
                               int kernel_nodes, bool with_k0);

// Thread-safe write-once cache of lag weights keyed by tau.
class LagWeightCache {
public:
    LagWeightCache(const CurvedMass& M, double H, QuadratureRule rule, int n_r, int kernel_nodes);

    std::shared_ptr<const LagWeights> get(double tau, bool with_k0) const;
    const StaticTimeLayout& layout() const { return layout_; }
    std::size_t size() const;

private:
    CurvedMass M_;
    double H_;
    int kernel_nodes_;
    StaticTimeLayout layout_;
    mutable std::mutex mutex_;
    mutable std::map<long long, std::shared_ptr<const LagWeights>> k1_only_, full_;
};

// Process-wide cache shared by every solve with the same kernel and layout parameters.
std::shared_ptr<const LagWeightCache> shared_lag_cache(const CurvedMass& M, double H, QuadratureRule rule, int n_r,
                                                       int kernel_nodes);
void clear_shared_lag_caches();

// psi for source-free data psi(0) = psi0, psi_t(0) = psi1 at the requested times.
SpaceTimeField solve_linear_homogeneous(const RadialField& psi0, const RadialField& psi1,
                                        std::span<const double> t_out, const TransformConfig& cfg);

// Source-time mesh on [0, t_max]: uniform panels with n_b rule nodes each.
class TimeMesh {
public:
    TimeMesh(double t_max, double panel_width, int n_b, QuadratureRule rule);

    double t_max() const { return edges_.back(); }
    int panels() const { return static_cast<int>(edges_.size()) - 1; }
    double edge(int k) const { return edges_[k]; }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    int node_panel(int j) const { return node_panel_[j]; }
    std::span<const int> panel_nodes(int k) const;
    int n_b() const { return n_b_; }
    QuadratureRule rule() const { return rule_; }
    // Sorted union of nodes and panel edges: times at which the Duhamel term is exact to
    // quadrature order.
    const std::vector<double>& eval_times() const { return eval_times_; }
    // Panel with edge(k) <= t < edge(k + 1); the last panel for t = t_max.
    int panel_of(double t) const;

private:
    QuadratureRule rule_;
    int n_b_;
    std::vector<double> edges_, nodes_, weights_, eval_times_;
    std::vector<int> node_panel_, panel_start_, node_ids_;
};

// Duhamel term G[f](t) = 2 int_0^t db e^{-3H(t-b)/2} int_0^{phi(t-b)} K1(s, t-b) v_f(x, e^{-Hb} s; b) ds,
// with v_f(.; b) the static solution started from (f(., b), 0). Sources live on the mesh nodes;
// inside the last partial panel the static solutions are interpolated in b.
class DuhamelEngine {
public:
    DuhamelEngine(const TransformConfig& cfg, const RadialGrid& grid, double t_max);

    const TimeMesh& mesh() const { return mesh_; }
    const RadialGrid& grid() const { return grid_; }
    const TransformConfig& config() const { return cfg_; }

    // Runs the static solve for one node (to the static time needed through t_max).
    void set_source(int node, const RadialField& f);
    void set_sources(const std::vector<RadialField>& f);
    void clear_sources();

    struct Value {
        RadialField field;
        double max_imag = 0.0;
    };
    Value evaluate(double t) const;
    // Contribution of the source panels k_begin <= k < k_end only.
    Value evaluate_panels(double t, int k_begin, int k_end) const;
    // Same term with 2 n_r static-time nodes.
    Value evaluate_refined(double t) const;
    // max |G_{n_r} - G_{2 n_r}| over the given times.
    double richardson_estimate(std::span<const double> times) const;

private:
    TransformConfig cfg_;
    RadialGrid grid_;
    TimeMesh mesh_;
    std::shared_ptr<const LagWeightCache> coarse_, fine_;
    std::vector<std::shared_ptr<const StaticSolution>> solutions_;
    Value evaluate_with(double t, const LagWeightCache& cache, int k_begin, int k_end) const;
};

using SourceFunction = std::function<RadialField(double b)>;

// G[f] at t_out; f is sampled on the source-time mesh nodes.
SpaceTimeField apply_G(const SourceFunction& f, const RadialGrid& grid, std::span<const double> t_out,
                       const TransformConfig& cfg);

using PotentialFunction = std::function<double(double r, double t)>;

// Max over interior (t, r) nodes of |psi_tt + 3H psi_t - e^{-2Ht} A psi + (m^2c^4/h^2) psi + V psi - f|
// with second-order central differences. psi needs a uniform time grid with at least 5 snapshots;
// source may be null (f = 0) and potential may be empty (V = 0).
double residual(const SpaceTimeField& psi, const SpaceTimeField* source, const PhysicalParams& p,
                const PotentialFunction& potential = {});

// Fourth-order finite-difference time derivative on a uniform time grid (>= 5 snapshots).
SpaceTimeField time_derivative(const SpaceTimeField& psi);

// Time derivative on a mesh's eval times by Lagrange differentiation inside each panel.
SpaceTimeField mesh_time_derivative(const SpaceTimeField& psi, const TimeMesh& mesh);

// Discrete L2 norm 4 pi int |f|^2 r^2 dr (trapezoid), square-rooted.
double l2_norm(const RadialField& f);

// True when every snapshot vanishes (|value| <= tol) below R_Sch + eps, eps from the geodesic limit.
bool support_confined(const SpaceTimeField& psi, double R_ID, const PhysicalParams& p, double tol = kSupportTol);

}  // namespace kgds
