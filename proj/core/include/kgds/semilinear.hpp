#pragma once

#include <functional>
#include <string_view>
#include <utility>
#include <vector>

#include "kgds/transform.hpp"

namespace kgds {

enum class NonlinearityKind { PowerAbs, PowerSigned, Custom };

// Psi(psi) = |psi|^{1+alpha} or psi |psi|^alpha, or a user function with Psi(0) = 0.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::PowerSigned;
    double alpha = 1.0;
    std::function<double(double)> custom;

    double operator()(double psi) const;
    // Psi(b + delta) - Psi(b) without cancellation for small delta.
    double difference(double b, double delta) const;
    // Identically zero nonlinearity (linear runs).
    static Nonlinearity none();
    bool is_zero() const { return zero_; }

private:
    bool zero_ = false;
};

enum class PotentialKind { None, Gravitational, Yukawa, ExpDecaying, Custom };

struct Potential {
    PotentialKind kind = PotentialKind::None;
    double coupling_sq = 0.0;  // Yukawa g^2
    double range = 0.0;        // Yukawa decay rate (alpha m)
    double higgs_sq = 0.0;     // m_H^2 of the decaying potential
    PotentialFunction custom;

    // V(r, t) for the physical constants p.
    double value(double r, double t, const PhysicalParams& p) const;
    PotentialFunction bind(const PhysicalParams& p) const;
    bool active() const { return kind != PotentialKind::None; }
};

std::string_view to_string(PotentialKind kind);
std::string_view to_string(NonlinearityKind kind);

// Empirical multiplication-operator bound max |V(r, 0)| over grid nodes with r >= r_guard.
double potential_eps0(const Potential& V, const RadialGrid& grid, const PhysicalParams& p, double r_guard);

enum class NormKind { L2, H1, H2Discrete };
std::string_view to_string(NormKind kind);

// Radial norms with weight 4 pi r^2 dr; H1/H2 add the first and second differences.
double field_norm(const RadialField& f, NormKind kind);

struct WeightedNormState {
    double gamma = 0.0;
    NormKind norm_kind = NormKind::H2Discrete;
    std::vector<std::pair<double, double>> history;  // (t, e^{gamma t} ||Phi(t)||)

    void push(double t, double norm);
    double sup() const;
};

// sup over snapshots of e^{gamma t} ||field(t)||
double weighted_norm(const SpaceTimeField& field, double gamma, NormKind kind);
double weighted_distance(const SpaceTimeField& a, const SpaceTimeField& b, double gamma, NormKind kind);
WeightedNormState weighted_history(const SpaceTimeField& field, double gamma, NormKind kind);

// Free solution seeding the fixed point.
SpaceTimeField psi_id(const RadialField& psi0, const RadialField& psi1, std::span<const double> t_out,
                      const TransformConfig& cfg);

struct PicardOptions {
    double gamma = 0.5;
    double t_max = 0.0;          // 0 selects 8/H
    int max_iter = 40;
    double tol = 1e-10;          // on d(Phi_{n+1}, Phi_n) relative to ||Phi_{n+1}||_X
    NormKind norm = NormKind::H2Discrete;
    double eps = 0.0;            // ball radius; 0 selects ||psi0|| + ||psi1||
    double residual_dt = 0.0;    // > 0: re-sample the fixed point on a uniform grid and report the PDE residual
};

struct PicardDiagnostics {
    int iterations = 0;
    bool converged = false;
    std::vector<double> distances;     // d(Phi_{n+1}, Phi_n)
    std::vector<double> contraction;   // q_n (entries below the round-off floor are skipped)
    double max_contraction = 0.0;
    double weighted_sup = 0.0;
    double eps = 0.0;
    bool ball_bound = false;           // weighted_sup < 2 eps
    bool support_confined = true;
    double max_imag = 0.0;
    double richardson = 0.0;           // Duhamel change n_r -> 2 n_r on the final source
    double residual = -1.0;            // PDE residual when requested
    double residual_scale = 0.0;       // max |psi| on the uniform grid
    double eps0 = 0.0;                 // empirical potential bound on the data support
    WeightedNormState history;
};

struct PicardResult {
    SpaceTimeField psi;                // on the source mesh eval times
    SpaceTimeField uniform;            // uniform re-sampling (residual_dt > 0)
    PicardDiagnostics diagnostics;
};

// Phi_{n+1} = psi_id + G[c^2 F Psi(Phi_n) - V Phi_n] starting from psi_id. The iterates are
// advanced by increments Phi_{n+1} - Phi_n = G[source(Phi_n) - source(Phi_{n-1})] so that
// d(Phi_{n+1}, Phi_n) keeps full relative precision.
PicardResult picard_iterate(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl,
                            const Potential& V, const PicardOptions& options, const TransformConfig& cfg);

struct LifespanOptions {
    double t_cap = 150.0;        // in units of 1/H
    NormKind norm = NormKind::H2Discrete;
    double local_tol = 1e-12;
    int local_max_iter = 60;
};

struct LifespanResult {
    double T = 0.0;
    bool inside_blowup_panel = false;  // the local fixed point diverged; T is that panel's midpoint
    WeightedNormState history;
};

// First time the weighted norm e^{gamma t} ||psi|| reaches 2 eps, by causal panel marching.
LifespanResult lifespan_run(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl, double gamma,
                            double eps, const TransformConfig& cfg, const LifespanOptions& options = {});
double lifespan_probe(const RadialField& psi0, const RadialField& psi1, const Nonlinearity& nl, double gamma,
                      double eps, const TransformConfig& cfg, const LifespanOptions& options = {});

}  // namespace kgds
