#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <kgds/semilinear.hpp>
#include <kgds/transform.hpp>

namespace kgds::app {

inline constexpr int kSchemaVersion = 1;

enum class DataKind { Zero, Constant, Bump };
enum class BumpProfile { Poly6, Smooth };

// psi0 = amplitude * profile, psi1 = velocity_amplitude * profile.
struct DataSpec {
    DataKind kind = DataKind::Bump;
    BumpProfile profile = BumpProfile::Poly6;
    double center = 3.0;
    double half_width = 0.8;
    double amplitude = 1.0;
    double velocity_amplitude = 0.0;
    // > 0: rescale both fields so ||psi0|| + ||psi1|| equals this value in the semilinear norm.
    double normalize_to = 0.0;
};

struct TimeSpec {
    std::vector<double> times;  // explicit list, or a uniform range below
    double t_min = 0.0;
    double t_max = 1.0;
    int count = 11;

    std::vector<double> resolve() const;
};

struct KernelSpec {
    std::string kind = "K1";  // E, K0, K0_alt, K1, dtE
    double t = 1.0;
    double b = 0.0;
    int n = 16;
};

struct GeodesicSpec {
    double R_ID = 3.0;
    TimeSpec times;
};

struct StaticSpec {
    double T = 1.0;
    double cfl = 0.5;
    double sample_every = 0.1;
    std::string snapshot_path;  // optional binary snapshot
};

struct SemilinearSpec {
    std::string mode = "picard";  // picard or lifespan
    Nonlinearity nonlinearity;
    Potential potential;
    PicardOptions picard;
    LifespanOptions lifespan;
    double lifespan_eps = 1e-2;
};

struct OutputSpec {
    std::string csv;
    std::string diagnostics;
    std::string manifest;  // default: <csv or report>.manifest.json
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t rng_seed = 0;
    PhysicalParams params;
    bool mass_from_M = false;
    Complex M;  // used when mass_from_M
    RadialGrid grid = RadialGrid::uniform(0.6, 5.4, 241);
    DataSpec data;
    TransformConfig transform;
    SemilinearSpec semilinear;
    TimeSpec times;
    KernelSpec kernels;
    GeodesicSpec geodesic;
    StaticSpec statics;
    OutputSpec output;
    std::string source_text;  // canonical JSON the hash is taken over

    CurvedMass curved_mass() const;
    // Transform options with params and mass filled in.
    TransformConfig transform_config() const;
    std::pair<RadialField, RadialField> initial_data() const;
};

// Throws ConfigInvalid (unknown keys, wrong types, failed invariants; the path is named) and
// IoError when the file cannot be read.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin);

DataKind data_kind_from_string(const std::string& s);
NormKind norm_from_string(const std::string& s);

}  // namespace kgds::app
