#pragma once

#include <optional>
#include <string>
#include <vector>

#include <kgds/special_functions.hpp>

#include "config.hpp"

namespace kgds::app {

// Overrides taken from the command line; empty strings keep the config values.
struct OutputOverrides {
    std::string csv;
    std::string diagnostics;
    std::string manifest;
};

struct CommandOutcome {
    int exit_code = 0;
    std::vector<std::string> artifacts;
    std::string summary;  // one line for stdout
};

CommandOutcome run_hyp2f1(Complex a, Complex b, Complex c, double z, const std::string& out);
CommandOutcome run_kernels_sample(const RunConfig& cfg, const OutputOverrides& o);
CommandOutcome run_geodesic(const RunConfig& cfg, const OutputOverrides& o);
CommandOutcome run_solve_static(const RunConfig& cfg, const OutputOverrides& o);
CommandOutcome run_solve_linear(const RunConfig& cfg, const OutputOverrides& o);
CommandOutcome run_solve_semilinear(const RunConfig& cfg, const OutputOverrides& o);
CommandOutcome run_decay_fit(const RunConfig& cfg, const OutputOverrides& o);

// lemmas: ids or "all". The report is byte-identical for equal arguments.
CommandOutcome run_verify(const std::vector<std::string>& lemmas, const std::string& out, std::uint64_t seed,
                          const std::string& manifest);

}  // namespace kgds::app
