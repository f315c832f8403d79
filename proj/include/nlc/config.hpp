#pragma once

#include <cstdint>
#include <string>

#include "nlc/solver.hpp"

namespace nlc {

struct NoiseSetup {
    uint64_t seed = 1;
    int w0_modes = 4;
    std::vector<double> rho;  // optional, defaults to all-ones
    double jump_rate = 0.0;
    double jump_amp = 0.1;
};

struct InitialSpec {
    std::string preset = "equilibrium";  // equilibrium | taylor-vortex | random-smooth
    double amplitude = 0.01;
    double tilt = 0.3;
    std::string snapshot_v;  // optional snapshot paths override the preset
    std::string snapshot_d;
};

struct OutputSpec {
    std::string dir = "out";
    int snapshot_every = 0;  // 0 = none
};

struct RunConfig {
    Domain domain{32};
    Params params;
    SolverConfig solver;
    NoiseSetup noise;
    InitialSpec initial;
    std::string boundary_preset = "constant-z";
    OutputSpec output;
};

RunConfig default_run_config();
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string run_config_json(const RunConfig& cfg);  // canonical, round-trips losslessly
uint64_t config_hash(const RunConfig& cfg);
void validate_run_config(const RunConfig& cfg);

/// Initial fields for the named preset (or from snapshots).
void make_initial_fields(const RunConfig& cfg, VectorField2& v0, DirectorField3& d0);

}  // namespace nlc
