#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rfflow/model.hpp"

namespace rfflow {

// INI-style run configuration: sections [model], [numerics], [sweep],
// [simulate], [output]; `key = value`, '#' comments, UTF-8, '\n' endings.
struct RunConfig {
    // model: either an activation name or explicit (mu, nu)
    std::optional<std::string> activation;
    std::optional<double> mu, nu;
    double psi = 1.0, phi = 1.0, r = 0.0, s = 0.0, lambda = 0.0;

    // numerics
    int grid_points = 201;
    int grid_points_2d = 201;
    double offset = 0.0;  // 0 = auto
    std::vector<double> eps_rel = {1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
    double t_min = 1e-2, t_max = 1e2;
    int t_count = 40;

    // sweep
    std::optional<std::string> sweep_parameter;  // psi | phi | lambda | t
    double sweep_min = 0.0, sweep_max = 0.0;
    int sweep_count = 0;
    bool sweep_log = true;

    // simulate
    int sim_d = 200;
    int sim_seeds = 10;
    double sim_dt = 0.01;
    std::string sim_mode = "exact";  // exact | euler

    // output
    std::string out_dir = "out";
    std::string prefix = "run";

    ModelConfig model() const;            // resolves activation -> (mu, nu)
    std::vector<double> time_grid() const;  // logspace(t_min, t_max, t_count)
    std::string dump() const;             // canonical INI text
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

}  // namespace rfflow
