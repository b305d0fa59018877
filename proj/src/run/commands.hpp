#pragma once

#include <string>

#include "bhchain/ensemble.hpp"
#include "run/config.hpp"

namespace bhchain::run {

struct CommandResult {
    int exit_code = 0;  // 0 ok, 1 config error, 2 numerical failure, 3 partial
    std::string message;
};

/// Dispatches by config.experiment and owns the run manifest lifecycle.
CommandResult run_experiment(const RunConfig& c);

CommandResult cmd_orbit(const RunConfig& c);
CommandResult cmd_lyapunov(const RunConfig& c);
CommandResult cmd_ensemble(const RunConfig& c);
CommandResult cmd_sweep(const RunConfig& c);
CommandResult cmd_theory(const RunConfig& c);

/// Reads back a variance.csv written by cmd_ensemble.
VarianceSeries read_variance_csv(const std::string& path);

}  // namespace bhchain::run
