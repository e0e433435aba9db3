#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "model.hpp"

namespace ipdyn {

// Builds a ModelConfig from the model.* keys, with the baseline defaults.
ModelConfig model_from(const Config& cfg);
// Parses interaction tags ("wri", "lpri", "err", "none").
InteractionSet interactions_from_tags(const std::vector<std::string>& tags);

// Executes one subcommand against a fully resolved config (file + environment
// + flag overrides already applied). Each command writes its artifacts plus
// report.txt and config_echo.cfg into the `out` directory. Outputs carry no
// timestamps: a rerun from the echoed config and the same inputs is
// byte-identical.
void run_describe(const Config& cfg);
void run_fit(const Config& cfg);
void run_simulate(const Config& cfg);
void run_dgp(const Config& cfg);
void run_indices(const Config& cfg);

// Dispatch by name ("describe", "fit", "simulate", "dgp", "indices").
void run_command(const std::string& command, const Config& cfg);

}  // namespace ipdyn
