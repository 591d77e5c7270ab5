// commands.hpp — CLI subcommand implementations
//
// Exit codes: 0 success, 1 configuration/validation failure, 2 numerical
// check failure.
#pragma once

#include "declab/config.hpp"

namespace declab::cli {

int cmd_evolve(const ExperimentConfig& cfg);
int cmd_pointer(const ExperimentConfig& cfg);
int cmd_wigner(const ExperimentConfig& cfg);
int cmd_check(const ExperimentConfig& cfg);

} // namespace declab::cli
