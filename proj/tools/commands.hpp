#pragma once

#include <functional>
#include <optional>
#include <string>

namespace immunokinetics::cli {

enum ExitCode : int { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3, kIdentity = 4 };

struct SimulateOptions {
  std::string config;
  std::string model;
  std::string out;
  std::optional<double> dt;
  std::optional<std::size_t> grid_cells;
  std::optional<double> t_end;
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_compare(const std::string& config, const std::string& pair, const std::string& out);
int cmd_equilibria(const std::string& config);
int cmd_check_operator(const std::string& config, std::optional<unsigned long long> seed);

/// Runs `body`, mapping library exceptions to exit codes and messages on stderr.
int guarded(const std::function<int()>& body);

}  // namespace immunokinetics::cli
