#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace g2 {

enum ExitCode : int { kExitOk = 0, kExitGate = 1, kExitUsage = 2, kExitBlowUp = 3 };

const std::vector<std::string>& command_names();

struct CommandLine {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;  // replaces every root seed of the config
};

/// Parses the config, runs the command and writes its artifacts plus
/// manifest.json. Never throws: failures map onto the exit-code contract and
/// a message on `err`. Progress and gate verdicts go to `log`.
int run_command(const CommandLine& cl, std::ostream& log, std::ostream& err);

}  // namespace g2
