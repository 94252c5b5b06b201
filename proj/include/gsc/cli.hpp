#pragma once

// Command runner behind the gsc executable. Argument parsing lives in the
// tool; run() takes an already-parsed RunConfig so it can be driven from
// tests without a process boundary.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsc::cli {

enum class Command { Simulate, Analyze, Fit, Metrics, Validate, Report };
enum class Format { Json, Csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

struct RunConfig {
  Command command = Command::Analyze;
  std::vector<std::filesystem::path> inputs;
  /// stdout when unset. A directory for plot tables (analyze with csv).
  std::optional<std::filesystem::path> output;
  /// Falls back to $GSC_CONFIG.
  std::optional<std::filesystem::path> config;
  std::optional<std::string> scenario;
  std::optional<std::array<double, 3>> cccs_weights;
  std::optional<std::array<double, 5>> cvi_weights;
  /// json when unset; simulate always writes the CSV log format.
  std::optional<Format> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> bins;
  std::optional<std::size_t> window;
  std::optional<std::size_t> hop;
  /// Declared decay constant; replaces fitting.
  std::optional<double> k;
  bool ignore_labels = false;
  /// Extra plot-table directory for analyze with json output.
  std::optional<std::filesystem::path> plot_dir;
  /// Worker threads for multi-input analyze; 0 picks the hardware count.
  unsigned jobs = 0;
};

/// Runs one command. Messages go to `err`; documents go to cfg.output, or
/// to `out` when no output path is set. Returns kExitOk, kExitData or
/// kExitUsage.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace gsc::cli
