#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace softrec::cli {

// Exit codes: 0 success (per-trial numeric failures are recorded in the
// outputs), 1 systemic failure, 2 invalid configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadConfig = 2;

/// Dispatches one subcommand (statdim | separate | superres | certify |
/// solve-crosscheck) with a JSON config text. Outputs are written next to the
/// config's "output" path base (<base>.csv and <base>.json) and are
/// byte-identical across runs with the same config and seed. seed_override
/// replaces the config seed when present.
int run_subcommand(const std::string& name, const std::string& config_text,
                   std::optional<std::uint64_t> seed_override);

/// argv-level entry point (CLI11 parsing; --config, --seed).
int run_cli(int argc, const char* const* argv);

}  // namespace softrec::cli
