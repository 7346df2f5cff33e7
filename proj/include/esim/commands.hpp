#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "esim/spacetime.hpp"

namespace esim {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;   // bad config or usage
inline constexpr int kExitPhysics = 3;  // physics precondition (e.g. not spacelike)

struct CommandOptions {
    std::filesystem::path config_path;
    std::optional<std::filesystem::path> out_dir;  // overrides outputs.dir
    std::optional<std::uint64_t> seed;             // overrides the config seed
    std::optional<std::string> convention;         // keep only this convention
};

// Writes arrivals.csv, nbbo_<name>.csv (and interval_nbbo_<name>.csv for
// uncertainty conventions), causal_graph.csv, es_report.json and
// manifest.json. Output bytes depend only on the config and seed.
int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Classifies the pair and, when spacelike, reports the flip boost and the
// order in both frames.
int cmd_flip(const CommandOptions& options, EventId a, EventId b, std::ostream& out, std::ostream& err);

// latency_table.csv (one row per link), timescales.csv and nodes.csv.
int cmd_report(const CommandOptions& options, std::ostream& out, std::ostream& err);

// races.csv and race_summary.json; needs a feeds block.
int cmd_races(const CommandOptions& options, std::ostream& out, std::ostream& err);

// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace esim
