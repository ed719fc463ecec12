#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lcoc/config.hpp"
#include "lcoc/grid.hpp"

namespace lcoc {

inline constexpr std::array<std::string_view, 6> kCommands = {
    "simulate", "optimize", "gradient-check", "equivalence-check", "ensemble", "stability-probe"};

/// Exit status of a command that ran to completion.
enum class CommandStatus : int { ok = 0, check_failed = 1 };

/// Runs one command and writes its files into config.output. Hard errors
/// (bad input, solver failure, unwritable directory) propagate as
/// exceptions; a check that runs but does not pass returns check_failed.
CommandStatus run_command(std::string_view command, const RunConfig& config, std::ostream& log);

/// %.17g, which round-trips every finite double.
std::string format_number(double value);

/// `fields_<name>_<t>.csv` with t formatted as %.6g.
std::string field_file_name(std::string_view name, double t);

/// Header `x,y,value`, one row per node in index order.
void write_field_csv(const std::filesystem::path& path, const ScalarField& field,
                     const SpaceTimeGrid& grid);

/// Reads back the value column of a file written by write_field_csv.
ScalarField read_field_csv(const std::filesystem::path& path, const SpaceTimeGrid& grid);

}  // namespace lcoc
