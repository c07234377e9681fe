#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

namespace granusim {

using Timestamp = std::chrono::sys_seconds;

/// Shortest decimal form is not used for persisted reals; every value is
/// written with 17 significant digits so it reads back bit-identical.
std::string format_real(double value);

/// Parses a real that must consume the entire field.
std::optional<double> parse_real(std::string_view field);

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM[:SS[.fff]]` with an optional `Z`
/// or `+HH:MM`/`-HH:MM` offset. Returns nullopt on malformed input.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Always UTC, `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Timestamp ts);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

/// Writes `content` to `path` only after the whole content is produced.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace granusim
