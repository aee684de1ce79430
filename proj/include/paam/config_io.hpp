#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "paam/model.hpp"

namespace paam {

inline constexpr int kConfigSchemaVersion = 1;

/// Malformed or invalid config document. Carries a 1-based line/column when
/// the failing location could be resolved in the source text (0 otherwise).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string path, int line, int column)
        : std::runtime_error(what), path_(std::move(path)), line_(line), column_(column) {}
    const std::string& path() const { return path_; }
    int line() const { return line_; }
    int column() const { return column_; }
    /// "file:line:col: message" style rendering.
    std::string describe(std::string_view source_name) const;

private:
    std::string path_;
    int line_;
    int column_;
};

/// Parses a config document into a raw spec. Unknown keys are rejected.
/// Throws ConfigError.
SystemSpec parse_system_spec(std::string_view text);

/// Parses and validates. Validation errors are re-thrown as ConfigError with
/// the location of the offending value in `text`.
SystemConfig parse_system(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
SystemConfig load_system(const std::filesystem::path& path);

/// Canonical document (time_unit "ns", every field explicit).
nlohmann::ordered_json to_json(const SystemSpec& spec);
std::string dump_system_spec(const SystemSpec& spec);

/// Stable 16-hex-digit hash of the canonical document of a validated system.
std::string fingerprint(const SystemConfig& sys);

/// Duration value from a JSON number (in `unit`) or a suffixed string.
Duration duration_from_json(const nlohmann::json& v, TimeUnit unit, const std::string& path);

/// 1-based (line, column) of the value addressed by a JSON pointer, falling
/// back to the deepest existing ancestor. nullopt if the text does not parse.
std::optional<std::pair<int, int>> locate_json_pointer(std::string_view text, std::string_view pointer);

/// Candidate document for admission. Keys: time_unit, accelerators,
/// executors, callbacks, chains, end_to_end, executor_assignments, where
/// `executor_assignments` attaches new callbacks to existing executors:
/// [{"executor": "e0", "callbacks": ["cbX"]}].
Candidate parse_candidate(std::string_view text);

}  // namespace paam
