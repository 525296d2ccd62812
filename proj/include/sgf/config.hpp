#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "sgf/sgf_model.hpp"
#include "sgf/synthetic.hpp"

namespace sgf {

/// Everything a CLI run can be configured with.
struct RunConfig {
    NetworkLayout network = default_layout();
    events::SuiteSettings synthetic;
    std::size_t fifo_capacity = 64;
    unsigned jobs = 1;
    std::uint64_t seed = 1;

    NetworkConfig build() const { return build_network(network); }
};

/// Parses a configuration document:
///
///     # comment
///     [section]
///     key = value
///
/// Keys are addressed as "section.key". Unset keys keep their defaults; bank
/// defaults follow the configured geometry. Throws ConfigError naming
/// `source`, the line and the key on unknown keys, duplicates or bad values,
/// and validates the resulting network.
RunConfig parse_config(std::string_view text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Writes every key with its current value; parse_config reads it back.
std::string format_config(const RunConfig& config);

}  // namespace sgf
