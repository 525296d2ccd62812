#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sgf/events.hpp"

namespace sgf::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2 };

struct ManifestEntry {
    std::filesystem::path path;  // resolved against the manifest's directory
    int label = 0;
};

/// Reads "path,label" lines. Blank lines and '#' comments are skipped.
/// Throws DataError naming the manifest and line; "empty manifest" when no
/// entry is present.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

/// Runs the command line `args` (without the program name) and returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgf::cli
