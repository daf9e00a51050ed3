#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace linkrank {

inline constexpr const char* kToolName = "linkrank";
inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI run: subcommand, resolved flag values, digests of
/// every input file, tool version, RNG seed. Written beside each emitted
/// artifact as <artifact>.manifest.json so results stay attributable.
/// Contains no timestamps; identical runs produce identical manifests.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> flags;
    std::map<std::string, std::string> input_digests;
    std::optional<std::uint64_t> seed;

    void add_input(const std::filesystem::path& path);
    void write_beside(const std::filesystem::path& artifact) const;
    std::string to_json() const;
};

/// FNV-1a 64-bit digest of a file's bytes, rendered as fixed-width hex.
std::string file_digest(const std::filesystem::path& path);

} // namespace linkrank
