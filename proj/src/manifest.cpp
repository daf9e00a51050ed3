#include "linkrank/manifest.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "linkrank/errors.hpp"

namespace linkrank {

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input for digest: " + path.string());

    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    input_digests[path.string()] = file_digest(path);
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["flags"] = flags;
    j["inputs"] = input_digests;
    if (seed)
        j["seed"] = *seed;
    else
        j["seed"] = nullptr;
    return j.dump(2) + "\n";
}

void RunManifest::write_beside(const std::filesystem::path& artifact) const {
    std::filesystem::path p = artifact;
    p += ".manifest.json";
    std::ofstream out(p);
    if (!out) throw ParseError("cannot write manifest: " + p.string());
    out << to_json();
}

} // namespace linkrank
