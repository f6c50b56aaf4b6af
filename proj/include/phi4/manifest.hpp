// Run manifests and the determinism contract: every artifact directory gets a
// manifest.json embedding the config snapshot, its digest, the seed, and the
// digest of every output file.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace phi4 {

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64_str(const std::string& s);
std::string hex64(std::uint64_t v);
std::string file_digest(const std::string& path);  // hex fnv1a64 of the bytes

struct StatLine {
    std::string observable;
    double estimate = 0.0;
    double se = 0.0;
    double target = 0.0;
    double z = 0.0;
    bool pass = true;
    bool se_reliable = true;
};

struct StatReport {
    std::vector<StatLine> lines;
    double z_threshold = 3.0;
    bool all_pass() const;
    void write_csv(const std::string& path) const;
    std::string text() const;
};

struct RunManifest {
    std::string verb;
    std::string config_text;  // canonical form
    std::uint64_t seed = 0;
    std::string code_version;
    std::string started_utc, finished_utc;
    std::map<std::string, std::string> output_digests;

    std::string config_digest() const { return hex64(fnv1a64_str(config_text)); }
    void add_output(const std::string& dir, const std::string& filename);
    void write(const std::string& path) const;  // JSON
};

std::string utc_now();
std::string phi4_version();

} // namespace phi4
