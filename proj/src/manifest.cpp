#include "phi4/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "phi4/config.hpp"

namespace phi4 {

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
    return h;
}

std::uint64_t fnv1a64_str(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot digest missing file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64_str(ss.str()));
}

bool StatReport::all_pass() const {
    for (const StatLine& l : lines)
        if (!l.pass) return false;
    return true;
}

void StatReport::write_csv(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw ConfigError("cannot open " + path + " for writing");
    std::fprintf(fp, "observable,estimate,se,target,z,verdict,se_reliable\n");
    for (const StatLine& l : lines)
        std::fprintf(fp, "%s,%.17g,%.17g,%.17g,%.17g,%s,%s\n", l.observable.c_str(), l.estimate,
                     l.se, l.target, l.z, l.pass ? "pass" : "FAIL", l.se_reliable ? "yes" : "no");
    std::fclose(fp);
}

std::string StatReport::text() const {
    std::ostringstream ss;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %14s %12s %14s %8s %s\n", "observable", "estimate", "se",
                  "target", "z", "verdict");
    ss << buf;
    for (const StatLine& l : lines) {
        std::snprintf(buf, sizeof buf, "%-28s %14.6g %12.3g %14.6g %8.2f %s%s\n",
                      l.observable.c_str(), l.estimate, l.se, l.target, l.z,
                      l.pass ? "pass" : "FAIL", l.se_reliable ? "" : " (se unreliable)");
        ss << buf;
    }
    ss << (all_pass() ? "ALL PASS" : "FAILURES PRESENT") << " (|z| threshold "
       << z_threshold << ")\n";
    return ss.str();
}

void RunManifest::add_output(const std::string& dir, const std::string& filename) {
    output_digests[filename] = file_digest(dir + "/" + filename);
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["verb"] = verb;
    j["config"] = config_text;
    j["config_digest"] = config_digest();
    j["seed"] = seed;
    j["code_version"] = code_version;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["outputs"] = output_digests;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest " + path);
    out << j.dump(2) << "\n";
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::string phi4_version() { return "0.1.0"; }

} // namespace phi4
