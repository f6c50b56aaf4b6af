// Flat namespaced key-value run configuration: one "section.key = value" per
// line, '#' comments.  Unknown keys are hard errors at validation time; a run
// is fully determined by its config text plus the seed inside it.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace phi4 {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_list(const std::string& key) const;  // comma-separated

    // every key must match one of the allowed names; throws with the key path
    void check_known(const std::vector<std::string>& allowed) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    std::string canonical() const;  // sorted "key = value" lines

  private:
    std::map<std::string, std::string> kv_;
};

} // namespace phi4
