#pragma once

// Flat key = value configuration. Dotted names group keys into sections;
// `preset = <name>` pulls in presets/<name>.cfg underneath the file's own keys.
//
//   # comment
//   preset = theorem-1.2
//   domain.points = 1024
//   sweep.initial.scale = 1, 2, 4

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/error.hpp"

#ifndef BLOWUP_PRESET_DIR
#define BLOWUP_PRESET_DIR "presets"
#endif

namespace blowup::harness {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class Config {
public:
    Config() = default;

    static Config parse(const std::string& text, const std::string& origin = "<string>")
    {
        Config cfg;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#')
                continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::Parse, origin + ":" + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            if (key.empty())
                throw Error(ErrorCode::Parse, origin + ":" + std::to_string(lineno) + ": empty key");
            if (cfg.values_.count(key))
                throw Error(ErrorCode::Parse, origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    /// Loads a file and resolves `preset` (file keys override preset keys).
    static Config load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::Io, "cannot open config " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        Config cfg = parse(ss.str(), path.string());
        cfg.base_dir_ = path.parent_path();
        return cfg.resolve_preset();
    }

    static std::filesystem::path preset_path(const std::string& name)
    {
        if (const char* env = std::getenv("BLOWUP_PRESET_DIR"))
            return std::filesystem::path(env) / (name + ".cfg");
        return std::filesystem::path(BLOWUP_PRESET_DIR) / (name + ".cfg");
    }

    static Config preset(const std::string& name) { return load(preset_path(name)); }

    Config resolve_preset() const
    {
        if (!has("preset"))
            return *this;
        Config base = preset(get("preset"));
        Config merged = base;
        for (const auto& [k, v] : values_)
            if (k != "preset")
                merged.values_[k] = v;
        merged.values_["preset"] = get("preset");
        merged.base_dir_ = base_dir_;
        return merged;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    const std::string& get(const std::string& key) const
    {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw Error(ErrorCode::InvalidArgument, "missing config key '" + key + "'");
        return it->second;
    }
    std::string get(const std::string& key, const std::string& fallback) const
    {
        return has(key) ? get(key) : fallback;
    }

    double number(const std::string& key) const { return csv::parse_double(get(key), "config key '" + key + "'"); }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key, long long fallback) const
    {
        if (!has(key))
            return fallback;
        const double v = number(key);
        if (v != static_cast<double>(static_cast<long long>(v)))
            throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be an integer");
        return static_cast<long long>(v);
    }

    bool flag(const std::string& key, bool fallback = false) const
    {
        if (!has(key))
            return fallback;
        const std::string& v = get(key);
        if (v == "true" || v == "yes" || v == "1" || v == "on")
            return true;
        if (v == "false" || v == "no" || v == "0" || v == "off")
            return false;
        throw Error(ErrorCode::InvalidArgument, "config key '" + key + "' must be a boolean");
    }

    std::vector<std::string> list(const std::string& key) const
    {
        std::vector<std::string> out;
        for (const auto& item : csv::split(get(key)))
            out.push_back(trim(item));
        return out;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void erase(const std::string& key) { values_.erase(key); }

    /// Keys starting with `prefix`, in sorted order.
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : values_)
            if (k.rfind(prefix, 0) == 0)
                out.push_back(k);
        return out;
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }
    const std::filesystem::path& base_dir() const noexcept { return base_dir_; }
    void set_base_dir(std::filesystem::path p) { base_dir_ = std::move(p); }

    /// Relative file references resolve against the config's directory.
    std::filesystem::path path(const std::string& key) const
    {
        std::filesystem::path p = get(key);
        if (p.is_relative() && !base_dir_.empty() && !std::filesystem::exists(p))
            p = base_dir_ / p;
        return p;
    }

    std::string serialize() const
    {
        std::string out;
        for (const auto& [k, v] : values_)
            out += k + " = " + v + "\n";
        return out;
    }

    /// Rejects keys outside `known`; names ending in '*' match a prefix.
    void check_known(const std::vector<std::string>& known) const
    {
        for (const auto& [k, v] : values_) {
            const bool ok = std::any_of(known.begin(), known.end(), [&](const std::string& pat) {
                if (!pat.empty() && pat.back() == '*')
                    return k.rfind(pat.substr(0, pat.size() - 1), 0) == 0;
                return k == pat;
            });
            if (!ok)
                throw Error(ErrorCode::InvalidArgument, "unknown config key '" + k + "'");
        }
    }

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

} // namespace blowup::harness
