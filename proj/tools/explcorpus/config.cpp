#include "explcorpus/cli.hpp"

#include <explcorpus/error.hpp>

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace explcorpus::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [k, _] : obj.items()) {
        if (!known.count(k)) throw std::invalid_argument("unknown config key '" + where + k + "'");
    }
}

template <typename T>
void take(const json& obj, const char* key, T& dst) {
    if (auto it = obj.find(key); it != obj.end() && !it->is_null()) dst = it->get<T>();
}

void take_path(const json& obj, const char* key, fs::path& dst) {
    if (auto it = obj.find(key); it != obj.end() && !it->is_null()) dst = it->get<std::string>();
}

}  // namespace

GlobalConfig GlobalConfig::from_json(std::string_view text, const fs::path& origin) {
    GlobalConfig cfg;
    try {
        auto j = json::parse(text);
        if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
        reject_unknown(j, {"provider", "runner", "prompts_dir", "threshold", "tiers", "taxonomy"}, "");

        if (auto it = j.find("provider"); it != j.end()) {
            const auto& p = *it;
            reject_unknown(p,
                           {"dialect", "base_url", "model_name", "api_key_env", "context_window_tokens",
                            "max_output_tokens", "max_retries", "backoff_base_ms", "backoff_cap_ms", "max_inflight",
                            "temperature", "system_message", "timeout_s", "fixtures_dir", "audit_log"},
                           "provider.");
            auto& pc = cfg.provider;
            if (auto d = p.find("dialect"); d != p.end()) {
                auto parsed = parse_dialect(d->get<std::string>());
                if (!parsed) throw std::invalid_argument("unknown dialect '" + d->get<std::string>() + "'");
                pc.dialect = *parsed;
            }
            take(p, "base_url", pc.base_url);
            take(p, "model_name", pc.model_name);
            take(p, "api_key_env", pc.api_key_env);
            take(p, "context_window_tokens", pc.context_window_tokens);
            take(p, "max_output_tokens", pc.max_output_tokens);
            take(p, "max_retries", pc.max_retries);
            take(p, "backoff_base_ms", pc.backoff_base_ms);
            take(p, "backoff_cap_ms", pc.backoff_cap_ms);
            take(p, "max_inflight", pc.max_inflight);
            take(p, "temperature", pc.temperature);
            take(p, "system_message", pc.system_message);
            take(p, "timeout_s", pc.timeout_s);
            take_path(p, "fixtures_dir", pc.fixtures_dir);
            if (auto a = p.find("audit_log"); a != p.end() && !a->is_null()) pc.audit_log = a->get<std::string>();
        }
        if (auto it = j.find("runner"); it != j.end()) {
            const auto& r = *it;
            reject_unknown(r, {"batch_size", "output_dir", "resume", "skip_oversize", "filter_passes"}, "runner.");
            take(r, "batch_size", cfg.runner.batch_size);
            take_path(r, "output_dir", cfg.runner.output_dir);
            take(r, "resume", cfg.runner.resume);
            take(r, "skip_oversize", cfg.runner.skip_oversize);
            take(r, "filter_passes", cfg.runner.filter_passes);
        }
        take_path(j, "prompts_dir", cfg.prompts_dir);
        take_path(j, "taxonomy", cfg.taxonomy);
        take(j, "threshold", cfg.threshold);
        if (auto it = j.find("tiers"); it != j.end()) {
            auto v = it->get<std::vector<double>>();
            if (v.size() != 3) throw std::invalid_argument("tiers must list three fractions");
            cfg.tiers = {v[0], v[1], v[2]};
            cfg.tiers.validate();
        }
    } catch (const json::exception& e) {
        throw FormatError(origin, 1, e.what());
    }
    return cfg;
}

GlobalConfig GlobalConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open config file");
    std::ostringstream s;
    s << in.rdbuf();
    return from_json(s.str(), path);
}

}  // namespace explcorpus::cli
