#pragma once

#include <explcorpus/analytics.hpp>
#include <explcorpus/provider.hpp>
#include <explcorpus/runner.hpp>
#include <explcorpus/verify.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace explcorpus::cli {

inline constexpr const char* kConfigEnvVar = "EXPLCORPUS_CONFIG";

struct GlobalConfig {
    ProviderConfig provider;
    RunnerConfig runner;
    std::filesystem::path prompts_dir;  // empty: built-in prompts
    double threshold = kDefaultThreshold;
    TierFractions tiers;
    std::filesystem::path taxonomy;  // empty: built-in table

    /// Every key is optional; unknown keys are rejected so typos surface.
    static GlobalConfig from_json(std::string_view text, const std::filesystem::path& origin = {});
    static GlobalConfig load(const std::filesystem::path& path);
};

enum ExitCode : int { kOk = 0, kUserError = 1, kPartialFailure = 2 };

struct Environment {
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
    std::function<std::optional<std::string>(const std::string&)> getenv;
    /// Replaces the transport built from the provider config (tests).
    std::shared_ptr<Transport> transport;
    Sleeper sleeper;

    /// std::cout, std::cerr and the process environment.
    static Environment process();
};

/// Runs one command line (without the program name).
int dispatch(const std::vector<std::string>& args, Environment& env);

}  // namespace explcorpus::cli
