#pragma once

#include <cstdint>
#include <string>

#include "argos/aggregate.hpp"
#include "argos/teacher/protocol.hpp"

namespace argos {

/// Whole-application configuration: verifier knobs plus plumbing. The
/// `teacher` field is either an HTTP base URL or `mock:<fixtures-path>`.
struct AppConfig {
    VerifierConfig verifier;
    std::string teacher = "mock:";
    int workers = 1;
    std::uint64_t seed = 0;
    int timeout_ms = 5000;
    int retries = 2;

    void validate() const;  // throws ConfigError
    bool teacher_is_mock() const { return teacher.rfind("mock:", 0) == 0; }
    std::string mock_fixtures_path() const { return teacher.substr(5); }
};

/// Loads a config file. `.json` files (or content starting with '{') parse
/// as JSON; anything else uses a flat TOML subset: [section] headers,
/// key = value lines with quoted strings, numbers and booleans, # comments.
AppConfig load_config(const std::string& path);

/// Applies ARGOS_-prefixed environment variable overrides (ARGOS_TAU,
/// ARGOS_TEACHER, ARGOS_WORKERS, ...) on top of a loaded config.
void apply_env_overrides(AppConfig& config);

/// Instantiates the teacher suite the config names: the in-process mock
/// (fixtures file, or empty fixtures for bare "mock:") or the HTTP client.
teacher::TeacherSuite make_teacher_suite(const AppConfig& config);

}  // namespace argos
