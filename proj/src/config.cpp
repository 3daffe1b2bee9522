#include "argos/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "argos/errors.hpp"
#include "argos/teacher/client.hpp"
#include "argos/teacher/mock.hpp"

namespace argos {

using nlohmann::json;

void AppConfig::validate() const {
    try {
        verifier.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (timeout_ms < 1) throw ConfigError("timeout_ms must be >= 1");
    if (retries < 0) throw ConfigError("retries must be >= 0");
    if (!teacher_is_mock() && teacher.rfind("http://", 0) != 0 &&
        teacher.rfind("https://", 0) != 0)
        throw ConfigError("teacher must be an http(s) URL or mock:<fixtures-path>");
}

namespace {

MissingPolicy parse_policy(const std::string& s) {
    if (s == "renormalize") return MissingPolicy::renormalize;
    if (s == "penalize_zero") return MissingPolicy::penalize_zero;
    throw ConfigError("missing_policy must be \"renormalize\" or \"penalize_zero\", got \"" + s +
                      "\"");
}

void apply_key(AppConfig& config, const std::string& key, const json& value) {
    try {
        if (key == "tau") config.verifier.tau = value.get<double>();
        else if (key == "w_acc") config.verifier.w_acc = value.get<double>();
        else if (key == "w_spatial") config.verifier.w_spatial = value.get<double>();
        else if (key == "w_reasoning") config.verifier.w_reasoning = value.get<double>();
        else if (key == "missing_policy") config.verifier.missing_policy = parse_policy(value.get<std::string>());
        else if (key == "numeric_tol") config.verifier.numeric_tol = value.get<double>();
        else if (key == "filter_threshold") config.verifier.filter_threshold = value.get<double>();
        else if (key == "teacher") config.teacher = value.get<std::string>();
        else if (key == "workers") config.workers = value.get<int>();
        else if (key == "seed") config.seed = value.get<std::uint64_t>();
        else if (key == "timeout_ms") config.timeout_ms = value.get<int>();
        else if (key == "retries") config.retries = value.get<int>();
        else throw ConfigError("unknown config key: " + key);
    } catch (const json::exception& e) {
        throw ConfigError("bad value for config key \"" + key + "\": " + e.what());
    }
}

void apply_object(AppConfig& config, const json& obj) {
    for (const auto& [key, value] : obj.items()) {
        if (value.is_object()) {
            // Sections group keys for readability only; names stay flat.
            apply_object(config, value);
        } else {
            apply_key(config, key, value);
        }
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

json parse_toml_value(const std::string& raw, int line_no) {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
        return raw.substr(1, raw.size() - 2);
    if (raw == "true") return true;
    if (raw == "false") return false;
    try {
        std::size_t used = 0;
        if (raw.find_first_of(".eE") == std::string::npos) {
            const long long v = std::stoll(raw, &used);
            if (used == raw.size()) return v;
        } else {
            const double v = std::stod(raw, &used);
            if (used == raw.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("config line " + std::to_string(line_no) + ": cannot parse value \"" + raw +
                      "\"");
}

json parse_toml_subset(std::istream& in) {
    json obj = json::object();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            // A '#' inside a quoted value is content, not a comment.
            const auto quote_open = line.find('"');
            if (quote_open == std::string::npos || hash < quote_open)
                line = line.substr(0, hash);
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            continue;  // sections are organizational only
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string raw = trim(t.substr(eq + 1));
        if (key.empty() || raw.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        obj[key] = parse_toml_value(raw, line_no);
    }
    return obj;
}

}  // namespace

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    const bool is_json = path.size() > 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    const auto first = content.find_first_not_of(" \t\r\n");
    const bool looks_json = first != std::string::npos && content[first] == '{';

    json obj;
    if (is_json || looks_json) {
        try {
            obj = json::parse(content);
        } catch (const std::exception& e) {
            throw ConfigError("invalid JSON config in " + path + ": " + e.what());
        }
        if (!obj.is_object()) throw ConfigError("config root must be an object: " + path);
    } else {
        std::istringstream stream(content);
        obj = parse_toml_subset(stream);
    }

    AppConfig config;
    apply_object(config, obj);
    return config;
}

void apply_env_overrides(AppConfig& config) {
    static constexpr const char* keys[] = {
        "tau", "w_acc", "w_spatial", "w_reasoning", "missing_policy", "numeric_tol",
        "filter_threshold", "teacher", "workers", "seed", "timeout_ms", "retries"};
    for (const char* key : keys) {
        std::string var = "ARGOS_";
        for (const char* p = key; *p; ++p)
            var += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        const char* value = std::getenv(var.c_str());
        if (!value) continue;
        const std::string k(key), v(value);
        if (k == "teacher" || k == "missing_policy") {
            apply_key(config, k, json(v));
        } else {
            try {
                apply_key(config, k, parse_toml_value(v, 0));
            } catch (const ConfigError&) {
                throw ConfigError("cannot parse environment override " + var + "=\"" + v + "\"");
            }
        }
    }
}

teacher::TeacherSuite make_teacher_suite(const AppConfig& config) {
    if (config.teacher_is_mock()) {
        const std::string path = config.mock_fixtures_path();
        if (path.empty()) return teacher::MockTeacher::make_suite(json::object());
        return teacher::MockTeacher::make_suite(teacher::MockTeacher::from_file(path).fixtures());
    }
    teacher::ClientOptions options;
    options.timeout_ms = config.timeout_ms;
    options.retries = config.retries;
    return teacher::HttpTeacher::make_suite(config.teacher, options);
}

}  // namespace argos
