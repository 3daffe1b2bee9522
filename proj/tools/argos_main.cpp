// argos: score grounded rollouts, filter SFT candidates, and run the
// reward-theory simulations from the command line.

#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "argos/config.hpp"
#include "argos/curate.hpp"
#include "argos/errors.hpp"
#include "argos/pareto.hpp"
#include "argos/teacher/server.hpp"
#include "argos/verifier.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTransport = 2;
constexpr int kExitBadConfig = 3;
constexpr int kSchemaVersion = 1;

json breakdown_to_json(const argos::RewardBreakdown& b) {
    json j;
    j["r_acc"] = b.r_acc;
    j["r_visual"] = b.r_visual ? json(*b.r_visual) : json(nullptr);
    j["r_reasoning"] = b.r_reasoning ? json(*b.r_reasoning) : json(nullptr);
    j["r_final"] = b.r_final;
    j["gate_passed"] = b.gate_passed;
    return j;
}

std::vector<argos::FrameStamp> timestamps_from_json(const json& j) {
    std::vector<argos::FrameStamp> out;
    for (const auto& e : j)
        out.push_back({e.at("frame").get<int>(), e.at("time_s").get<double>()});
    return out;
}

argos::MediaKind media_kind_from_string(const std::string& s) {
    if (s == "image") return argos::MediaKind::image;
    if (s == "video") return argos::MediaKind::video;
    throw std::invalid_argument("media_kind must be \"image\" or \"video\", got \"" + s + "\"");
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argos::ConfigError("cannot open input file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

/// Writes to the path, or to stdout for "-".
class OutputSink {
  public:
    explicit OutputSink(const std::string& path) {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw argos::ConfigError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string out = "-";
};

argos::AppConfig resolve_config(const CommonArgs& args) {
    argos::AppConfig config;
    if (!args.config_path.empty()) config = argos::load_config(args.config_path);
    argos::apply_env_overrides(config);
    if (args.seed) config.seed = *args.seed;
    if (args.workers) config.workers = *args.workers;
    config.validate();
    return config;
}

// score: one rollout per JSONL line; rollouts sharing a group_id get
// group-normalized advantages once the whole input is scored.
int cmd_score(const CommonArgs& args, const std::string& input_path) {
    const argos::AppConfig config = resolve_config(args);
    const argos::Verifier verifier(config.verifier, argos::make_teacher_suite(config));
    const std::vector<std::string> lines = read_lines(input_path);

    struct LineResult {
        bool skipped = false;  // blank input line
        bool erred = false;
        bool transport = false;
        std::string error;
        json record;
        std::optional<std::string> group_id;
        double r_final = 0.0;
    };
    std::vector<LineResult> results(lines.size());
    std::atomic<std::size_t> cursor{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= lines.size()) return;
            LineResult& r = results[i];
            if (lines[i].find_first_not_of(" \t\r") == std::string::npos) {
                r.skipped = true;
                continue;
            }
            try {
                const json in = json::parse(lines[i]);
                argos::RawRollout rollout;
                rollout.question = in.at("question").get<std::string>();
                rollout.answer_gt = in.at("answer").get<std::string>();
                rollout.media_ref = in.at("media").get<std::string>();
                rollout.media_kind =
                    media_kind_from_string(in.value("media_kind", std::string("image")));
                if (in.contains("frame_timestamps"))
                    rollout.frame_timestamps = timestamps_from_json(in.at("frame_timestamps"));
                rollout.response_text = in.at("response").get<std::string>();

                const argos::VerifierResult scored = verifier.score(rollout);
                r.record = breakdown_to_json(scored.breakdown);
                r.record["schema_version"] = kSchemaVersion;
                if (in.contains("id")) r.record["id"] = in.at("id");
                if (in.contains("group_id")) {
                    r.group_id = in.at("group_id").get<std::string>();
                    r.record["group_id"] = *r.group_id;
                }
                json diags = json::array();
                for (const auto& d : scored.diagnostics) diags.push_back(d.message);
                r.record["diagnostics"] = diags;
                r.r_final = scored.breakdown.r_final;
            } catch (const argos::TransportError& e) {
                r.erred = r.transport = true;
                r.error = e.what();
            } catch (const std::exception& e) {
                r.erred = true;
                r.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < config.workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    // Group advantages over successfully scored lines, in input order.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < results.size(); ++i)
        if (!results[i].skipped && !results[i].erred && results[i].group_id)
            groups[*results[i].group_id].push_back(i);
    for (const auto& [gid, members] : groups) {
        if (members.size() < 2) continue;
        std::vector<double> rewards;
        rewards.reserve(members.size());
        for (std::size_t i : members) rewards.push_back(results[i].r_final);
        const argos::GroupAdvantages adv = argos::grpo_advantages(rewards);
        for (std::size_t k = 0; k < members.size(); ++k) {
            results[members[k]].record["advantage"] = adv.advantages[k];
            results[members[k]].record["degenerate_group"] = adv.degenerate;
        }
    }

    OutputSink sink(args.out);
    bool transport_failed = false;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const LineResult& r = results[i];
        if (r.skipped) continue;
        if (r.erred) {
            ++failures;
            transport_failed = transport_failed || r.transport;
            json err{{"schema_version", kSchemaVersion}, {"line", i + 1}, {"error", r.error}};
            sink.stream() << err.dump() << "\n";
            continue;
        }
        sink.stream() << r.record.dump() << "\n";
    }
    sink.stream().flush();
    if (failures > 0)
        std::cerr << "score: " << failures << " of " << lines.size() << " lines failed\n";
    return transport_failed ? kExitTransport : kExitOk;
}

int cmd_filter(const CommonArgs& args, const std::string& input_path,
               const std::string& report_path) {
    const argos::AppConfig config = resolve_config(args);
    const argos::Verifier verifier(config.verifier, argos::make_teacher_suite(config));

    std::vector<argos::CurationSample> samples;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(input_path)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json in;
        try {
            in = json::parse(line);
            argos::CurationSample s;
            s.id = in.contains("id") ? in.at("id").get<std::string>()
                                     : "line-" + std::to_string(line_no);
            s.question = in.at("question").get<std::string>();
            s.answer_gt = in.at("answer").get<std::string>();
            s.media_ref = in.at("media").get<std::string>();
            s.media_kind = media_kind_from_string(in.value("media_kind", std::string("image")));
            if (in.contains("frame_timestamps"))
                s.frame_timestamps = timestamps_from_json(in.at("frame_timestamps"));
            s.rollouts = in.at("rollouts").get<std::vector<std::string>>();
            samples.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw argos::ConfigError("filter input line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }

    argos::CurationResult result;
    try {
        result = argos::curate_stream(samples, verifier, config.workers);
    } catch (const argos::TransportError& e) {
        std::cerr << "filter: " << e.what() << "\n";
        return kExitTransport;
    }

    OutputSink sink(args.out);
    for (const argos::KeptSample& kept : result.kept) {
        json out;
        out["schema_version"] = kSchemaVersion;
        out["id"] = kept.sample.id;
        out["question"] = kept.sample.question;
        out["answer"] = kept.sample.answer_gt;
        out["media"] = kept.sample.media_ref;
        out["media_kind"] = kept.sample.media_kind == argos::MediaKind::image ? "image" : "video";
        if (!kept.sample.frame_timestamps.empty()) {
            json ts = json::array();
            for (const auto& f : kept.sample.frame_timestamps)
                ts.push_back({{"frame", f.frame}, {"time_s", f.time_s}});
            out["frame_timestamps"] = ts;
        }
        out["rollouts"] = kept.sample.rollouts;
        out["best_rollout"] = kept.best_index;
        out["canonical_text"] = kept.canonical_text;
        out["breakdown"] = breakdown_to_json(kept.breakdown);
        sink.stream() << out.dump() << "\n";
    }
    sink.stream().flush();

    json report;
    report["schema_version"] = kSchemaVersion;
    report["total_samples"] = result.report.total_samples;
    report["kept_samples"] = result.report.kept_samples;
    report["yield_rate"] =
        result.report.yield_rate ? json(*result.report.yield_rate) : json(nullptr);
    report["retry_ids"] = result.report.retry_ids;
    json per_sample = json::array();
    for (const argos::SampleVerdict& v : result.report.per_sample) {
        json breakdowns = json::array();
        for (const auto& b : v.breakdowns) breakdowns.push_back(breakdown_to_json(b));
        per_sample.push_back({{"id", v.id},
                              {"max_score", v.max_score},
                              {"kept", v.kept},
                              {"best_index", v.best_index},
                              {"breakdowns", breakdowns}});
    }
    report["per_sample"] = per_sample;
    if (!report_path.empty()) {
        std::ofstream rep(report_path);
        if (!rep) throw argos::ConfigError("cannot open report file: " + report_path);
        rep << report.dump(2) << "\n";
    } else {
        std::cerr << "filter: kept " << result.report.kept_samples << " of "
                  << result.report.total_samples << " samples\n";
    }
    return kExitOk;
}

argos::NoiseSpec noise_from_json(const json& j) {
    argos::NoiseSpec noise;
    const std::string family = j.value("family", std::string("gaussian"));
    if (family == "gaussian") noise.family = argos::NoiseFamily::gaussian;
    else if (family == "uniform_bounded") noise.family = argos::NoiseFamily::uniform_bounded;
    else if (family == "rademacher_scaled") noise.family = argos::NoiseFamily::rademacher_scaled;
    else throw argos::ConfigError("unknown noise family: " + family);
    noise.sigma = j.value("sigma", 1.0);
    return noise;
}

json sim_report_to_json(const argos::SimReport& r) {
    return json{{"schema_version", kSchemaVersion},
                {"empirical_prob", r.empirical_prob},
                {"analytic_bound", r.analytic_bound},
                {"standard_error", r.standard_error},
                {"bound_kind", r.bound_kind == argos::BoundKind::lower ? "lower" : "upper"},
                {"bound_satisfied", r.bound_satisfied},
                {"trials", r.trials},
                {"beta", r.beta},
                {"hit_counts", r.hit_counts}};
}

// simulate: the config file picks one experiment via "kind".
int cmd_simulate(const CommonArgs& args, const std::string& sim_path,
                 const std::string& curve_path) {
    std::ifstream in(sim_path);
    if (!in) throw argos::ConfigError("cannot open simulation config: " + sim_path);
    json spec;
    try {
        in >> spec;
    } catch (const std::exception& e) {
        throw argos::ConfigError("invalid simulation config JSON: " + std::string(e.what()));
    }

    const std::string kind = spec.at("kind").get<std::string>();
    json out;
    double curve_beta = 0.0, curve_C = 0.0;
    int curve_m = 0, curve_max_n = 0;

    if (kind == "optimal_n") {
        const double beta = spec.at("beta").get<double>();
        const double C = spec.at("C").get<double>();
        const int m = spec.at("m").get<int>();
        const argos::OptimalN result = argos::optimal_n(beta, C, m);
        out = json{{"schema_version", kSchemaVersion},
                   {"grid_argmax", result.grid_argmax},
                   {"formula_n", result.formula_n},
                   {"h_at_argmax", result.h_at_argmax},
                   {"h_at_formula", result.h_at_formula}};
        curve_beta = beta;
        curve_C = C;
        curve_m = m;
        curve_max_n = std::max(result.grid_argmax * 3, 10);
    } else {
        argos::ActionSpace space;
        space.true_rewards = spec.at("rewards").get<std::vector<std::vector<double>>>();
        space.weights = spec.at("weights").get<std::vector<double>>();
        const argos::NoiseSpec noise = noise_from_json(spec.value("noise", json::object()));
        const double delta = spec.at("delta").get<double>();
        const int trials = spec.value("trials", 20000);
        std::uint64_t seed = spec.value("seed", std::uint64_t{0});
        if (args.seed) seed = *args.seed;

        argos::SimReport report;
        if (kind == "pairwise") {
            report = argos::pairwise_domination_check(space, noise, delta, trials, seed);
        } else {
            argos::SimConfig config;
            config.action_space = space;
            config.noise = noise;
            config.delta = delta;
            config.n = spec.at("n").get<int>();
            config.policy = spec.at("policy").get<std::vector<double>>();
            config.trials = trials;
            config.seed = seed;
            if (kind == "selection") {
                report = argos::selection_check(config);
            } else if (kind == "gated_selection") {
                const json& g = spec.at("gated");
                const argos::GatedSpec gated(g.at("r0").get<std::vector<double>>(),
                                             g.at("tau").get<double>(),
                                             g.at("gamma").get<double>(),
                                             g.at("w0").get<double>());
                report = argos::gated_selection_check(config, gated);
            } else {
                throw argos::ConfigError("unknown simulation kind: " + kind);
            }
            const double ratio = space.w_min() / space.w_max();
            curve_beta = report.beta;
            curve_C = (delta * delta / (4 * noise.sigma * noise.sigma)) * ratio * ratio;
            curve_m = static_cast<int>(space.num_components());
            curve_max_n = std::max(config.n * 4, 32);
        }
        out = sim_report_to_json(report);
    }

    OutputSink sink(args.out);
    sink.stream() << out.dump(2) << "\n";
    sink.stream().flush();

    if (!curve_path.empty() && curve_m > 0) {
        std::ofstream curve(curve_path);
        if (!curve) throw argos::ConfigError("cannot open curve file: " + curve_path);
        curve << "n,H\n";
        for (int n = 1; n <= curve_max_n; ++n)
            curve << n << "," << argos::bound_H(n, curve_beta, curve_C, curve_m) << "\n";
    }
    return kExitOk;
}

json parsed_to_json(const argos::ParsedResponse& p) {
    json points = json::array();
    for (const argos::SpatialPoint& pt : p.points) {
        json j{{"x", pt.x}, {"y", pt.y}, {"label", pt.label}};
        j["frame"] = pt.frame ? json(*pt.frame) : json(nullptr);
        j["time_s"] = pt.time_s ? json(*pt.time_s) : json(nullptr);
        points.push_back(j);
    }
    json observations = json::array();
    for (const argos::FrameObservation& o : p.observations) {
        json j{{"description", o.description}};
        j["frame"] = o.frame ? json(*o.frame) : json(nullptr);
        j["time_s"] = o.time_s ? json(*o.time_s) : json(nullptr);
        observations.push_back(j);
    }
    json events = json::array();
    for (const argos::SegmentEvent& e : p.events) {
        json j{{"description", e.description}};
        j["start_frame"] = e.start_frame ? json(*e.start_frame) : json(nullptr);
        j["end_frame"] = e.end_frame ? json(*e.end_frame) : json(nullptr);
        j["start_time_s"] = e.start_time_s ? json(*e.start_time_s) : json(nullptr);
        j["end_time_s"] = e.end_time_s ? json(*e.end_time_s) : json(nullptr);
        events.push_back(j);
    }
    json diags = json::array();
    for (const auto& d : p.diagnostics) diags.push_back(d.message);
    return json{{"schema_version", kSchemaVersion},
                {"reasoning", p.reasoning},
                {"answer", p.answer ? json(*p.answer) : json(nullptr)},
                {"points", points},
                {"observations", observations},
                {"events", events},
                {"diagnostics", diags}};
}

int cmd_parse(const CommonArgs& args, const std::string& input_path, const std::string& text,
              const std::string& media_kind, const std::string& timestamps_json) {
    argos::RawRollout rollout;
    rollout.media_kind = media_kind_from_string(media_kind);
    if (!text.empty()) {
        rollout.response_text = text;
    } else if (!input_path.empty()) {
        std::ifstream in(input_path);
        if (!in) throw argos::ConfigError("cannot open input file: " + input_path);
        std::stringstream buf;
        buf << in.rdbuf();
        rollout.response_text = buf.str();
    }
    if (!timestamps_json.empty())
        rollout.frame_timestamps = timestamps_from_json(json::parse(timestamps_json));

    OutputSink sink(args.out);
    sink.stream() << parsed_to_json(argos::parse_rollout(rollout)).dump(2) << "\n";
    sink.stream().flush();
    return kExitOk;
}

int cmd_mock_serve(const std::string& fixtures_path, const std::string& host, int port) {
    json fixtures = json::object();
    if (!fixtures_path.empty())
        fixtures = argos::teacher::MockTeacher::from_file(fixtures_path).fixtures();
    argos::teacher::MockTeacherServer server(std::move(fixtures));
    std::cerr << "mock teacher listening on " << host << ":" << port << "\n";
    if (!server.serve_blocking(host, port)) {
        std::cerr << "mock-serve: failed to bind " << host << ":" << port << "\n";
        return kExitTransport;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"grounded-rollout reward verifier and curation toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::uint64_t seed_arg = 0;
    int workers_arg = 0;
    app.add_option("--config", common.config_path, "config file (JSON or TOML)");
    auto* seed_opt = app.add_option("--seed", seed_arg, "override the config seed");
    auto* workers_opt = app.add_option("--workers", workers_arg, "override the worker count");
    app.add_option("--out", common.out, "output path, '-' for stdout")->capture_default_str();

    std::string score_input;
    auto* score = app.add_subcommand("score", "score rollouts from a JSONL file");
    score->add_option("input", score_input, "rollouts JSONL")->required();

    std::string filter_input, filter_report;
    auto* filter = app.add_subcommand("filter", "filter SFT candidate samples");
    filter->add_option("input", filter_input, "samples JSONL")->required();
    filter->add_option("--report", filter_report, "write the curation report JSON here");

    std::string sim_input, sim_curve;
    auto* simulate = app.add_subcommand("simulate", "run a reward-theory simulation");
    simulate->add_option("config", sim_input, "simulation config JSON")->required();
    simulate->add_option("--curve", sim_curve, "write a CSV of (n, H(n))");

    std::string parse_input, parse_text, parse_kind = "image", parse_timestamps;
    auto* parse = app.add_subcommand("parse", "debug-parse one response");
    parse->add_option("input", parse_input, "response text file");
    parse->add_option("--text", parse_text, "inline response text");
    parse->add_option("--media-kind", parse_kind, "image or video")->capture_default_str();
    parse->add_option("--timestamps", parse_timestamps,
                      "frame timestamps as JSON, e.g. [{\"frame\":1,\"time_s\":0.5}]");

    std::string serve_fixtures, serve_host = "127.0.0.1";
    int serve_port = 8080;
    auto* serve = app.add_subcommand("mock-serve", "serve the mock teacher over HTTP");
    serve->add_option("--fixtures", serve_fixtures, "fixtures JSON file");
    serve->add_option("--host", serve_host, "bind address")->capture_default_str();
    serve->add_option("--port", serve_port, "bind port")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    if (seed_opt->count() > 0) common.seed = seed_arg;
    if (workers_opt->count() > 0) common.workers = workers_arg;

    try {
        if (score->parsed()) return cmd_score(common, score_input);
        if (filter->parsed()) return cmd_filter(common, filter_input, filter_report);
        if (simulate->parsed()) return cmd_simulate(common, sim_input, sim_curve);
        if (parse->parsed())
            return cmd_parse(common, parse_input, parse_text, parse_kind, parse_timestamps);
        if (serve->parsed()) return cmd_mock_serve(serve_fixtures, serve_host, serve_port);
    } catch (const argos::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadConfig;
    } catch (const argos::TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
