#include "argos/teacher/client.hpp"

#include <httplib.h>

#include "argos/errors.hpp"

namespace argos::teacher {

using nlohmann::json;

HttpTeacher::HttpTeacher(std::string base_url, ClientOptions options)
    : base_url_(std::move(base_url)), options_(options) {}

json HttpTeacher::post(const char* path, json body) {
    const std::uint64_t id = next_request_id_.fetch_add(1);
    body["request_id"] = id;
    body["schema_version"] = kSchemaVersion;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        httplib::Client client(base_url_);
        client.set_connection_timeout(0, options_.timeout_ms * 1000);
        client.set_read_timeout(0, options_.timeout_ms * 1000);
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            last_error = "no response (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const std::exception& e) {
            last_error = std::string("unparseable response body: ") + e.what();
            continue;
        }
        if (!reply.contains("request_id") || reply["request_id"].get<std::uint64_t>() != id) {
            last_error = "response did not echo the request id";
            continue;
        }
        return reply;
    }
    throw TransportError(std::string("teacher endpoint ") + base_url_ + path + " failed: " +
                         last_error);
}

std::optional<BBox> HttpTeacher::detect(const std::string& label, const MediaRef& image) {
    const json r = post(kDetectPath, json{{"label", label}, {"image", media_to_json(image)}});
    if (!r.at("found").get<bool>()) return std::nullopt;
    const auto b = r.at("bbox").get<std::vector<double>>();
    return BBox{b.at(0), b.at(1), b.at(2), b.at(3)};
}

std::optional<Point2> HttpTeacher::point(const std::string& label, const MediaRef& image) {
    const json r = post(kPointPath, json{{"label", label}, {"image", media_to_json(image)}});
    if (!r.at("found").get<bool>()) return std::nullopt;
    const auto p = r.at("point").get<std::vector<double>>();
    return Point2{p.at(0), p.at(1)};
}

Mask HttpTeacher::segment(const BBox& region, const MediaRef& image) {
    const json r = post(kSegmentPath,
                        json{{"image", media_to_json(image)},
                             {"region", {region.x_min, region.y_min, region.x_max, region.y_max}}});
    return mask_from_json(r.at("mask"));
}

std::pair<int, int> HttpTeacher::image_size(const MediaRef& image) {
    // Piggybacks on /segment with an empty region; responses carry the mask
    // dimensions, which equal the image's.
    const json r = post(kSegmentPath,
                        json{{"image", media_to_json(image)}, {"region", {0, 0, -1, -1}}});
    return {r.at("mask").at("width").get<int>(), r.at("mask").at("height").get<int>()};
}

double HttpTeacher::score_frame(const std::string& description, const MediaRef& frame) {
    const json r = post(kJudgeFramePath,
                        json{{"description", description}, {"image", media_to_json(frame)}});
    return r.at("score").get<double>();
}

double HttpTeacher::score_segment(const std::string& description, const std::string& media_id,
                                  int start_frame, int end_frame) {
    const json r = post(kJudgeSegmentPath, json{{"description", description},
                                                {"image", json{{"id", media_id}}},
                                                {"start_frame", start_frame},
                                                {"end_frame", end_frame}});
    return r.at("score").get<double>();
}

bool HttpTeacher::judge_semantic(const std::string& pred, const std::string& gt) {
    const json r = post(kJudgeSemanticPath, json{{"pred", pred}, {"gt", gt}});
    return r.at("verdict").get<bool>();
}

double HttpTeacher::conditional_probability(const std::string& question,
                                            const std::string& reasoning,
                                            const std::string& answer,
                                            const std::string& media_ref) {
    const json r = post(kLogprobPath, json{{"question", question},
                                           {"reasoning", reasoning},
                                           {"answer", answer},
                                           {"image", json{{"id", media_ref}}}});
    return r.at("prob").get<double>();
}

TeacherSuite HttpTeacher::make_suite(const std::string& base_url, ClientOptions options) {
    auto client = std::make_shared<HttpTeacher>(base_url, options);
    return TeacherSuite{client, client, client, client};
}

}  // namespace argos::teacher
