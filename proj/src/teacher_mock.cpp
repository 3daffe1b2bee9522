#include "argos/teacher/mock.hpp"

#include <fstream>
#include <memory>

#include "argos/errors.hpp"

namespace argos::teacher {

using nlohmann::json;

namespace {

std::string media_key(const MediaRef& m) {
    return m.frame ? m.id + "#" + std::to_string(*m.frame) : m.id;
}

}  // namespace

MockTeacher::MockTeacher(json fixtures) : fixtures_(std::move(fixtures)) {}

MockTeacher MockTeacher::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock fixtures file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid fixtures JSON in " + path + ": " + e.what());
    }
    return MockTeacher(std::move(j));
}

const json* MockTeacher::lookup(const std::string& table, const MediaRef& media,
                                const std::string& key) const {
    const auto t = fixtures_.find(table);
    if (t == fixtures_.end()) return nullptr;
    if (const auto it = t->find(media_key(media) + "|" + key); it != t->end()) return &*it;
    // Frame-addressed media fall back to the bare video id.
    if (media.frame) {
        if (const auto it = t->find(media.id + "|" + key); it != t->end()) return &*it;
    }
    if (const auto it = t->find(key); it != t->end()) return &*it;
    return nullptr;
}

std::optional<BBox> MockTeacher::detect(const std::string& label, const MediaRef& image) {
    const json* v = lookup("detect", image, label);
    if (!v || v->is_null()) return std::nullopt;
    const auto a = v->get<std::vector<double>>();
    if (a.size() != 4) throw ConfigError("detect fixture for \"" + label + "\" must be [x0,y0,x1,y1]");
    return BBox{a[0], a[1], a[2], a[3]};
}

std::optional<Point2> MockTeacher::point(const std::string& label, const MediaRef& image) {
    const json* v = lookup("point", image, label);
    if (!v || v->is_null()) return std::nullopt;
    const auto a = v->get<std::vector<double>>();
    if (a.size() != 2) throw ConfigError("point fixture for \"" + label + "\" must be [x,y]");
    return Point2{a[0], a[1]};
}

Mask MockTeacher::segment(const BBox& region, const MediaRef& image) {
    const auto [w, h] = image_size(image);
    Mask m(w, h);
    m.fill_rect(region);
    return m;
}

std::pair<int, int> MockTeacher::image_size(const MediaRef& image) {
    const auto images = fixtures_.find("images");
    if (images != fixtures_.end()) {
        if (const auto it = images->find(image.id); it != images->end())
            return {(*it).at("width").get<int>(), (*it).at("height").get<int>()};
    }
    if (const auto it = fixtures_.find("default_image"); it != fixtures_.end())
        return {it->at("width").get<int>(), it->at("height").get<int>()};
    return {640, 480};
}

namespace {

double default_of(const json& fixtures, const std::string& name, double fallback) {
    if (const auto it = fixtures.find("defaults"); it != fixtures.end())
        if (const auto v = it->find(name); v != it->end()) return v->get<double>();
    return fallback;
}

}  // namespace

double MockTeacher::score_frame(const std::string& description, const MediaRef& frame) {
    if (const json* v = lookup("judge_frame", frame, description)) return v->get<double>();
    return default_of(fixtures_, "judge_frame", 0.0);
}

double MockTeacher::score_segment(const std::string& description, const std::string& media_id,
                                  int start_frame, int end_frame) {
    const MediaRef media{media_id, std::nullopt};
    const std::string ranged = std::to_string(start_frame) + "-" + std::to_string(end_frame) +
                               "|" + description;
    if (const json* v = lookup("judge_segment", media, ranged)) return v->get<double>();
    if (const json* v = lookup("judge_segment", media, description)) return v->get<double>();
    return default_of(fixtures_, "judge_segment", 0.0);
}

bool MockTeacher::judge_semantic(const std::string& pred, const std::string& gt) {
    const auto t = fixtures_.find("judge_semantic");
    if (t != fixtures_.end()) {
        if (const auto it = t->find(pred + "|||" + gt); it != t->end()) return it->get<bool>();
    }
    if (const auto it = fixtures_.find("defaults"); it != fixtures_.end())
        if (const auto v = it->find("judge_semantic"); v != it->end()) return v->get<bool>();
    return false;
}

double MockTeacher::conditional_probability(const std::string& /*question*/,
                                            const std::string& /*reasoning*/,
                                            const std::string& answer,
                                            const std::string& media_ref) {
    const MediaRef media{media_ref, std::nullopt};
    if (const json* v = lookup("logprob", media, answer)) return v->get<double>();
    return default_of(fixtures_, "logprob", 0.0);
}

TeacherSuite MockTeacher::make_suite(json fixtures) {
    auto mock = std::make_shared<MockTeacher>(std::move(fixtures));
    return TeacherSuite{mock, mock, mock, mock};
}

}  // namespace argos::teacher
