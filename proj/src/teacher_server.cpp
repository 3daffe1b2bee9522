#include "argos/teacher/server.hpp"

#include <httplib.h>

namespace argos::teacher {

using nlohmann::json;

struct MockTeacherServer::Impl {
    explicit Impl(json fixtures) : mock(std::move(fixtures)) { install_routes(); }

    void install_routes() {
        auto handle = [this](const char* path,
                             json (MockTeacherServer::Impl::*fn)(const json&)) {
            server.Post(path, [this, fn](const httplib::Request& req, httplib::Response& res) {
                json reply;
                try {
                    const json body = json::parse(req.body);
                    reply = (this->*fn)(body);
                    reply["request_id"] = body.at("request_id");
                    reply["schema_version"] = kSchemaVersion;
                } catch (const std::exception& e) {
                    res.status = 400;
                    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
                    return;
                }
                res.set_content(reply.dump(), "application/json");
            });
        };
        handle(kDetectPath, &Impl::on_detect);
        handle(kPointPath, &Impl::on_point);
        handle(kSegmentPath, &Impl::on_segment);
        handle(kJudgeFramePath, &Impl::on_judge_frame);
        handle(kJudgeSegmentPath, &Impl::on_judge_segment);
        handle(kJudgeSemanticPath, &Impl::on_judge_semantic);
        handle(kLogprobPath, &Impl::on_logprob);
    }

    json on_detect(const json& body) {
        const auto media = media_from_json(body.at("image"));
        const auto bbox = mock.detect(body.at("label").get<std::string>(), media);
        if (!bbox) return json{{"found", false}};
        return json{{"found", true}, {"bbox", {bbox->x_min, bbox->y_min, bbox->x_max, bbox->y_max}}};
    }

    json on_point(const json& body) {
        const auto media = media_from_json(body.at("image"));
        const auto pt = mock.point(body.at("label").get<std::string>(), media);
        if (!pt) return json{{"found", false}};
        return json{{"found", true}, {"point", {pt->x, pt->y}}};
    }

    json on_segment(const json& body) {
        const auto media = media_from_json(body.at("image"));
        const auto r = body.at("region").get<std::vector<double>>();
        const Mask mask = mock.segment(BBox{r.at(0), r.at(1), r.at(2), r.at(3)}, media);
        return json{{"mask", mask_to_json(mask)}};
    }

    json on_judge_frame(const json& body) {
        const auto media = media_from_json(body.at("image"));
        return json{{"score", mock.score_frame(body.at("description").get<std::string>(), media)}};
    }

    json on_judge_segment(const json& body) {
        return json{{"score", mock.score_segment(body.at("description").get<std::string>(),
                                                 body.at("image").at("id").get<std::string>(),
                                                 body.at("start_frame").get<int>(),
                                                 body.at("end_frame").get<int>())}};
    }

    json on_judge_semantic(const json& body) {
        return json{{"verdict", mock.judge_semantic(body.at("pred").get<std::string>(),
                                                    body.at("gt").get<std::string>())}};
    }

    json on_logprob(const json& body) {
        return json{{"prob", mock.conditional_probability(
                                 body.at("question").get<std::string>(),
                                 body.at("reasoning").get<std::string>(),
                                 body.at("answer").get<std::string>(),
                                 body.at("image").at("id").get<std::string>())}};
    }

    MockTeacher mock;
    httplib::Server server;
};

MockTeacherServer::MockTeacherServer(json fixtures)
    : impl_(std::make_unique<Impl>(std::move(fixtures))) {}

MockTeacherServer::~MockTeacherServer() { stop(); }

int MockTeacherServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else {
        impl_->server.bind_to_port(host, port);
    }
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

bool MockTeacherServer::serve_blocking(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

void MockTeacherServer::stop() {
    if (impl_) impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace argos::teacher
