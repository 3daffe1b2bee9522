#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>

#include "argos/teacher/protocol.hpp"

namespace argos::teacher {

struct ClientOptions {
    int timeout_ms = 5000;
    int retries = 2;  // additional attempts after the first
};

/// HTTP client for the teacher wire protocol. One instance per endpoint
/// base URL; safe for concurrent use (each request opens its own
/// connection). Throws TransportError after exhausting retries.
class HttpTeacher final : public GroundingOracle,
                          public VideoJudge,
                          public JudgeClient,
                          public LogProbScorer {
  public:
    HttpTeacher(std::string base_url, ClientOptions options = {});

    std::optional<BBox> detect(const std::string& label, const MediaRef& image) override;
    std::optional<Point2> point(const std::string& label, const MediaRef& image) override;
    Mask segment(const BBox& region, const MediaRef& image) override;
    std::pair<int, int> image_size(const MediaRef& image) override;

    double score_frame(const std::string& description, const MediaRef& frame) override;
    double score_segment(const std::string& description, const std::string& media_id,
                         int start_frame, int end_frame) override;

    bool judge_semantic(const std::string& pred, const std::string& gt) override;

    double conditional_probability(const std::string& question, const std::string& reasoning,
                                   const std::string& answer,
                                   const std::string& media_ref) override;

    static TeacherSuite make_suite(const std::string& base_url, ClientOptions options = {});

  private:
    nlohmann::json post(const char* path, nlohmann::json body);
    std::string base_url_;
    ClientOptions options_;
    std::atomic<std::uint64_t> next_request_id_{1};
};

}  // namespace argos::teacher
