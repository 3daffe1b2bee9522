#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "argos/grounding.hpp"
#include "argos/outcome.hpp"
#include "argos/reasoning.hpp"

namespace argos::teacher {

inline constexpr int kSchemaVersion = 1;

// Endpoint paths of the teacher wire protocol (JSON bodies over HTTP POST;
// every request carries a "request_id" echoed back in the response).
inline constexpr const char* kDetectPath = "/detect";
inline constexpr const char* kPointPath = "/point";
inline constexpr const char* kSegmentPath = "/segment";
inline constexpr const char* kJudgeFramePath = "/judge/frame";
inline constexpr const char* kJudgeSegmentPath = "/judge/segment";
inline constexpr const char* kJudgeSemanticPath = "/judge/semantic";
inline constexpr const char* kLogprobPath = "/logprob";

nlohmann::json media_to_json(const MediaRef& m);
MediaRef media_from_json(const nlohmann::json& j);

nlohmann::json mask_to_json(const Mask& m);
Mask mask_from_json(const nlohmann::json& j);

/// Everything the verifier needs from teachers, bundled so mock and remote
/// implementations are interchangeable.
struct TeacherSuite {
    std::shared_ptr<GroundingOracle> oracle;
    std::shared_ptr<VideoJudge> video_judge;
    std::shared_ptr<JudgeClient> semantic_judge;
    std::shared_ptr<LogProbScorer> logprob;
};

}  // namespace argos::teacher
