#pragma once

#include <string>

#include <json.hpp>

#include "argos/teacher/protocol.hpp"

namespace argos::teacher {

/// Deterministic teacher backed by a fixtures file. Lookups go
/// "media|key" -> "key" -> configured default, where media is the image id
/// plus "#<frame>" when a frame is addressed.
///
/// Fixture schema (JSON):
///   {
///     "schema_version": 1,
///     "default_image": {"width": W, "height": H},
///     "images":        {"<id>": {"width": W, "height": H}, ...},
///     "detect":        {"<media>|<label>" or "<label>": [x0,y0,x1,y1], ...},
///     "point":         {"...": [x, y], ...},
///     "judge_frame":   {"<media>|<description>" or "<description>": score},
///     "judge_segment": {"...": score},
///     "judge_semantic":{"<pred>|||<gt>": bool, ...},
///     "logprob":       {"<media>|<answer>" or "<answer>": prob, ...},
///     "defaults":      {"judge_frame": 0.0, "judge_segment": 0.0,
///                       "judge_semantic": false, "logprob": 0.0}
///   }
class MockTeacher final : public GroundingOracle,
                          public VideoJudge,
                          public JudgeClient,
                          public LogProbScorer {
  public:
    explicit MockTeacher(nlohmann::json fixtures);
    static MockTeacher from_file(const std::string& path);

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

    const nlohmann::json& fixtures() const { return fixtures_; }

    /// Suite view over one shared mock instance.
    static TeacherSuite make_suite(nlohmann::json fixtures);

  private:
    const nlohmann::json* lookup(const std::string& table, const MediaRef& media,
                                 const std::string& key) const;
    nlohmann::json fixtures_;
};

}  // namespace argos::teacher
