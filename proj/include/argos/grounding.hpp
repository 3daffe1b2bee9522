#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "argos/diagnostics.hpp"
#include "argos/parse.hpp"

namespace argos {

/// Identifies an image, or one frame of a video, without decoding pixels.
struct MediaRef {
    std::string id;
    std::optional<int> frame;  // set when addressing a single video frame
};

struct BBox {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    bool valid() const { return x_min <= x_max && y_min <= y_max; }
};

struct Point2 {
    double x = 0, y = 0;
};

/// Binary membership field with the source image's dimensions.
class Mask {
  public:
    Mask() = default;
    Mask(int width, int height) : width_(width), height_(height), bits_(
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

    void fill_rect(const BBox& b);

    /// Run-length encoding per row: [start, len, start, len, ...] of set runs.
    std::vector<std::vector<int>> rle_rows() const;
    static Mask from_rle(int width, int height, const std::vector<std::vector<int>>& rows);

  private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }
    int width_ = 0, height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Teacher capability contract for spatial grounding: an open-vocabulary
/// detector, a pointing model and a segmenter. Implementations throw
/// TransportError on infrastructure failure; "not found" is a nullopt.
class GroundingOracle {
  public:
    virtual ~GroundingOracle() = default;
    virtual std::optional<BBox> detect(const std::string& label, const MediaRef& image) = 0;
    virtual std::optional<Point2> point(const std::string& label, const MediaRef& image) = 0;
    virtual Mask segment(const BBox& region, const MediaRef& image) = 0;
    /// (width, height) of the referenced image or frame.
    virtual std::pair<int, int> image_size(const MediaRef& image) = 0;
};

/// Teacher contract for judging frame- and segment-level descriptions.
/// Scores are clamped to [0, 1] by the caller.
class VideoJudge {
  public:
    virtual ~VideoJudge() = default;
    virtual double score_frame(const std::string& description, const MediaRef& frame) = 0;
    virtual double score_segment(const std::string& description, const std::string& media_id,
                                 int start_frame, int end_frame) = 0;
};

struct GroundingScore {
    std::vector<std::pair<SpatialPoint, double>> per_point;
    std::vector<double> per_frame_obs;
    std::vector<double> per_segment;
    double r_visual = 0.0;
    bool has_points = false, has_frames = false, has_segments = false;
    Diagnostics diagnostics;
};

/// Eq-style indicator: 1 iff the mask is set at the point's pixel. An
/// out-of-bounds point scores 0 with a diagnostic (hallucinated coordinate).
int score_point(const SpatialPoint& p, const Mask& mask, Diagnostics& diags);

/// detect -> segment; on detection failure, point -> degenerate box ->
/// segment; absent when both teachers come up empty.
std::optional<Mask> ground_label(const std::string& label, const MediaRef& image,
                                 GroundingOracle& oracle);

/// Spatial grounding reward: mean over per-point indicator scores. Points
/// whose labels cannot be grounded score 0.
GroundingScore spatial_reward(const std::vector<SpatialPoint>& points, const MediaRef& image,
                              GroundingOracle& oracle);

/// Spatiotemporal reward for videos: timed points through the spatial
/// machinery on their frames, observations through the frame judge, events
/// through the segment judge; final score is the unweighted mean of the
/// per-category means over non-empty categories.
GroundingScore temporal_reward(const ParsedResponse& parsed, const std::string& media_id,
                               const std::vector<FrameStamp>& timestamps,
                               GroundingOracle& oracle, VideoJudge& judge);

}  // namespace argos
