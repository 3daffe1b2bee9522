#include "argos/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace argos {

void Mask::fill_rect(const BBox& b) {
    const int x0 = std::max(0, static_cast<int>(std::floor(b.x_min)));
    const int y0 = std::max(0, static_cast<int>(std::floor(b.y_min)));
    const int x1 = std::min(width_ - 1, static_cast<int>(std::floor(b.x_max)));
    const int y1 = std::min(height_ - 1, static_cast<int>(std::floor(b.y_max)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) set(x, y);
}

std::vector<std::vector<int>> Mask::rle_rows() const {
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(height_));
    for (int y = 0; y < height_; ++y) {
        int x = 0;
        while (x < width_) {
            if (!at(x, y)) {
                ++x;
                continue;
            }
            const int start = x;
            while (x < width_ && at(x, y)) ++x;
            rows[static_cast<std::size_t>(y)].push_back(start);
            rows[static_cast<std::size_t>(y)].push_back(x - start);
        }
    }
    return rows;
}

Mask Mask::from_rle(int width, int height, const std::vector<std::vector<int>>& rows) {
    Mask m(width, height);
    for (int y = 0; y < height && y < static_cast<int>(rows.size()); ++y) {
        const auto& row = rows[static_cast<std::size_t>(y)];
        for (std::size_t i = 0; i + 1 < row.size(); i += 2) {
            const int start = row[i], len = row[i + 1];
            for (int x = start; x < start + len && x < width; ++x)
                if (x >= 0) m.set(x, y);
        }
    }
    return m;
}

int score_point(const SpatialPoint& p, const Mask& mask, Diagnostics& diags) {
    const int x = static_cast<int>(std::llround(p.x));
    const int y = static_cast<int>(std::llround(p.y));
    if (!mask.in_bounds(x, y)) {
        add_diag(diags, "point (" + std::to_string(x) + "," + std::to_string(y) +
                            ") outside image bounds; grounding score 0",
                 p.source_span.first);
        return 0;
    }
    return mask.at(x, y) ? 1 : 0;
}

std::optional<Mask> ground_label(const std::string& label, const MediaRef& image,
                                 GroundingOracle& oracle) {
    if (const auto bbox = oracle.detect(label, image)) return oracle.segment(*bbox, image);
    const auto pt = oracle.point(label, image);
    if (!pt) return std::nullopt;
    // Pointing fallback: wrap the returned point in a small box (side 2% of
    // the shorter image dimension) and hand it to the segmenter.
    const auto [width, height] = oracle.image_size(image);
    const double side = 0.02 * static_cast<double>(std::min(width, height));
    const double h = std::max(side / 2.0, 0.5);
    BBox box{pt->x - h, pt->y - h, pt->x + h, pt->y + h};
    box.x_min = std::max(box.x_min, 0.0);
    box.y_min = std::max(box.y_min, 0.0);
    box.x_max = std::min(box.x_max, static_cast<double>(width - 1));
    box.y_max = std::min(box.y_max, static_cast<double>(height - 1));
    return oracle.segment(box, image);
}

GroundingScore spatial_reward(const std::vector<SpatialPoint>& points, const MediaRef& image,
                              GroundingOracle& oracle) {
    GroundingScore score;
    score.has_points = !points.empty();
    double sum = 0.0;
    for (const auto& p : points) {
        int s = 0;
        if (const auto mask = ground_label(p.label, image, oracle)) {
            s = score_point(p, *mask, score.diagnostics);
        } else {
            add_diag(score.diagnostics,
                     "label \"" + p.label + "\" could not be grounded; score 0",
                     p.source_span.first);
        }
        score.per_point.emplace_back(p, static_cast<double>(s));
        sum += s;
    }
    score.r_visual = points.empty() ? 0.0 : sum / static_cast<double>(points.size());
    return score;
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Frame resolution: use the cited frame index when present, else the nearest
// frame by timestamp (ties to the earlier frame). Returns nullopt when the
// citation does not land on an available frame.
std::optional<int> resolve_frame(const std::optional<int>& frame,
                                 const std::optional<double>& time_s,
                                 const std::vector<FrameStamp>& timestamps) {
    if (frame) {
        for (const auto& fs : timestamps)
            if (fs.frame == *frame) return *frame;
        return std::nullopt;
    }
    if (!time_s || timestamps.empty()) return std::nullopt;
    int best = timestamps.front().frame;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& fs : timestamps) {
        const double d = std::abs(fs.time_s - *time_s);
        if (d < best_d) {  // strict: ties keep the earlier frame
            best_d = d;
            best = fs.frame;
        }
    }
    return best;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

GroundingScore temporal_reward(const ParsedResponse& parsed, const std::string& media_id,
                               const std::vector<FrameStamp>& timestamps,
                               GroundingOracle& oracle, VideoJudge& judge) {
    GroundingScore score;
    std::vector<double> point_scores;

    for (const auto& p : parsed.points) {
        if (!p.frame && !p.time_s) continue;  // untimed points are not scorable on video
        const auto f = resolve_frame(p.frame, p.time_s, timestamps);
        double s = 0.0;
        if (!f) {
            add_diag(score.diagnostics,
                     "point cites a frame outside the available range; score 0",
                     p.source_span.first);
        } else {
            MediaRef ref{media_id, *f};
            if (const auto mask = ground_label(p.label, ref, oracle)) {
                s = score_point(p, *mask, score.diagnostics);
            } else {
                add_diag(score.diagnostics,
                         "label \"" + p.label + "\" could not be grounded; score 0",
                         p.source_span.first);
            }
        }
        score.per_point.emplace_back(p, s);
        point_scores.push_back(s);
    }

    for (const auto& o : parsed.observations) {
        const auto f = resolve_frame(o.frame, o.time_s, timestamps);
        double s = 0.0;
        if (!f) {
            add_diag(score.diagnostics,
                     "observation cites a frame outside the available range; score 0");
        } else {
            s = clamp01(judge.score_frame(o.description, MediaRef{media_id, *f}));
        }
        score.per_frame_obs.push_back(s);
    }

    const int last_frame = timestamps.empty() ? 0 : timestamps.back().frame;
    for (const auto& e : parsed.events) {
        const auto start = resolve_frame(e.start_frame, e.start_time_s, timestamps);
        auto end = resolve_frame(e.end_frame, e.end_time_s, timestamps);
        double s = 0.0;
        if (!start) {
            add_diag(score.diagnostics,
                     "event cites a start frame outside the available range; score 0");
        } else {
            if (!end) end = last_frame;  // open-ended segment runs to the last frame
            if (*end < *start) {
                add_diag(score.diagnostics, "event with end before start; score 0");
            } else {
                s = clamp01(judge.score_segment(e.description, media_id, *start, *end));
            }
        }
        score.per_segment.push_back(s);
    }

    score.has_points = !point_scores.empty();
    score.has_frames = !score.per_frame_obs.empty();
    score.has_segments = !score.per_segment.empty();

    // Unweighted mean of the category means, over non-empty categories only.
    std::vector<double> cat;
    if (score.has_points) cat.push_back(mean(point_scores));
    if (score.has_frames) cat.push_back(mean(score.per_frame_obs));
    if (score.has_segments) cat.push_back(mean(score.per_segment));
    score.r_visual = cat.empty() ? 0.0 : mean(cat);
    return score;
}

}  // namespace argos
