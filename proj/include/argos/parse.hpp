#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "argos/diagnostics.hpp"

namespace argos {

enum class MediaKind { image, video };

/// One sampled video frame: index as cited in the trace plus its timestamp.
struct FrameStamp {
    int frame = 0;
    double time_s = 0.0;
};

/// One rollout as it arrives from a dataset or a policy: question, ground
/// truth, media reference and the raw response text.
struct RawRollout {
    std::string question;
    std::string answer_gt;
    std::string media_ref;
    MediaKind media_kind = MediaKind::image;
    std::string response_text;
    std::vector<FrameStamp> frame_timestamps;  // video only, strictly increasing
};

using ByteSpan = std::pair<std::size_t, std::size_t>;  // [begin, end)

/// A 2D point cited in the response, with the object label it refers to and,
/// for video traces, the frame/time it was fused with.
struct SpatialPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
    std::optional<int> frame;
    std::optional<double> time_s;
    ByteSpan source_span{0, 0};

    bool same_key(const SpatialPoint& o) const {
        return x == o.x && y == o.y && label == o.label && frame == o.frame;
    }
};

/// A single-frame (or single-time) observation with its verbatim description.
struct FrameObservation {
    std::optional<int> frame;
    std::optional<double> time_s;
    std::string description;  // exact substring of the source text
};

/// A multi-frame event. Either end may be open.
struct SegmentEvent {
    std::optional<int> start_frame;
    std::optional<int> end_frame;
    std::optional<double> start_time_s;
    std::optional<double> end_time_s;
    std::string description;  // exact substring of the source text
};

struct ParsedResponse {
    std::string reasoning;
    std::optional<std::string> answer;
    std::vector<SpatialPoint> points;
    std::vector<FrameObservation> observations;
    std::vector<SegmentEvent> events;
    Diagnostics diagnostics;
};

struct TemporalExtraction {
    std::vector<FrameObservation> observations;
    std::vector<SegmentEvent> events;
    std::vector<SpatialPoint> timed_points;  // points fused with an anchor
    Diagnostics diagnostics;
};

/// Extracts every <points>/<point> tag in document order. Malformed tags are
/// skipped and reported through `diags`, never fatal. A tag carrying several
/// (xK, yK) pairs yields one point per pair, all sharing the tag's span.
std::vector<SpatialPoint> extract_points(const std::string& text, Diagnostics& diags);

/// Recognizes templated anchors ([Fk @ t=Ts], spans, lists) and the natural
/// language forms ("frame N at T seconds", "frames A to B", ...). Anchors in
/// the same sentence as a point tag fuse into timed points; the rest become
/// observations (single) or events (span/list).
TemporalExtraction extract_temporal_anchors(const std::string& text);

/// Trimmed content of the last well-formed <|begin_of_box|>...<|end_of_box|>
/// pair, or nullopt when none exists.
std::optional<std::string> extract_boxed_answer(const std::string& text, Diagnostics& diags);

/// Composes the extractors. Never throws on arbitrary input; worst case is an
/// empty response plus diagnostics.
ParsedResponse parse_rollout(const RawRollout& rollout);

/// Rewrites every recognized point tag into the canonical
/// <point x1="x" y1="y" alt="object">object</point> form. Idempotent;
/// non-tag text passes through byte-identical.
std::string reformat_points(const std::string& text);

/// Rewrites templated temporal anchors into natural language:
/// [Fk @ t=Ts] -> "frame k at T seconds", spans -> "from frame a at Ta
/// seconds to frame b at Tb seconds". Used when canonicalizing kept rollouts.
std::string canonicalize_timestamps(const std::string& text);

}  // namespace argos
