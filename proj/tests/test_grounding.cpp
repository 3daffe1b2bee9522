#include <doctest.h>

#include <algorithm>
#include <map>

#include "argos/grounding.hpp"
#include "argos/rng.hpp"

using namespace argos;

namespace {

class FakeOracle : public GroundingOracle {
  public:
    int width = 100, height = 80;
    std::map<std::string, BBox> boxes;    // detect fixtures
    std::map<std::string, Point2> marks;  // pointing fixtures
    int detect_calls = 0, point_calls = 0, segment_calls = 0;
    BBox last_segment_region;

    std::optional<BBox> detect(const std::string& label, const MediaRef&) override {
        ++detect_calls;
        const auto it = boxes.find(label);
        if (it == boxes.end()) return std::nullopt;
        return it->second;
    }
    std::optional<Point2> point(const std::string& label, const MediaRef&) override {
        ++point_calls;
        const auto it = marks.find(label);
        if (it == marks.end()) return std::nullopt;
        return it->second;
    }
    Mask segment(const BBox& region, const MediaRef&) override {
        ++segment_calls;
        last_segment_region = region;
        Mask m(width, height);
        m.fill_rect(region);
        return m;
    }
    std::pair<int, int> image_size(const MediaRef&) override { return {width, height}; }
};

class FakeJudge : public VideoJudge {
  public:
    std::map<int, double> frame_scores;         // by frame index
    std::map<std::pair<int, int>, double> segment_scores;
    double fallback = 0.0;

    double score_frame(const std::string&, const MediaRef& frame) override {
        const auto it = frame_scores.find(frame.frame.value_or(-1));
        return it == frame_scores.end() ? fallback : it->second;
    }
    double score_segment(const std::string&, const std::string&, int start, int end) override {
        const auto it = segment_scores.find({start, end});
        return it == segment_scores.end() ? fallback : it->second;
    }
};

SpatialPoint make_point(double x, double y, std::string label, std::optional<int> frame = {},
                        std::optional<double> time_s = {}) {
    SpatialPoint p;
    p.x = x;
    p.y = y;
    p.label = std::move(label);
    p.frame = frame;
    p.time_s = time_s;
    return p;
}

}  // namespace

TEST_CASE("mask RLE round-trips random masks exactly") {
    Rng rng(0x3157);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + static_cast<int>(rng.next_below(40));
        const int h = 1 + static_cast<int>(rng.next_below(30));
        Mask m(w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (rng.next_double() < 0.3) m.set(x, y);
        const Mask back = Mask::from_rle(w, h, m.rle_rows());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) CHECK(back.at(x, y) == m.at(x, y));
    }
}

TEST_CASE("fill_rect clamps to the mask bounds") {
    Mask m(10, 10);
    m.fill_rect(BBox{-5, -5, 20, 2});
    CHECK(m.at(0, 0));
    CHECK(m.at(9, 2));
    CHECK(!m.at(0, 3));
}

TEST_CASE("point-in-mask indicator with out-of-bounds diagnostics") {
    Mask m(10, 10);
    m.fill_rect(BBox{2, 2, 4, 4});
    Diagnostics diags;
    CHECK(score_point(make_point(3, 3, "x"), m, diags) == 1);
    CHECK(score_point(make_point(5, 3, "x"), m, diags) == 0);
    CHECK(diags.empty());
    CHECK(score_point(make_point(99, 3, "x"), m, diags) == 0);
    CHECK(diags.size() == 1);
    // Rounding: 2.6 lands on pixel 3.
    CHECK(score_point(make_point(2.6, 2.6, "x"), m, diags) == 1);
}

TEST_CASE("grounding prefers detection and falls back to pointing") {
    FakeOracle oracle;
    oracle.boxes["car"] = BBox{10, 10, 20, 20};
    oracle.marks["tree"] = Point2{50, 40};

    SUBCASE("detected label segments the detector's box") {
        const auto mask = ground_label("car", MediaRef{"img", {}}, oracle);
        REQUIRE(mask.has_value());
        CHECK(mask->at(15, 15));
        CHECK(!mask->at(50, 40));
        CHECK(oracle.point_calls == 0);
    }
    SUBCASE("pointing fallback wraps the mark in a small box") {
        const auto mask = ground_label("tree", MediaRef{"img", {}}, oracle);
        REQUIRE(mask.has_value());
        CHECK(mask->at(50, 40));
        // 2% of min(100, 80) = 1.6 wide box around the mark.
        CHECK(oracle.last_segment_region.x_max - oracle.last_segment_region.x_min ==
              doctest::Approx(1.6));
        CHECK(oracle.detect_calls == 1);
    }
    SUBCASE("unknown label grounds nowhere") {
        CHECK(!ground_label("ghost", MediaRef{"img", {}}, oracle).has_value());
    }
}

TEST_CASE("spatial reward is the mean point indicator") {
    FakeOracle oracle;
    oracle.boxes["car"] = BBox{10, 10, 20, 20};
    const std::vector<SpatialPoint> pts = {
        make_point(15, 15, "car"),   // inside
        make_point(90, 70, "car"),   // outside the box
        make_point(15, 15, "ghost"), // ungroundable
    };
    const GroundingScore s = spatial_reward(pts, MediaRef{"img", {}}, oracle);
    CHECK(s.r_visual == doctest::Approx(1.0 / 3.0));
    CHECK(s.per_point.size() == 3);
    CHECK(!s.diagnostics.empty());

    SUBCASE("permutation invariance") {
        std::vector<SpatialPoint> shuffled = {pts[2], pts[0], pts[1]};
        CHECK(spatial_reward(shuffled, MediaRef{"img", {}}, oracle).r_visual ==
              doctest::Approx(s.r_visual));
    }
    SUBCASE("adding a grounded point never lowers the mean below the worst case") {
        std::vector<SpatialPoint> more = pts;
        more.push_back(make_point(15, 15, "car"));
        CHECK(spatial_reward(more, MediaRef{"img", {}}, oracle).r_visual >=
              s.r_visual - 1e-12);
    }
}

TEST_CASE("empty point list scores zero with the has_points flag off") {
    FakeOracle oracle;
    const GroundingScore s = spatial_reward({}, MediaRef{"img", {}}, oracle);
    CHECK(!s.has_points);
    CHECK(s.r_visual == 0.0);
}

namespace {

std::vector<FrameStamp> stamps() {
    return {{1, 0.0}, {2, 0.81}, {5, 3.25}, {24, 18.71}, {30, 23.59}};
}

}  // namespace

TEST_CASE("temporal reward resolves frames and averages category means") {
    FakeOracle oracle;
    oracle.boxes["sauce"] = BBox{0, 0, 99, 79};  // everything grounds
    FakeJudge judge;
    judge.frame_scores[2] = 1.0;
    judge.segment_scores[{24, 30}] = 0.5;

    ParsedResponse parsed;
    parsed.points = {make_point(10, 10, "sauce", 2, 0.81),
                     make_point(10, 10, "sauce", 5, {})};
    FrameObservation obs;
    obs.frame = 2;
    obs.description = "steam rises";
    parsed.observations = {obs};
    SegmentEvent ev;
    ev.start_frame = 24;
    ev.end_frame = 30;
    ev.description = "wrapping";
    parsed.events = {ev};

    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    CHECK(s.has_points);
    CHECK(s.has_frames);
    CHECK(s.has_segments);
    // Category means: points (1+1)/2 = 1, observations 1, segments 0.5.
    CHECK(s.r_visual == doctest::Approx((1.0 + 1.0 + 0.5) / 3.0));
}

TEST_CASE("temporal reward: untimed points are not scorable on video") {
    FakeOracle oracle;
    FakeJudge judge;
    ParsedResponse parsed;
    parsed.points = {make_point(10, 10, "sauce")};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    CHECK(!s.has_points);
    CHECK(s.r_visual == 0.0);
}

TEST_CASE("frame citations outside the available range score zero") {
    FakeOracle oracle;
    oracle.boxes["sauce"] = BBox{0, 0, 99, 79};
    FakeJudge judge;
    ParsedResponse parsed;
    parsed.points = {make_point(10, 10, "sauce", 32, {})};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    CHECK(s.r_visual == 0.0);
    CHECK(!s.diagnostics.empty());
}

TEST_CASE("time-only citations snap to the nearest frame, ties to the earlier") {
    FakeOracle oracle;
    oracle.boxes["sauce"] = BBox{0, 0, 99, 79};
    FakeJudge judge;
    judge.frame_scores[2] = 0.8;

    ParsedResponse parsed;
    FrameObservation obs;
    obs.time_s = 0.9;  // nearest stamp is frame 2 at 0.81
    obs.description = "x";
    parsed.observations = {obs};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    REQUIRE(s.per_frame_obs.size() == 1);
    CHECK(s.per_frame_obs[0] == doctest::Approx(0.8));

    // Equidistant between frames at 1s and 3s: the earlier frame wins.
    FakeJudge tie_judge;
    tie_judge.frame_scores[1] = 0.3;
    tie_judge.frame_scores[2] = 0.9;
    parsed.observations[0].time_s = 2.0;
    const std::vector<FrameStamp> tie_stamps = {{1, 1.0}, {2, 3.0}};
    const GroundingScore t = temporal_reward(parsed, "vid", tie_stamps, oracle, tie_judge);
    CHECK(t.per_frame_obs[0] == doctest::Approx(0.3));
}

TEST_CASE("open-ended segments run to the last frame") {
    FakeOracle oracle;
    FakeJudge judge;
    judge.segment_scores[{24, 30}] = 0.7;
    ParsedResponse parsed;
    SegmentEvent ev;
    ev.start_frame = 24;
    ev.description = "wrapping onwards";
    parsed.events = {ev};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    REQUIRE(s.per_segment.size() == 1);
    CHECK(s.per_segment[0] == doctest::Approx(0.7));
}

TEST_CASE("segments with end before start score zero") {
    FakeOracle oracle;
    FakeJudge judge;
    judge.fallback = 1.0;
    ParsedResponse parsed;
    SegmentEvent ev;
    ev.start_frame = 24;
    ev.end_frame = 2;
    ev.description = "backwards";
    parsed.events = {ev};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    CHECK(s.per_segment[0] == 0.0);
    CHECK(!s.diagnostics.empty());
}

TEST_CASE("judge scores outside the unit interval are clamped") {
    FakeOracle oracle;
    FakeJudge judge;
    judge.frame_scores[2] = 1.7;
    ParsedResponse parsed;
    FrameObservation obs;
    obs.frame = 2;
    obs.description = "x";
    parsed.observations = {obs};
    const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
    CHECK(s.per_frame_obs[0] == 1.0);
}

TEST_CASE("temporal mean-of-means matches a brute-force recomputation") {
    Rng rng(0xfeed);
    FakeOracle oracle;
    oracle.boxes["obj"] = BBox{0, 0, 49, 39};
    oracle.width = 100;
    oracle.height = 80;
    for (int trial = 0; trial < 200; ++trial) {
        FakeJudge judge;
        judge.fallback = rng.next_double();
        ParsedResponse parsed;
        const int np = static_cast<int>(rng.next_below(4));
        const int no = static_cast<int>(rng.next_below(4));
        const int ns = static_cast<int>(rng.next_below(4));
        std::vector<double> expect_pts;
        for (int i = 0; i < np; ++i) {
            const double x = rng.uniform(0, 99);
            const double y = rng.uniform(0, 79);
            parsed.points.push_back(make_point(x, y, "obj", 2, {}));
            expect_pts.push_back(
                (std::llround(x) <= 49 && std::llround(y) <= 39) ? 1.0 : 0.0);
        }
        for (int i = 0; i < no; ++i) {
            FrameObservation o;
            o.frame = 5;
            o.description = "d";
            parsed.observations.push_back(o);
        }
        for (int i = 0; i < ns; ++i) {
            SegmentEvent e;
            e.start_frame = 2;
            e.end_frame = 24;
            e.description = "d";
            parsed.events.push_back(e);
        }
        const GroundingScore s = temporal_reward(parsed, "vid", stamps(), oracle, judge);
        std::vector<double> cats;
        if (np > 0) {
            double m = 0;
            for (double v : expect_pts) m += v;
            cats.push_back(m / np);
        }
        if (no > 0) cats.push_back(judge.fallback);
        if (ns > 0) cats.push_back(judge.fallback);
        double expected = 0;
        for (double c : cats) expected += c;
        expected = cats.empty() ? 0.0 : expected / static_cast<double>(cats.size());
        CHECK(s.r_visual == doctest::Approx(expected).epsilon(1e-12));
    }
}
