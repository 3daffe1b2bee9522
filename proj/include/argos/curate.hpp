#pragma once

#include <optional>
#include <string>
#include <vector>

#include "argos/verifier.hpp"

namespace argos {

/// One SFT candidate: a shared question/ground-truth/media plus a group of
/// sampled rollout texts (typically 8). Must carry at least one rollout.
struct CurationSample {
    std::string id;
    std::string question;
    std::string answer_gt;
    std::string media_ref;
    MediaKind media_kind = MediaKind::image;
    std::vector<FrameStamp> frame_timestamps;
    std::vector<std::string> rollouts;
};

struct SampleVerdict {
    std::string id;
    double max_score = 0.0;
    bool kept = false;
    std::size_t best_index = 0;
    std::vector<RewardBreakdown> breakdowns;
};

struct KeptSample {
    CurationSample sample;
    std::size_t best_index = 0;
    std::string canonical_text;  // best rollout after point/timestamp rewrite
    RewardBreakdown breakdown;
};

struct CurationReport {
    std::size_t total_samples = 0;
    std::size_t kept_samples = 0;
    std::optional<double> yield_rate;  // absent for an empty stream
    std::vector<SampleVerdict> per_sample;
    std::vector<std::string> retry_ids;  // samples that erred (not counted against yield)
};

struct CurationResult {
    CurationReport report;
    std::vector<KeptSample> kept;
};

/// Scores every rollout through the exact RL reward path. Transport errors
/// propagate; a failed rollout is an error, never a 0 score.
std::vector<RewardBreakdown> score_sample(const CurationSample& sample, const Verifier& verifier);

/// Keep iff the best rollout's final reward reaches the threshold (inclusive).
/// Ties go to the lowest index.
std::pair<bool, std::size_t> filter_sample(const std::vector<RewardBreakdown>& breakdowns,
                                           double threshold);

/// Streams samples through score + filter. Samples that err land on the
/// retry list and count toward neither total nor yield. `workers` bounds the
/// pool; output order and content are independent of it.
CurationResult curate_stream(const std::vector<CurationSample>& samples, const Verifier& verifier,
                             int workers = 1);

}  // namespace argos
