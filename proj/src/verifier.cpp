#include "argos/verifier.hpp"

#include <stdexcept>

#include "argos/grounding.hpp"
#include "argos/reasoning.hpp"

namespace argos {

Verifier::Verifier(VerifierConfig config, teacher::TeacherSuite suite)
    : config_(config), suite_(std::move(suite)) {
    config_.validate();
    if (!suite_.oracle || !suite_.video_judge || !suite_.semantic_judge || !suite_.logprob)
        throw std::invalid_argument("teacher suite is incomplete");
}

VerifierResult Verifier::score(const RawRollout& rollout) const {
    VerifierResult result;
    result.parsed = parse_rollout(rollout);
    result.diagnostics = result.parsed.diagnostics;

    result.outcome = outcome_reward(result.parsed.answer, rollout.answer_gt,
                                    *suite_.semantic_judge, config_.numeric_tol,
                                    result.diagnostics);

    std::optional<double> r_visual;
    std::optional<double> r_reasoning;
    // Below the gate the aggregate is the outcome reward alone, so the
    // teacher calls for the other components are skipped entirely.
    if (result.outcome.r_acc >= config_.tau) {
        if (rollout.media_kind == MediaKind::image) {
            if (!result.parsed.points.empty()) {
                MediaRef image{rollout.media_ref, std::nullopt};
                GroundingScore gs =
                    spatial_reward(result.parsed.points, image, *suite_.oracle);
                r_visual = gs.r_visual;
                result.diagnostics.insert(result.diagnostics.end(), gs.diagnostics.begin(),
                                          gs.diagnostics.end());
            }
        } else {
            GroundingScore gs =
                temporal_reward(result.parsed, rollout.media_ref, rollout.frame_timestamps,
                                *suite_.oracle, *suite_.video_judge);
            if (gs.has_points || gs.has_frames || gs.has_segments) r_visual = gs.r_visual;
            result.diagnostics.insert(result.diagnostics.end(), gs.diagnostics.begin(),
                                      gs.diagnostics.end());
        }
        r_reasoning = reasoning_reward(rollout.question, result.parsed.reasoning,
                                       result.parsed.answer, rollout.media_ref,
                                       *suite_.logprob, result.diagnostics);
    }

    result.breakdown = gated_aggregate(static_cast<double>(result.outcome.r_acc), r_visual,
                                       r_reasoning, config_);
    return result;
}

}  // namespace argos
