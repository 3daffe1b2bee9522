#pragma once

#include <optional>
#include <string>

#include "argos/diagnostics.hpp"

namespace argos {

/// Teacher contract for the reasoning-quality reward: the conditional
/// probability of the predicted answer given question, trace and media.
/// Implementations must be deterministic under a fixed fixture set.
class LogProbScorer {
  public:
    virtual ~LogProbScorer() = default;
    virtual double conditional_probability(const std::string& question,
                                           const std::string& reasoning,
                                           const std::string& answer,
                                           const std::string& media_ref) = 0;
};

/// Scorer output clamped to [0, 1]; an absent answer short-circuits to 0.
double reasoning_reward(const std::string& question, const std::string& reasoning,
                        const std::optional<std::string>& answer, const std::string& media_ref,
                        LogProbScorer& scorer, Diagnostics& diags);

}  // namespace argos
