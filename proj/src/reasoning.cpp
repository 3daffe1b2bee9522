#include "argos/reasoning.hpp"

#include <algorithm>

namespace argos {

double reasoning_reward(const std::string& question, const std::string& reasoning,
                        const std::optional<std::string>& answer, const std::string& media_ref,
                        LogProbScorer& scorer, Diagnostics& diags) {
    if (!answer) {
        add_diag(diags, "no boxed answer; reasoning reward defaults to 0");
        return 0.0;
    }
    const double p = scorer.conditional_probability(question, reasoning, *answer, media_ref);
    if (p < 0.0 || p > 1.0)
        add_diag(diags, "scorer returned probability outside [0,1]; clamped");
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace argos
