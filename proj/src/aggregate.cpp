#include "argos/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace argos {

void VerifierConfig::validate() const {
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0, 1]");
    if (!(w_acc > 0.0 && w_spatial > 0.0 && w_reasoning > 0.0))
        throw std::invalid_argument("component weights must be positive");
    if (numeric_tol < 0.0) throw std::invalid_argument("numeric_tol must be >= 0");
    if (filter_threshold < 0.0) throw std::invalid_argument("filter_threshold must be >= 0");
}

RewardBreakdown gated_aggregate(std::optional<double> r_acc, std::optional<double> r_visual,
                                std::optional<double> r_reasoning,
                                const VerifierConfig& config) {
    if (!r_acc && !r_visual && !r_reasoning)
        throw std::invalid_argument("gated_aggregate: nothing to score");
    if (!r_acc)
        throw std::invalid_argument("gated_aggregate: outcome reward required to evaluate gate");

    RewardBreakdown out;
    out.r_acc = *r_acc;
    out.r_visual = r_visual;
    out.r_reasoning = r_reasoning;
    out.gate_passed = *r_acc >= config.tau;
    if (!out.gate_passed) {
        out.r_final = *r_acc;
        return out;
    }

    double num = config.w_acc * *r_acc;
    double den = config.w_acc;
    auto add = [&](const std::optional<double>& v, double w) {
        if (v) {
            num += w * *v;
            den += w;
        } else if (config.missing_policy == MissingPolicy::penalize_zero) {
            den += w;  // absent term contributes 0 with full weight
        }
    };
    add(r_visual, config.w_spatial);
    add(r_reasoning, config.w_reasoning);
    out.r_final = num / den;
    return out;
}

GroupAdvantages grpo_advantages(const std::vector<double>& rewards) {
    if (rewards.size() < 2)
        throw std::invalid_argument("grpo_advantages: group size must be >= 2");
    GroupAdvantages out;
    out.rewards = rewards;
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;  // population variance
    const double std_dev = std::sqrt(var);
    out.advantages.resize(rewards.size());
    if (std_dev < 1e-12) {
        out.degenerate = true;
        std::fill(out.advantages.begin(), out.advantages.end(), 0.0);
        return out;
    }
    for (std::size_t i = 0; i < rewards.size(); ++i)
        out.advantages[i] = (rewards[i] - mean) / std_dev;
    return out;
}

double grpo_surrogate_term(double ratio, double advantage, double epsilon, double kl,
                           double beta_kl) {
    if (!(ratio > 0.0)) throw std::invalid_argument("grpo_surrogate_term: ratio must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("grpo_surrogate_term: epsilon must be in (0, 1)");
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage) - beta_kl * kl;
}

}  // namespace argos
