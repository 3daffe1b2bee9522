#pragma once

#include <optional>
#include <vector>

namespace argos {

enum class MissingPolicy {
    renormalize,    // drop absent components and their weights
    penalize_zero,  // absent components contribute 0 with full weight
};

struct VerifierConfig {
    double tau = 0.5;  // gate threshold, in (0, 1]
    double w_acc = 1.0;
    double w_spatial = 1.0;
    double w_reasoning = 1.0;
    MissingPolicy missing_policy = MissingPolicy::renormalize;
    double numeric_tol = 0.05;
    double filter_threshold = 0.7;

    void validate() const;  // throws std::invalid_argument on bad values
};

struct RewardBreakdown {
    double r_acc = 0.0;
    std::optional<double> r_visual;
    std::optional<double> r_reasoning;
    double r_final = 0.0;
    bool gate_passed = false;
};

struct GroupAdvantages {
    std::vector<double> rewards;
    std::vector<double> advantages;
    bool degenerate = false;  // zero variance: all advantages 0
};

/// Gated aggregation: below the gate the final reward is the outcome reward
/// alone; above it, the weighted mean of the present components.
RewardBreakdown gated_aggregate(std::optional<double> r_acc, std::optional<double> r_visual,
                                std::optional<double> r_reasoning, const VerifierConfig& config);

/// Group-normalized advantages (population mean/std). Groups with variance
/// below 1e-12 are degenerate and get all-zero advantages.
GroupAdvantages grpo_advantages(const std::vector<double>& rewards);

/// Per-sample clipped surrogate:
/// min(ratio*A, clamp(ratio, 1-eps, 1+eps)*A) - beta_kl*kl.
double grpo_surrogate_term(double ratio, double advantage, double epsilon, double kl,
                           double beta_kl);

}  // namespace argos
