#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "argos/rng.hpp"

namespace argos {

/// Finite action space with true per-component rewards and positive weights.
struct ActionSpace {
    std::vector<std::vector<double>> true_rewards;  // [action][component]
    std::vector<double> weights;                    // one per component

    std::size_t num_actions() const { return true_rewards.size(); }
    std::size_t num_components() const { return weights.size(); }
    double w_min() const;
    double w_max() const;
    void validate() const;  // throws std::invalid_argument
};

enum class NoiseFamily { gaussian, uniform_bounded, rademacher_scaled };

/// Sub-Gaussian noise with proxy parameter sigma: gaussian has std sigma,
/// uniform is on [-sigma, sigma], rademacher is +/- sigma.
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::gaussian;
    double sigma = 1.0;

    double sample(Rng& rng) const;
};

struct SimConfig {
    ActionSpace action_space;
    NoiseSpec noise;
    double delta = 1.0;
    int n = 1;                   // batch size per trial
    std::vector<double> policy;  // categorical over actions; beta derived from it
    int trials = 20000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Gated scalarization inputs: per-action correctness rewards, the gate
/// threshold, the gap margin and the outcome weight. The gap assumption
/// |r0(a) - tau| > gamma is validated at construction.
struct GatedSpec {
    std::vector<double> r0;
    double tau = 0.5;
    double gamma = 0.1;
    double w0 = 1.0;

    GatedSpec(std::vector<double> r0_in, double tau_in, double gamma_in, double w0_in);
};

enum class BoundKind { lower, upper };

struct SimReport {
    double empirical_prob = 0.0;
    double analytic_bound = 0.0;
    double standard_error = 0.0;
    BoundKind bound_kind = BoundKind::lower;
    bool bound_satisfied = false;  // empirical within 3 SE of the bound's side
    int trials = 0;
    double beta = 0.0;            // policy mass on the target set
    std::vector<int> hit_counts;  // selections per action across trials
};

/// True iff a_rew dominates b_rew by margin delta in every component.
bool dominates(const std::vector<double>& a_rew, const std::vector<double>& b_rew, double delta);

/// Indices of actions no other action dominates at margin delta. Exact
/// O(|A|^2 m) brute force.
std::vector<std::size_t> pareto_set(const ActionSpace& space, double delta);

/// Two-action domination experiment: empirical P(noisy weighted mean of the
/// dominated action >= the dominating one) against the tail bound
/// exp(-(delta^2/4 sigma^2) m w_min^2/w_max^2). Upper bound: satisfied means
/// empirical <= bound + 3 SE. Requires action 1 to dominate action 0.
SimReport pairwise_domination_check(const ActionSpace& pair_space, const NoiseSpec& noise, double delta,
                       int trials, std::uint64_t seed);

/// Batched selection experiment: per trial, draw n actions iid from the
/// policy, perturb every reward component, pick the argmax of the weighted
/// noisy sum, and record membership in the delta-Pareto set. Lower bound
/// (1-(1-beta)^n) [1-(n-1)/e^{C m}], C = (delta^2/4 sigma^2)(w_min/w_max)^2.
SimReport selection_check(const SimConfig& config);

/// Gated variant: selection uses noisy r0 alone below tau, else the weighted
/// sum over all m+1 components; the target set is the correct actions not
/// delta-dominated (in the reasoning rewards) by another correct action.
/// Bound gains the gating factor (1 - n e^{-gamma^2/2 sigma^2}) and uses m+1.
SimReport gated_selection_check(const SimConfig& config, const GatedSpec& gated);

/// H(n) = (1-(1-beta)^n) [1-(n-1)/e^{C m}], the batch-size tradeoff curve.
double bound_H(int n, double beta, double C, int m);

struct OptimalN {
    int grid_argmax = 1;        // argmax of H over the evaluation grid
    double formula_n = 1.0;     // (1/beta) ln(1 + beta e^{C m})
    double h_at_argmax = 0.0;
    double h_at_formula = 0.0;  // H(round(formula_n))
};

/// Direct grid maximization of H up to ceil(10 * formula_n), capped at 1e6.
OptimalN optimal_n(double beta, double C, int m);

}  // namespace argos
