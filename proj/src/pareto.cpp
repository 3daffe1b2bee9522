#include "argos/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace argos {

double ActionSpace::w_min() const { return *std::min_element(weights.begin(), weights.end()); }
double ActionSpace::w_max() const { return *std::max_element(weights.begin(), weights.end()); }

void ActionSpace::validate() const {
    if (true_rewards.empty()) throw std::invalid_argument("action space must have >= 1 action");
    if (weights.empty()) throw std::invalid_argument("action space must have >= 1 component");
    for (double w : weights)
        if (!(w > 0) || !std::isfinite(w))
            throw std::invalid_argument("component weights must be positive and finite");
    for (const auto& row : true_rewards) {
        if (row.size() != weights.size())
            throw std::invalid_argument("reward row length must match component count");
        for (double r : row)
            if (!std::isfinite(r)) throw std::invalid_argument("rewards must be finite");
    }
}

double NoiseSpec::sample(Rng& rng) const {
    switch (family) {
        case NoiseFamily::gaussian:
            return sigma * rng.normal();
        case NoiseFamily::uniform_bounded:
            return rng.uniform(-sigma, sigma);
        case NoiseFamily::rademacher_scaled:
            return rng.next_double() < 0.5 ? -sigma : sigma;
    }
    throw std::logic_error("unreachable noise family");
}

void SimConfig::validate() const {
    action_space.validate();
    if (!(noise.sigma > 0)) throw std::invalid_argument("noise sigma must be positive");
    if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
    if (n < 1) throw std::invalid_argument("batch size n must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (policy.size() != action_space.num_actions())
        throw std::invalid_argument("policy length must match the action count");
    double total = 0.0;
    for (double p : policy) {
        if (!(p >= 0) || !std::isfinite(p))
            throw std::invalid_argument("policy probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("policy probabilities must sum to 1");
}

GatedSpec::GatedSpec(std::vector<double> r0_in, double tau_in, double gamma_in, double w0_in)
    : r0(std::move(r0_in)), tau(tau_in), gamma(gamma_in), w0(w0_in) {
    if (r0.empty()) throw std::invalid_argument("gated spec needs >= 1 correctness reward");
    if (!(gamma > 0)) throw std::invalid_argument("gap margin gamma must be positive");
    if (!(w0 > 0)) throw std::invalid_argument("outcome weight w0 must be positive");
    for (double r : r0)
        if (!(std::abs(r - tau) > gamma))
            throw std::invalid_argument(
                "gap assumption violated: every |r0(a) - tau| must exceed gamma");
}

bool dominates(const std::vector<double>& a_rew, const std::vector<double>& b_rew, double delta) {
    if (a_rew.size() != b_rew.size())
        throw std::invalid_argument("dominates: reward vectors differ in length");
    for (std::size_t i = 0; i < a_rew.size(); ++i)
        if (a_rew[i] < b_rew[i] + delta) return false;
    return true;
}

std::vector<std::size_t> pareto_set(const ActionSpace& space, double delta) {
    space.validate();
    std::vector<std::size_t> result;
    for (std::size_t a = 0; a < space.num_actions(); ++a) {
        bool dominated = false;
        for (std::size_t b = 0; b < space.num_actions() && !dominated; ++b)
            dominated = b != a && dominates(space.true_rewards[b], space.true_rewards[a], delta);
        if (!dominated) result.push_back(a);
    }
    return result;
}

namespace {

std::size_t sample_categorical(const std::vector<double>& policy, Rng& rng) {
    const double u = rng.next_double();
    double acc = 0.0;
    for (std::size_t a = 0; a < policy.size(); ++a) {
        acc += policy[a];
        if (u < acc) return a;
    }
    // Rounding can leave acc slightly below 1; fall back to the last
    // positive-mass action.
    for (std::size_t a = policy.size(); a-- > 0;)
        if (policy[a] > 0) return a;
    return policy.size() - 1;
}

double standard_error(double p, int trials) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
}

}  // namespace

SimReport pairwise_domination_check(const ActionSpace& pair_space, const NoiseSpec& noise, double delta,
                       int trials, std::uint64_t seed) {
    pair_space.validate();
    if (pair_space.num_actions() != 2)
        throw std::invalid_argument("pairwise_domination_check expects exactly two actions");
    if (!dominates(pair_space.true_rewards[1], pair_space.true_rewards[0], delta))
        throw std::invalid_argument("pairwise_domination_check: action 1 must dominate action 0 at delta");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    const std::size_t m = pair_space.num_components();
    long hits = 0;
    for (int t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        double score_dominated = 0.0, score_dominating = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            score_dominated +=
                pair_space.weights[i] * (pair_space.true_rewards[0][i] + noise.sample(rng));
        for (std::size_t i = 0; i < m; ++i)
            score_dominating +=
                pair_space.weights[i] * (pair_space.true_rewards[1][i] + noise.sample(rng));
        if (score_dominated >= score_dominating) ++hits;
    }

    SimReport report;
    report.trials = trials;
    report.empirical_prob = static_cast<double>(hits) / trials;
    const double ratio = pair_space.w_min() / pair_space.w_max();
    report.analytic_bound = std::exp(-(delta * delta / (4 * noise.sigma * noise.sigma)) *
                                     static_cast<double>(m) * ratio * ratio);
    report.standard_error = standard_error(report.empirical_prob, trials);
    report.bound_kind = BoundKind::upper;
    report.bound_satisfied =
        report.empirical_prob <= report.analytic_bound + 3 * report.standard_error;
    report.beta = 0.0;
    return report;
}

namespace {

struct BatchOutcome {
    std::size_t selected = 0;
};

// One selection trial: sample the batch, perturb every reward of every
// action once, and pick the batch member with the best score (ties go to
// the earliest batch position).
template <typename ScoreFn>
std::size_t run_trial(const SimConfig& config, std::size_t noise_components, Rng& rng,
                      ScoreFn&& score_of) {
    const std::size_t num_actions = config.action_space.num_actions();
    std::vector<std::size_t> batch(static_cast<std::size_t>(config.n));
    for (auto& a : batch) a = sample_categorical(config.policy, rng);

    std::vector<std::vector<double>> eps(num_actions, std::vector<double>(noise_components));
    for (auto& row : eps)
        for (auto& e : row) e = config.noise.sample(rng);

    std::size_t best = batch[0];
    double best_score = score_of(batch[0], eps[batch[0]]);
    for (std::size_t k = 1; k < batch.size(); ++k) {
        const double s = score_of(batch[k], eps[batch[k]]);
        if (s > best_score) {
            best_score = s;
            best = batch[k];
        }
    }
    return best;
}

SimReport tally(const SimConfig& config, const std::vector<char>& in_target, double beta,
                double analytic_bound, std::size_t noise_components,
                const std::function<double(std::size_t, const std::vector<double>&)>& score_of) {
    SimReport report;
    report.trials = config.trials;
    report.beta = beta;
    report.hit_counts.assign(config.action_space.num_actions(), 0);
    long hits = 0;
    for (int t = 0; t < config.trials; ++t) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
        const std::size_t chosen = run_trial(config, noise_components, rng, score_of);
        ++report.hit_counts[chosen];
        if (in_target[chosen]) ++hits;
    }
    report.empirical_prob = static_cast<double>(hits) / config.trials;
    report.analytic_bound = analytic_bound;
    report.standard_error = standard_error(report.empirical_prob, config.trials);
    report.bound_kind = BoundKind::lower;
    report.bound_satisfied =
        report.empirical_prob >= report.analytic_bound - 3 * report.standard_error;
    return report;
}

}  // namespace

SimReport selection_check(const SimConfig& config) {
    config.validate();
    const auto pareto = pareto_set(config.action_space, config.delta);
    std::vector<char> in_target(config.action_space.num_actions(), 0);
    double beta = 0.0;
    for (std::size_t a : pareto) {
        in_target[a] = 1;
        beta += config.policy[a];
    }
    if (beta <= 0.0)
        throw std::invalid_argument("policy puts no mass on the delta-Pareto set");

    const double ratio = config.action_space.w_min() / config.action_space.w_max();
    const double C =
        (config.delta * config.delta / (4 * config.noise.sigma * config.noise.sigma)) * ratio *
        ratio;
    const double bound =
        bound_H(config.n, beta, C, static_cast<int>(config.action_space.num_components()));

    const auto& space = config.action_space;
    auto score_of = std::function<double(std::size_t, const std::vector<double>&)>(
        [&space](std::size_t a, const std::vector<double>& eps) {
            double s = 0.0;
            for (std::size_t i = 0; i < space.num_components(); ++i)
                s += space.weights[i] * (space.true_rewards[a][i] + eps[i]);
            return s;
        });
    return tally(config, in_target, beta, bound, space.num_components(), score_of);
}

SimReport gated_selection_check(const SimConfig& config, const GatedSpec& gated) {
    config.validate();
    if (gated.r0.size() != config.action_space.num_actions())
        throw std::invalid_argument("gated spec must cover every action");

    // Target: correct actions not delta-dominated in the reasoning rewards
    // by another correct action.
    const std::size_t num_actions = config.action_space.num_actions();
    std::vector<char> correct(num_actions, 0);
    for (std::size_t a = 0; a < num_actions; ++a) correct[a] = gated.r0[a] > gated.tau;
    std::vector<char> in_target(num_actions, 0);
    double beta = 0.0;
    for (std::size_t a = 0; a < num_actions; ++a) {
        if (!correct[a]) continue;
        bool dominated = false;
        for (std::size_t b = 0; b < num_actions && !dominated; ++b)
            dominated = b != a && correct[b] &&
                        dominates(config.action_space.true_rewards[b],
                                  config.action_space.true_rewards[a], config.delta);
        if (!dominated) {
            in_target[a] = 1;
            beta += config.policy[a];
        }
    }
    if (beta <= 0.0)
        throw std::invalid_argument("policy puts no mass on the gated Pareto target set");

    const std::size_t m = config.action_space.num_components();
    double w_min = gated.w0, w_max = gated.w0;
    for (double w : config.action_space.weights) {
        w_min = std::min(w_min, w);
        w_max = std::max(w_max, w);
    }
    const double sigma2 = config.noise.sigma * config.noise.sigma;
    const double C = (config.delta * config.delta / (4 * sigma2)) * (w_min / w_max) *
                     (w_min / w_max);
    const double gating_factor =
        1.0 - config.n * std::exp(-gated.gamma * gated.gamma / (2 * sigma2));
    const double bound = (1.0 - std::pow(1.0 - beta, config.n)) * gating_factor *
                         (1.0 - (config.n - 1) / std::exp(C * static_cast<double>(m + 1)));

    const auto& space = config.action_space;
    // Noise component 0 perturbs r0; components 1..m perturb the reasoning
    // rewards. Gate closed means the noisy correctness reward stands alone.
    auto score_of = std::function<double(std::size_t, const std::vector<double>&)>(
        [&space, &gated](std::size_t a, const std::vector<double>& eps) {
            const double noisy_r0 = gated.r0[a] + eps[0];
            if (noisy_r0 < gated.tau) return noisy_r0;
            double s = gated.w0 * noisy_r0;
            for (std::size_t i = 0; i < space.num_components(); ++i)
                s += space.weights[i] * (space.true_rewards[a][i] + eps[i + 1]);
            return s;
        });
    return tally(config, in_target, beta, bound, m + 1, score_of);
}

double bound_H(int n, double beta, double C, int m) {
    return (1.0 - std::pow(1.0 - beta, n)) *
           (1.0 - (n - 1) / std::exp(C * static_cast<double>(m)));
}

OptimalN optimal_n(double beta, double C, int m) {
    if (!(beta > 0) || beta > 1) throw std::invalid_argument("beta must be in (0, 1]");
    if (!(C > 0)) throw std::invalid_argument("C must be positive");
    if (m < 1) throw std::invalid_argument("m must be >= 1");

    OptimalN result;
    const double cm = C * static_cast<double>(m);
    // log(1 + beta e^{cm}) computed stably for large cm.
    const double log_term = cm > 500 ? cm + std::log(beta) : std::log1p(beta * std::exp(cm));
    result.formula_n = log_term / beta;

    const long cap = 1000000;
    long n_max = static_cast<long>(std::ceil(10.0 * result.formula_n));
    n_max = std::clamp(n_max, 1L, cap);
    result.grid_argmax = 1;
    result.h_at_argmax = bound_H(1, beta, C, m);
    for (long n = 2; n <= n_max; ++n) {
        const double h = bound_H(static_cast<int>(n), beta, C, m);
        if (h > result.h_at_argmax) {
            result.h_at_argmax = h;
            result.grid_argmax = static_cast<int>(n);
        }
    }
    const int rounded = std::max(1, static_cast<int>(std::llround(result.formula_n)));
    result.h_at_formula = bound_H(rounded, beta, C, m);
    return result;
}

}  // namespace argos
