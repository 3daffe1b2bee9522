#include <doctest.h>

#include "argos/reasoning.hpp"

using namespace argos;

namespace {

class FixedScorer : public LogProbScorer {
  public:
    explicit FixedScorer(double p) : p_(p) {}
    double conditional_probability(const std::string&, const std::string&, const std::string&,
                                   const std::string&) override {
        ++calls;
        return p_;
    }
    int calls = 0;

  private:
    double p_;
};

}  // namespace

TEST_CASE("reasoning reward forwards the conditional probability") {
    FixedScorer scorer(0.42);
    Diagnostics diags;
    CHECK(reasoning_reward("q", "trace", std::string("answer"), "img", scorer, diags) ==
          doctest::Approx(0.42));
    CHECK(scorer.calls == 1);
    CHECK(diags.empty());
}

TEST_CASE("absent answer short-circuits to zero without calling the teacher") {
    FixedScorer scorer(0.9);
    Diagnostics diags;
    CHECK(reasoning_reward("q", "trace", std::nullopt, "img", scorer, diags) == 0.0);
    CHECK(scorer.calls == 0);
    CHECK(!diags.empty());
}

TEST_CASE("scores outside the unit interval are clamped with a diagnostic") {
    Diagnostics diags;
    FixedScorer high(1.5);
    CHECK(reasoning_reward("q", "t", std::string("a"), "m", high, diags) == 1.0);
    CHECK(diags.size() == 1);
    FixedScorer low(-0.25);
    CHECK(reasoning_reward("q", "t", std::string("a"), "m", low, diags) == 0.0);
    CHECK(diags.size() == 2);
}
