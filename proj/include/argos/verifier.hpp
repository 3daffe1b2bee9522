#pragma once

#include "argos/aggregate.hpp"
#include "argos/parse.hpp"
#include "argos/teacher/protocol.hpp"

namespace argos {

struct VerifierResult {
    ParsedResponse parsed;
    OutcomeResult outcome;
    RewardBreakdown breakdown;
    Diagnostics diagnostics;
};

/// Scores one rollout end to end: parse, outcome reward, and (only when the
/// outcome gate passes) the grounding and reasoning rewards, then the gated
/// aggregate. Transport errors from the teachers propagate.
class Verifier {
  public:
    Verifier(VerifierConfig config, teacher::TeacherSuite suite);

    VerifierResult score(const RawRollout& rollout) const;

    const VerifierConfig& config() const { return config_; }

  private:
    VerifierConfig config_;
    teacher::TeacherSuite suite_;
};

}  // namespace argos
