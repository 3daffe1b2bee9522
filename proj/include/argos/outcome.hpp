#pragma once

#include <optional>
#include <string>

#include "argos/diagnostics.hpp"

namespace argos {

/// Binary semantic-equivalence verdict from a teacher language model.
/// Implementations must be safe for concurrent use; transport failures throw.
class JudgeClient {
  public:
    virtual ~JudgeClient() = default;
    virtual bool judge_semantic(const std::string& pred, const std::string& gt) = 0;
};

enum class OutcomeRule { exact, numeric, judge };

struct OutcomeResult {
    int r_acc = 0;  // always 0 or 1
    OutcomeRule rule_used = OutcomeRule::exact;
    std::optional<double> relerr;  // present iff rule_used == numeric
};

/// Normalization used by the exact-match rule: trim, collapse internal
/// whitespace, case-fold, strip one trailing period, reduce an MCQ-decorated
/// answer ("B. Yes.", "b)") to its option letter.
std::string normalize_answer(const std::string& s);

/// Numeric answer parsing: full string must parse after stripping one leading
/// currency symbol, commas, and one trailing '%' (which divides by 100).
std::optional<double> parse_numeric_answer(const std::string& s);

/// 1 iff the two answers normalize to the same string.
int exact_match(const std::string& pred, const std::string& gt, Diagnostics& diags);

/// 1 iff |pred - gt| / max(|gt|, 1) <= tol (boundary inclusive). Throws
/// std::invalid_argument on non-finite inputs.
int relative_numeric(double pred, double gt, double tol, double* relerr_out = nullptr);

/// Forwards to the judge and returns its verdict verbatim. Transport errors
/// propagate; a failure is never silently scored 0.
int semantic_match(const std::string& pred, const std::string& gt, JudgeClient& judge);

/// Rule dispatch: absent prediction -> 0; both numeric -> relative_numeric;
/// MCQ letter or short-phrase ground truth -> exact_match; else the judge.
OutcomeResult outcome_reward(const std::optional<std::string>& pred, const std::string& gt,
                             JudgeClient& judge, double numeric_tol, Diagnostics& diags);

}  // namespace argos
