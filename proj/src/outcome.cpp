#include "argos/outcome.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace argos {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string collapse_fold(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

std::string normalize_answer(const std::string& s) {
    // Trim + collapse internal whitespace + case-fold.
    std::string n = collapse_fold(s);
    // Strip one trailing period.
    if (!n.empty() && n.back() == '.') n.pop_back();
    // MCQ decoration: a single option letter followed by '.' or ')' (and
    // possibly the restated option text) reduces to the letter.
    if (n.size() >= 2 && std::isalpha(static_cast<unsigned char>(n[0])) &&
        (n[1] == '.' || n[1] == ')') && (n.size() == 2 || n[2] == ' ')) {
        n = n.substr(0, 1);
    }
    return n;
}

std::optional<double> parse_numeric_answer(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    if (b == e) return std::nullopt;
    std::size_t i = b;
    // Strip one leading currency symbol (ASCII $ or UTF-8 euro/pound).
    if (s[i] == '$') {
        ++i;
    } else if (e - i >= 3 && (s.compare(i, 3, "\xe2\x82\xac") == 0)) {
        i += 3;
    } else if (e - i >= 2 && (s.compare(i, 2, "\xc2\xa3") == 0)) {
        i += 2;
    }
    bool percent = false;
    if (e > i && s[e - 1] == '%') {
        percent = true;
        --e;
    }
    for (; i < e; ++i) {
        if (s[i] == ',') continue;  // thousands separators
        t += s[i];
    }
    if (t.empty()) return std::nullopt;
    std::size_t consumed = 0;
    double v = 0;
    try {
        v = std::stod(t, &consumed);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (consumed != t.size() || !std::isfinite(v)) return std::nullopt;
    return percent ? v / 100.0 : v;
}

int exact_match(const std::string& pred, const std::string& gt, Diagnostics& diags) {
    const std::string np = normalize_answer(pred);
    const std::string ng = normalize_answer(gt);
    if (np.empty() || ng.empty()) {
        add_diag(diags, "answer empty after normalization; exact match scores 0");
        return 0;
    }
    return np == ng ? 1 : 0;
}

int relative_numeric(double pred, double gt, double tol, double* relerr_out) {
    if (!std::isfinite(pred) || !std::isfinite(gt))
        throw std::invalid_argument("relative_numeric: non-finite numeric answer");
    const double relerr = std::abs(pred - gt) / std::max(std::abs(gt), 1.0);
    if (relerr_out) *relerr_out = relerr;
    return relerr <= tol ? 1 : 0;
}

int semantic_match(const std::string& pred, const std::string& gt, JudgeClient& judge) {
    return judge.judge_semantic(pred, gt) ? 1 : 0;
}

namespace {

int token_count(const std::string& s) {
    std::istringstream in(s);
    std::string tok;
    int n = 0;
    while (in >> tok) ++n;
    return n;
}

bool is_mcq_letter(const std::string& normalized) {
    return normalized.size() == 1 && std::isalpha(static_cast<unsigned char>(normalized[0]));
}

}  // namespace

OutcomeResult outcome_reward(const std::optional<std::string>& pred, const std::string& gt,
                             JudgeClient& judge, double numeric_tol, Diagnostics& diags) {
    if (gt.empty()) throw std::invalid_argument("outcome_reward: empty ground truth");
    OutcomeResult res;
    if (!pred) {
        add_diag(diags, "no predicted answer; outcome reward 0");
        res.rule_used = OutcomeRule::exact;
        res.r_acc = 0;
        return res;
    }
    const auto np = parse_numeric_answer(*pred);
    const auto ng = parse_numeric_answer(gt);
    if (np && ng) {
        double relerr = 0;
        res.r_acc = relative_numeric(*np, *ng, numeric_tol, &relerr);
        res.rule_used = OutcomeRule::numeric;
        res.relerr = relerr;
        return res;
    }
    const std::string norm_gt = normalize_answer(gt);
    if (is_mcq_letter(norm_gt) || token_count(norm_gt) <= 3) {
        res.r_acc = exact_match(*pred, gt, diags);
        res.rule_used = OutcomeRule::exact;
        return res;
    }
    res.r_acc = semantic_match(*pred, gt, judge);
    res.rule_used = OutcomeRule::judge;
    return res;
}

}  // namespace argos
