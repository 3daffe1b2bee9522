#include "argos/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <regex>

namespace argos {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Non-negative integer or decimal; anything else (including a sign) is
// rejected so negative coordinates surface as malformed tags.
bool parse_coord(const std::string& raw, double& out) {
    const std::string v = trim(raw);
    if (v.empty()) return false;
    bool dot = false, digits = false;
    for (char c : v) {
        if (c == '.') {
            if (dot) return false;
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = true;
        } else {
            return false;
        }
    }
    if (!digits) return false;
    out = std::stod(v);
    return true;
}

struct Attr {
    std::string name;
    std::string value;
};

struct PointTag {
    std::size_t begin = 0;     // '<'
    std::size_t end = 0;       // one past the closing tag
    bool plural = false;       // <points> vs <point>
    std::vector<Attr> attrs;
    std::string inner;
};

// Scans for the next <point ...>...</point> or <points ...>...</points> tag
// at or after `pos`. Returns false when none remain.
bool next_point_tag(const std::string& text, std::size_t pos, PointTag& tag,
                    Diagnostics* diags = nullptr) {
    while (true) {
        const std::size_t open = text.find("<point", pos);
        if (open == std::string::npos) return false;
        std::size_t p = open + 6;
        bool plural = false;
        if (p < text.size() && text[p] == 's') {
            plural = true;
            ++p;
        }
        if (p >= text.size() || !(std::isspace(static_cast<unsigned char>(text[p])) || text[p] == '>')) {
            pos = open + 1;  // "<pointer..." or similar
            continue;
        }
        // Attributes up to '>'.
        std::vector<Attr> attrs;
        bool ok = true;
        while (p < text.size() && text[p] != '>') {
            if (std::isspace(static_cast<unsigned char>(text[p]))) {
                ++p;
                continue;
            }
            std::size_t ns = p;
            while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
                ++p;
            if (p == ns || p >= text.size() || text[p] != '=') {
                ok = false;
                break;
            }
            std::string name = text.substr(ns, p - ns);
            ++p;  // '='
            if (p >= text.size() || text[p] != '"') {
                ok = false;
                break;
            }
            const std::size_t vs = ++p;
            const std::size_t ve = text.find('"', vs);
            if (ve == std::string::npos) {
                ok = false;
                break;
            }
            attrs.push_back(Attr{std::move(name), text.substr(vs, ve - vs)});
            p = ve + 1;
        }
        if (!ok || p >= text.size()) {
            pos = open + 1;
            continue;
        }
        ++p;  // '>'
        const std::string close = plural ? "</points>" : "</point>";
        const std::size_t ce = text.find(close, p);
        if (ce == std::string::npos) {
            if (diags) add_diag(*diags, "point tag without closing tag skipped", open);
            pos = open + 1;
            continue;
        }
        tag.begin = open;
        tag.end = ce + close.size();
        tag.plural = plural;
        tag.attrs = std::move(attrs);
        tag.inner = text.substr(p, ce - p);
        return true;
    }
}

// Coordinate pairs keyed by the index K in xK/yK. Values are the raw
// attribute strings so reformatting can re-emit them verbatim.
std::map<int, std::pair<std::string, std::string>> coord_pairs(const PointTag& tag) {
    std::map<int, std::pair<std::string, std::string>> pairs;
    for (const auto& a : tag.attrs) {
        if (a.name.size() < 2 || (a.name[0] != 'x' && a.name[0] != 'y')) continue;
        int k = 0;
        const auto res = std::from_chars(a.name.data() + 1, a.name.data() + a.name.size(), k);
        if (res.ec != std::errc{} || res.ptr != a.name.data() + a.name.size() || k <= 0) continue;
        if (a.name[0] == 'x')
            pairs[k].first = a.value;
        else
            pairs[k].second = a.value;
    }
    return pairs;
}

std::string tag_label(const PointTag& tag) {
    std::string label = trim(tag.inner);
    if (!label.empty()) return label;
    for (const auto& a : tag.attrs)
        if (a.name == "alt") return trim(a.value);
    return {};
}

}  // namespace

std::vector<SpatialPoint> extract_points(const std::string& text, Diagnostics& diags) {
    std::vector<SpatialPoint> out;
    PointTag tag;
    std::size_t pos = 0;
    while (next_point_tag(text, pos, tag, &diags)) {
        pos = tag.end;
        const std::string label = tag_label(tag);
        if (label.empty()) {
            add_diag(diags, "point tag with empty label (no alt, no inner text) skipped", tag.begin);
            continue;
        }
        const auto pairs = coord_pairs(tag);
        bool emitted = false;
        for (const auto& [k, xy] : pairs) {
            if (xy.first.empty() || xy.second.empty()) {
                add_diag(diags, "point tag with unpaired x/y attribute skipped", tag.begin);
                continue;
            }
            double x = 0, y = 0;
            if (!parse_coord(xy.first, x) || !parse_coord(xy.second, y)) {
                add_diag(diags, "point tag with non-numeric or negative coordinates skipped", tag.begin);
                continue;
            }
            SpatialPoint p;
            p.x = x;
            p.y = y;
            p.label = label;
            p.source_span = {tag.begin, tag.end};
            out.push_back(std::move(p));
            emitted = true;
        }
        if (!emitted && pairs.empty())
            add_diag(diags, "point tag without coordinate attributes skipped", tag.begin);
    }
    return out;
}

std::string reformat_points(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    PointTag tag;
    std::size_t pos = 0;
    while (next_point_tag(text, pos, tag)) {
        const std::string label = tag_label(tag);
        const auto pairs = coord_pairs(tag);
        // Validate: only well-formed tags are rewritten, the rest pass through.
        bool valid = !label.empty() && !pairs.empty();
        std::vector<std::pair<std::string, std::string>> coords;
        for (const auto& [k, xy] : pairs) {
            double x = 0, y = 0;
            if (xy.first.empty() || xy.second.empty() || !parse_coord(xy.first, x) ||
                !parse_coord(xy.second, y)) {
                valid = false;
                break;
            }
            coords.emplace_back(trim(xy.first), trim(xy.second));
        }
        out.append(text, pos, tag.begin - pos);
        if (valid) {
            for (const auto& [x, y] : coords) {
                out += "<point x1=\"" + x + "\" y1=\"" + y + "\" alt=\"" + label + "\">" + label +
                       "</point>";
            }
        } else {
            out.append(text, tag.begin, tag.end - tag.begin);
        }
        pos = tag.end;
    }
    out.append(text, pos, text.size() - pos);
    return out;
}

std::optional<std::string> extract_boxed_answer(const std::string& text, Diagnostics& diags) {
    static const std::string kBegin = "<|begin_of_box|>";
    static const std::string kEnd = "<|end_of_box|>";
    std::optional<std::string> answer;
    std::size_t pos = 0;
    while (true) {
        const std::size_t b = text.find(kBegin, pos);
        if (b == std::string::npos) break;
        const std::size_t cs = b + kBegin.size();
        const std::size_t e = text.find(kEnd, cs);
        if (e == std::string::npos) {
            add_diag(diags, "unbalanced <|begin_of_box|> without closing delimiter", b);
            break;
        }
        answer = trim(std::string_view(text).substr(cs, e - cs));
        pos = e + kEnd.size();
    }
    return answer;
}

// ---------------------------------------------------------------------------
// Temporal anchors
// ---------------------------------------------------------------------------

namespace {

enum class AnchorKind {
    templ_list,
    templ_span,
    templ_single,
    nl_span,
    nl_frame_range,
    nl_time_range,
    nl_onwards,
    nl_single,
    bare_frame,
    nl_time_single,
};

struct Anchor {
    AnchorKind kind;
    std::size_t begin = 0;
    std::size_t end = 0;
    std::optional<int> frame, frame2;
    std::optional<double> time, time2;
    bool consumed = false;

    bool is_span() const {
        return kind == AnchorKind::templ_list || kind == AnchorKind::templ_span ||
               kind == AnchorKind::nl_span || kind == AnchorKind::nl_frame_range ||
               kind == AnchorKind::nl_time_range || kind == AnchorKind::nl_onwards;
    }
};

const std::regex& re_templ_list() {
    static const std::regex re(
        R"(\[\s*F\d+\s*@\s*t=\d+(?:\.\d+)?s\s*(?:,\s*F\d+\s*@\s*t=\d+(?:\.\d+)?s\s*)+(?:,\s*(?:\.\.\.)\s*)?\])",
        std::regex::icase);
    return re;
}
const std::regex& re_templ_entry() {
    static const std::regex re(R"(F(\d+)\s*@\s*t=(\d+(?:\.\d+)?)s)", std::regex::icase);
    return re;
}
const std::regex& re_templ_span() {
    static const std::regex re(
        R"(\[\s*F(\d+)\s*-\s*F(\d+)\s*@\s*t=(\d+(?:\.\d+)?)\s*-\s*(\d+(?:\.\d+)?)s\s*\])",
        std::regex::icase);
    return re;
}
const std::regex& re_templ_single() {
    static const std::regex re(R"(\[\s*F(\d+)\s*@\s*t=(\d+(?:\.\d+)?)s\s*\])", std::regex::icase);
    return re;
}
const std::regex& re_nl_span() {
    static const std::regex re(
        R"((?:\bfrom\s+)?\bframes?\s+(\d+)(?:\s+at\s+(\d+(?:\.\d+)?)\s+seconds?)?\s+(?:to|through|until)\s+(?:frames?\s+)?(\d+)(?:\s+at\s+(\d+(?:\.\d+)?)\s+seconds?)?)",
        std::regex::icase);
    return re;
}
const std::regex& re_nl_frame_range() {
    static const std::regex re(R"(\bframes?\s+(\d+)\s*(?:--|-)\s*(\d+))", std::regex::icase);
    return re;
}
const std::regex& re_nl_time_range() {
    static const std::regex re(
        R"((?:\bfrom\s+)?\b(\d+(?:\.\d+)?)\s+(?:to|until)\s+(\d+(?:\.\d+)?)\s+seconds?\b)",
        std::regex::icase);
    return re;
}
const std::regex& re_nl_onwards() {
    static const std::regex re(R"(\bframes?\s+(\d+)\s+onwards?\b)", std::regex::icase);
    return re;
}
const std::regex& re_nl_single() {
    static const std::regex re(R"(\bframes?\s+(\d+)\s+at\s+(\d+(?:\.\d+)?)\s+seconds?\b)",
                               std::regex::icase);
    return re;
}
const std::regex& re_bare_frame() {
    static const std::regex re(R"(\bframe\s+(\d+)\b)", std::regex::icase);
    return re;
}
const std::regex& re_nl_time_single() {
    static const std::regex re(R"((?:\bat\s+)?\b(\d+(?:\.\d+)?)\s+seconds?\b)", std::regex::icase);
    return re;
}

bool to_int(const std::string& s, int& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

void scan(const std::string& text, const std::regex& re, AnchorKind kind,
          std::vector<Anchor>& out, Diagnostics& diags) {
    const auto begin = std::sregex_iterator(text.begin(), text.end(), re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        Anchor a;
        a.kind = kind;
        a.begin = static_cast<std::size_t>(m.position(0));
        a.end = a.begin + static_cast<std::size_t>(m.length(0));
        auto frame_at = [&](int g, std::optional<int>& dst) {
            if (g < static_cast<int>(m.size()) && m[g].matched) {
                int v = 0;
                if (to_int(m[g].str(), v))
                    dst = v;
                else
                    add_diag(diags, "temporal anchor with unparseable frame index skipped", a.begin);
            }
        };
        auto time_at = [&](int g, std::optional<double>& dst) {
            if (g < static_cast<int>(m.size()) && m[g].matched) dst = std::stod(m[g].str());
        };
        switch (kind) {
            case AnchorKind::templ_list: {
                const std::string body = m.str(0);
                std::optional<int> first_f, last_f;
                std::optional<double> first_t, last_t;
                for (auto e = std::sregex_iterator(body.begin(), body.end(), re_templ_entry());
                     e != std::sregex_iterator(); ++e) {
                    int f = 0;
                    if (!to_int((*e)[1].str(), f)) continue;
                    const double t = std::stod((*e)[2].str());
                    if (!first_f) {
                        first_f = f;
                        first_t = t;
                    }
                    last_f = f;
                    last_t = t;
                }
                a.frame = first_f;
                a.time = first_t;
                a.frame2 = last_f;
                a.time2 = last_t;
                break;
            }
            case AnchorKind::templ_span:
                frame_at(1, a.frame);
                frame_at(2, a.frame2);
                time_at(3, a.time);
                time_at(4, a.time2);
                break;
            case AnchorKind::templ_single:
            case AnchorKind::nl_single:
                frame_at(1, a.frame);
                time_at(2, a.time);
                break;
            case AnchorKind::nl_span:
                frame_at(1, a.frame);
                time_at(2, a.time);
                frame_at(3, a.frame2);
                time_at(4, a.time2);
                break;
            case AnchorKind::nl_frame_range:
                frame_at(1, a.frame);
                frame_at(2, a.frame2);
                break;
            case AnchorKind::nl_time_range:
                time_at(1, a.time);
                time_at(2, a.time2);
                break;
            case AnchorKind::nl_onwards:
            case AnchorKind::bare_frame:
                frame_at(1, a.frame);
                break;
            case AnchorKind::nl_time_single:
                time_at(1, a.time);
                break;
        }
        if (!a.frame && !a.time && !a.frame2 && !a.time2) {
            add_diag(diags, "temporal anchor with no parseable numbers skipped", a.begin);
            continue;
        }
        out.push_back(std::move(a));
    }
}

// All anchors, overlaps resolved by (earlier start, stronger kind, longer).
std::vector<Anchor> find_anchors(const std::string& text, Diagnostics& diags) {
    std::vector<Anchor> cand;
    scan(text, re_templ_list(), AnchorKind::templ_list, cand, diags);
    scan(text, re_templ_span(), AnchorKind::templ_span, cand, diags);
    scan(text, re_templ_single(), AnchorKind::templ_single, cand, diags);
    scan(text, re_nl_span(), AnchorKind::nl_span, cand, diags);
    scan(text, re_nl_frame_range(), AnchorKind::nl_frame_range, cand, diags);
    scan(text, re_nl_time_range(), AnchorKind::nl_time_range, cand, diags);
    scan(text, re_nl_onwards(), AnchorKind::nl_onwards, cand, diags);
    scan(text, re_nl_single(), AnchorKind::nl_single, cand, diags);
    scan(text, re_bare_frame(), AnchorKind::bare_frame, cand, diags);
    scan(text, re_nl_time_single(), AnchorKind::nl_time_single, cand, diags);
    std::sort(cand.begin(), cand.end(), [](const Anchor& a, const Anchor& b) {
        if (a.begin != b.begin) return a.begin < b.begin;
        if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        return a.end > b.end;
    });
    std::vector<Anchor> out;
    std::size_t covered = 0;
    for (auto& a : cand) {
        if (!out.empty() && a.begin < covered) continue;
        covered = a.end;
        out.push_back(std::move(a));
    }
    return out;
}

// Sentence boundaries on . ! ? and newline; a '.' between two digits is a
// decimal point, not a boundary.
std::vector<ByteSpan> split_sentences(const std::string& text) {
    std::vector<ByteSpan> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        bool boundary = (c == '!' || c == '?' || c == '\n');
        if (c == '.') {
            const bool prev_digit = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
            const bool next_digit =
                i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
            boundary = !(prev_digit && next_digit);
        }
        if (boundary) {
            if (i + 1 > start) out.emplace_back(start, i + 1);
            start = i + 1;
        }
    }
    if (start < text.size()) out.emplace_back(start, text.size());
    return out;
}

std::size_t sentence_index(const std::vector<ByteSpan>& sentences, std::size_t pos) {
    for (std::size_t i = 0; i < sentences.size(); ++i)
        if (pos >= sentences[i].first && pos < sentences[i].second) return i;
    return sentences.empty() ? 0 : sentences.size() - 1;
}

// Clause boundaries within a sentence ( , ; : and parens ).
std::vector<ByteSpan> split_clauses(const std::string& text, ByteSpan sentence) {
    std::vector<ByteSpan> out;
    std::size_t start = sentence.first;
    for (std::size_t i = sentence.first; i < sentence.second; ++i) {
        const char c = text[i];
        if (c == ',' || c == ';' || c == ':' || c == '(' || c == ')') {
            if (i > start) out.emplace_back(start, i);
            start = i + 1;
        }
    }
    if (sentence.second > start) out.emplace_back(start, sentence.second);
    return out;
}

// Gap between a point tag and a following anchor that still reads as one
// reference: optional connector word, short, no punctuation.
bool connective_gap(std::string_view gap) {
    const std::string g = trim(gap);
    if (g.size() > 8) return false;
    return g.empty() || g == "in" || g == "at" || g == "of" || g == "during";
}

struct FusionResult {
    std::vector<SpatialPoint> points;  // all points, fused where possible
    std::vector<FrameObservation> observations;
    std::vector<SegmentEvent> events;
    Diagnostics diagnostics;
};

FusionResult fuse(const std::string& text) {
    FusionResult res;
    res.points = extract_points(text, res.diagnostics);
    std::vector<Anchor> anchors = find_anchors(text, res.diagnostics);
    const std::vector<ByteSpan> sentences = split_sentences(text);

    for (auto& p : res.points) {
        const std::size_t si = sentence_index(sentences, p.source_span.first);
        Anchor* chosen = nullptr;

        // 1. Anchor immediately after the tag, joined by a connector.
        for (auto& a : anchors) {
            if (a.begin < p.source_span.second) continue;
            if (!a.is_span() && sentence_index(sentences, a.begin) == si &&
                connective_gap(std::string_view(text).substr(p.source_span.second,
                                                             a.begin - p.source_span.second)))
                chosen = &a;
            break;  // only the first following anchor qualifies
        }
        // 2. Nearest preceding single anchor in the same sentence.
        if (!chosen) {
            for (auto& a : anchors) {
                if (a.is_span() || a.end > p.source_span.first) continue;
                if (sentence_index(sentences, a.begin) != si) continue;
                if (!chosen || a.begin > chosen->begin) chosen = &a;
            }
        }
        // 3. Nearest following single anchor in the same sentence.
        if (!chosen) {
            for (auto& a : anchors) {
                if (a.is_span() || a.begin < p.source_span.second) continue;
                if (sentence_index(sentences, a.begin) != si) continue;
                chosen = &a;
                break;
            }
        }
        // 4. Last single anchor of the immediately preceding clause.
        if (!chosen && si > 0) {
            const auto clauses = split_clauses(text, sentences[si - 1]);
            if (!clauses.empty()) {
                const ByteSpan last = clauses.back();
                for (auto& a : anchors) {
                    if (a.is_span()) continue;
                    if (a.begin >= last.first && a.begin < last.second) chosen = &a;
                }
            }
        }
        if (chosen) {
            p.frame = chosen->frame;
            p.time_s = chosen->time;
            chosen->consumed = true;
        }
    }

    for (const auto& a : anchors) {
        const ByteSpan s = sentences.empty()
                               ? ByteSpan{0, text.size()}
                               : sentences[sentence_index(sentences, a.begin)];
        const std::string desc = trim(std::string_view(text).substr(s.first, s.second - s.first));
        if (a.is_span()) {
            SegmentEvent e;
            e.start_frame = a.frame;
            e.end_frame = a.frame2;
            e.start_time_s = a.time;
            e.end_time_s = a.time2;
            e.description = desc;
            res.events.push_back(std::move(e));
        } else if (!a.consumed) {
            FrameObservation o;
            o.frame = a.frame;
            o.time_s = a.time;
            o.description = desc;
            res.observations.push_back(std::move(o));
        }
    }
    return res;
}

}  // namespace

TemporalExtraction extract_temporal_anchors(const std::string& text) {
    FusionResult fr = fuse(text);
    TemporalExtraction out;
    out.observations = std::move(fr.observations);
    out.events = std::move(fr.events);
    for (auto& p : fr.points)
        if (p.frame || p.time_s) out.timed_points.push_back(std::move(p));
    out.diagnostics = std::move(fr.diagnostics);
    return out;
}

ParsedResponse parse_rollout(const RawRollout& rollout) {
    const std::string& text = rollout.response_text;
    ParsedResponse out;

    // Reasoning: <think> body if present, else everything before the answer
    // section, else the whole text.
    const std::size_t tb = text.find("<think>");
    if (tb != std::string::npos) {
        const std::size_t te = text.find("</think>", tb + 7);
        out.reasoning = te != std::string::npos ? text.substr(tb + 7, te - tb - 7)
                                                : text.substr(tb + 7);
    } else {
        const std::size_t ab = text.find("<answer>");
        out.reasoning = ab != std::string::npos ? text.substr(0, ab) : text;
    }

    out.answer = extract_boxed_answer(text, out.diagnostics);

    std::vector<SpatialPoint> raw_points;
    if (rollout.media_kind == MediaKind::video) {
        FusionResult fr = fuse(text);
        raw_points = std::move(fr.points);
        out.observations = std::move(fr.observations);
        out.events = std::move(fr.events);
        for (auto& d : fr.diagnostics) out.diagnostics.push_back(std::move(d));
    } else {
        raw_points = extract_points(text, out.diagnostics);
    }

    // Dedup by (x, y, label, frame): the same point cited in the reasoning
    // and again in the answer section scores once.
    for (auto& p : raw_points) {
        const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                     [&](const SpatialPoint& q) { return q.same_key(p); });
        if (!dup) out.points.push_back(std::move(p));
    }
    return out;
}

std::string canonicalize_timestamps(const std::string& text) {
    Diagnostics diags;
    std::vector<Anchor> anchors = find_anchors(text, diags);
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    auto fmt = [](double t) {
        std::string s = std::to_string(t);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    for (const auto& a : anchors) {
        if (a.kind != AnchorKind::templ_single && a.kind != AnchorKind::templ_span &&
            a.kind != AnchorKind::templ_list)
            continue;
        out.append(text, pos, a.begin - pos);
        if (a.kind == AnchorKind::templ_single) {
            out += "frame " + std::to_string(*a.frame) + " at " + fmt(*a.time) + " seconds";
        } else {
            out += "from frame " + std::to_string(*a.frame) + " at " + fmt(*a.time) +
                   " seconds to frame " + std::to_string(*a.frame2) + " at " + fmt(*a.time2) +
                   " seconds";
        }
        pos = a.end;
    }
    out.append(text, pos, text.size() - pos);
    return out;
}

}  // namespace argos
