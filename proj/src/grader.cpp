#include "gridforge/grader.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"

namespace gridforge {

namespace {

using json = nlohmann::json;

constexpr int kMaxDepth = 64;

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Curly quotes to ASCII; everything else byte for byte.
std::string ascii_quotes(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80) {
            const unsigned char c = static_cast<unsigned char>(text[i + 2]);
            if (c == 0x9C || c == 0x9D) {
                out += '"';
                i += 2;
                continue;
            }
            if (c == 0x98 || c == 0x99) {
                out += '\'';
                i += 2;
                continue;
            }
        }
        out += text[i];
    }
    return out;
}

bool is_closer(char c) { return c == ']' || c == '}' || c == ')'; }
bool is_word_stop(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ':' || is_closer(c) || c == '[' ||
           c == '{' || c == '(' || c == '"' || c == '\'';
}

// Recursive-descent reader for JSON-like text. Flags every deviation from
// strict JSON it has to work around.
class Reader {
public:
    explicit Reader(std::string_view s, std::size_t pos = 0) : s_(s), pos_(pos) {}

    std::optional<json> value(int depth = 0) {
        if (depth > kMaxDepth) return std::nullopt;
        skip_ws();
        if (eof()) return std::nullopt;
        const char c = s_[pos_];
        if (c == '{') return object(depth);
        if (c == '[' || c == '(') return array(depth);
        if (c == '"' || c == '\'') return string();
        return scalar();
    }

    std::size_t pos() const { return pos_; }

private:
    bool eof() const { return pos_ >= s_.size(); }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::optional<json> object(int depth) {
        ++pos_;
        json obj = json::object();
        while (true) {
            skip_ws();
            if (eof()) return obj;  // unclosed
            const char c = s_[pos_];
            if (is_closer(c)) {
                ++pos_;
                return obj;
            }
            if (c == ',') {
                ++pos_;
                continue;
            }
            std::string key;
            if (c == '"' || c == '\'') {
                auto k = string();
                if (!k) return std::nullopt;
                key = k->get<std::string>();
            } else {
                const std::size_t start = pos_;
                while (!eof() && s_[pos_] != ':' && s_[pos_] != '=' && s_[pos_] != '\n' && !is_closer(s_[pos_]) &&
                       s_[pos_] != ',' && s_[pos_] != '{' && s_[pos_] != '[') {
                    ++pos_;
                }
                key = std::string(trim(s_.substr(start, pos_ - start)));
                if (key.empty()) return std::nullopt;
            }
            skip_ws();
            if (eof() || (s_[pos_] != ':' && s_[pos_] != '=')) {
                // Trailing prose after an unclosed object ends it.
                if (obj.empty()) return std::nullopt;
                return obj;
            }
            ++pos_;
            skip_ws();
            if (eof() || s_[pos_] == ',' || is_closer(s_[pos_])) {
                obj[key] = nullptr;
                continue;
            }
            auto v = value(depth + 1);
            if (!v) return std::nullopt;
            obj[key] = std::move(*v);
        }
    }

    std::optional<json> array(int depth) {
        ++pos_;
        json arr = json::array();
        bool expecting = true;  // just opened or just saw a comma
        bool after_container = false;
        while (true) {
            const std::size_t before = pos_;
            skip_ws();
            if (eof()) return arr;  // unclosed
            const char c = s_[pos_];
            if (is_closer(c)) {
                ++pos_;
                return arr;
            }
            if (c == ',') {
                // ",," or "[," leaves a blank cell.
                if (expecting) arr.push_back("");
                ++pos_;
                expecting = true;
                after_container = false;
                continue;
            }
            // An unclosed list running into prose: a word right after a
            // nested list, or on a fresh line, ends it.
            if (!expecting && std::isalpha(static_cast<unsigned char>(c)) &&
                (after_container || s_.substr(before, pos_ - before).find('\n') != std::string_view::npos)) {
                return arr;
            }
            auto v = value(depth + 1);
            if (!v) return std::nullopt;
            after_container = v->is_array() || v->is_object();
            arr.push_back(std::move(*v));
            expecting = false;
        }
    }

    // Closing quote: the next same quote that is followed by a delimiter.
    std::optional<json> string() {
        const char q = s_[pos_];
        const std::size_t start = ++pos_;
        std::size_t end = std::string_view::npos;
        for (std::size_t i = start; i < s_.size(); ++i) {
            if (s_[i] == '\\') {
                ++i;
                continue;
            }
            if (s_[i] != q) continue;
            std::size_t j = i + 1;
            while (j < s_.size() && (s_[j] == ' ' || s_[j] == '\t' || s_[j] == '\r' || s_[j] == '\n')) ++j;
            if (j >= s_.size() || s_[j] == ',' || s_[j] == ':' || is_closer(s_[j])) {
                end = i;
                break;
            }
        }
        // Next best: a quote ending its line, as when an unclosed object
        // runs into prose on the following line.
        for (std::size_t i = start; end == std::string_view::npos && i < s_.size(); ++i) {
            if (s_[i] == '\\') {
                ++i;
                continue;
            }
            if (s_[i] != q) continue;
            std::size_t j = i + 1;
            while (j < s_.size() && (s_[j] == ' ' || s_[j] == '\t' || s_[j] == '\r')) ++j;
            if (j < s_.size() && s_[j] == '\n') end = i;
        }
        std::size_t next;
        if (end == std::string_view::npos) {
            // Unterminated: stop at the first delimiter on the way.
            end = start;
            while (end < s_.size() && s_[end] != ',' && !is_closer(s_[end]) && s_[end] != '\n') ++end;
            next = end;
        } else {
            next = end + 1;
        }
        std::string out;
        for (std::size_t i = start; i < end; ++i) {
            if (s_[i] == '\\' && i + 1 < end) {
                const char e = s_[++i];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'u':
                    if (i + 4 < end) {
                        const unsigned long code = std::strtoul(std::string(s_.substr(i + 1, 4)).c_str(), nullptr, 16);
                        if (code < 0x80) out += static_cast<char>(code);
                        i += 4;
                    }
                    break;
                default: out += e;
                }
            } else {
                out += s_[i];
            }
        }
        pos_ = next;
        return json(out);
    }

    std::optional<json> scalar() {
        const std::size_t start = pos_;
        while (!eof() && !is_word_stop(s_[pos_])) ++pos_;
        const std::string word(s_.substr(start, pos_ - start));
        if (word.empty()) {
            // A stray character the grammar has no use for.
            ++pos_;
            return std::nullopt;
        }
        if (word == "true" || word == "True") return json(true);
        if (word == "false" || word == "False") return json(false);
        if (word == "null" || word == "None") return json(nullptr);
        char* endp = nullptr;
        const long long i = std::strtoll(word.c_str(), &endp, 10);
        if (endp && *endp == '\0' && !word.empty()) return json(i);
        const double d = std::strtod(word.c_str(), &endp);
        if (endp && *endp == '\0' && std::isfinite(d) && (std::isdigit(static_cast<unsigned char>(word[0])) || word[0] == '-')) {
            return json(d);
        }
        return json(word);
    }

    std::string_view s_;
    std::size_t pos_;
};

std::optional<std::string> cell_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 1e15) return std::to_string(static_cast<long long>(d));
        return v.dump();
    }
    if (v.is_null()) return std::string();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
    return std::nullopt;
}

std::optional<TokenGrid> to_grid(const json& v, int depth = 0) {
    if (depth > 2) return std::nullopt;
    if (v.is_string()) {
        // A grid written as a string, e.g. "Solution": "[[1, 2], [2, 1]]".
        const RepairResult r = try_repair(v.get<std::string>());
        if (r.outcome == ParseOutcome::Unparseable || r.value.is_string()) return std::nullopt;
        return to_grid(r.value, depth + 1);
    }
    if (!v.is_array() || v.empty()) return std::nullopt;
    TokenGrid grid;
    for (const auto& row : v) {
        if (!row.is_array()) return std::nullopt;
        std::vector<std::string> cells;
        for (const auto& cell : row) {
            auto t = cell_text(cell);
            if (!t) return std::nullopt;
            cells.push_back(*t);
        }
        grid.push_back(std::move(cells));
    }
    return grid;
}

// Content of the last <tag>...</tag>; an unclosed tag runs to the end.
std::optional<std::string> tag_content(std::string_view text, std::string_view tag, bool* closed = nullptr) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    const auto start = text.rfind(open);
    if (start == std::string_view::npos) return std::nullopt;
    const auto body = start + open.size();
    const auto end = text.find(close, body);
    if (closed) *closed = end != std::string_view::npos;
    return std::string(text.substr(body, end == std::string_view::npos ? std::string_view::npos : end - body));
}

const json* find_key(const json& obj, std::initializer_list<std::string_view> names) {
    if (!obj.is_object()) return nullptr;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string k = lower(trim(it.key()));
        for (std::string_view n : names) {
            if (k == n) return &it.value();
        }
    }
    return nullptr;
}

// Case-insensitive last occurrence.
std::size_t rfind_ci(std::string_view hay, std::string_view needle) {
    const std::string h = lower(hay), n = lower(needle);
    return h.rfind(n);
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '*' || ch == '_') {
            cur += ch;
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_empty_spelling(std::string_view t) {
    return t.empty() || t == "0" || t == "." || t == "_" || t == "*" || t == "empty" || t == "blank" || t == "none";
}

std::string canonical_word(std::string_view t) {
    std::string w = lower(trim(t));
    while (!w.empty() && (w.front() == '"' || w.front() == '\'' || w.front() == '{' || w.front() == '[' || w.front() == '(')) w.erase(w.begin());
    while (!w.empty() && (w.back() == '"' || w.back() == '\'' || w.back() == '}' || w.back() == ']' || w.back() == ')' || w.back() == '.')) w.pop_back();
    return is_empty_spelling(w) ? "empty" : w;
}

std::string short_from(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    auto t = cell_text(v);
    return t ? *t : v.dump();
}

double mean_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, bool sample) {
    if (v.size() < (sample ? 2u : 1u)) return 0;
    const double m = mean_of(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(sample ? v.size() - 1 : v.size()));
}

} // namespace

std::string_view to_string(ParseOutcome o) {
    switch (o) {
    case ParseOutcome::Structured: return "structured";
    case ParseOutcome::Repaired: return "repaired";
    case ParseOutcome::Unparseable: return "unparseable";
    }
    return "?";
}

RepairResult try_repair(std::string_view raw) {
    try {
        const std::string text = ascii_quotes(raw);
        std::optional<json> last_object, last_array;
        std::string_view object_span, array_span;
        std::size_t pos = 0;
        while (true) {
            const std::size_t p = text.find_first_of("{[", pos);
            if (p == std::string::npos) break;
            Reader reader(text, p);
            auto v = reader.value();
            if (v && (v->is_object() || v->is_array()) && !v->empty()) {
                const std::string_view span = std::string_view(text).substr(p, reader.pos() - p);
                if (v->is_object()) {
                    last_object = std::move(v);
                    object_span = span;
                } else {
                    last_array = std::move(v);
                    array_span = span;
                }
                pos = std::max(reader.pos(), p + 1);
            } else {
                pos = p + 1;
            }
        }
        RepairResult r;
        std::string_view span;
        if (last_object) {
            r.value = std::move(*last_object);
            span = object_span;
        } else if (last_array) {
            r.value = std::move(*last_array);
            span = array_span;
        } else {
            return {};
        }
        r.outcome = json::accept(span) ? ParseOutcome::Structured : ParseOutcome::Repaired;
        return r;
    } catch (...) {
        return {};
    }
}

json repair_structured(std::string_view text) {
    RepairResult r = try_repair(text);
    if (r.outcome == ParseOutcome::Unparseable) throw Error(ErrorCode::RepairFailed, "no structured value in response");
    return r.value;
}

std::string normalize_cell_token(std::string_view token) {
    std::string_view t = trim(token);
    if (t.size() >= 2 && (t.front() == '"' || t.front() == '\'') && t.back() == t.front()) t = trim(t.substr(1, t.size() - 2));
    if (t.empty() || t == "0" || t == "." || t == "_" || t == "*") return "*";
    for (char ch : t) {
        if (!std::isalnum(static_cast<unsigned char>(ch))) {
            throw Error(ErrorCode::UnknownToken, "unrecognised cell token '" + std::string(token) + "'");
        }
    }
    return lower(t);
}

PerceptionGrade grade_perception(const TokenGrid& pred, const TokenGrid& truth) {
    auto norm = [](const std::string& t) -> std::optional<std::string> {
        try {
            return normalize_cell_token(t);
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    int total = 0, right = 0;
    bool shape_ok = pred.size() == truth.size();
    for (std::size_t r = 0; r < truth.size(); ++r) {
        total += static_cast<int>(truth[r].size());
        if (r >= pred.size()) continue;
        if (pred[r].size() != truth[r].size()) shape_ok = false;
        for (std::size_t c = 0; c < truth[r].size() && c < pred[r].size(); ++c) {
            const auto a = norm(pred[r][c]);
            const auto b = norm(truth[r][c]);
            if (a && b && *a == *b) ++right;
        }
    }
    PerceptionGrade g;
    g.cell_accuracy = total == 0 ? (pred.empty() ? 1.0 : 0.0) : static_cast<double>(right) / total;
    g.exact = shape_ok && right == total;
    return g;
}

bool grade_solution(const TokenGrid& pred, const PuzzleInstance& instance) {
    try {
        TokenGrid cleaned = pred;
        for (auto& row : cleaned) {
            for (auto& cell : row) cell = lower(trim(cell));
        }
        const Grid state = state_from_tokens(instance, cleaned);
        return is_solved(instance, state);
    } catch (const Error&) {
        return false;
    }
}

bool grade_cell_at(std::string_view response, std::string_view truth, const std::vector<std::string>& choices) {
    const std::string want = canonical_word(truth);
    const std::string whole = canonical_word(response);
    std::vector<std::string> allowed;
    for (const auto& c : choices) allowed.push_back(canonical_word(c));
    allowed.push_back("empty");
    auto allowed_word = [&](const std::string& w) {
        return choices.empty() || std::find(allowed.begin(), allowed.end(), w) != allowed.end();
    };
    if (allowed_word(whole) && words(response).size() <= 1) return whole == want;
    const auto ws = words(response);
    for (auto it = ws.rbegin(); it != ws.rend(); ++it) {
        const std::string w = canonical_word(*it);
        if (allowed_word(w)) return w == want;
    }
    return false;
}

bool grade_valid_action(std::string_view response, std::string_view oracle) {
    const std::string want = lower(trim(oracle));
    const auto ws = words(response);
    for (auto it = ws.rbegin(); it != ws.rend(); ++it) {
        const std::string w = lower(*it);
        if (w == "valid" || w == "invalid") return w == want;
    }
    return false;
}

Extracted extract_response(std::string_view raw_view) {
    Extracted ex;
    try {
        const std::string raw = ascii_quotes(raw_view);
        bool think_closed = false, answer_closed = false;
        const auto think = tag_content(raw, "think", &think_closed);
        const auto answer = tag_content(raw, "answer", &answer_closed);
        const auto perception = tag_content(raw, "perception");
        ex.tagged = think && think_closed && answer && answer_closed;
        if (think) ex.think = *think;
        bool repaired = false;
        if (perception) {
            const RepairResult r = try_repair(*perception);
            if (r.outcome != ParseOutcome::Unparseable) {
                ex.perception = to_grid(r.value);
                repaired = repaired || r.outcome == ParseOutcome::Repaired;
            }
        }
        if (answer) {
            const RepairResult r = try_repair(*answer);
            if (r.outcome != ParseOutcome::Unparseable) {
                if (const json* a = find_key(r.value, {"answer", "solution"})) {
                    ex.answer = to_grid(*a);
                    if (!ex.answer) ex.short_answer = short_from(*a);
                } else {
                    ex.answer = to_grid(r.value);
                }
                repaired = repaired || r.outcome == ParseOutcome::Repaired;
            }
            if (!ex.answer && !ex.short_answer) ex.short_answer = std::string(trim(*answer));
        }
        if (!ex.answer && !ex.short_answer) {
            const RepairResult r = try_repair(raw);
            if (r.outcome != ParseOutcome::Unparseable && r.value.is_object()) {
                if (const json* a = find_key(r.value, {"answer", "solution", "final answer"})) {
                    ex.answer = to_grid(*a);
                    if (!ex.answer) ex.short_answer = short_from(*a);
                }
                if (!ex.perception) {
                    if (const json* p = find_key(r.value, {"perception", "initial state", "initial_state", "current state"})) {
                        ex.perception = to_grid(*p);
                    }
                }
                if (!ex.think) {
                    if (const json* t = find_key(r.value, {"think", "thought", "thoughts", "reasoning"})) {
                        ex.think = short_from(*t);
                    }
                }
                repaired = repaired || r.outcome == ParseOutcome::Repaired;
            }
        }
        if (!ex.answer && !ex.short_answer) {
            const std::size_t marker = rfind_ci(raw, "solution:");
            if (marker != std::string::npos) {
                const RepairResult r = try_repair(std::string_view(raw).substr(marker + 9));
                if (r.outcome != ParseOutcome::Unparseable) {
                    ex.answer = to_grid(r.value);
                    repaired = repaired || r.outcome == ParseOutcome::Repaired;
                }
            }
        }
        if (!ex.answer && !ex.short_answer) {
            const RepairResult r = try_repair(raw);
            if (r.outcome != ParseOutcome::Unparseable && r.value.is_array()) {
                ex.answer = to_grid(r.value);
                repaired = repaired || r.outcome == ParseOutcome::Repaired;
            }
        }
        if (ex.answer || ex.short_answer || ex.perception) {
            ex.outcome = repaired ? ParseOutcome::Repaired : ParseOutcome::Structured;
        }
    } catch (...) {
        ex = Extracted{};
    }
    return ex;
}

Verdict grade_record(const QueryRecord& q, std::string_view raw) {
    Verdict v;
    v.query_id = q.id;
    v.puzzle = q.puzzle;
    v.kind = q.kind;
    const Extracted ex = extract_response(raw);
    v.response_chars = raw.size();
    if (ex.think) v.think_chars = ex.think->size();
    switch (q.kind) {
    case QueryKind::CellAt:
    case QueryKind::ValidAction: {
        const std::string text = ex.short_answer ? *ex.short_answer : std::string(raw);
        const bool found = q.kind == QueryKind::CellAt
                               ? [&] {
                                     for (const auto& w : words(text)) {
                                         const std::string c = canonical_word(w);
                                         if (c == "empty") return true;
                                         for (const auto& ch : q.choices) {
                                             if (canonical_word(ch) == c) return true;
                                         }
                                     }
                                     return canonical_word(text) == "empty";
                                 }()
                               : [&] {
                                     for (const auto& w : words(text)) {
                                         const std::string l = lower(w);
                                         if (l == "valid" || l == "invalid") return true;
                                     }
                                     return false;
                                 }();
        if (!found) {
            v.outcome = ParseOutcome::Unparseable;
            return v;
        }
        v.outcome = ex.short_answer ? ex.outcome : ParseOutcome::Structured;
        v.correct = q.kind == QueryKind::CellAt ? grade_cell_at(text, q.truth, q.choices) : grade_valid_action(text, q.truth);
        return v;
    }
    case QueryKind::DirectSolution:
    case QueryKind::CoTSolution: {
        v.outcome = ex.answer ? ex.outcome : ParseOutcome::Unparseable;
        if (!q.perception.empty()) {
            if (ex.perception) {
                const PerceptionGrade g = grade_perception(*ex.perception, q.perception);
                v.perception_exact = g.exact;
                v.perception_cell_accuracy = g.cell_accuracy;
            } else {
                v.perception_exact = false;
                v.perception_cell_accuracy = 0.0;
            }
        }
        if (!ex.answer || !q.instance) return v;
        try {
            const PuzzleInstance inst = instance_from_json(json::parse(q.instance->dump()));
            v.correct = grade_solution(*ex.answer, inst);
        } catch (const Error&) {
            v.correct = false;
        }
        return v;
    }
    }
    return v;
}

ojson verdict_to_json(const Verdict& v) {
    ojson j = {{"query_id", v.query_id},
               {"puzzle", v.puzzle},
               {"kind", std::string(to_string(v.kind))},
               {"correct", v.correct},
               {"parse", std::string(to_string(v.outcome))}};
    if (v.perception_exact) j["perception_exact"] = *v.perception_exact;
    if (v.perception_cell_accuracy) j["perception_cell_accuracy"] = *v.perception_cell_accuracy;
    j["response_chars"] = v.response_chars;
    if (v.think_chars) j["think_chars"] = *v.think_chars;
    return j;
}

namespace {

// Ids come from user files; quote anything CSV would split on.
std::string csv_field(const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
    std::string out = "\"";
    for (char ch : f) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string verdicts_to_csv(const std::vector<Verdict>& verdicts) {
    std::string out = "query_id,puzzle,kind,correct,parse,perception_exact,perception_cell_accuracy,response_chars,think_chars\n";
    for (const Verdict& v : verdicts) {
        out += csv_field(v.query_id) + "," + csv_field(v.puzzle) + "," + std::string(to_string(v.kind)) + "," +
               (v.correct ? "1" : "0") + "," + std::string(to_string(v.outcome)) + "," +
               (v.perception_exact ? (*v.perception_exact ? "1" : "0") : "") + "," +
               (v.perception_cell_accuracy ? num(*v.perception_cell_accuracy) : "") + "," +
               std::to_string(v.response_chars) + "," + (v.think_chars ? std::to_string(*v.think_chars) : "") + "\n";
    }
    return out;
}

PlotData plot_data(const MetricsReport& report) {
    PlotData d;
    d.bars = "puzzle,kind,mean,std,samples\n";
    for (const auto& [puzzle, kinds] : report.rates) {
        for (const auto& [kind, st] : kinds) {
            d.bars += csv_field(puzzle) + "," + kind + "," + num(st.mean) + "," + num(st.std) + "," +
                      std::to_string(st.samples) + "\n";
        }
    }
    d.radar = "tag,kind,mean\n";
    for (const auto& [tag, kinds] : report.taxonomy) {
        for (const auto& [kind, mean] : kinds) d.radar += tag + "," + kind + "," + num(mean) + "\n";
    }
    return d;
}

MetricsReport aggregate(const std::vector<Verdict>& verdicts, const Protocol& protocol) {
    if (protocol.runs < 1 || protocol.per_run < 1) throw Error(ErrorCode::InvalidArgument, "runs and per-run must be positive");
    std::map<std::pair<std::string, std::string>, std::vector<const Verdict*>> groups;
    std::map<std::string, std::vector<double>> cell_acc;
    for (const Verdict& v : verdicts) {
        groups[{v.puzzle, std::string(to_string(v.kind))}].push_back(&v);
        if (v.perception_cell_accuracy) cell_acc[v.puzzle].push_back(*v.perception_cell_accuracy);
    }
    MetricsReport report;
    report.runs = protocol.runs;
    report.per_run = protocol.per_run;
    report.lenient = !protocol.strict;
    const std::size_t expected = static_cast<std::size_t>(protocol.runs) * protocol.per_run;
    for (const auto& [key, list] : groups) {
        if (protocol.strict && list.size() != expected) {
            throw Error(ErrorCode::IncompleteRun, key.first + "/" + key.second + ": " + std::to_string(list.size()) +
                                                      " records, protocol needs " + std::to_string(protocol.runs) + " x " +
                                                      std::to_string(protocol.per_run));
        }
        RateStats stats;
        stats.samples = static_cast<int>(list.size());
        stats.partial = list.size() != expected;
        for (std::size_t start = 0; start < list.size(); start += protocol.per_run) {
            const std::size_t end = std::min(list.size(), start + protocol.per_run);
            int correct = 0;
            for (std::size_t i = start; i < end; ++i) correct += list[i]->correct ? 1 : 0;
            stats.run_rates.push_back(static_cast<double>(correct) / static_cast<double>(end - start));
        }
        stats.mean = mean_of(stats.run_rates);
        stats.std = std_of(stats.run_rates, protocol.sample_std);
        report.total_samples += stats.samples;
        report.rates[key.first][key.second] = std::move(stats);
    }
    for (const auto& [puzzle, acc] : cell_acc) report.perception_cell_accuracy[puzzle] = mean_of(acc);
    std::map<std::string, std::map<std::string, std::vector<double>>> by_tag;
    for (const auto& [puzzle, kinds] : report.rates) {
        std::vector<Tag> tags;
        try {
            tags = taxonomy_of(puzzle);
        } catch (const Error&) {
            continue;
        }
        for (Tag t : tags) {
            for (const auto& [kind, stats] : kinds) by_tag[std::string(to_string(t))][kind].push_back(stats.mean);
        }
    }
    for (const auto& [tag, kinds] : by_tag) {
        for (const auto& [kind, means] : kinds) report.taxonomy[tag][kind] = mean_of(means);
    }
    return report;
}

ojson report_to_json(const MetricsReport& r) {
    ojson j;
    j["runs"] = r.runs;
    j["per_run"] = r.per_run;
    j["total_samples"] = r.total_samples;
    j["lenient"] = r.lenient;
    ojson rates = ojson::object();
    for (const auto& [puzzle, kinds] : r.rates) {
        ojson pk = ojson::object();
        for (const auto& [kind, s] : kinds) {
            pk[kind] = {{"mean", s.mean}, {"std", s.std}, {"run_rates", s.run_rates}, {"samples", s.samples},
                        {"partial", s.partial}};
        }
        rates[puzzle] = pk;
    }
    j["rates"] = rates;
    ojson acc = ojson::object();
    for (const auto& [puzzle, a] : r.perception_cell_accuracy) acc[puzzle] = a;
    j["perception_cell_accuracy"] = acc;
    ojson tax = ojson::object();
    for (const auto& [tag, kinds] : r.taxonomy) {
        ojson tk = ojson::object();
        for (const auto& [kind, m] : kinds) tk[kind] = m;
        tax[tag] = tk;
    }
    j["taxonomy"] = tax;
    return j;
}

Reward reward(std::string_view response, const PuzzleInstance& instance, const RewardWeights& w) {
    if (w.success < 0 || w.format < 0 || w.perception < 0) {
        throw Error(ErrorCode::InvalidArgument, "reward weights must be non-negative");
    }
    const Extracted ex = extract_response(response);
    Reward r;
    r.success = ex.answer && grade_solution(*ex.answer, instance) ? 1.0 : 0.0;
    r.format = ex.tagged ? 1.0 : 0.0;
    r.perception = ex.perception && grade_perception(*ex.perception, perception_tokens(instance)).exact ? 1.0 : 0.0;
    r.total = w.success * r.success + w.format * r.format + (w.perception_requested ? w.perception * r.perception : 0.0);
    return r;
}

Reward reward(std::string_view response, const QueryRecord& query, const RewardWeights& weights) {
    if (!query.instance) throw Error(ErrorCode::MissingTarget, "query record carries no instance to grade against");
    const PuzzleInstance inst = instance_from_json(json::parse(query.instance->dump()));
    return reward(response, inst, weights);
}

std::vector<double> group_advantage(const std::vector<double>& rewards) {
    if (rewards.size() < 2) throw Error(ErrorCode::GroupTooSmall, "advantage needs at least two rollouts");
    const double m = mean_of(rewards);
    const double s = std_of(rewards, false);
    std::vector<double> out(rewards.size(), 0.0);
    if (s <= 1e-12 * std::max(1.0, std::abs(m))) return out;
    for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - m) / s;
    return out;
}

} // namespace gridforge
