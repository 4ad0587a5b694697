// SPDX-License-Identifier: Apache-2.0
#include "tactix/core/answer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "tactix/core/text.hpp"

namespace tactix {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool close_enough(double a, double b) {
    if (a == b) return true;
    return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
}

std::string strip_decorations(std::string_view in) {
    std::string s(in);
    s = text::replace_all(std::move(s), "__", "");
    s.erase(std::remove(s.begin(), s.end(), '*'), s.end());
    for (std::string_view sym : {"\xE2\x82\xAC" /* euro */, "\xC2\xA3" /* pound */, "\xC2\xA5" /* yen */, "$"})
        s = text::replace_all(std::move(s), sym, " ");
    return s;
}

double to_double(std::string digits) {
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    return std::strtod(digits.c_str(), nullptr);
}

// Length of a digit run with optional ",ddd" groups starting at i (0 if none).
std::size_t scan_integer_part(std::string_view s, std::size_t i) {
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j == i) return 0;
    std::size_t lead = j - i;
    if (lead <= 3) {
        // Thousands groups: a comma followed by exactly three digits.
        while (j + 3 < s.size() + 0 && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) && is_digit(s[j + 3]) &&
               (j + 4 >= s.size() || !is_digit(s[j + 4])))
            j += 4;
    }
    return j - i;
}

}  // namespace

std::vector<double> extract_numbers(std::string_view text) {
    const std::string s = strip_decorations(text);
    std::vector<double> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t start = i;
        bool negative = false;
        if (s[i] == '-' && i + 1 < s.size() && (is_digit(s[i + 1]) || s[i + 1] == '.')) {
            bool sign_position = i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t' || s[i - 1] == '\n' ||
                                 s[i - 1] == '(' || s[i - 1] == '[' || s[i - 1] == ':' || s[i - 1] == '=';
            if (sign_position) {
                negative = true;
                ++i;
            }
        }
        std::size_t int_len = scan_integer_part(s, i);
        std::size_t j = i + int_len;
        std::size_t frac_len = 0;
        if (j + 1 < s.size() && s[j] == '.' && is_digit(s[j + 1])) {
            bool leading_dot_ok = int_len > 0 || i == 0 || !is_digit(s[i - 1]);
            if (leading_dot_ok) {
                std::size_t k = j + 1;
                while (k < s.size() && is_digit(s[k])) ++k;
                frac_len = k - j;
            }
        }
        if (int_len == 0 && frac_len == 0) {
            i = start + 1;
            continue;
        }
        std::string digits = s.substr(i, int_len + frac_len);
        double v = to_double(digits);
        out.push_back(negative ? -v : v);
        i = i + int_len + frac_len;
    }
    return out;
}

std::optional<double> parse_bare_number(std::string_view in) {
    auto s = text::trim(in);
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') i = 1;
    std::size_t int_len = scan_integer_part(s, i);
    std::size_t j = i + int_len;
    if (j < s.size() && s[j] == '.') {
        std::size_t k = j + 1;
        while (k < s.size() && is_digit(s[k])) ++k;
        if (k == j + 1) return std::nullopt;
        j = k;
    } else if (int_len == 0) {
        return std::nullopt;
    }
    if (j != s.size()) return std::nullopt;
    double v = to_double(std::string(s.substr(i, j - i)));
    return s[0] == '-' ? -v : v;
}

std::string normalize_step_name(std::string_view name) {
    std::string out;
    bool pending_space = false;
    for (char c : text::trim(name)) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::optional<std::vector<Edge>> parse_graph_answer(std::string_view in) {
    std::vector<Edge> edges;
    std::string s(in);
    std::replace(s.begin(), s.end(), ';', '\n');
    for (auto line : text::split_lines(s)) {
        auto item = text::trim(line);
        if (item.empty()) continue;
        if (item.front() == '-' && item.size() > 1 && item[1] == ' ') item = text::trim(item.substr(1));
        else if (item.front() == '*') item = text::trim(item.substr(1));
        std::size_t arrow = item.find("->");
        std::size_t arrow_len = 2;
        if (auto u = item.find("\xE2\x86\x92"); u != std::string_view::npos && (arrow == std::string_view::npos || u < arrow)) {
            arrow = u;
            arrow_len = 3;
        }
        if (arrow == std::string_view::npos) return std::nullopt;
        auto from = normalize_step_name(item.substr(0, arrow));
        auto to = normalize_step_name(item.substr(arrow + arrow_len));
        if (from.empty() || to.empty()) return std::nullopt;
        edges.push_back({from, to});
    }
    if (edges.empty()) return std::nullopt;
    return edges;
}

bool answers_equal(AnswerKind kind, const AnswerValue& gold, std::string_view got, bool fuzzy) {
    switch (kind) {
        case AnswerKind::numeric: {
            const auto* g = std::get_if<Number>(&gold);
            if (!g) return false;
            if (fuzzy) {
                auto nums = extract_numbers(got);
                return std::any_of(nums.begin(), nums.end(), [&](double v) { return close_enough(v, g->value); });
            }
            auto v = parse_bare_number(got);
            return v && close_enough(*v, g->value);
        }
        case AnswerKind::nli3: {
            const auto* g = std::get_if<Label>(&gold);
            if (!g) return false;
            return text::to_lower(text::trim(got)) == text::to_lower(text::trim(g->text));
        }
        case AnswerKind::option_index: {
            const auto* g = std::get_if<OptionIndex>(&gold);
            if (!g) return false;
            auto t = text::trim(got);
            int v = 0;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            return ec == std::errc{} && p == t.data() + t.size() && v == g->value;
        }
        case AnswerKind::graph: {
            const auto* g = std::get_if<Graph>(&gold);
            if (!g) return false;
            auto parsed = parse_graph_answer(got);
            if (!parsed) return false;
            std::set<Edge> want, have(parsed->begin(), parsed->end());
            for (const auto& e : g->edges) want.insert({normalize_step_name(e.from), normalize_step_name(e.to)});
            return want == have;
        }
    }
    return false;
}

bool answer_format_valid(AnswerKind kind, std::string_view got) {
    switch (kind) {
        case AnswerKind::numeric: return parse_bare_number(got).has_value();
        case AnswerKind::nli3: {
            auto t = text::to_lower(text::trim(got));
            return t == "agree" || t == "contradict" || t == "uncertain";
        }
        case AnswerKind::option_index: {
            auto t = text::trim(got);
            int v = 0;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            return !t.empty() && ec == std::errc{} && p == t.data() + t.size();
        }
        case AnswerKind::graph: return parse_graph_answer(got).has_value();
    }
    return false;
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[512];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc{}) return std::to_string(v);
    return std::string(buf, p);
}

}  // namespace tactix
