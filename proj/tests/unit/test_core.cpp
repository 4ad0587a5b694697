// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "tactix/core/answer.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/core/text.hpp"
#include "tactix/core/trajectory.hpp"

using namespace tactix;

namespace {

Problem gsm(double gold) {
    Problem p;
    p.id = "g1";
    p.source = Source::gsm8k;
    p.question = "How many?";
    p.gold = Number{gold};
    p.answer_kind = AnswerKind::numeric;
    p.fuzzy_eligible = true;
    return p;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> byte(0, 255);
    std::string s(len(rng), '\0');
    for (auto& c : s) c = static_cast<char>(byte(rng));
    return s;
}

// Text biased toward number-like fragments.
std::string numberish(std::mt19937_64& rng) {
    static const char* parts[] = {"1", "2", "0", ".", ",", "-", " ", "$", "**", "9", "5", "x", "000", "(", "\n", "7.25"};
    std::uniform_int_distribution<int> n(0, 12);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(parts) - 1);
    std::string s;
    for (int i = n(rng); i > 0; --i) s += parts[pick(rng)];
    return s;
}

}  // namespace

TEST_CASE("validate_problem") {
    CHECK(validate_problem(gsm(37)).empty());

    Problem opt;
    opt.id = "r1";
    opt.source = Source::reclor;
    opt.statements = {"a", "b"};
    opt.gold = OptionIndex{5};
    opt.answer_kind = AnswerKind::option_index;
    CHECK(validate_problem(opt) == std::vector<std::string>{"gold out of range"});

    Problem nli;
    nli.id = "f1";
    nli.source = Source::folio;
    nli.gold = Label{"Maybe"};
    nli.answer_kind = AnswerKind::nli3;
    CHECK(validate_problem(nli) == std::vector<std::string>{"gold not in label set"});

    Problem g;
    g.id = "p1";
    g.source = Source::proscript;
    g.answer_kind = AnswerKind::graph;
    g.gold = Graph{{{"a", "A "}}};
    CHECK_FALSE(validate_problem(g).empty());

    auto fz = nli;
    fz.gold = Label{"Agree"};
    fz.fuzzy_eligible = true;
    CHECK(validate_problem(fz).size() == 1);
}

TEST_CASE("validate_problem hybrid provenance") {
    Problem h;
    h.id = "h1";
    h.source = Source::hybrid;
    h.answer_kind = AnswerKind::option_index;
    h.statements = {"s1", "s2", "s3"};
    h.gold = OptionIndex{2};
    HybridInfo info;
    info.difficulty = Difficulty::GFX;
    info.option_sources = {{"f", Source::folio, "predicate_logic_z3", false, "", "", {}},
                           {"g", Source::gsm8k, "math", true, "", "", {}},
                           {"x", Source::folio, "predicate_logic_z3", false, "", "", {}}};
    h.hybrid = info;
    CHECK(validate_problem(h).empty());

    h.hybrid->option_sources[2].dataset = Source::reclor;
    CHECK(validate_problem(h).size() == 1);
    h.hybrid->option_sources[2].dataset = Source::gsm8k;
    h.hybrid->option_sources[1].is_correct = false;
    CHECK_FALSE(validate_problem(h).empty());
}

TEST_CASE("extract_numbers") {
    CHECK(extract_numbers("The answer is **40**.") == std::vector<double>{40});
    CHECK(extract_numbers("The total dollar amount in a stack containing two thirds of the 9,300 pennies is $62.00.") ==
          std::vector<double>{9300, 62});
    CHECK(extract_numbers("no digits here").empty());
    CHECK(extract_numbers("James made a total commission of $17,500 from selling 10 cars.") ==
          std::vector<double>{17500, 10});
    CHECK(extract_numbers("net loss of -120.5 or (-3)") == std::vector<double>{-120.5, -3});
    CHECK(extract_numbers("pages 3-5") == std::vector<double>{3, 5});
    CHECK(extract_numbers("1,23") == std::vector<double>{1, 23});
    CHECK(extract_numbers("\xE2\x82\xAC" "5 and .5") == std::vector<double>{5, 0.5});
}

TEST_CASE("answers_equal on appendix outputs") {
    const AnswerValue five = Number{5};
    const std::string rain = "The rainfall on Tuesday is 5 inches.";
    CHECK(answers_equal(AnswerKind::numeric, five, rain, true));
    CHECK_FALSE(answers_equal(AnswerKind::numeric, five, rain, false));
    CHECK_FALSE(answers_equal(AnswerKind::numeric, Number{140}, "The answer is **40**.", true));
    CHECK(answers_equal(AnswerKind::numeric, Number{62},
                        "The total dollar amount in a stack containing two thirds of the 9,300 pennies is $62.00.", true));
    CHECK(answers_equal(AnswerKind::numeric, Number{180000}, "The answer to the question is **180000 meters**.", true));
    CHECK(answers_equal(AnswerKind::numeric, Number{17500}, " 17,500 ", false));
    CHECK(answers_equal(AnswerKind::numeric, Number{42}, "42.0", false));
    CHECK_FALSE(answers_equal(AnswerKind::numeric, Number{1248}, "42.0", false));
}

TEST_CASE("answers_equal labels and options") {
    CHECK(answers_equal(AnswerKind::nli3, Label{"Agree"}, "  agree\n", false));
    CHECK_FALSE(answers_equal(AnswerKind::nli3, Label{"Agree"}, "I agree", false));
    CHECK(answers_equal(AnswerKind::option_index, OptionIndex{2}, "2", false));
    CHECK_FALSE(answers_equal(AnswerKind::option_index, OptionIndex{2}, "Option 2", false));
    CHECK_FALSE(answers_equal(AnswerKind::option_index, Number{2}, "2", false));
}

// Independent oracle: compare edge sets by brute-force mutual containment.
static bool edge_oracle(std::vector<std::pair<std::string, std::string>> a,
                        std::vector<std::pair<std::string, std::string>> b) {
    auto norm = [](std::string s) {
        std::string out;
        for (char c : s)
            if (c != ' ') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return out;
    };
    for (auto* v : {&a, &b})
        for (auto& e : *v) e = {norm(e.first), norm(e.second)};
    auto contains = [](const auto& xs, const auto& ys) {
        for (const auto& y : ys) {
            bool found = false;
            for (const auto& x : xs) found = found || x == y;
            if (!found) return false;
        }
        return true;
    };
    return contains(a, b) && contains(b, a);
}

TEST_CASE("graph answers compare as edge sets") {
    const AnswerValue gold = Graph{{{"a", "b"}, {"b", "c"}}};
    CHECK(answers_equal(AnswerKind::graph, gold, "b -> c\na -> b", false));
    CHECK(edge_oracle({{"a", "b"}, {"b", "c"}}, {{"b", "c"}, {"a", "b"}}));
    CHECK(answers_equal(AnswerKind::graph, gold, "A \xE2\x86\x92 B; b->C", false));
    CHECK_FALSE(answers_equal(AnswerKind::graph, gold, "a -> b", false));
    CHECK_FALSE(answers_equal(AnswerKind::graph, gold, "a then b", false));

    std::mt19937_64 rng(7);
    const char* names[] = {"a", "b", "c", "d"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::pair<std::string, std::string>> x, y;
        std::uniform_int_distribution<int> n(1, 4), k(0, 3);
        for (int i = n(rng); i > 0; --i) x.emplace_back(names[k(rng)], names[k(rng)]);
        for (int i = n(rng); i > 0; --i) y.emplace_back(names[k(rng)], names[k(rng)]);
        Graph g;
        for (auto& [f, t] : x) g.edges.push_back({f, t});
        std::string got;
        for (auto& [f, t] : y) got += f + " -> " + t + "\n";
        CHECK(answers_equal(AnswerKind::graph, g, got, false) == edge_oracle(x, y));
    }
}

TEST_CASE("property: fuzzy dominance and totality") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-1000, 1000);
    for (int i = 0; i < 3000; ++i) {
        std::string got = (i % 2) ? random_bytes(rng, 40) : numberish(rng);
        double g = (i % 3) ? std::round(val(rng)) : val(rng);
        if (i % 5 == 0) got = format_number(g);
        bool exact = answers_equal(AnswerKind::numeric, Number{g}, got, false);
        bool fuzzy = answers_equal(AnswerKind::numeric, Number{g}, got, true);
        CHECK((!exact || fuzzy));
        CHECK(answers_equal(AnswerKind::numeric, Number{g}, got, false) == exact);
        for (auto k : {AnswerKind::nli3, AnswerKind::graph, AnswerKind::option_index}) {
            (void)answers_equal(k, Label{"Agree"}, got, false);
            (void)answer_format_valid(k, got);
        }
    }
}

TEST_CASE("property: extract_numbers idempotent under re-serialization") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 3000; ++i) {
        std::string s = (i % 2) ? random_bytes(rng, 30) : numberish(rng);
        auto first = extract_numbers(s);
        std::vector<std::string> parts;
        for (double v : first) parts.push_back(format_number(v));
        auto second = extract_numbers(text::join(parts, " "));
        CHECK(first == second);
    }
}

TEST_CASE("format_number") {
    CHECK(format_number(62.0) == "62");
    CHECK(format_number(-0.5) == "-0.5");
    CHECK(format_number(17500) == "17500");
    CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("problem_text layouts") {
    auto p = gsm(162);
    p.question = "How many points did the third bowler score?";
    p.context = "A team scored 810 points.";
    CHECK(problem_text(p) ==
          "Answer the question below.\n\n### Question:\nA team scored 810 points. How many points did the third bowler score?");
    Problem r;
    r.source = Source::reclor;
    r.context = "C";
    r.question = "Q";
    r.statements = {"x", "None of the above"};
    CHECK(problem_text(r) ==
          "Answer the question below by choosing the correct statement.\n\n### Context:\nC\n\n### Question:\nQ\n\n"
          "### Statements:\n1. x\n2. None of the above");
}

TEST_CASE("text helpers") {
    CHECK(text::split_lines("a\nb\n") == std::vector<std::string_view>{"a", "b"});
    CHECK(text::split_lines("a\n\nb") == std::vector<std::string_view>{"a", "", "b"});
    CHECK(text::trim_blank_lines("\n\n  x\ny\n\n") == "  x\ny");
    CHECK(text::fnv1a_hex("") == "cbf29ce484222325");
    CHECK(text::fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("step all_error") {
    Step s;
    CHECK_FALSE(s.all_error());
    s.observations = {{"Action parser", ObsStatus::error, "x"}};
    CHECK(s.all_error());
    s.observations.push_back({"Runner", ObsStatus::ok, "y"});
    CHECK_FALSE(s.all_error());
}
