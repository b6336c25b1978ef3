#include "ina/evaluation.hpp"

#include "ina/error.hpp"
#include "ina/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace ina {

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            out.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    out.push_back(std::move(current));
    return out;
}

bool contains_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
    if (needle.empty()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

std::string join_words(std::span<const Token> tokens, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t k = from; k < to; ++k) {
        if (!out.empty()) out += ' ';
        out += tokens[k].surface;
    }
    return out;
}

std::string capitalized(std::string s) {
    if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

std::string garbage_word(std::mt19937_64& rng) {
    static constexpr std::string_view consonants = "bcdfghjklmnpqrstvwxz";
    static constexpr std::string_view vowels = "aeiouy";
    std::uniform_int_distribution<std::size_t> len(2, 4);
    std::string w;
    const auto syllables = len(rng);
    for (std::size_t s = 0; s < syllables; ++s) {
        w += consonants[std::uniform_int_distribution<std::size_t>(0, consonants.size() - 1)(rng)];
        w += vowels[std::uniform_int_distribution<std::size_t>(0, vowels.size() - 1)(rng)];
    }
    w += consonants[std::uniform_int_distribution<std::size_t>(0, consonants.size() - 1)(rng)];
    return w;
}

std::optional<SuiteItem> content_item(const Mlsu& unit, std::mt19937_64& rng) {
    const auto& seg = unit.segment;
    const auto v = unit.anchor;
    if (v + 1 < seg.size()) {
        const std::string wh = seg[v + 1].pos == PosTag::Prep ? "where" : "what";
        std::string q = wh;
        const auto left = join_words(seg, 0, v + 1);
        q += ' ' + left + '?';
        return SuiteItem{QuestionGroup::Content, capitalized(q), join_words(seg, v + 1, seg.size()), {}};
    }
    if (v > 0) {
        const bool person = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
        return SuiteItem{QuestionGroup::Content, capitalized(std::string(person ? "who" : "what") + ' ' + seg[v].surface + '?'),
                         join_words(seg, 0, v), {}};
    }
    return std::nullopt;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string percent(double v) { return fmt("%.1f%%", 100.0 * v); }

}  // namespace

std::string_view group_name(QuestionGroup group) {
    switch (group) {
        case QuestionGroup::Content: return "content";
        case QuestionGroup::Irrelevant: return "irrelevant";
        case QuestionGroup::Meaningless: return "meaningless";
    }
    return "content";
}

std::optional<QuestionGroup> parse_group(std::string_view name) {
    for (auto g : {QuestionGroup::Content, QuestionGroup::Irrelevant, QuestionGroup::Meaningless})
        if (group_name(g) == name) return g;
    return std::nullopt;
}

EvalSuite read_suite(std::istream& in) {
    EvalSuite suite;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto cols = split_on(line, '\t');
        if (cols.size() < 2 || cols.size() > 4)
            throw Error(ErrorCode::ParseError, "suite line " + std::to_string(line_no) + ": expected 2-4 columns");
        cols.resize(4);
        const auto group = parse_group(cols[0]);
        if (!group) throw Error(ErrorCode::ParseError, "suite line " + std::to_string(line_no) + ": unknown group " + cols[0]);
        SuiteItem item{*group, cols[1], cols[2], {}};
        if (!cols[3].empty()) item.alternatives = split_on(cols[3], '|');
        if (item.group == QuestionGroup::Content && item.gold.empty())
            throw Error(ErrorCode::ParseError, "suite line " + std::to_string(line_no) + ": content item without gold");
        suite.items.push_back(std::move(item));
    }
    return suite;
}

void write_suite(std::ostream& out, const EvalSuite& suite) {
    for (const auto& item : suite.items) {
        out << group_name(item.group) << '\t' << item.question << '\t' << item.gold << '\t';
        for (std::size_t k = 0; k < item.alternatives.size(); ++k) out << (k ? "|" : "") << item.alternatives[k];
        out << '\n';
    }
}

std::vector<std::string> normalize_answer(std::string_view text, const Tagger& tagger) {
    std::vector<std::string> out;
    for (const auto& t : tokenize_and_tag(text, tagger)) out.push_back(t.lemma);
    return out;
}

double score_answer(std::string_view predicted, std::string_view gold, std::span<const std::string> alternatives,
                    const Tagger& tagger) {
    const auto pred = normalize_answer(predicted, tagger);
    if (contains_run(pred, normalize_answer(gold, tagger))) return 1.0;
    for (const auto& alt : alternatives)
        if (contains_run(pred, normalize_answer(alt, tagger))) return 0.5;
    return 0.0;
}

double integral_estimate(std::span<const double> points, std::span<const double> confidences) {
    if (points.size() != confidences.size())
        throw Error(ErrorCode::LengthMismatch, std::to_string(points.size()) + " points vs " +
                                                   std::to_string(confidences.size()) + " confidences");
    double sum = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) sum += points[k] * confidences[k];
    return sum;
}

SuiteReport suite_metrics(std::span<const ItemResult> results) {
    SuiteReport r;
    r.items.assign(results.begin(), results.end());
    r.questions = results.size();

    std::vector<double> points, confidences;
    double content_mass = 0.0, content_error_mass = 0.0, answered_mass = 0.0, nonsense_mass = 0.0;
    std::size_t content_errors = 0, nonsense_answered = 0;
    for (const auto& item : results) {
        points.push_back(item.points);
        confidences.push_back(item.confidence);
        const bool content = item.item.group == QuestionGroup::Content;
        const bool correct = content && item.points == 1.0;
        if (!item.rejected) {
            ++r.answered;
            answered_mass += item.confidence;
        }
        if (correct && !item.rejected) ++r.correct_count;
        if (content) {
            ++r.content;
            content_mass += item.confidence;
            if (item.points < 1.0) {
                ++content_errors;
                content_error_mass += item.confidence;
            }
        } else {
            ++r.nonsense;
            if (!item.rejected) {
                ++nonsense_answered;
                nonsense_mass += item.confidence;
            }
        }
    }
    if (r.content == 0) throw Error(ErrorCode::EmptySuite, "suite has no content questions");

    r.integral_estimate = integral_estimate(points, confidences);
    r.type1_rate = static_cast<double>(content_errors) / static_cast<double>(r.content);
    r.type2_rate = r.nonsense ? static_cast<double>(nonsense_answered) / static_cast<double>(r.nonsense) : 0.0;
    r.type1_integral = content_mass > 0.0 ? content_error_mass / content_mass : 0.0;
    r.type2_integral = answered_mass > 0.0 ? nonsense_mass / answered_mass : 0.0;
    r.precision = r.answered ? static_cast<double>(r.correct_count) / static_cast<double>(r.answered) : 0.0;
    r.recall = static_cast<double>(r.correct_count) / static_cast<double>(r.content);
    r.f1 = f1_score(r.precision, r.recall);
    return r;
}

SuiteReport evaluate(const ModelBundle& bundle, const EvalSuite& suite) {
    return evaluate(bundle, suite, reject_config_for(bundle));
}

SuiteReport evaluate(const ModelBundle& bundle, const EvalSuite& suite, const RejectConfig& reject) {
    std::vector<ItemResult> results;
    results.reserve(suite.items.size());
    for (const auto& item : suite.items) {
        ItemResult result{item, {}, true, {}, 0.0, 0.0};
        try {
            const auto trace = synthesize(bundle, item.question, reject);
            result.rejected = trace.rejected;
            result.reason = trace.rejected ? std::string(reject_reason_name(trace.reason)) : std::string();
            result.answer = trace.final_answer;
            result.confidence = trace.overall_confidence;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyQuestion) throw;
            result.reason = std::string(to_string(e.code()));
        }
        if (item.group == QuestionGroup::Content && !result.rejected)
            result.points = score_answer(result.answer, item.gold, item.alternatives, bundle.lexicon());
        results.push_back(std::move(result));
    }
    return suite_metrics(results);
}

EvalSuite generate_technical_suite(const ModelBundle& bundle, std::size_t n, std::uint64_t seed) {
    const auto& registry = bundle.registry();
    if (registry.size() < 2)
        throw Error(ErrorCode::CorpusTooSmall, "need at least 2 MLSUs, have " + std::to_string(registry.size()));

    std::vector<const Mlsu*> units;
    std::vector<std::string> vocabulary;
    std::set<std::string> known;
    for (const auto& [id, unit] : registry) {
        units.push_back(&unit);
        for (const auto& t : unit.segment) {
            known.insert(to_lower_utf8(t.surface));
            known.insert(t.lemma);
            if (std::find(vocabulary.begin(), vocabulary.end(), t.surface) == vocabulary.end())
                vocabulary.push_back(t.surface);
        }
    }
    for (const auto& e : bundle.lexicon().entries()) known.insert(e.surface);

    std::mt19937_64 rng(seed);
    const std::size_t per_group = n / 3;
    const std::size_t content_n = n - 2 * per_group;
    EvalSuite suite;

    std::vector<const Mlsu*> usable;
    for (const auto* u : units)
        if (u->segment.size() > 1) usable.push_back(u);
    if (usable.empty() && content_n > 0)
        throw Error(ErrorCode::CorpusTooSmall, "no MLSU has more than one word");
    std::uniform_int_distribution<std::size_t> pick_unit(0, usable.empty() ? 0 : usable.size() - 1);
    for (std::size_t k = 0; k < content_n; ++k) suite.items.push_back(*content_item(*usable[pick_unit(rng)], rng));

    const auto& constructions = interrogative_constructions();
    std::uniform_int_distribution<std::size_t> pick_wh(0, constructions.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_word(0, vocabulary.size() - 1);
    std::uniform_int_distribution<std::size_t> length(3, 5);
    for (std::size_t k = 0; k < per_group; ++k) {
        std::string q = constructions[pick_wh(rng)];
        for (std::size_t w = length(rng); w > 0; --w) q += ' ' + to_lower_utf8(vocabulary[pick_word(rng)]);
        suite.items.push_back({QuestionGroup::Irrelevant, capitalized(q) + '?', {}, {}});
    }
    for (std::size_t k = 0; k < per_group; ++k) {
        std::string q;
        for (std::size_t w = length(rng); w > 0; --w) {
            std::string word;
            do word = garbage_word(rng);
            while (known.count(word) || bundle.lexicon().lookup(word));
            q += (q.empty() ? "" : " ") + word;
        }
        suite.items.push_back({QuestionGroup::Meaningless, capitalized(q) + '?', {}, {}});
    }
    return suite;
}

std::string format_report_table(std::span<const ReportColumn> columns) {
    std::ostringstream os;
    os << "Integral measures are a reconstruction. Type I: confidence on content errors over all content\n"
          "confidence. Type II: confidence on answered nonsense over all answered confidence.\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-34s", "");
    os << buf;
    for (const auto& c : columns) {
        std::snprintf(buf, sizeof buf, "%16s", c.name.c_str());
        os << buf;
    }
    os << '\n';

    auto row = [&](const char* label, auto&& value) {
        std::snprintf(buf, sizeof buf, "%-34s", label);
        os << buf;
        for (const auto& c : columns) {
            std::snprintf(buf, sizeof buf, "%16s", value(c.report).c_str());
            os << buf;
        }
        os << '\n';
    };
    row("Questions asked", [](const SuiteReport& r) { return std::to_string(r.questions); });
    row("Content questions", [](const SuiteReport& r) { return std::to_string(r.content); });
    row("Answered", [](const SuiteReport& r) { return std::to_string(r.answered); });
    row("Correct answers", [](const SuiteReport& r) { return std::to_string(r.correct_count); });
    row("Integral estimate", [](const SuiteReport& r) { return fmt("%.3f", r.integral_estimate); });
    row("Type I error", [](const SuiteReport& r) { return percent(r.type1_rate); });
    row("Type I error (integral measure)", [](const SuiteReport& r) { return percent(r.type1_integral); });
    row("Type II error", [](const SuiteReport& r) { return percent(r.type2_rate); });
    row("Type II error (integral measure)", [](const SuiteReport& r) { return percent(r.type2_integral); });
    row("Precision", [](const SuiteReport& r) { return fmt("%.5f", r.precision); });
    row("Recall", [](const SuiteReport& r) { return fmt("%.5f", r.recall); });
    row("F-measure", [](const SuiteReport& r) { return fmt("%.5f", r.f1); });
    return os.str();
}

nlohmann::ordered_json report_to_json(std::span<const ReportColumn> columns) {
    using json = nlohmann::ordered_json;
    json out = {{"integral_measure",
                 "type1: confidence on content errors / content confidence; "
                 "type2: confidence on answered nonsense / answered confidence"},
                {"columns", json::array()}};
    for (const auto& c : columns) {
        const auto& r = c.report;
        json items = json::array();
        for (const auto& i : r.items)
            items.push_back({{"group", group_name(i.item.group)},
                             {"question", i.item.question},
                             {"gold", i.item.gold},
                             {"answer", i.answer},
                             {"rejected", i.rejected},
                             {"reason", i.reason},
                             {"points", i.points},
                             {"confidence", i.confidence}});
        out["columns"].push_back({{"name", c.name},
                                  {"questions", r.questions},
                                  {"content", r.content},
                                  {"nonsense", r.nonsense},
                                  {"answered", r.answered},
                                  {"correct", r.correct_count},
                                  {"integral_estimate", r.integral_estimate},
                                  {"type1_rate", r.type1_rate},
                                  {"type1_integral", r.type1_integral},
                                  {"type2_rate", r.type2_rate},
                                  {"type2_integral", r.type2_integral},
                                  {"precision", r.precision},
                                  {"recall", r.recall},
                                  {"f1", r.f1},
                                  {"items", std::move(items)}});
    }
    return out;
}

}  // namespace ina
