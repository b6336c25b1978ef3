#pragma once
// Question-suite evaluation: 1 / 0.5 / 0 scoring, integral estimate,
// Type I/II error rates and precision/recall/F1.

#include "ina/synthesis.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ina {

enum class QuestionGroup { Content, Irrelevant, Meaningless };
std::string_view group_name(QuestionGroup group);
std::optional<QuestionGroup> parse_group(std::string_view name);

struct SuiteItem {
    QuestionGroup group = QuestionGroup::Content;
    std::string question;
    std::string gold;
    std::vector<std::string> alternatives;

    friend bool operator==(const SuiteItem&, const SuiteItem&) = default;
};

struct EvalSuite {
    std::vector<SuiteItem> items;

    friend bool operator==(const EvalSuite&, const EvalSuite&) = default;
};

/// TSV group<TAB>question<TAB>gold<TAB>alt1|alt2; '#' and blank lines skipped.
EvalSuite read_suite(std::istream& in);
void write_suite(std::ostream& out, const EvalSuite& suite);

/// Lemma sequence of a text: tagged, lower-cased, punctuation dropped.
std::vector<std::string> normalize_answer(std::string_view text, const Tagger& tagger);

/// 1 when the gold lemma sequence occurs contiguously in the prediction, 0.5
/// when an alternative does, else 0.
double score_answer(std::string_view predicted, std::string_view gold, std::span<const std::string> alternatives,
                    const Tagger& tagger);

/// Sum of points[i] * confidences[i]. Throws Error(LengthMismatch).
double integral_estimate(std::span<const double> points, std::span<const double> confidences);

struct ItemResult {
    SuiteItem item;
    std::string answer;
    bool rejected = false;
    std::string reason;
    double points = 0.0;
    double confidence = 0.0;
};

struct SuiteReport {
    std::vector<ItemResult> items;
    std::size_t questions = 0;
    std::size_t content = 0;
    std::size_t nonsense = 0;
    std::size_t answered = 0;
    std::size_t correct_count = 0;
    double integral_estimate = 0.0;
    double type1_rate = 0.0;
    double type2_rate = 0.0;
    double type1_integral = 0.0;
    double type2_integral = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Throws Error(EmptySuite) when there are no content items.
SuiteReport suite_metrics(std::span<const ItemResult> results);

/// Answers every item and scores it.
SuiteReport evaluate(const ModelBundle& bundle, const EvalSuite& suite, const RejectConfig& reject);
SuiteReport evaluate(const ModelBundle& bundle, const EvalSuite& suite);

/// Templated suite built from the bundle's own MLSUs: n/3 items per group,
/// the remainder going to the content group. Throws Error(CorpusTooSmall)
/// when the registry has fewer than two MLSUs.
EvalSuite generate_technical_suite(const ModelBundle& bundle, std::size_t n, std::uint64_t seed);

struct ReportColumn {
    std::string name;
    SuiteReport report;
};

/// Side-by-side text table, one column per report.
std::string format_report_table(std::span<const ReportColumn> columns);
nlohmann::ordered_json report_to_json(std::span<const ReportColumn> columns);

}  // namespace ina
