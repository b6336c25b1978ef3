#include "ina/error.hpp"
#include "ina/log.hpp"
#include "ina/pipeline.hpp"

#include <algorithm>
#include <istream>
#include <set>

namespace ina {

namespace {

void push_unique(std::vector<std::string>& out, std::string value) {
    if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(std::move(value));
}

// Answer-word priority: the predicate first, then its arguments, then descriptions.
constexpr std::array<PosTag, 9> kAnswerPriority = {PosTag::Verb,       PosTag::Noun,   PosTag::Pron,
                                                   PosTag::Adj,        PosTag::Num,    PosTag::Participle,
                                                   PosTag::Gerund,     PosTag::Adv,    PosTag::Other};

std::optional<PosTag> best_by_priority(const std::vector<PosTag>& tags) {
    for (auto candidate : kAnswerPriority)
        if (std::find(tags.begin(), tags.end(), candidate) != tags.end()) return candidate;
    return std::nullopt;
}

// Features of the token model for the item at position `target` of a clause,
// using the two clause neighbours on the side the walk comes from.
std::vector<std::string> next_context(const Mlsu& unit, std::ptrdiff_t target) {
    std::vector<std::string> out;
    for (std::ptrdiff_t k = std::max<std::ptrdiff_t>(0, target - 2); k < target; ++k)
        push_unique(out, token_feature(unit.segment[k].lemma, unit.segment[k].pos));
    return out;
}

std::vector<std::string> prev_context(const Mlsu& unit, std::ptrdiff_t target) {
    std::vector<std::string> out;
    const auto n = static_cast<std::ptrdiff_t>(unit.segment.size());
    for (std::ptrdiff_t k = std::min(n - 1, target + 2); k > target; --k)
        push_unique(out, token_feature(unit.segment[k].lemma, unit.segment[k].pos));
    return out;
}

std::vector<std::string> context_without(const Mlsu& unit, const std::set<std::string>& consumed) {
    std::vector<std::string> out;
    for (const auto& t : unit.context_tokens)
        if (t != kStartToken && t != kEndToken && !consumed.count(t)) out.push_back(t);
    return out;
}

std::vector<std::string> clause_lemmas(const Mlsu& unit, std::ptrdiff_t from, std::ptrdiff_t to) {
    std::vector<std::string> out;
    const auto& anchor = unit.anchor_token().lemma;
    for (std::ptrdiff_t k = from; k <= to; ++k)
        if (unit.segment[k].lemma != anchor) push_unique(out, unit.segment[k].lemma);
    return out;
}

// Token set the walk still holds when it is about to produce position `target`
// (segment.size() stands for END). Positions right of the anchor follow the
// rightward walk, the rest use the clause remainder.
std::vector<std::string> next_mask(const Mlsu& unit, std::ptrdiff_t target) {
    const auto v = static_cast<std::ptrdiff_t>(unit.anchor);
    const auto n = static_cast<std::ptrdiff_t>(unit.segment.size());
    std::vector<std::string> out;
    if (target > v) {
        std::set<std::string> consumed;
        for (std::ptrdiff_t k = v + 1; k < target; ++k) consumed.insert(unit.segment[k].lemma);
        out = context_without(unit, consumed);
    } else {
        out = clause_lemmas(unit, target, n - 1);
    }
    out.push_back(kEndToken);
    return out;
}

std::vector<std::string> prev_mask(const Mlsu& unit, std::ptrdiff_t target) {
    const auto v = static_cast<std::ptrdiff_t>(unit.anchor);
    const auto n = static_cast<std::ptrdiff_t>(unit.segment.size());
    std::vector<std::string> out;
    if (target < v) {
        std::set<std::string> consumed;
        for (std::ptrdiff_t k = v + 1; k < n; ++k) consumed.insert(unit.segment[k].lemma);
        for (std::ptrdiff_t k = target + 1; k < v; ++k) consumed.insert(unit.segment[k].lemma);
        out = context_without(unit, consumed);
    } else {
        out = clause_lemmas(unit, 0, target);
    }
    out.push_back(kStartToken);
    return out;
}

std::map<std::string, PosTag> token_pos_map(const Mlsu& unit) {
    std::map<std::string, PosTag> out;
    for (const auto& t : unit.segment) out.try_emplace(t.lemma, t.pos);
    return out;
}

std::set<std::string> unit_lemmas(const Mlsu& unit) {
    std::set<std::string> out;
    for (const auto& t : unit.segment) out.insert(t.lemma);
    return out;
}

const Mlsu* best_matching_unit(const MlsuRegistry& registry, std::span<const Token> answer) {
    const auto wanted = content_lemmas(answer);
    const Mlsu* best = nullptr;
    std::size_t best_overlap = 0;
    for (const auto& [id, unit] : registry) {
        const auto lemmas = unit_lemmas(unit);
        const auto overlap = static_cast<std::size_t>(
            std::count_if(wanted.begin(), wanted.end(), [&](const std::string& l) { return lemmas.count(l) != 0; }));
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best = &unit;
        }
    }
    return best;
}

void append_token_rows(const Mlsu& unit, std::vector<TrainingRow>& next_rows, std::vector<TrainingRow>& prev_rows) {
    const auto n = static_cast<std::ptrdiff_t>(unit.segment.size());
    for (std::ptrdiff_t k = 0; k <= n; ++k) {
        auto features = next_context(unit, k);
        if (features.empty()) continue;
        next_rows.push_back({ModelId::NextToken, std::move(features), k < n ? unit.segment[k].lemma : kEndToken,
                             next_mask(unit, k), std::nullopt});
    }
    for (std::ptrdiff_t k = n - 1; k >= -1; --k) {
        auto features = prev_context(unit, k);
        if (features.empty()) continue;
        prev_rows.push_back({ModelId::PrevToken, std::move(features), k >= 0 ? unit.segment[k].lemma : kStartToken,
                             prev_mask(unit, k), std::nullopt});
    }
}

void append_word_form_rows(const Mlsu& unit, std::vector<TrainingRow>& next_rows,
                           std::vector<TrainingRow>& prev_rows) {
    const auto n = static_cast<std::ptrdiff_t>(unit.segment.size());
    const auto v = static_cast<std::ptrdiff_t>(unit.anchor);
    const auto& seg = unit.segment;
    const auto lemma_pos = token_pos_map(unit);

    for (std::ptrdiff_t k = 1; k < n; ++k) {
        std::vector<std::string> adjacent{seg[k - 1].surface};
        if (k >= 2) adjacent.push_back(seg[k - 2].surface);
        TrainingRow row{ModelId::WordFormNext,
                        word_form_features(adjacent, seg[k].lemma, seg[k].pos, unit.verb()), seg[k].surface, {},
                        std::nullopt};
        if (k > v)
            row.upstream = UpstreamLink{ModelId::NextToken, next_context(unit, k), next_mask(unit, k),
                                        {"t=" + seg[k].lemma, "p=" + std::string(pos_name(seg[k].pos))}, lemma_pos};
        next_rows.push_back(std::move(row));
    }
    for (std::ptrdiff_t k = n - 2; k >= 0; --k) {
        std::vector<std::string> adjacent{seg[k + 1].surface};
        if (k + 2 < n) adjacent.push_back(seg[k + 2].surface);
        TrainingRow row{ModelId::WordFormPrev,
                        word_form_features(adjacent, seg[k].lemma, seg[k].pos, unit.verb()), seg[k].surface, {},
                        std::nullopt};
        if (k < v)
            row.upstream = UpstreamLink{ModelId::PrevToken, prev_context(unit, k), prev_mask(unit, k),
                                        {"t=" + seg[k].lemma, "p=" + std::string(pos_name(seg[k].pos))}, lemma_pos};
        prev_rows.push_back(std::move(row));
    }
}

// Held-out scoring masks word-form rows to the forms seen for the row's lemma.
void fill_form_candidates(std::vector<TrainingRow>& rows) {
    std::map<std::string, std::vector<std::string>> forms;
    auto lemma_of = [](const TrainingRow& row) {
        for (const auto& f : row.features)
            if (f.starts_with("t=")) return f.substr(2);
        return std::string();
    };
    for (const auto& row : rows) push_unique(forms[lemma_of(row)], row.label);
    for (auto& row : rows) row.candidates = forms[lemma_of(row)];
}

}  // namespace

std::string token_feature(const std::string& lemma, PosTag pos) { return lemma + "_" + std::string(pos_name(pos)); }

std::string pos_feature(PosTag pos) { return "pos=" + std::string(pos_name(pos)); }

std::vector<std::string> answer_pos_features(const QuestionSplit& split) {
    std::vector<std::string> out;
    if (split.has_interrogative()) out.push_back(split.interrogative);
    for (const auto& t : split.informative) push_unique(out, std::string(pos_name(t.pos)));
    return out;
}

std::vector<std::string> content_lemmas(std::span<const Token> tokens) {
    std::vector<std::string> out;
    for (const auto& t : tokens)
        if (is_content(t.pos)) push_unique(out, t.lemma);
    return out;
}

std::vector<std::string> word_form_features(std::span<const std::string> adjacent, const std::string& lemma,
                                            PosTag pos, const std::string& verb) {
    std::vector<std::string> out;
    if (!adjacent.empty()) out.push_back("w1=" + to_lower_utf8(adjacent[0]));
    if (adjacent.size() > 1) out.push_back("w2=" + to_lower_utf8(adjacent[1]));
    out.push_back("t=" + lemma);
    out.push_back("p=" + std::string(pos_name(pos)));
    out.push_back("v=" + to_lower_utf8(verb));
    return out;
}

std::vector<QaPair> read_qa_pairs(std::istream& in) {
    std::vector<QaPair> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
            throw Error(ErrorCode::ParseError, "QA line " + std::to_string(line_no) + ": expected question<TAB>answer");
        out.push_back({line.substr(0, tab), line.substr(tab + 1)});
    }
    return out;
}

std::optional<PosTag> missing_answer_pos(const QuestionSplit& question, std::span<const Token> answer) {
    const bool taggable = std::any_of(answer.begin(), answer.end(), [](const Token& t) { return t.pos != PosTag::Other; });
    if (!taggable) return std::nullopt;

    std::set<std::string> asked;
    for (const auto& t : question.informative) asked.insert(t.lemma);

    std::vector<PosTag> missing;
    std::vector<PosTag> all;
    for (const auto& t : answer) {
        all.push_back(t.pos);
        if (!asked.count(t.lemma)) missing.push_back(t.pos);
    }
    if (auto tag = best_by_priority(missing)) return tag;
    if (auto tag = best_by_priority(all)) return tag;
    return PosTag::Any;
}

std::vector<TrainingRow> build_training_rows(const MlsuRegistry& registry, std::span<const QaPair> qa_pairs,
                                             const Tagger& tagger) {
    std::vector<TrainingRow> pos_rows, mlsu_rows, next_rows, prev_rows, form_next_rows, form_prev_rows;

    for (const auto& [id, unit] : registry) {
        std::vector<std::string> features;
        std::vector<std::string> pos_features;
        for (const auto& t : unit.segment) {
            if (!is_content(t.pos)) continue;
            push_unique(features, t.lemma);
            push_unique(pos_features, pos_feature(t.pos));
        }
        features.insert(features.end(), pos_features.begin(), pos_features.end());
        mlsu_rows.push_back({ModelId::Mlsu, std::move(features), mlsu_class_id(id), {}, std::nullopt});
    }

    for (const auto& qa : qa_pairs) {
        QuestionSplit split;
        try {
            split = split_question(qa.question, tagger);
        } catch (const Error& e) {
            log::warn("skipping QA pair '" + qa.question + "': " + e.what());
            continue;
        }
        const auto answer = tokenize_and_tag(qa.answer, tagger);
        const auto label = missing_answer_pos(split, answer);
        if (!label) {
            log::warn("NoVerbInAnswer: answer '" + qa.answer + "' has no taggable content, skipped");
            continue;
        }
        auto pos_query = answer_pos_features(split);
        if (pos_query.empty()) continue;
        pos_rows.push_back({ModelId::AnswerPos, pos_query, std::string(pos_code(*label)), {}, std::nullopt});

        const Mlsu* target = best_matching_unit(registry, answer);
        if (!target) {
            log::warn("answer '" + qa.answer + "' shares no content word with the corpus; no MLSU row");
            continue;
        }
        const auto lemmas = unit_lemmas(*target);
        std::vector<std::string> features;
        for (const auto& l : content_lemmas(split.informative))
            if (lemmas.count(l)) features.push_back(l);
        const auto gold = pos_feature(*label);
        features.push_back(gold);
        mlsu_rows.push_back({ModelId::Mlsu, std::move(features), mlsu_class_id(target->id), {},
                             UpstreamLink{ModelId::AnswerPos, std::move(pos_query), {}, {gold}, {}}});
    }

    for (const auto& [id, unit] : registry) {
        append_token_rows(unit, next_rows, prev_rows);
        append_word_form_rows(unit, form_next_rows, form_prev_rows);
    }
    fill_form_candidates(form_next_rows);
    fill_form_candidates(form_prev_rows);

    std::vector<TrainingRow> out;
    for (auto* group : {&pos_rows, &mlsu_rows, &next_rows, &prev_rows, &form_next_rows, &form_prev_rows})
        std::move(group->begin(), group->end(), std::back_inserter(out));
    return out;
}

}  // namespace ina
