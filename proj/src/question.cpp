#include "ina/question.hpp"

#include "ina/error.hpp"

#include <algorithm>
#include <sstream>

namespace ina {

std::string_view role_code(AnswerRole role) {
    switch (role) {
        case AnswerRole::Object: return "O";
        case AnswerRole::ObjectDescription: return "OD";
        case AnswerRole::Subject: return "S";
        case AnswerRole::SubjectDescription: return "SD";
        case AnswerRole::Action: return "A";
        case AnswerRole::ActionDescription: return "AD";
        case AnswerRole::Other: return "OT";
    }
    return "OT";
}

std::vector<PosTag> role_to_pos(AnswerRole role) {
    switch (role) {
        case AnswerRole::Object:
        case AnswerRole::Subject:
            return {PosTag::Noun, PosTag::Pron};
        case AnswerRole::ObjectDescription:
        case AnswerRole::SubjectDescription:
            return {PosTag::Adj, PosTag::Num, PosTag::Participle, PosTag::Gerund};
        case AnswerRole::Action:
            return {PosTag::Verb};
        case AnswerRole::ActionDescription:
            return {PosTag::Adv, PosTag::Pron};
        case AnswerRole::Other:
            return {PosTag::Any};
    }
    return {PosTag::Any};
}

AnswerRole role_for_pos(PosTag tag) {
    switch (tag) {
        case PosTag::Noun:
        case PosTag::Pron:
            return AnswerRole::Object;
        case PosTag::Adj:
        case PosTag::Num:
        case PosTag::Participle:
        case PosTag::Gerund:
            return AnswerRole::ObjectDescription;
        case PosTag::Verb:
            return AnswerRole::Action;
        case PosTag::Adv:
            return AnswerRole::ActionDescription;
        default:
            return AnswerRole::Other;
    }
}

const std::vector<std::string>& interrogative_constructions() {
    static const std::vector<std::string> list = {
        "who", "what", "what is", "what happened", "when", "where",
        "why", "how", "which",   "whose",         "by whom", "to whom",
    };
    return list;
}

QuestionSplit split_question(std::string_view question, const Tagger& tagger) {
    const auto words = split_words(question);
    if (words.empty()) throw Error(ErrorCode::EmptyQuestion, "question has no words");

    std::vector<std::string> lower;
    lower.reserve(words.size());
    for (const auto& w : words) lower.push_back(to_lower_utf8(w));

    // constructions as word lists, longest first so the first hit at a position is the longest
    static const auto patterns = [] {
        std::vector<std::vector<std::string>> out;
        for (const auto& c : interrogative_constructions()) {
            std::istringstream in(c);
            std::vector<std::string> parts;
            for (std::string p; in >> p;) parts.push_back(p);
            out.push_back(std::move(parts));
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
        return out;
    }();

    QuestionSplit split;
    split.raw = std::string(question);
    std::size_t match_begin = words.size();
    std::size_t match_len = 0;
    for (std::size_t pos = 0; pos < lower.size() && match_len == 0; ++pos) {
        for (const auto& p : patterns) {
            if (pos + p.size() > lower.size()) continue;
            if (std::equal(p.begin(), p.end(), lower.begin() + static_cast<std::ptrdiff_t>(pos))) {
                match_begin = pos;
                match_len = p.size();
                for (std::size_t k = 0; k < p.size(); ++k) split.interrogative += (k ? " " : "") + p[k];
                break;
            }
        }
    }

    for (std::size_t k = 0; k < words.size(); ++k) {
        if (k >= match_begin && k < match_begin + match_len) continue;
        split.informative.push_back(tagger.tag(words[k]));
    }
    return split;
}

}  // namespace ina
