#pragma once

#include "ina/text.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ina {

/// Kind of word the answer must supply.
enum class AnswerRole {
    Object,                ///< O: nouns, pronouns
    ObjectDescription,     ///< OD: adjective, numeral, participle, gerund
    Subject,               ///< S: nouns, pronouns
    SubjectDescription,    ///< SD
    Action,                ///< A: verb
    ActionDescription,     ///< AD: adverb, pronoun
    Other,                 ///< OT
};

std::string_view role_code(AnswerRole role);
std::vector<PosTag> role_to_pos(AnswerRole role);

/// Role implied by a predicted answer POS. Nouns and pronouns map to Object;
/// subject/object cannot be told apart from the tag alone.
AnswerRole role_for_pos(PosTag tag);

struct AnswerSpec {
    AnswerRole role = AnswerRole::Other;
    std::vector<PosTag> required_pos;
};

/// Question words recognised as the interrogative part, multi-word ones included.
const std::vector<std::string>& interrogative_constructions();

struct QuestionSplit {
    std::string raw;
    /// Matched construction, empty when none was found.
    std::string interrogative;
    std::vector<Token> informative;

    bool has_interrogative() const { return !interrogative.empty(); }
};

/// Finds the leftmost construction occurrence (longest match at that
/// position) and tags the remaining words. Throws Error(EmptyQuestion) for
/// questions without words.
QuestionSplit split_question(std::string_view question, const Tagger& tagger);

}  // namespace ina
