#include "ina/mlsu.hpp"

#include "ina/error.hpp"
#include "ina/log.hpp"

#include <algorithm>

namespace ina {

std::optional<PosTag> Mlsu::pos_of(const std::string& lemma) const {
    for (const auto& t : segment)
        if (t.lemma == lemma) return t.pos;
    return std::nullopt;
}

bool Mlsu::has_token(const std::string& lemma) const {
    return std::find(context_tokens.begin(), context_tokens.end(), lemma) != context_tokens.end();
}

Mlsu make_mlsu(MlsuId id, std::vector<Token> segment, std::size_t anchor, std::string source_sentence) {
    if (anchor >= segment.size()) throw Error(ErrorCode::InvalidIdentifier, "anchor index outside the clause");

    Mlsu unit;
    unit.id = id;
    unit.anchor = anchor;
    unit.source_sentence = std::move(source_sentence);

    const std::string& anchor_lemma = segment[anchor].lemma;
    const std::string anchor_surface = to_lower_utf8(segment[anchor].surface);
    for (std::size_t k = 0; k < segment.size(); ++k) {
        if (k == anchor) continue;
        const auto& lemma = segment[k].lemma;
        if (lemma == anchor_lemma || lemma == anchor_surface) continue;
        if (std::find(unit.context_tokens.begin(), unit.context_tokens.end(), lemma) == unit.context_tokens.end())
            unit.context_tokens.push_back(lemma);
    }
    unit.context_tokens.push_back(kStartToken);
    unit.context_tokens.push_back(kEndToken);
    unit.segment = std::move(segment);
    return unit;
}

std::vector<std::vector<Token>> segment_clauses(std::span<const Token> tokens) {
    std::vector<std::vector<Token>> clauses;
    std::vector<Token> current;
    for (const auto& t : tokens) {
        if (t.pos == PosTag::Conj && !current.empty()) {
            clauses.push_back(std::move(current));
            current.clear();
        }
        current.push_back(t);
    }
    if (!current.empty()) clauses.push_back(std::move(current));
    return clauses;
}

std::optional<std::size_t> find_anchor(std::span<const Token> clause) {
    for (std::size_t k = 0; k < clause.size(); ++k)
        if (clause[k].pos == PosTag::Verb) return k;
    for (std::size_t k = 0; k < clause.size(); ++k)
        if (clause[k].pos == PosTag::Noun) return k;
    return std::nullopt;
}

std::vector<Mlsu> extract_mlsus(std::span<const Token> tokens, MlsuId next_id, std::string_view source_sentence) {
    std::vector<Mlsu> out;
    for (auto& clause : segment_clauses(tokens)) {
        auto anchor = find_anchor(clause);
        if (!anchor) {
            std::string text;
            for (const auto& t : clause) text += (text.empty() ? "" : " ") + t.surface;
            log::warn("NoAnchorWord: clause '" + text + "' has neither verb nor noun, skipped");
            continue;
        }
        out.push_back(make_mlsu(next_id++, std::move(clause), *anchor, std::string(source_sentence)));
    }
    return out;
}

void MlsuRegistry::add(Mlsu unit) {
    const MlsuId id = unit.id;
    if (!units_.try_emplace(id, std::move(unit)).second)
        throw Error(ErrorCode::InvalidIdentifier, "duplicate MLSU id " + std::to_string(id));
}

const Mlsu* MlsuRegistry::find(MlsuId id) const {
    auto it = units_.find(id);
    return it == units_.end() ? nullptr : &it->second;
}

const Mlsu& MlsuRegistry::at(MlsuId id) const {
    if (const auto* unit = find(id)) return *unit;
    throw Error(ErrorCode::UnknownMlsuId, "no MLSU with id " + std::to_string(id));
}

MlsuRegistry build_registry(std::string_view corpus, const Tagger& tagger) {
    MlsuRegistry registry;
    for (const auto& sentence : split_sentences(corpus)) {
        const auto tokens = tokenize_and_tag(sentence, tagger);
        for (auto& unit : extract_mlsus(tokens, registry.next_id(), sentence)) registry.add(std::move(unit));
    }
    return registry;
}

}  // namespace ina
