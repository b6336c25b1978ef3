#pragma once
// Minimal linguistic semantic units: one clause of a sentence stored as its
// anchor word (the first verb, or the first noun for verbless clauses) plus
// the set of the clause's remaining lemmas bounded by START/END sentinels.

#include "ina/text.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ina {

inline const std::string kStartToken = "START";
inline const std::string kEndToken = "END";

using MlsuId = std::uint64_t;

struct Mlsu {
    MlsuId id = 0;
    /// Clause tokens in sentence order, anchor included.
    std::vector<Token> segment;
    std::size_t anchor = 0;
    /// Lemmas of the clause minus the anchor, deduplicated, followed by START and END.
    std::vector<std::string> context_tokens;
    std::string source_sentence;

    const Token& anchor_token() const { return segment.at(anchor); }
    /// The anchor in its stored surface form ("listens").
    const std::string& verb() const { return segment.at(anchor).surface; }
    bool verb_anchored() const { return anchor_token().pos == PosTag::Verb; }

    /// POS of the first clause token carrying this lemma.
    std::optional<PosTag> pos_of(const std::string& lemma) const;
    bool has_token(const std::string& lemma) const;

    friend bool operator==(const Mlsu&, const Mlsu&) = default;
};

/// Builds a unit from a clause. context_tokens is derived from the segment.
Mlsu make_mlsu(MlsuId id, std::vector<Token> segment, std::size_t anchor, std::string source_sentence);

/// Splits a tagged sentence into clauses. A conjunction opens a new clause and
/// belongs to it.
std::vector<std::vector<Token>> segment_clauses(std::span<const Token> tokens);

/// Index of the first verb, else the first noun.
std::optional<std::size_t> find_anchor(std::span<const Token> clause);

/// One unit per clause that has an anchor, ids assigned from next_id upward.
/// Clauses with neither verb nor noun are skipped with a warning.
std::vector<Mlsu> extract_mlsus(std::span<const Token> tokens, MlsuId next_id, std::string_view source_sentence = {});

class MlsuRegistry {
public:
    void add(Mlsu unit);
    const Mlsu* find(MlsuId id) const;
    /// Throws Error(UnknownMlsuId).
    const Mlsu& at(MlsuId id) const;

    std::size_t size() const { return units_.size(); }
    bool empty() const { return units_.empty(); }
    MlsuId next_id() const { return units_.empty() ? 1 : units_.rbegin()->first + 1; }

    auto begin() const { return units_.begin(); }
    auto end() const { return units_.end(); }

    friend bool operator==(const MlsuRegistry&, const MlsuRegistry&) = default;

private:
    std::map<MlsuId, Mlsu> units_;
};

/// Sentence split, tag and extract every unit of a corpus. Ids start at 1.
MlsuRegistry build_registry(std::string_view corpus, const Tagger& tagger);

}  // namespace ina
