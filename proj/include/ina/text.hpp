#pragma once
// Text model: part-of-speech inventory, lexicon-driven tagging, tokenization
// and sentence splitting.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ina {

enum class PosTag : std::uint8_t {
    Noun,
    Verb,
    Adj,
    Adv,
    Num,
    Pron,
    Participle,
    Gerund,
    Prep,
    Conj,
    Any,
    Other,
};

inline constexpr std::array<PosTag, 12> kAllPosTags = {
    PosTag::Noun, PosTag::Verb,       PosTag::Adj,    PosTag::Adv,  PosTag::Num,  PosTag::Pron,
    PosTag::Participle, PosTag::Gerund, PosTag::Prep, PosTag::Conj, PosTag::Any, PosTag::Other,
};

/// Upper-case code used in lexicon files and as class ids: NOUN, VERB, ADJ, ...
std::string_view pos_code(PosTag tag);
/// Lower-case long name used inside features: noun, verb, adjective, ...
std::string_view pos_name(PosTag tag);
/// Accepts either spelling, case-insensitively.
std::optional<PosTag> parse_pos(std::string_view text);

/// Function classes (prepositions, conjunctions, pronouns, the catch-all ANY)
/// carry no retrievable content.
bool is_content(PosTag tag);

struct Token {
    std::string surface;
    std::string lemma;
    PosTag pos = PosTag::Other;

    friend bool operator==(const Token&, const Token&) = default;
};

/// Word-level tagger. Implementations must be deterministic and thread-safe.
class Tagger {
public:
    virtual ~Tagger() = default;
    virtual Token tag(std::string_view surface) const = 0;
};

/// Surface -> (lemma, POS) table. Lookups are case-insensitive; the first
/// entry for a surface wins. Unknown words keep their lower-cased surface as
/// lemma and get OTHER.
class Lexicon : public Tagger {
public:
    struct Entry {
        std::string surface;
        std::string lemma;
        PosTag pos;
    };

    /// Returns false when the surface was already present.
    bool add(std::string_view surface, std::string_view lemma, PosTag pos);

    const Entry* lookup(std::string_view surface) const;
    Token tag(std::string_view surface) const override;

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// TSV: surface<TAB>lemma<TAB>POS; '#' lines and blank lines are skipped.
    static Lexicon read(std::istream& in);
    static Lexicon load(const std::filesystem::path& path);
    void write(std::ostream& out) const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Lower-cases ASCII, Latin-1 and basic Cyrillic letters; other bytes pass through.
std::string to_lower_utf8(std::string_view text);

/// Splits after . ! ? runs followed by whitespace or end of text, and at blank
/// lines. Sentences are trimmed; internal whitespace runs collapse to one space.
std::vector<std::string> split_sentences(std::string_view text);

/// Words are runs of letters/digits (any non-ASCII byte counts as a letter,
/// except common Unicode punctuation); inner apostrophes and hyphens are kept.
std::vector<std::string> split_words(std::string_view sentence);

std::vector<Token> tokenize_and_tag(std::string_view sentence, const Tagger& tagger);

}  // namespace ina
