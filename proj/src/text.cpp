#include "ina/text.hpp"

#include "ina/error.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace ina {

namespace {

struct TagNames {
    PosTag tag;
    std::string_view code;
    std::string_view name;
};

constexpr std::array<TagNames, 12> kTagNames = {{
    {PosTag::Noun, "NOUN", "noun"},
    {PosTag::Verb, "VERB", "verb"},
    {PosTag::Adj, "ADJ", "adjective"},
    {PosTag::Adv, "ADV", "adverb"},
    {PosTag::Num, "NUM", "numeral"},
    {PosTag::Pron, "PRON", "pronoun"},
    {PosTag::Participle, "PARTICIPLE", "participle"},
    {PosTag::Gerund, "GERUND", "gerund"},
    {PosTag::Prep, "PREP", "preposition"},
    {PosTag::Conj, "CONJ", "conjunction"},
    {PosTag::Any, "ANY", "any"},
    {PosTag::Other, "OTHER", "other"},
}};

struct CodePoint {
    char32_t value;
    std::size_t offset;
    std::size_t length;
};

std::vector<CodePoint> decode_utf8(std::string_view text) {
    std::vector<CodePoint> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto b = static_cast<unsigned char>(text[i]);
        std::size_t len = 1;
        char32_t cp = b;
        if (b >= 0xF0) {
            len = 4;
            cp = b & 0x07;
        } else if (b >= 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if (b >= 0xC0) {
            len = 2;
            cp = b & 0x1F;
        }
        if (i + len > text.size()) len = 1;  // truncated sequence, keep the byte as-is
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(text[i + k]) & 0x3F);
        out.push_back({cp, i, len});
        i += len;
    }
    return out;
}

bool is_space(char32_t cp) { return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' || cp == 0xA0; }

bool is_word_char(char32_t cp) {
    if (cp < 0x80) return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp == 0xA0 || cp == 0xAB || cp == 0xBB || cp == 0xB7 || cp == 0xBF || cp == 0xA1) return false;
    if (cp >= 0x2000 && cp <= 0x206F) return false;  // general punctuation block
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    return true;
}

bool is_joiner(char32_t cp) { return cp == '\'' || cp == '-' || cp == 0x2019; }

void append_lower(std::string& out, char32_t cp, std::string_view original) {
    char32_t lower = cp;
    if (cp >= 'A' && cp <= 'Z') {
        lower = cp + 32;
    } else if ((cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) || (cp >= 0x410 && cp <= 0x42F)) {
        lower = cp + 32;
    } else if (cp >= 0x400 && cp <= 0x40F) {
        lower = cp + 80;
    }
    if (lower == cp) {
        out.append(original);
        return;
    }
    if (lower < 0x80) {
        out.push_back(static_cast<char>(lower));
    } else if (lower < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
        out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (lower >> 12)));
        out.push_back(static_cast<char>(0x80 | ((lower >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
    }
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (const auto& cp : decode_utf8(text)) {
        if (is_space(cp.value)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.append(text.substr(cp.offset, cp.length));
    }
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string_view pos_code(PosTag tag) { return kTagNames[static_cast<std::size_t>(tag)].code; }

std::string_view pos_name(PosTag tag) { return kTagNames[static_cast<std::size_t>(tag)].name; }

std::optional<PosTag> parse_pos(std::string_view text) {
    const std::string lower = to_lower_utf8(text);
    for (const auto& t : kTagNames) {
        if (lower == t.name || lower == to_lower_utf8(t.code)) return t.tag;
    }
    return std::nullopt;
}

bool is_content(PosTag tag) {
    switch (tag) {
        case PosTag::Prep:
        case PosTag::Conj:
        case PosTag::Pron:
        case PosTag::Any:
            return false;
        default:
            return true;
    }
}

bool Lexicon::add(std::string_view surface, std::string_view lemma, PosTag pos) {
    std::string key = to_lower_utf8(surface);
    std::string norm_lemma = to_lower_utf8(lemma);
    if (key.empty() || norm_lemma.empty())
        throw Error(ErrorCode::InvalidIdentifier, "lexicon entries need a surface and a lemma");
    auto [it, inserted] = index_.try_emplace(key, entries_.size());
    if (!inserted) return false;
    entries_.push_back({std::move(key), std::move(norm_lemma), pos});
    return true;
}

const Lexicon::Entry* Lexicon::lookup(std::string_view surface) const {
    auto it = index_.find(to_lower_utf8(surface));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

Token Lexicon::tag(std::string_view surface) const {
    if (const auto* e = lookup(surface)) return {std::string(surface), e->lemma, e->pos};
    return {std::string(surface), to_lower_utf8(surface), PosTag::Other};
}

Lexicon Lexicon::read(std::istream& in) {
    Lexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw Error(ErrorCode::ParseError, "lexicon line " + std::to_string(line_no) + ": expected 3 fields");
        auto pos = parse_pos(fields[2]);
        if (!pos)
            throw Error(ErrorCode::ParseError,
                        "lexicon line " + std::to_string(line_no) + ": unknown POS '" + std::string(fields[2]) + "'");
        lex.add(fields[0], fields[1], *pos);
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open lexicon " + path.string());
    return read(in);
}

void Lexicon::write(std::ostream& out) const {
    for (const auto& e : entries_) out << e.surface << '\t' << e.lemma << '\t' << pos_code(e.pos) << '\n';
}

std::string to_lower_utf8(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const auto& cp : decode_utf8(text)) append_lower(out, cp.value, text.substr(cp.offset, cp.length));
    return out;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    auto emit = [&](std::size_t begin, std::size_t end) {
        auto s = collapse_whitespace(text.substr(begin, end - begin));
        if (!s.empty()) out.push_back(std::move(s));
    };

    const auto cps = decode_utf8(text);
    std::size_t start = 0;
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const char32_t c = cps[k].value;
        if (c == '.' || c == '!' || c == '?') {
            std::size_t last = k;
            while (last + 1 < cps.size() &&
                   (cps[last + 1].value == '.' || cps[last + 1].value == '!' || cps[last + 1].value == '?'))
                ++last;
            if (last + 1 == cps.size() || is_space(cps[last + 1].value)) {
                const std::size_t end = cps[last].offset + cps[last].length;
                emit(start, end);
                start = end;
            }
            k = last;
        } else if (c == '\n') {
            // blank line (only whitespace between two newlines) ends a paragraph
            std::size_t j = k + 1;
            while (j < cps.size() && is_space(cps[j].value) && cps[j].value != '\n') ++j;
            if (j < cps.size() && cps[j].value == '\n') {
                emit(start, cps[k].offset);
                start = cps[k].offset;
            }
        }
    }
    emit(start, text.size());
    return out;
}

std::vector<std::string> split_words(std::string_view sentence) {
    std::vector<std::string> out;
    const auto cps = decode_utf8(sentence);
    std::string current;
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const char32_t c = cps[k].value;
        if (is_word_char(c)) {
            current.append(sentence.substr(cps[k].offset, cps[k].length));
        } else if (is_joiner(c) && !current.empty() && k + 1 < cps.size() && is_word_char(cps[k + 1].value)) {
            current.push_back(c == 0x2019 ? '\'' : static_cast<char>(c));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<Token> tokenize_and_tag(std::string_view sentence, const Tagger& tagger) {
    std::vector<Token> out;
    for (const auto& word : split_words(sentence)) out.push_back(tagger.tag(word));
    return out;
}

}  // namespace ina
