#pragma once

// Curated-vocabulary encoder/decoder. encode() drops whitespace entirely;
// decode() re-inserts the single separating space needed so that a control
// word never glues onto a following letter, which keeps decoded output
// re-lexable.

#include <string>
#include <string_view>
#include <vector>

#include "texo/lexer.hpp"
#include "texo/vocab.hpp"

namespace texo {

using TokenIdSeq = std::vector<int>;

inline TokenIdSeq encode(const CuratedVocabulary& vocab, std::string_view text) {
    TokenIdSeq ids;
    for (const Lexeme& lx : lex(text, vocab.fused_environments)) {
        if (lx.kind == LexemeKind::kWhitespace) continue;
        int id = vocab.id_of(lx.text);
        ids.push_back(id < 0 ? CuratedVocabulary::kUnkId : id);
    }
    return ids;
}

inline std::string decode(const CuratedVocabulary& vocab, const TokenIdSeq& ids) {
    std::string out;
    std::string last_emitted;
    for (int id : ids) {
        // Validates the id range; UNK (id 3) renders as its literal token
        // string "<unk>", PAD/BOS/EOS render as nothing.
        const std::string& tok = vocab.token(id);
        if (id == CuratedVocabulary::kPadId || id == CuratedVocabulary::kBosId ||
            id == CuratedVocabulary::kEosId) {
            continue;
        }
        if (detail::needs_separator(last_emitted, tok)) out += ' ';
        out += tok;
        last_emitted = tok;
    }
    return out;
}

}  // namespace texo
