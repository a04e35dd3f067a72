#pragma once

// LaTeX math lexer. Splits a string into lexemes by, in priority order at
// each position: fused \begin{name}/\end{name} for known environment names,
// control words (backslash + maximal ASCII letter run), control symbols
// (backslash + one non-letter character), whitespace runs, and single
// characters (one UTF-8 code point). Concatenating the lexemes reproduces
// the input exactly.

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace texo {

enum class LexemeKind {
    kControlWord,
    kControlSymbol,
    kFusedEnv,
    kWhitespace,
    kChar,
};

struct Lexeme {
    LexemeKind kind;
    std::string text;
    std::size_t pos = 0;  // byte offset in the source string
};

inline bool is_ascii_letter(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

inline bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Byte length of the UTF-8 sequence starting with `lead`. Malformed lead
// bytes count as length 1 so lexing always makes progress.
inline std::size_t utf8_len(unsigned char lead) {
    if ((lead & 0x80u) == 0x00u) return 1;
    if ((lead & 0xE0u) == 0xC0u) return 2;
    if ((lead & 0xF0u) == 0xE0u) return 3;
    if ((lead & 0xF8u) == 0xF0u) return 4;
    return 1;
}

// True for tokens of the form backslash + one or more ASCII letters.
inline bool is_control_word(std::string_view s) {
    if (s.size() < 2 || s[0] != '\\') return false;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (!is_ascii_letter(s[i])) return false;
    }
    return true;
}

namespace detail {

// Matches \begin{name} or \end{name} at `start` when `name` is a known
// environment. Returns the total byte length of the match, or 0.
inline std::size_t match_fused_env(std::string_view text, std::size_t start,
                                   const std::set<std::string>& fused_envs) {
    if (fused_envs.empty()) return 0;
    std::string_view rest = text.substr(start);
    std::size_t head = 0;
    if (rest.rfind("\\begin{", 0) == 0) {
        head = 7;
    } else if (rest.rfind("\\end{", 0) == 0) {
        head = 5;
    } else {
        return 0;
    }
    std::size_t i = head;
    while (i < rest.size() && (is_ascii_letter(rest[i]) || rest[i] == '*')) ++i;
    if (i == head || i >= rest.size() || rest[i] != '}') return 0;
    std::string name(rest.substr(head, i - head));
    if (!fused_envs.count(name)) return 0;
    return i + 1;
}

// Single separating space needed so that re-lexing `prev + next` does not
// glue a control word onto a following letter.
inline bool needs_separator(std::string_view prev, std::string_view next) {
    return !next.empty() && is_ascii_letter(next[0]) && is_control_word(prev);
}

}  // namespace detail

inline std::vector<Lexeme> lex(std::string_view text,
                               const std::set<std::string>& fused_envs = {}) {
    std::vector<Lexeme> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == '\\') {
            if (std::size_t len = detail::match_fused_env(text, i, fused_envs)) {
                out.push_back({LexemeKind::kFusedEnv, std::string(text.substr(i, len)), i});
                i += len;
                continue;
            }
            if (i + 1 >= n) {
                throw std::runtime_error("lex error: lone '\\' at end of input (offset " +
                                         std::to_string(i) + ")");
            }
            if (is_ascii_letter(text[i + 1])) {
                std::size_t j = i + 1;
                while (j < n && is_ascii_letter(text[j])) ++j;
                out.push_back({LexemeKind::kControlWord, std::string(text.substr(i, j - i)), i});
                i = j;
            } else {
                std::size_t len = 1 + utf8_len(static_cast<unsigned char>(text[i + 1]));
                if (i + len > n) len = n - i;
                out.push_back({LexemeKind::kControlSymbol, std::string(text.substr(i, len)), i});
                i += len;
            }
        } else if (is_ascii_space(c)) {
            std::size_t j = i;
            while (j < n && is_ascii_space(text[j])) ++j;
            out.push_back({LexemeKind::kWhitespace, std::string(text.substr(i, j - i)), i});
            i = j;
        } else {
            std::size_t len = utf8_len(static_cast<unsigned char>(c));
            if (i + len > n) len = n - i;
            out.push_back({LexemeKind::kChar, std::string(text.substr(i, len)), i});
            i += len;
        }
    }
    return out;
}

// Splits a string into UTF-8 code points (malformed bytes pass through one
// byte at a time).
inline std::vector<std::string> split_code_points(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len = utf8_len(static_cast<unsigned char>(s[i]));
        if (i + len > s.size()) len = s.size() - i;
        out.emplace_back(s.substr(i, len));
        i += len;
    }
    return out;
}

}  // namespace texo
