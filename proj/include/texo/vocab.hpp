#pragma once

// Macro catalog ingestion and the curated vocabulary built from it.
//
// The vocabulary layout is fixed: ids 0..3 are <pad>, <s>, </s>, <unk>;
// then the 94 printable ASCII characters except space; then all catalog
// commands sorted lexicographically; then, optionally, fused
// \begin{env}/\end{env} tokens per environment. The space character is
// never a token.

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "texo/lexer.hpp"

namespace texo {

inline constexpr std::array<std::string_view, 4> kSpecialTokens = {"<pad>", "<s>", "</s>",
                                                                   "<unk>"};

struct MacroCatalog {
    std::set<std::string> control_words;    // "\" + one or more ASCII letters
    std::set<std::string> control_symbols;  // "\" + one non-letter character
    std::set<std::string> environments;     // ASCII letters and '*'
};

struct CuratedVocabulary {
    std::vector<std::string> tokens;
    std::unordered_map<std::string, int> token_to_id;
    std::set<std::string> fused_environments;

    static constexpr int kPadId = 0;
    static constexpr int kBosId = 1;
    static constexpr int kEosId = 2;
    static constexpr int kUnkId = 3;

    int size() const { return static_cast<int>(tokens.size()); }

    bool contains(const std::string& token) const { return token_to_id.count(token) != 0; }

    // Id of `token`, or -1 when absent.
    int id_of(const std::string& token) const {
        auto it = token_to_id.find(token);
        return it == token_to_id.end() ? -1 : it->second;
    }

    const std::string& token(int id) const {
        if (id < 0 || id >= size()) {
            throw std::runtime_error("token id " + std::to_string(id) +
                                     " out of range (vocabulary size " +
                                     std::to_string(size()) + ")");
        }
        return tokens[static_cast<std::size_t>(id)];
    }
};

namespace detail {

inline bool is_valid_environment_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name) {
        if (!is_ascii_letter(c) && c != '*') return false;
    }
    return true;
}

inline bool is_control_symbol(std::string_view s) {
    return s.size() == 2 && s[0] == '\\' && !is_ascii_letter(s[1]);
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ascii_space(s[b])) ++b;
    while (e > b && is_ascii_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

// Rebuilds token_to_id and derives the fusable environment set from
// tokens of the form \begin{name}.
inline void index_vocabulary(CuratedVocabulary& vocab) {
    vocab.token_to_id.clear();
    vocab.fused_environments.clear();
    for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
        const std::string& tok = vocab.tokens[i];
        if (!vocab.token_to_id.emplace(tok, static_cast<int>(i)).second) {
            throw std::runtime_error("duplicate vocabulary token '" + tok + "'");
        }
        if (tok.size() > 8 && tok.rfind("\\begin{", 0) == 0 && tok.back() == '}') {
            std::string name = tok.substr(7, tok.size() - 8);
            if (is_valid_environment_name(name)) vocab.fused_environments.insert(name);
        }
    }
}

}  // namespace detail

inline MacroCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open catalog file: " + path);
    MacroCatalog catalog;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("env:", 0) == 0) {
            std::string name = detail::trim(std::string_view(line).substr(4));
            if (!detail::is_valid_environment_name(name)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": malformed environment name '" + name + "'");
            }
            catalog.environments.insert(name);
        } else if (line[0] == '\\') {
            if (is_control_word(line)) {
                catalog.control_words.insert(line);
            } else if (detail::is_control_symbol(line)) {
                catalog.control_symbols.insert(line);
            } else {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": malformed command '" + line + "'");
            }
        } else {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": line is neither a command nor an 'env:' entry: '" +
                                     line + "'");
        }
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
    return catalog;
}

inline CuratedVocabulary build_vocab(const MacroCatalog& catalog, bool fuse_environments = true) {
    CuratedVocabulary vocab;
    vocab.tokens.reserve(98 + catalog.control_words.size() + catalog.control_symbols.size() +
                         2 * catalog.environments.size());
    for (auto special : kSpecialTokens) vocab.tokens.emplace_back(special);
    for (int c = 33; c <= 126; ++c) vocab.tokens.emplace_back(1, static_cast<char>(c));

    // std::set already orders both command sets; merge them into one
    // lexicographically sorted block.
    auto cw = catalog.control_words.begin();
    auto cs = catalog.control_symbols.begin();
    while (cw != catalog.control_words.end() || cs != catalog.control_symbols.end()) {
        if (cs == catalog.control_symbols.end() ||
            (cw != catalog.control_words.end() && *cw < *cs)) {
            vocab.tokens.push_back(*cw++);
        } else {
            vocab.tokens.push_back(*cs++);
        }
    }

    if (fuse_environments) {
        for (const std::string& env : catalog.environments) {
            vocab.tokens.push_back("\\begin{" + env + "}");
            vocab.tokens.push_back("\\end{" + env + "}");
        }
    }
    detail::index_vocabulary(vocab);
    if (!fuse_environments) vocab.fused_environments.clear();
    return vocab;
}

// One token per line, line index = token id.
inline void save_vocabulary(const std::string& path, const CuratedVocabulary& vocab) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vocabulary file for writing: " + path);
    for (const std::string& tok : vocab.tokens) out << tok << '\n';
    if (!out) throw std::runtime_error("I/O error while writing " + path);
}

inline CuratedVocabulary load_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
    CuratedVocabulary vocab;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty token line");
        }
        for (char c : line) {
            if (is_ascii_space(c)) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": token contains whitespace");
            }
        }
        vocab.tokens.push_back(line);
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
    if (vocab.tokens.size() < kSpecialTokens.size()) {
        throw std::runtime_error(path + ": vocabulary is missing the special tokens");
    }
    for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
        if (vocab.tokens[i] != kSpecialTokens[i]) {
            throw std::runtime_error(path + ": token " + std::to_string(i) + " must be '" +
                                     std::string(kSpecialTokens[i]) + "', found '" +
                                     vocab.tokens[i] + "'");
        }
    }
    detail::index_vocabulary(vocab);
    return vocab;
}

}  // namespace texo
