#pragma once

// Base BPE tokenizer: token<->id maps plus an ordered merge table. Encoding
// splits a word into code points and repeatedly fuses the adjacent pair with
// the lowest merge rank (leftmost occurrence first) until no adjacent pair
// is a merge rule.

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "texo/lexer.hpp"

namespace texo {

inline constexpr std::string_view kDefaultBoundaryMarker = "▁";  // metaspace

struct BaseTokenizer {
    std::unordered_map<std::string, int> token_to_id;
    std::vector<std::string> id_to_token;
    std::vector<std::pair<std::string, std::string>> merges;
    std::unordered_map<std::string, int> merge_rank;  // "left right" -> rank
    std::string boundary_marker{kDefaultBoundaryMarker};

    int size() const { return static_cast<int>(id_to_token.size()); }

    bool contains(const std::string& token) const { return token_to_id.count(token) != 0; }

    int id_of(const std::string& token) const {
        auto it = token_to_id.find(token);
        return it == token_to_id.end() ? -1 : it->second;
    }

    // Id of the "<unk>" token, or -1 when the vocabulary does not define one.
    int unk_id() const { return id_of("<unk>"); }
};

namespace detail {

inline void read_vocab_entries(const std::string& path,
                               std::unordered_map<std::string, long long>& entries) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open base vocabulary file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string content = buffer.str();

    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '{') {
        nlohmann::json doc = nlohmann::json::parse(content);
        if (!doc.is_object()) throw std::runtime_error(path + ": expected a JSON object");
        for (auto& [token, id] : doc.items()) {
            if (!id.is_number_integer()) {
                throw std::runtime_error(path + ": id of token '" + token +
                                         "' is not an integer");
            }
            if (!entries.emplace(token, id.get<long long>()).second) {
                throw std::runtime_error(path + ": duplicate token '" + token + "'");
            }
        }
        return;
    }

    // Tab-separated fallback: token<TAB>id, one entry per line.
    std::istringstream lines(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'token<TAB>id'");
        }
        std::string token = line.substr(0, tab);
        long long id = 0;
        try {
            id = std::stoll(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad id field");
        }
        if (!entries.emplace(token, id).second) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": duplicate token '" + token + "'");
        }
    }
}

}  // namespace detail

// Loads a base tokenizer from a vocabulary file (JSON object or
// token<TAB>id lines) and a merges file (one `left right` pair per line in
// rank order; `#version` header lines are ignored). Verifies that ids are
// dense, that every merge result is a vocabulary token, and that every
// character of every token is itself a token. The boundary marker character
// is exempt from the closure check: marker-prefixed whole-token lookups are
// resolved directly and never re-split.
inline BaseTokenizer load_base(const std::string& vocab_path, const std::string& merges_path,
                               std::string_view marker = kDefaultBoundaryMarker) {
    BaseTokenizer base;
    base.boundary_marker = std::string(marker);

    std::unordered_map<std::string, long long> entries;
    detail::read_vocab_entries(vocab_path, entries);
    if (entries.empty()) throw std::runtime_error(vocab_path + ": empty vocabulary");

    base.id_to_token.assign(entries.size(), std::string());
    std::vector<bool> seen(entries.size(), false);
    for (const auto& [token, id] : entries) {
        if (id < 0 || static_cast<std::size_t>(id) >= entries.size() ||
            seen[static_cast<std::size_t>(id)]) {
            throw std::runtime_error(vocab_path + ": duplicate or non-dense id " +
                                     std::to_string(id) + " (token '" + token + "')");
        }
        seen[static_cast<std::size_t>(id)] = true;
        base.id_to_token[static_cast<std::size_t>(id)] = token;
        base.token_to_id.emplace(token, static_cast<int>(id));
    }

    std::ifstream merges_in(merges_path);
    if (!merges_in) throw std::runtime_error("cannot open merges file: " + merges_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(merges_in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.rfind("#version", 0) == 0) continue;
        std::size_t space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= line.size() ||
            line.find(' ', space + 1) != std::string::npos) {
            throw std::runtime_error(merges_path + ":" + std::to_string(line_no) +
                                     ": expected 'left right'");
        }
        std::string left = line.substr(0, space);
        std::string right = line.substr(space + 1);
        if (!base.contains(left + right)) {
            throw std::runtime_error(merges_path + ":" + std::to_string(line_no) +
                                     ": merge result '" + left + right +
                                     "' is not in the vocabulary");
        }
        base.merge_rank.emplace(line, static_cast<int>(base.merges.size()));
        base.merges.emplace_back(std::move(left), std::move(right));
    }
    if (merges_in.bad()) throw std::runtime_error("I/O error while reading " + merges_path);

    for (const std::string& token : base.id_to_token) {
        for (const std::string& cp : split_code_points(token)) {
            if (cp == base.boundary_marker) continue;
            if (!base.contains(cp)) {
                throw std::runtime_error(vocab_path + ": character closure violation: '" + cp +
                                         "' from token '" + token +
                                         "' is not a vocabulary token");
            }
        }
    }
    return base;
}

// Encodes one word with the merge loop. Every code point of `word` must be
// a vocabulary token.
inline std::vector<int> bpe_encode(const BaseTokenizer& base, std::string_view word) {
    std::vector<std::string> symbols = split_code_points(word);
    for (const std::string& cp : symbols) {
        if (!base.contains(cp)) {
            throw std::runtime_error("character '" + cp + "' is outside the base vocabulary");
        }
    }
    while (symbols.size() > 1) {
        int best_rank = std::numeric_limits<int>::max();
        std::size_t best_pos = 0;
        for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
            auto it = base.merge_rank.find(symbols[i] + " " + symbols[i + 1]);
            if (it != base.merge_rank.end() && it->second < best_rank) {
                best_rank = it->second;
                best_pos = i;
            }
        }
        if (best_rank == std::numeric_limits<int>::max()) break;
        symbols[best_pos] += symbols[best_pos + 1];
        symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
    }
    std::vector<int> ids;
    ids.reserve(symbols.size());
    for (const std::string& sym : symbols) {
        int id = base.id_of(sym);
        if (id < 0) throw std::runtime_error("internal error: merged symbol '" + sym +
                                             "' is not in the vocabulary");
        ids.push_back(id);
    }
    return ids;
}

}  // namespace texo
