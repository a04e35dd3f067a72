#pragma once

// Corpus normalization: comment stripping, whitespace collapsing, synonym
// replacement, redundant-brace removal, and script-argument bracing.
// The steps run in that fixed order and the composition is idempotent on
// brace-balanced input.

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "texo/lexer.hpp"

namespace texo {

struct NormalizationRuleset {
    std::map<std::string, std::string> synonym_table;
    bool strip_comments = true;
    bool reduce_braces = true;
    bool canonicalize_scripts = true;
};

namespace detail {

inline void validate_synonym_entry(const std::string& src, const std::string& dst) {
    for (const std::string* side : {&src, &dst}) {
        std::vector<Lexeme> lexemes = lex(*side);
        if (lexemes.size() != 1 || lexemes[0].kind == LexemeKind::kWhitespace) {
            throw std::runtime_error("synonym entry '" + *side + "' is not a single lexeme");
        }
    }
}

inline void validate_synonym_closure(const std::map<std::string, std::string>& table) {
    for (const auto& [src, dst] : table) {
        (void)src;
        if (table.count(dst)) {
            throw std::runtime_error("synonym table is not closed: replacement '" + dst +
                                     "' is itself a key");
        }
    }
}

struct BraceNode {
    bool is_group = false;
    std::string text;                 // leaf payload when !is_group
    std::vector<BraceNode> children;  // group payload
};

// Parses lexemes into a forest where { ... } single-character lexemes
// delimit groups. Control symbols \{ and \} are ordinary leaves.
inline std::vector<BraceNode> parse_groups(const std::vector<Lexeme>& lexemes) {
    std::vector<std::vector<BraceNode>> stack(1);
    std::vector<std::size_t> open_positions;
    for (const Lexeme& lx : lexemes) {
        if (lx.kind == LexemeKind::kChar && lx.text == "{") {
            stack.emplace_back();
            open_positions.push_back(lx.pos);
        } else if (lx.kind == LexemeKind::kChar && lx.text == "}") {
            if (stack.size() == 1) {
                throw std::runtime_error("unbalanced braces: unmatched '}' at offset " +
                                         std::to_string(lx.pos));
            }
            BraceNode group;
            group.is_group = true;
            group.children = std::move(stack.back());
            stack.pop_back();
            open_positions.pop_back();
            stack.back().push_back(std::move(group));
        } else {
            BraceNode leaf;
            leaf.text = lx.text;
            stack.back().push_back(std::move(leaf));
        }
    }
    if (stack.size() != 1) {
        throw std::runtime_error("unbalanced braces: unclosed '{' at offset " +
                                 std::to_string(open_positions.back()));
    }
    return std::move(stack.front());
}

inline void render_collapsed(const BraceNode& node, std::string& out) {
    if (!node.is_group) {
        out += node.text;
        return;
    }
    // A group whose entire content is exactly one inner group collapses to
    // that inner group, to fixpoint.
    const BraceNode* group = &node;
    while (group->children.size() == 1 && group->children.front().is_group) {
        group = &group->children.front();
    }
    out += '{';
    for (const BraceNode& child : group->children) render_collapsed(child, out);
    out += '}';
}

inline std::string strip_comments_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '%' && (i == 0 || text[i - 1] != '\\')) {
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        out += text[i++];
    }
    return out;
}

inline std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_ascii_space(text[i])) {
            while (i < text.size() && is_ascii_space(text[i])) ++i;
            if (!out.empty() && i < text.size()) out += ' ';
        } else {
            out += text[i++];
        }
    }
    return out;
}

inline std::string apply_synonyms(std::string_view text,
                                  const std::map<std::string, std::string>& table) {
    if (table.empty()) return std::string(text);
    std::string out;
    out.reserve(text.size());
    std::string last_emitted;
    for (const Lexeme& lx : lex(text)) {
        auto it = table.find(lx.text);
        const std::string& piece = it == table.end() ? lx.text : it->second;
        if (needs_separator(last_emitted, piece)) out += ' ';
        out += piece;
        last_emitted = piece;
    }
    return out;
}

}  // namespace detail

// Loads a synonym table from UTF-8 lines of the form `<src><TAB><dst>`.
// Lines starting with '#' and blank lines are ignored.
inline NormalizationRuleset load_ruleset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ruleset file: " + path);
    NormalizationRuleset rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected '<src><TAB><dst>'");
        }
        std::string src = line.substr(0, tab);
        std::string dst = line.substr(tab + 1);
        detail::validate_synonym_entry(src, dst);
        rules.synonym_table[src] = dst;
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
    detail::validate_synonym_closure(rules.synonym_table);
    return rules;
}

// The table shipped in data/synonyms.tsv; kept in sync so the pipeline works
// without a ruleset file on disk.
inline NormalizationRuleset default_ruleset() {
    NormalizationRuleset rules;
    rules.synonym_table = {
        {"\\le", "\\leq"},       {"\\ge", "\\geq"},
        {"\\ne", "\\neq"},       {"\\to", "\\rightarrow"},
        {"\\gets", "\\leftarrow"}, {"\\lnot", "\\neg"},
        {"\\land", "\\wedge"},   {"\\lor", "\\vee"},
        {"≤", "\\leq"},     {"≥", "\\geq"},
        {"≠", "\\neq"},     {"→", "\\rightarrow"},
    };
    return rules;
}

// Replaces every group whose entire content is exactly one inner group by
// that inner group, applied to fixpoint. All other characters are unchanged.
inline std::string strip_redundant_braces(std::string_view text) {
    std::vector<detail::BraceNode> forest = detail::parse_groups(lex(text));
    std::string out;
    out.reserve(text.size());
    for (const detail::BraceNode& node : forest) detail::render_collapsed(node, out);
    return out;
}

// Braces every unbraced single-lexeme script argument: x^2 -> x^{2},
// x_\alpha -> x_{\alpha}. Whitespace between the script marker and its
// argument is absorbed.
inline std::string canonicalize_scripts(std::string_view text) {
    std::vector<Lexeme> lexemes = lex(text);
    std::string out;
    out.reserve(text.size() + 8);
    std::size_t i = 0;
    while (i < lexemes.size()) {
        const Lexeme& lx = lexemes[i];
        out += lx.text;
        ++i;
        if (lx.kind != LexemeKind::kChar || (lx.text != "^" && lx.text != "_")) continue;
        std::size_t arg = i;
        while (arg < lexemes.size() && lexemes[arg].kind == LexemeKind::kWhitespace) ++arg;
        if (arg == lexemes.size()) {
            throw std::runtime_error("script marker '" + lx.text + "' at offset " +
                                     std::to_string(lx.pos) + " has no argument");
        }
        const Lexeme& next = lexemes[arg];
        if (next.kind == LexemeKind::kChar && (next.text == "{" || next.text == "}")) {
            continue;  // already braced, or malformed input left untouched
        }
        out += '{';
        out += next.text;
        out += '}';
        i = arg + 1;
    }
    return out;
}

inline std::string normalize(std::string_view text, const NormalizationRuleset& rules) {
    std::string s(text);
    if (rules.strip_comments) s = detail::strip_comments_text(s);
    s = detail::collapse_whitespace(s);
    s = detail::apply_synonyms(s, rules.synonym_table);
    if (rules.reduce_braces) s = strip_redundant_braces(s);
    if (rules.canonicalize_scripts) s = canonicalize_scripts(s);
    return s;
}

}  // namespace texo
