#pragma once

// Corpus-level measurement: token-length statistics under the curated
// tokenizer, curated-vs-base compression, UNK rate, and sequence metrics
// (exact match, normalized token edit distance). Per-line work is pure and
// can run on a worker pool; aggregation is positional, so results do not
// depend on the level of parallelism.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "texo/bpe.hpp"
#include "texo/normalizer.hpp"
#include "texo/tokenizer.hpp"

namespace texo {

struct CorpusStats {
    std::uint64_t sample_count = 0;
    double mean_token_length = 0.0;
    std::uint64_t max_token_length = 0;
    double unk_rate = 0.0;
    std::optional<double> compression_ratio;  // curated mean / base mean
    std::uint64_t skipped_lines = 0;
};

struct SequenceReport {
    std::uint64_t pairs = 0;
    double exact_match = 0.0;
    double mean_edit_distance = 0.0;
};

namespace detail {

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    if (in.bad()) throw std::runtime_error("I/O error while reading " + path);
    return lines;
}

inline bool is_blank(const std::string& line) {
    for (char c : line) {
        if (!is_ascii_space(c)) return false;
    }
    return true;
}

struct LineOutcome {
    bool blank = false;
    bool failed = false;
    std::string error;
    std::uint64_t tokens = 0;
    std::uint64_t unks = 0;
    std::uint64_t base_tokens = 0;
};

// Base token count for one normalized line: marker-aware word splitting on
// whitespace, each word encoded as marker+word.
inline std::uint64_t base_token_count(const BaseTokenizer& base, const std::string& normalized) {
    std::uint64_t count = 0;
    std::size_t i = 0;
    while (i < normalized.size()) {
        while (i < normalized.size() && is_ascii_space(normalized[i])) ++i;
        std::size_t j = i;
        while (j < normalized.size() && !is_ascii_space(normalized[j])) ++j;
        if (j > i) {
            count += bpe_encode(base, base.boundary_marker + normalized.substr(i, j - i)).size();
        }
        i = j;
    }
    return count;
}

inline LineOutcome evaluate_line(const CuratedVocabulary& vocab, const BaseTokenizer* base,
                                 const NormalizationRuleset& rules, const std::string& line) {
    LineOutcome outcome;
    if (is_blank(line)) {
        outcome.blank = true;
        return outcome;
    }
    try {
        std::string normalized = normalize(line, rules);
        TokenIdSeq ids = encode(vocab, normalized);
        outcome.tokens = ids.size();
        for (int id : ids) {
            if (id == CuratedVocabulary::kUnkId) ++outcome.unks;
        }
        if (base != nullptr) outcome.base_tokens = base_token_count(*base, normalized);
    } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.error = e.what();
    }
    return outcome;
}

inline std::vector<LineOutcome> evaluate_lines(const CuratedVocabulary& vocab,
                                               const BaseTokenizer* base,
                                               const NormalizationRuleset& rules,
                                               const std::vector<std::string>& lines,
                                               unsigned jobs) {
    std::vector<LineOutcome> outcomes(lines.size());
    if (jobs <= 1 || lines.size() < 2) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            outcomes[i] = evaluate_line(vocab, base, rules, lines[i]);
        }
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= lines.size()) return;
            outcomes[i] = evaluate_line(vocab, base, rules, lines[i]);
        }
    };
    std::vector<std::thread> pool;
    unsigned n = std::min<std::size_t>(jobs, lines.size());
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return outcomes;
}

inline CorpusStats aggregate(const std::vector<LineOutcome>& outcomes, bool with_base,
                             std::ostream* warnings) {
    CorpusStats stats;
    std::uint64_t total_tokens = 0;
    std::uint64_t total_unks = 0;
    std::uint64_t total_base_tokens = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const LineOutcome& o = outcomes[i];
        if (o.blank) continue;
        if (o.failed) {
            ++stats.skipped_lines;
            if (warnings != nullptr) {
                *warnings << "line " << (i + 1) << ": skipped: " << o.error << '\n';
            }
            continue;
        }
        ++stats.sample_count;
        total_tokens += o.tokens;
        total_unks += o.unks;
        total_base_tokens += o.base_tokens;
        stats.max_token_length = std::max(stats.max_token_length, o.tokens);
    }
    if (stats.sample_count > 0) {
        stats.mean_token_length =
            static_cast<double>(total_tokens) / static_cast<double>(stats.sample_count);
    }
    if (total_tokens > 0) {
        stats.unk_rate = static_cast<double>(total_unks) / static_cast<double>(total_tokens);
    }
    if (with_base && total_base_tokens > 0) {
        stats.compression_ratio =
            static_cast<double>(total_tokens) / static_cast<double>(total_base_tokens);
    }
    return stats;
}

}  // namespace detail

// Normalizes and encodes each non-blank corpus line; lines that fail to
// normalize are skipped, reported to `warnings` with their line number, and
// counted in skipped_lines.
inline CorpusStats token_length_stats(const CuratedVocabulary& vocab, const std::string& corpus,
                                      const NormalizationRuleset& rules, unsigned jobs = 1,
                                      std::ostream* warnings = nullptr) {
    std::vector<std::string> lines = detail::read_lines(corpus);
    return detail::aggregate(detail::evaluate_lines(vocab, nullptr, rules, lines, jobs), false,
                             warnings);
}

// As token_length_stats, additionally encoding every normalized line with
// the base tokenizer and reporting curated-mean / base-mean.
inline CorpusStats compare_tokenizers(const CuratedVocabulary& curated, const BaseTokenizer& base,
                                      const std::string& corpus,
                                      const NormalizationRuleset& rules, unsigned jobs = 1,
                                      std::ostream* warnings = nullptr) {
    std::vector<std::string> lines = detail::read_lines(corpus);
    return detail::aggregate(detail::evaluate_lines(curated, &base, rules, lines, jobs), true,
                             warnings);
}

// Levenshtein distance over token ids divided by max(longer length, 1).
inline double normalized_edit_distance(const TokenIdSeq& a, const TokenIdSeq& b) {
    const std::size_t la = a.size();
    const std::size_t lb = b.size();
    std::vector<std::uint32_t> prev(lb + 1);
    std::vector<std::uint32_t> cur(lb + 1);
    for (std::size_t j = 0; j <= lb; ++j) prev[j] = static_cast<std::uint32_t>(j);
    for (std::size_t i = 1; i <= la; ++i) {
        cur[0] = static_cast<std::uint32_t>(i);
        for (std::size_t j = 1; j <= lb; ++j) {
            const std::uint32_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u);
            cur[j] = std::min({prev[j] + 1u, cur[j - 1] + 1u, sub});
        }
        std::swap(prev, cur);
    }
    const std::size_t denom = std::max<std::size_t>(std::max(la, lb), 1);
    return static_cast<double>(prev[lb]) / static_cast<double>(denom);
}

// Per-pair exact match (after normalization) and normalized token edit
// distance; the two files must have equal line counts.
inline SequenceReport sequence_metrics(const std::string& pred_path, const std::string& ref_path,
                                       const CuratedVocabulary& vocab,
                                       const NormalizationRuleset& rules) {
    std::vector<std::string> pred = detail::read_lines(pred_path);
    std::vector<std::string> ref = detail::read_lines(ref_path);
    if (pred.size() != ref.size()) {
        throw std::runtime_error("line count mismatch: " + pred_path + " has " +
                                 std::to_string(pred.size()) + " lines, " + ref_path + " has " +
                                 std::to_string(ref.size()));
    }
    SequenceReport report;
    report.pairs = pred.size();
    if (report.pairs == 0) {
        report.exact_match = 1.0;
        return report;
    }
    std::uint64_t exact = 0;
    double distance_sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        TokenIdSeq p = encode(vocab, normalize(pred[i], rules));
        TokenIdSeq r = encode(vocab, normalize(ref[i], rules));
        if (p == r) ++exact;
        distance_sum += normalized_edit_distance(p, r);
    }
    report.exact_match = static_cast<double>(exact) / static_cast<double>(report.pairs);
    report.mean_edit_distance = distance_sum / static_cast<double>(report.pairs);
    return report;
}

}  // namespace texo
