#pragma once

// Vocabulary transfer: maps every curated token to the base-token ids that
// spell it, then initializes each curated embedding row as the arithmetic
// mean of the mapped base rows. Applied identically to input embeddings and
// to the output projection (stored as a rows-by-dim matrix).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "texo/bpe.hpp"
#include "texo/tensor.hpp"
#include "texo/vocab.hpp"

namespace texo {

struct TokenMapping {
    // entries[i] = non-empty list of base token ids for curated token id i
    std::vector<std::vector<int>> entries;

    std::size_t size() const { return entries.size(); }
};

// Builds the token mapping:
//   - curated specials resolve by name in the base vocabulary; when absent
//     they fall back to the base "<unk>" row, and when the base defines no
//     "<unk>" either, to row 0 (an arbitrary but total choice; these rows
//     are retrained anyway).
//   - any other token t maps to [id(marker+t)] when both t and marker+t are
//     base tokens (the whole-word lookup never re-splits), otherwise to the
//     merge-loop encoding of t.
inline TokenMapping build_mapping(const BaseTokenizer& base, const CuratedVocabulary& curated) {
    TokenMapping mapping;
    mapping.entries.reserve(curated.tokens.size());
    for (std::size_t i = 0; i < curated.tokens.size(); ++i) {
        const std::string& token = curated.tokens[i];
        if (i < kSpecialTokens.size()) {
            int id = base.id_of(token);
            if (id < 0) id = base.unk_id();
            if (id < 0) id = 0;
            mapping.entries.push_back({id});
            continue;
        }
        if (base.contains(token) && base.contains(base.boundary_marker + token)) {
            mapping.entries.push_back({base.id_of(base.boundary_marker + token)});
            continue;
        }
        try {
            mapping.entries.push_back(bpe_encode(base, token));
        } catch (const std::exception& e) {
            throw std::runtime_error("cannot map curated token '" + token + "': " + e.what());
        }
    }
    return mapping;
}

// Mean-pools the mapped source rows into a target_rows x dim matrix.
// Duplicate ids keep their multiplicity. Accumulation is in 64-bit floats
// so the result is independent of summation order; single-id mappings are
// bitwise copies of the source row.
inline EmbeddingMatrix transfer_embeddings(const EmbeddingMatrix& source,
                                           const TokenMapping& mapping,
                                           std::uint64_t target_rows) {
    if (target_rows != mapping.entries.size()) {
        throw std::runtime_error("target row count " + std::to_string(target_rows) +
                                 " does not match mapping size " +
                                 std::to_string(mapping.entries.size()));
    }
    if (source.data.size() != source.rows * source.dim) {
        throw std::runtime_error("source matrix data length does not match its dimensions");
    }
    for (float v : source.data) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("source matrix contains a non-finite value");
        }
    }
    EmbeddingMatrix out;
    out.rows = target_rows;
    out.dim = source.dim;
    out.data.resize(out.rows * out.dim);
    std::vector<double> acc(source.dim);
    for (std::uint64_t i = 0; i < target_rows; ++i) {
        const std::vector<int>& ids = mapping.entries[i];
        if (ids.empty()) {
            throw std::runtime_error("mapping entry " + std::to_string(i) + " is empty");
        }
        for (int id : ids) {
            if (id < 0 || static_cast<std::uint64_t>(id) >= source.rows) {
                throw std::runtime_error("mapped base id " + std::to_string(id) +
                                         " is out of range for a " + std::to_string(source.rows) +
                                         "-row matrix");
            }
        }
        if (ids.size() == 1) {
            const float* src = source.row(static_cast<std::uint64_t>(ids[0]));
            std::copy(src, src + source.dim, out.row(i));
            continue;
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        for (int id : ids) {
            const float* src = source.row(static_cast<std::uint64_t>(id));
            for (std::uint64_t d = 0; d < source.dim; ++d) acc[d] += static_cast<double>(src[d]);
        }
        float* dst = out.row(i);
        const double count = static_cast<double>(ids.size());
        for (std::uint64_t d = 0; d < source.dim; ++d) {
            dst[d] = static_cast<float>(acc[d] / count);
        }
    }
    return out;
}

// Embedding parameter count: vocab_size * dim once when the input and
// output embeddings share weights, twice otherwise.
constexpr std::uint64_t embedding_param_count(std::uint64_t vocab_size, std::uint64_t dim,
                                              bool tied) {
    return (tied ? 1u : 2u) * vocab_size * dim;
}

// Audit report: one `curated_id<TAB>token<TAB>base_ids...` line per token.
inline void write_mapping_report(const std::string& path, const CuratedVocabulary& curated,
                                 const TokenMapping& mapping) {
    if (mapping.entries.size() != curated.tokens.size()) {
        throw std::runtime_error("mapping size does not match vocabulary size");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
    for (std::size_t i = 0; i < mapping.entries.size(); ++i) {
        out << i << '\t' << curated.tokens[i] << '\t';
        for (std::size_t j = 0; j < mapping.entries[i].size(); ++j) {
            if (j) out << ' ';
            out << mapping.entries[i][j];
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("I/O error while writing " + path);
}

}  // namespace texo
