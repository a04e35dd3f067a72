// texo: curated LaTeX tokenization, corpus normalization, vocabulary
// transfer, and corpus statistics as a single pipeline-friendly executable.
// Subcommands read standard streams unless told otherwise, and never leave
// a partially written output file behind on failure.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "texo/bpe.hpp"
#include "texo/eval.hpp"
#include "texo/normalizer.hpp"
#include "texo/tensor.hpp"
#include "texo/tokenizer.hpp"
#include "texo/transfer.hpp"
#include "texo/vocab.hpp"

namespace {

// Writes through a sibling temp file and renames into place on success, so
// a failed run leaves no output file.
class AtomicFile {
public:
    explicit AtomicFile(const std::string& path)
        : path_(path), tmp_(path + ".tmp." + std::to_string(::getpid())) {}

    ~AtomicFile() {
        if (!committed_) {
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    const std::string& tmp_path() const { return tmp_; }

    void commit() {
        std::filesystem::rename(tmp_, path_);
        committed_ = true;
    }

private:
    std::string path_;
    std::string tmp_;
    bool committed_ = false;
};

void require_readable(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + what + ": " + path);
}

unsigned default_jobs() {
    if (const char* env = std::getenv("TEXO_JOBS")) {
        int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

texo::NormalizationRuleset ruleset_from_option(const std::string& rules_path) {
    return rules_path.empty() ? texo::default_ruleset() : texo::load_ruleset(rules_path);
}

// Applies `fn` to every input line, writing one output line per input line.
// With an --out path the result is committed only after every line succeeds.
template <typename Fn>
void run_line_filter(const std::string& in_path, const std::string& out_path, Fn fn) {
    std::istream* in = &std::cin;
    std::ifstream file_in;
    if (!in_path.empty()) {
        file_in.open(in_path, std::ios::binary);
        if (!file_in) throw std::runtime_error("cannot open input file: " + in_path);
        in = &file_in;
    }

    std::unique_ptr<AtomicFile> atomic;
    std::ofstream file_out;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        atomic = std::make_unique<AtomicFile>(out_path);
        file_out.open(atomic->tmp_path(), std::ios::binary);
        if (!file_out) throw std::runtime_error("cannot open output file: " + out_path);
        out = &file_out;
    }

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        try {
            *out << fn(line) << '\n';
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (in->bad()) throw std::runtime_error("I/O error while reading input");
    out->flush();
    if (!*out) throw std::runtime_error("I/O error while writing output");
    if (atomic) {
        file_out.close();
        atomic->commit();
    }
}

void emit_report(const nlohmann::json& report, const std::string& out_path) {
    std::string text = report.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    AtomicFile atomic(out_path);
    std::ofstream out(atomic.tmp_path(), std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("I/O error while writing " + out_path);
    out.close();
    atomic.commit();
}

nlohmann::json stats_to_json(const texo::CorpusStats& stats) {
    nlohmann::json j{
        {"sample_count", stats.sample_count},
        {"mean_token_length", stats.mean_token_length},
        {"max_token_length", stats.max_token_length},
        {"unk_rate", stats.unk_rate},
        {"skipped_lines", stats.skipped_lines},
    };
    if (stats.compression_ratio) j["compression_ratio"] = *stats.compression_ratio;
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"Curated LaTeX tokenizer toolkit"};
    app.require_subcommand(1);

    // build-vocab
    auto* build = app.add_subcommand("build-vocab", "Build a curated vocabulary from a catalog");
    std::string build_catalog, build_out;
    bool no_fuse_env = false;
    build->add_option("--catalog", build_catalog, "macro catalog file")->required();
    build->add_option("--out", build_out, "vocabulary output file")->required();
    build->add_flag("--no-fuse-env", no_fuse_env, "do not emit fused \\begin/\\end tokens");
    build->callback([&]() {
        require_readable(build_catalog, "catalog file");
        texo::MacroCatalog catalog = texo::load_catalog(build_catalog);
        texo::CuratedVocabulary vocab = texo::build_vocab(catalog, !no_fuse_env);
        AtomicFile atomic(build_out);
        texo::save_vocabulary(atomic.tmp_path(), vocab);
        atomic.commit();
        std::cout << "vocabulary size: " << vocab.size() << "\n";
    });

    // normalize
    auto* norm = app.add_subcommand("normalize", "Normalize LaTeX lines");
    std::string norm_rules, norm_in, norm_out;
    norm->add_option("--rules", norm_rules, "synonym table file");
    norm->add_option("--in", norm_in, "input file (default: stdin)");
    norm->add_option("--out", norm_out, "output file (default: stdout)");
    norm->callback([&]() {
        texo::NormalizationRuleset rules = ruleset_from_option(norm_rules);
        run_line_filter(norm_in, norm_out,
                        [&](const std::string& line) { return texo::normalize(line, rules); });
    });

    // tokenize
    auto* tok = app.add_subcommand("tokenize", "Encode LaTeX lines with the curated vocabulary");
    std::string tok_vocab, tok_in, tok_out;
    bool tok_ids = false, tok_tokens = false;
    tok->add_option("--vocab", tok_vocab, "curated vocabulary file")->required();
    auto* ids_flag = tok->add_flag("--ids", tok_ids, "emit space-separated token ids (default)");
    tok->add_flag("--tokens", tok_tokens, "emit token strings")->excludes(ids_flag);
    tok->add_option("--in", tok_in, "input file (default: stdin)");
    tok->add_option("--out", tok_out, "output file (default: stdout)");
    tok->callback([&]() {
        texo::CuratedVocabulary vocab = texo::load_vocabulary(tok_vocab);
        run_line_filter(tok_in, tok_out, [&](const std::string& line) {
            texo::TokenIdSeq ids = texo::encode(vocab, line);
            std::ostringstream os;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (i) os << ' ';
                if (tok_tokens) {
                    os << vocab.token(ids[i]);
                } else {
                    os << ids[i];
                }
            }
            return os.str();
        });
    });

    // stats
    auto* stats = app.add_subcommand("stats", "Token-length statistics over a corpus");
    std::string stats_vocab, stats_corpus, stats_rules, stats_out;
    std::string stats_base_vocab, stats_base_merges;
    std::string stats_marker{texo::kDefaultBoundaryMarker};
    unsigned stats_jobs = default_jobs();
    stats->add_option("--vocab", stats_vocab, "curated vocabulary file")->required();
    stats->add_option("--corpus", stats_corpus, "corpus file, one formula per line")->required();
    stats->add_option("--rules", stats_rules, "synonym table file");
    auto* bv = stats->add_option("--base-vocab", stats_base_vocab, "base tokenizer vocabulary");
    auto* bm = stats->add_option("--base-merges", stats_base_merges, "base tokenizer merges");
    bv->needs(bm);
    bm->needs(bv);
    stats->add_option("--marker", stats_marker, "base word-boundary marker");
    stats->add_option("--jobs", stats_jobs, "worker pool size (default: $TEXO_JOBS or 1)");
    stats->add_option("--out", stats_out, "report output file (default: stdout)");
    stats->callback([&]() {
        require_readable(stats_vocab, "vocabulary file");
        require_readable(stats_corpus, "corpus file");
        texo::CuratedVocabulary vocab = texo::load_vocabulary(stats_vocab);
        texo::NormalizationRuleset rules = ruleset_from_option(stats_rules);
        texo::CorpusStats result;
        if (!stats_base_vocab.empty()) {
            texo::BaseTokenizer base =
                texo::load_base(stats_base_vocab, stats_base_merges, stats_marker);
            result = texo::compare_tokenizers(vocab, base, stats_corpus, rules, stats_jobs,
                                              &std::cerr);
        } else {
            result = texo::token_length_stats(vocab, stats_corpus, rules, stats_jobs, &std::cerr);
        }
        emit_report(stats_to_json(result), stats_out);
    });

    // transfer
    auto* transfer = app.add_subcommand("transfer", "Vocabulary-transfer embedding matrices");
    std::string tr_base_vocab, tr_base_merges, tr_target_vocab;
    std::string tr_marker{texo::kDefaultBoundaryMarker};
    std::string tr_in_emb, tr_out_emb, tr_in_proj, tr_out_proj, tr_report;
    bool tr_tied = false;
    transfer->add_option("--base-vocab", tr_base_vocab, "base tokenizer vocabulary")->required();
    transfer->add_option("--base-merges", tr_base_merges, "base tokenizer merges")->required();
    transfer->add_option("--marker", tr_marker, "base word-boundary marker");
    transfer->add_option("--target-vocab", tr_target_vocab, "curated vocabulary file")->required();
    transfer->add_option("--in-emb", tr_in_emb, "input-embedding tensor")->required();
    transfer->add_option("--out-emb", tr_out_emb, "transferred input-embedding tensor")
        ->required();
    transfer->add_option("--in-proj", tr_in_proj, "output-projection tensor (rows x dim)");
    transfer->add_option("--out-proj", tr_out_proj, "transferred output-projection tensor")
        ->required();
    transfer->add_flag("--tied", tr_tied, "transfer once and reuse for both outputs");
    transfer->add_option("--report", tr_report, "write a curated_id/token/base_ids audit report");
    transfer->callback([&]() {
        if (!tr_tied && tr_in_proj.empty()) {
            throw std::runtime_error("--in-proj is required unless --tied is given");
        }
        if (tr_tied && !tr_in_proj.empty() && tr_in_proj != tr_in_emb) {
            throw std::runtime_error("--tied expects --in-proj to match --in-emb");
        }
        texo::BaseTokenizer base = texo::load_base(tr_base_vocab, tr_base_merges, tr_marker);
        texo::CuratedVocabulary curated = texo::load_vocabulary(tr_target_vocab);
        texo::TokenMapping mapping = texo::build_mapping(base, curated);
        const auto target_rows = static_cast<std::uint64_t>(curated.size());

        texo::EmbeddingMatrix in_emb = texo::read_tensor(tr_in_emb);
        texo::EmbeddingMatrix out_emb = texo::transfer_embeddings(in_emb, mapping, target_rows);
        texo::EmbeddingMatrix out_proj;
        if (tr_tied) {
            out_proj = out_emb;
        } else {
            texo::EmbeddingMatrix in_proj = texo::read_tensor(tr_in_proj);
            out_proj = texo::transfer_embeddings(in_proj, mapping, target_rows);
        }

        AtomicFile emb_file(tr_out_emb);
        texo::write_tensor(emb_file.tmp_path(), out_emb);
        AtomicFile proj_file(tr_out_proj);
        texo::write_tensor(proj_file.tmp_path(), out_proj);
        emb_file.commit();
        proj_file.commit();
        if (!tr_report.empty()) {
            AtomicFile report_file(tr_report);
            texo::write_mapping_report(report_file.tmp_path(), curated, mapping);
            report_file.commit();
        }
        std::cout << "transferred " << target_rows << " rows (dim " << out_emb.dim << ")\n";
    });

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Sequence metrics between two corpora");
    std::string m_vocab, m_pred, m_ref;
    metrics->add_option("--vocab", m_vocab, "curated vocabulary file")->required();
    metrics->add_option("--pred", m_pred, "predictions, one per line")->required();
    metrics->add_option("--ref", m_ref, "references, one per line")->required();
    metrics->callback([&]() {
        texo::CuratedVocabulary vocab = texo::load_vocabulary(m_vocab);
        texo::SequenceReport report =
            texo::sequence_metrics(m_pred, m_ref, vocab, texo::default_ruleset());
        emit_report(nlohmann::json{{"pairs", report.pairs},
                                   {"exact_match", report.exact_match},
                                   {"mean_edit_distance", report.mean_edit_distance}},
                    "");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "texo: error: " << e.what() << "\n";
        return 1;
    }
}
