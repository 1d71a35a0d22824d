// Command line front end: run experiment configs, generate simulated
// conversations, score transcripts, and export chunk lists.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "spcdiar/chunking.hpp"
#include "spcdiar/errors.hpp"
#include "spcdiar/harness.hpp"
#include "spcdiar/io.hpp"
#include "spcdiar/simulate.hpp"
#include "spcdiar/transcript.hpp"

namespace {

using namespace spcdiar;

template <typename T>
std::pair<T, T> as_range(const std::vector<T>& v, std::pair<T, T> fallback) {
    if (v.empty()) return fallback;
    return {v[0], v[1]};
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seed_override,
            const std::string& out_dir, bool verbose_trace, int threads) {
    ExperimentConfig config = load_config(config_path);
    if (!seed_override.empty()) config.seeds = seed_override;
    if (threads >= 0) config.threads = threads;

    const ExperimentResult result = run_experiment(config, verbose_trace);
    std::cout << emit_report(result);
    for (const RunRecord& r : result.runs) {
        if (!r.error.empty()) {
            std::cerr << "run failed: " << r.condition << " seed=" << r.seed << ": " << r.error
                      << '\n';
        }
    }
    if (!out_dir.empty()) {
        write_outputs(result, out_dir);
        std::cout << "wrote " << out_dir << "/results.jsonl\n";
    } else if (verbose_trace) {
        for (const RunRecord& r : result.runs) {
            if (r.trace_text.empty()) continue;
            std::cout << "== " << r.condition << " seed=" << r.seed << " ==\n" << r.trace_text;
        }
    }
    return result.failures == 0 ? 0 : 1;
}

int cmd_gen(const ConversationSpec& spec, const std::string& out_path,
            const std::string& transcript_out) {
    const Conversation conv = gen_conversation(spec);
    save_timed_reference(conv, out_path);
    if (!transcript_out.empty()) save_transcript_lines({conv.reference}, transcript_out);
    std::printf("%s: %d speakers, %zu words, %.1f s, overlap %.3f\n", conv.id.c_str(),
                conv.n_speakers(), conv.reference.words().size(), conv.duration,
                measure_overlap_fraction(conv));
    return 0;
}

int cmd_score(const std::string& ref_path, const std::string& hyp_path, bool ref_lines) {
    std::vector<SpeakerAttributedTranscript> refs;
    if (ref_lines) {
        refs = load_transcript_lines(ref_path);
    } else {
        refs.push_back(load_timed_reference(ref_path).reference);
    }
    const std::vector<SpeakerAttributedTranscript> hyps = load_transcript_lines(hyp_path);
    if (refs.size() != hyps.size()) {
        throw ConfigError("reference has " + std::to_string(refs.size()) + " conversations but hypothesis has " +
                          std::to_string(hyps.size()));
    }

    std::printf("%4s %8s %8s %8s %8s %9s\n", "pair", "WDER %", "cpWER %", "SA-WER %", "delta %",
                "spk r/h");
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const ScoreReport r = score(refs[i], hyps[i]);
        std::printf("%4zu %8.2f %8.2f %8.2f %8.2f %5d/%-3d\n", i, 100.0 * r.wder, 100.0 * r.cpwer,
                    100.0 * r.sawer, 100.0 * r.delta, r.ref_speakers, r.hyp_speakers);
    }
    return 0;
}

int cmd_chunks(const std::string& input, const std::string& chunker, double chunk_len,
               const VadParams& vp, bool raw, const std::string& out_path) {
    Conversation conv = load_timed_reference(input);
    if (!raw) conv = trim_to_reference(conv);

    std::vector<Chunk> chunks;
    if (chunker == "oracle") {
        chunks = oracle_chunks(conv, chunk_len);
    } else {
        VadParams p = vp;
        p.max_chunk_len = chunk_len;
        chunks = vad_chunks(conv, p);
    }

    const std::string csv = chunks_to_csv(chunks);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(out_path);
        if (!f) throw ConfigError("cannot write " + out_path);
        f << csv;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming speaker-attributed transcription experiments"};
    app.require_subcommand(1);

    // run
    std::string config_path;
    std::vector<std::uint64_t> seed_override;
    std::string out_dir;
    bool verbose_trace = false;
    int threads = -1;
    CLI::App* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--seed-override", seed_override, "replace the config's seed list");
    run->add_option("--out", out_dir, "directory for results.jsonl and report.txt");
    run->add_flag("--verbose-trace", verbose_trace, "collect per-chunk cache traces");
    run->add_option("--threads", threads, "worker threads (0 = all available)");

    // gen
    ConversationSpec spec;
    std::vector<int> g_sentences, g_words;
    std::vector<double> g_dur, g_pause;
    std::string gen_out, gen_transcript;
    CLI::App* gen = app.add_subcommand("gen", "generate a simulated conversation");
    gen->add_option("--speakers", spec.n_speakers, "number of speakers");
    gen->add_option("--sentences", g_sentences, "sentences per speaker (lo hi)")->expected(2);
    gen->add_option("--words", g_words, "words per sentence (lo hi)")->expected(2);
    gen->add_option("--word-duration", g_dur, "word duration range in seconds (lo hi)")
        ->expected(2);
    gen->add_option("--pause", g_pause, "pause range in seconds (lo hi)")->expected(2);
    gen->add_option("--overlap", spec.overlap_fraction, "target overlapped fraction of speech");
    gen->add_option("--seed", spec.seed, "generator seed");
    gen->add_option("--out", gen_out, "timed-reference output file")->required();
    gen->add_option("--transcript-out", gen_transcript, "also write the rendered transcript line");

    // score
    std::string ref_path, hyp_path;
    bool ref_lines = false;
    CLI::App* sc = app.add_subcommand("score", "score hypothesis transcripts against a reference");
    sc->add_option("reference", ref_path, "timed-reference file (or transcript lines with --ref-lines)")
        ->required()
        ->check(CLI::ExistingFile);
    sc->add_option("hypothesis", hyp_path, "transcript lines, one conversation per line")
        ->required()
        ->check(CLI::ExistingFile);
    sc->add_flag("--ref-lines", ref_lines, "reference is transcript lines, paired by line");

    // chunks
    std::string chunks_input, chunker = "oracle", chunks_out;
    double chunk_len = 10.0;
    VadParams vp;
    bool raw = false;
    CLI::App* ch = app.add_subcommand("chunks", "export a chunk list as index,start,end");
    ch->add_option("input", chunks_input, "timed-reference file")
        ->required()
        ->check(CLI::ExistingFile);
    ch->add_option("--chunker", chunker, "oracle or vad")
        ->check(CLI::IsMember({"oracle", "vad"}));
    ch->add_option("--chunk-len", chunk_len, "maximum chunk length in seconds");
    ch->add_option("--energy-threshold", vp.energy_threshold, "vad energy threshold");
    ch->add_option("--min-silence", vp.min_silence, "vad seconds of quiet to close a region");
    ch->add_option("--min-speech", vp.min_speech, "vad seconds of energy to open a region");
    ch->add_flag("--raw", raw, "skip the head/tail trimming pre-pass");
    ch->add_option("--out", chunks_out, "write the list to a file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed_override, out_dir, verbose_trace, threads);
        }
        if (gen->parsed()) {
            spec.sentences_per_speaker = as_range(g_sentences, spec.sentences_per_speaker);
            spec.words_per_sentence = as_range(g_words, spec.words_per_sentence);
            spec.word_duration = as_range(g_dur, spec.word_duration);
            spec.pause = as_range(g_pause, spec.pause);
            return cmd_gen(spec, gen_out, gen_transcript);
        }
        if (sc->parsed()) return cmd_score(ref_path, hyp_path, ref_lines);
        if (ch->parsed()) return cmd_chunks(chunks_input, chunker, chunk_len, vp, raw, chunks_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
