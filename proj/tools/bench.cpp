// Benchmark: the threaded experiment runner against the single-threaded
// reference loop on the same matrix, verifying identical output.

#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "spcdiar/harness.hpp"

using namespace spcdiar;

namespace {

ExperimentConfig make_config(int seeds, int speakers) {
    ExperimentConfig config;
    config.conversation.n_speakers = speakers;
    config.conversation.sentences_per_speaker = {10, 12};
    config.conversation.words_per_sentence = {5, 10};
    config.conversation.word_duration = {0.25, 0.4};
    config.conversation.pause = {0.05, 0.35};
    config.conversation.overlap_fraction = 0.01;
    for (int s = 1; s <= seeds; ++s) config.seeds.push_back(static_cast<std::uint64_t>(s));
    config.behavior.permutation_mode = PermutationMode::kRandomPerChunk;
    config.behavior.word_error_rate = 0.02;
    config.behavior.speaker_confusion_rate = 0.1;
    config.embedder_noise = 0.05;

    const auto cond = [](const std::string& name, ChunkerKind ck, EngineKind ek) {
        Condition c;
        c.name = name;
        c.chunker = ck;
        c.engine = ek;
        return c;
    };
    config.conditions.push_back(cond("spc-oracle", ChunkerKind::kOracle, EngineKind::kSpc));
    config.conditions.push_back(
        cond("spc-noupdate", ChunkerKind::kOracle, EngineKind::kSpcNoUpdate));
    config.conditions.push_back(
        cond("clustering", ChunkerKind::kOracle, EngineKind::kOfflineClustering));
    config.conditions.push_back(cond("naive", ChunkerKind::kOracle, EngineKind::kNaiveConcat));
    config.conditions.push_back(cond("spc-vad", ChunkerKind::kVad, EngineKind::kSpc));
    return config;
}

template <typename F>
double time_seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"threaded runner vs serial reference"};
    int seeds = 24;
    int speakers = 5;
    int threads = 0;
    app.add_option("--seeds", seeds, "seeds per condition");
    app.add_option("--speakers", speakers, "speakers per conversation");
    app.add_option("--threads", threads, "threads for the parallel pass (0 = all)");
    CLI11_PARSE(app, argc, argv);

    ExperimentConfig config = make_config(seeds, speakers);
    config.threads = threads;

    ExperimentResult serial, parallel;
    const double t_serial = time_seconds([&] { serial = run_experiment_serial(config); });
    const double t_parallel = time_seconds([&] { parallel = run_experiment(config); });

    const std::string a = results_to_jsonl(serial);
    const std::string b = results_to_jsonl(parallel);
    const int runs = static_cast<int>(serial.runs.size());

    std::printf("runs                %d (%d conditions x %d seeds)\n", runs, 5, seeds);
    std::printf("serial              %.3f s  (%.1f runs/s)\n", t_serial, runs / t_serial);
    std::printf("parallel            %.3f s  (%.1f runs/s)\n", t_parallel, runs / t_parallel);
    std::printf("speedup             %.2fx\n", t_serial / t_parallel);
    std::printf("outputs identical   %s\n", a == b ? "yes" : "NO");
    std::printf("failures            serial=%d parallel=%d\n", serial.failures, parallel.failures);
    return (a == b && serial.failures == 0) ? 0 : 1;
}
