// Acceptance gate for the streaming diarization stack. Each numbered criterion
// prints exactly one [PASS]/[FAIL] line; the exit code is nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "spcdiar/harness.hpp"
#include "spcdiar/rng.hpp"
#include "spcdiar/transcript.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

namespace {

using namespace spcdiar;

bool g_all_ok = true;
long long g_cache_violations = 0;  // accumulated across every scored run
long long g_runs_checked = 0;

void report(int number, bool pass, const std::string& text) {
    std::printf("[%s] %2d %s\n", pass ? "PASS" : "FAIL", number, text.c_str());
    if (!pass) g_all_ok = false;
}

std::string fmt(const char* format, ...) {
    char buf[2048];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (const double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

struct CondStats {
    std::vector<double> wder, cpwer, delta;
    std::map<std::uint64_t, double> wder_by_seed;
    int failures = 0;
};

// Buckets a result by condition and feeds the global invariant counters.
std::map<std::string, CondStats> collect(const ExperimentResult& result) {
    std::map<std::string, CondStats> by;
    for (const RunRecord& r : result.runs) {
        CondStats& s = by[r.condition];
        if (!r.error.empty()) {
            ++s.failures;
            continue;
        }
        g_cache_violations += r.cache_violations;
        ++g_runs_checked;
        s.wder.push_back(r.report.wder);
        s.cpwer.push_back(r.report.cpwer);
        s.delta.push_back(r.report.delta);
        s.wder_by_seed[r.seed] = r.report.wder;
    }
    return by;
}

// Five-speaker conversations of roughly three minutes, scrambling recognizer,
// no word or embedding noise: the consistency-recovery setting.
const char* kRecoveryConfig = R"({
    "conversation": {
        "n_speakers": 5,
        "sentences_per_speaker": [12, 14],
        "words_per_sentence": [5, 10],
        "word_duration": [0.25, 0.4],
        "pause": [0.05, 0.35],
        "overlap_fraction": 0.01
    },
    "seeds": {"base": 1000, "count": 50},
    "recognizer": {"permutation_mode": "random-per-chunk"},
    "conditions": [
        {"name": "spc", "engine": "spc"},
        {"name": "naive", "engine": "naive-concat"}
    ]
})";

// Shared noisy setting for the directional criteria: label confusion plus
// mildly noisy embeddings.
std::string noisy_config(std::uint64_t seed_base, double word_error_rate, double embedder_noise,
                         const std::string& conditions) {
    return fmt(R"({
        "conversation": {
            "n_speakers": 4,
            "sentences_per_speaker": [8, 10],
            "words_per_sentence": [5, 10],
            "word_duration": [0.25, 0.4],
            "pause": [0.05, 0.35],
            "overlap_fraction": 0.01
        },
        "seeds": {"base": %llu, "count": 50},
        "recognizer": {
            "permutation_mode": "random-per-chunk",
            "word_error_rate": %g,
            "speaker_confusion_rate": 0.1
        },
        "embedder": {"noise_sigma": %g},
        "conditions": [%s]
    })",
               static_cast<unsigned long long>(seed_base), word_error_rate, embedder_noise,
               conditions.c_str());
}

// ─── criterion 1: consistency recovery ───────────────────────────────────────

void criterion_consistency() {
    const auto config = parse_config(kRecoveryConfig);
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = run_experiment(config);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto stats = collect(result);
    int exact = 0;
    const CondStats& spc = stats.at("spc");
    for (std::size_t i = 0; i < spc.wder.size(); ++i) {
        if (spc.wder[i] == 0.0 && spc.cpwer[i] == 0.0) ++exact;
    }
    const double naive_wder = mean(stats.at("naive").wder);

    const bool pass = result.failures == 0 && exact == 50 &&
                      spc.wder.size() == 50 && naive_wder > 0.15 && secs < 60.0;
    report(1, pass,
           fmt("consistency recovery: exact on %d/50 seeds, naive mean WDER %.3f, %.1f s",
               exact, naive_wder, secs));
}

// ─── criterion 2: cpWER equals brute force ───────────────────────────────────

SpeakerAttributedTranscript random_k_speaker(std::mt19937_64& rng, int k, int max_extra) {
    const auto& vocab = helpers::small_vocab();
    const int n_words = k + static_cast<int>(rng() % static_cast<unsigned>(max_extra));
    std::vector<TimedWord> words;
    for (int i = 0; i < n_words; ++i) {
        const int speaker =
            i < k ? i + 1 : 1 + static_cast<int>(rng() % static_cast<unsigned>(k));
        words.push_back(helpers::word(vocab[rng() % vocab.size()], speaker));
    }
    return SpeakerAttributedTranscript(std::move(words));
}

void criterion_cpwer_exact() {
    std::mt19937_64 rng(2026);
    int checked = 0, mismatches = 0;
    for (int k = 2; k <= 6; ++k) {
        for (int i = 0; i < 200; ++i) {
            const auto ref = random_k_speaker(rng, k, 36);
            const auto hyp = helpers::mutate(rng, ref, k);
            const double got = cpwer(ref, hyp).rate;
            const double want = oracles::brute_force_cpwer(ref, hyp);
            if (got != want) ++mismatches;
            ++checked;
        }
    }
    report(2, mismatches == 0,
           fmt("cpWER equals factorial brute force on %d/%d pairs (K = 2..6)",
               checked - mismatches, checked));
}

// ─── criterion 3: metric axioms ──────────────────────────────────────────────

void criterion_axioms() {
    std::mt19937_64 rng(3033);
    int bad_invariance = 0, bad_order = 0, bad_self = 0;
    for (int i = 0; i < 500; ++i) {
        const auto ref = helpers::random_transcript(rng, 6, 30);
        const auto hyp = helpers::mutate(rng, ref, 6);

        std::vector<int> perm{1, 2, 3, 4, 5, 6};
        rng::shuffle(rng, perm);
        std::unordered_map<int, SpeakerLabel> map;
        for (int s = 1; s <= 6; ++s) map[s] = SpeakerLabel{perm[static_cast<std::size_t>(s - 1)], ""};

        if (cpwer(ref, relabel(hyp, map)).rate != cpwer(ref, hyp).rate) ++bad_invariance;
        if (sawer(ref, hyp) < cpwer(ref, hyp).rate) ++bad_order;
        const auto self = score(ref, ref);
        if (self.wder != 0.0 || self.cpwer != 0.0 || self.sawer != 0.0) ++bad_self;
    }
    report(3, bad_invariance == 0 && bad_order == 0 && bad_self == 0,
           fmt("metric axioms on 500 transcripts: %d invariance, %d ordering, %d self-score breaks",
               bad_invariance, bad_order, bad_self));
}

// ─── criterion 4: cache update direction ─────────────────────────────────────

void criterion_update_direction() {
    const auto config = parse_config(noisy_config(
        4000, 0.0, 0.05,
        R"({"name": "updating", "engine": "spc"},
           {"name": "frozen", "engine": "spc-noupdate"})"));
    const auto stats = collect(run_experiment(config));
    const CondStats& upd = stats.at("updating");
    const CondStats& fro = stats.at("frozen");

    int held = 0, paired = 0;
    for (const auto& [seed, w] : upd.wder_by_seed) {
        const auto it = fro.wder_by_seed.find(seed);
        if (it == fro.wder_by_seed.end()) continue;
        ++paired;
        if (w <= it->second) ++held;
    }
    const double share = paired > 0 ? static_cast<double>(held) / paired : 0.0;
    const bool pass = upd.failures == 0 && fro.failures == 0 && paired == 50 &&
                      mean(upd.wder) < mean(fro.wder) && share >= 0.7;
    report(4, pass,
           fmt("cache updates: mean WDER %.4f (on) vs %.4f (off), better-or-equal on %d/%d seeds",
               mean(upd.wder), mean(fro.wder), held, paired));
}

// ─── criterion 5: profile delta direction ────────────────────────────────────

void criterion_profile_direction() {
    const auto config = parse_config(noisy_config(
        5000, 0.0, 0.05,
        R"({"name": "bare", "engine": "spc"},
           {"name": "enrolled", "engine": "spc", "profiles": "auto"})"));
    const auto stats = collect(run_experiment(config));
    const CondStats& bare = stats.at("bare");
    const CondStats& enrolled = stats.at("enrolled");
    const bool pass = bare.failures == 0 && enrolled.failures == 0 &&
                      enrolled.delta.size() == 50 && mean(enrolled.delta) < mean(bare.delta);
    report(5, pass,
           fmt("profiles: mean delta %.4f enrolled vs %.4f bare",
               mean(enrolled.delta), mean(bare.delta)));
}

// ─── criterion 6: oracle vs VAD chunking ─────────────────────────────────────

void criterion_chunker_direction() {
    const auto config = parse_config(noisy_config(
        6000, 0.02, 0.05,
        R"({"name": "oracle", "engine": "spc", "chunker": "oracle"},
           {"name": "vad", "engine": "spc", "chunker": "vad"})"));
    const auto stats = collect(run_experiment(config));
    const CondStats& oracle = stats.at("oracle");
    const CondStats& vad = stats.at("vad");
    const bool pass = oracle.failures == 0 && vad.failures == 0 &&
                      mean(oracle.wder) <= mean(vad.wder) &&
                      mean(oracle.cpwer) <= mean(vad.cpwer);
    report(6, pass,
           fmt("chunkers: oracle WDER %.4f / cpWER %.4f, vad WDER %.4f / cpWER %.4f",
               mean(oracle.wder), mean(oracle.cpwer), mean(vad.wder), mean(vad.cpwer)));
}

// ─── criterion 7: streaming vs offline clustering ────────────────────────────

void criterion_streaming_vs_clustering() {
    const auto config = parse_config(noisy_config(
        7000, 0.02, 0.5,
        R"({"name": "streaming", "engine": "spc"},
           {"name": "clustering", "engine": "offline-clustering"})"));
    const auto stats = collect(run_experiment(config));
    const CondStats& streaming = stats.at("streaming");
    const CondStats& clustering = stats.at("clustering");
    const bool pass = streaming.failures == 0 && clustering.failures == 0 &&
                      mean(streaming.wder) < mean(clustering.wder);
    report(7, pass,
           fmt("noisy embeddings: streaming mean WDER %.4f vs clustering %.4f",
               mean(streaming.wder), mean(clustering.wder)));
}

// ─── criterion 9: cache gate pins ────────────────────────────────────────────

struct PassTiming : WordTimingModel {
    std::vector<TimedWord> align(const TimeSpan&,
                                 const std::vector<TimedWord>& words) const override {
        return words;
    }
};

struct MapEmbedder : Embedder {
    std::map<double, EmbeddingVector> by_start;
    EmbeddingVector embed(const AudioSpan& span) const override {
        const auto it = by_start.find(span.span.start);
        return it == by_start.end() ? EmbeddingVector{1.0, 0.0} : it->second;
    }
};

SpeakerAttributedTranscript timed_run(int speaker, double start, const std::string& text,
                                      double word_dur) {
    std::vector<TimedWord> words;
    double t = start;
    std::string token;
    std::istringstream in(text);
    while (in >> token) {
        words.push_back(helpers::word(token, speaker, t, t + word_dur));
        t += word_dur;
    }
    return SpeakerAttributedTranscript(std::move(words));
}

CacheEntry entry_for(int speaker, double start, double end, const std::string& text) {
    CacheEntry entry;
    entry.speaker = SpeakerLabel{speaker, ""};
    entry.audio = {"conv", {start, end}};
    entry.text = text;
    const auto words = timed_run(speaker, start, text, 0.2).words();
    entry.words = words;
    return entry;
}

void criterion_cache_gates() {
    const PassTiming timing;
    const SpcParams params;
    bool pass = true;
    std::string detail = "insert, finality, similarity";

    // New speakers are inserted.
    {
        const Chunk chunk{0, {0.0, 6.0}};
        const auto result = timed_run(1, 0.0, "fresh voice speaking now", 0.4);
        std::vector<CacheEvent> events;
        const auto cache = update_cache(SpeakerPromptCache{}, chunk, result, timing,
                                        MapEmbedder{}, params, "conv", &events);
        pass = pass && cache.contains(1) && events.size() == 1 &&
               events[0].kind == CacheEventKind::kInsert;
        if (!pass) detail = "insert-on-new broke";
    }

    // Long punctuated entries are final even for longer lookalike candidates.
    if (pass) {
        SpeakerPromptCache cache;
        cache.put(entry_for(1, 0.0, 2.0, "one two three four five six seven eight."));
        const Chunk chunk{1, {10.0, 16.0}};
        const auto result = timed_run(1, 10.0, "a much longer candidate run of clean words", 0.45);
        std::vector<CacheEvent> events;
        const auto updated =
            update_cache(cache, chunk, result, timing, MapEmbedder{}, params, "conv", &events);
        pass = updated.find(1)->text == "one two three four five six seven eight." &&
               events.size() == 1 && events[0].kind == CacheEventKind::kSkip;
        if (!pass) detail = "finality gate broke";
    }

    // Replacement needs cosine strictly above theta; the boundary refuses.
    if (pass) {
        SpeakerPromptCache cache;
        cache.put(entry_for(1, 0.0, 1.0, "two words"));
        const Chunk chunk{2, {20.0, 26.0}};
        const auto result = timed_run(1, 20.0, "plenty of new speech to cache here", 0.45);

        MapEmbedder low;
        low.by_start[20.0] = {0.5, std::sqrt(0.75)};
        auto updated = update_cache(cache, chunk, result, timing, low, params, "conv");
        pass = pass && updated.find(1)->text == "two words";

        MapEmbedder boundary;
        boundary.by_start[20.0] = {0.7, std::sqrt(1.0 - 0.49)};
        updated = update_cache(cache, chunk, result, timing, boundary, params, "conv");
        pass = pass && updated.find(1)->text == "two words";

        MapEmbedder high;
        high.by_start[20.0] = {1.0, 0.1};
        std::vector<CacheEvent> events;
        updated = update_cache(cache, chunk, result, timing, high, params, "conv", &events);
        pass = pass && updated.find(1)->text == "plenty of new speech to cache here" &&
               events.size() == 1 && events[0].kind == CacheEventKind::kReplace;
        if (!pass) detail = "similarity gate broke";
    }

    report(9, pass, "replacement gates: " + detail);
}

// ─── criterion 10: determinism ───────────────────────────────────────────────

void criterion_determinism() {
    const auto config = parse_config(R"({
        "conversation": {
            "n_speakers": 3,
            "sentences_per_speaker": [5, 6],
            "words_per_sentence": [4, 8],
            "word_duration": [0.25, 0.35],
            "pause": [0.05, 0.3],
            "overlap_fraction": 0.01
        },
        "seeds": [1, 2, 3, 4, 5, 6],
        "recognizer": {
            "permutation_mode": "random-per-chunk",
            "word_error_rate": 0.05,
            "speaker_confusion_rate": 0.1
        },
        "embedder": {"noise_sigma": 0.05, "dim": 32},
        "conditions": [
            {"name": "spc"},
            {"name": "spc-vad", "chunker": "vad"},
            {"name": "frozen", "engine": "spc-noupdate"},
            {"name": "clustering", "engine": "offline-clustering"},
            {"name": "naive", "engine": "naive-concat"},
            {"name": "enrolled", "profiles": "auto"}
        ]
    })");
    const auto first = run_experiment(config);
    const auto a = results_to_jsonl(first);
    const auto b = results_to_jsonl(run_experiment(config));
    const auto c = results_to_jsonl(run_experiment_serial(config));
    collect(first);
    const bool pass = !a.empty() && a == b && a == c && first.failures == 0;
    report(10, pass,
           fmt("determinism: %zu-byte results identical across rerun and serial run", a.size()));
}

}  // namespace

int main() {
    try {
        criterion_consistency();
        criterion_cpwer_exact();
        criterion_axioms();
        criterion_update_direction();
        criterion_profile_direction();
        criterion_chunker_direction();
        criterion_streaming_vs_clustering();
        report(8, g_cache_violations == 0,
               fmt("cache invariants: %lld violations across %lld scored runs",
                   g_cache_violations, g_runs_checked));
        criterion_cache_gates();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("[FAIL]    unexpected error: %s\n", e.what());
        return 1;
    }
    return g_all_ok ? 0 : 1;
}
