#ifndef SPCDIAR_SIMULATE_HPP
#define SPCDIAR_SIMULATE_HPP

#include <cstdint>
#include <utility>

#include "spcdiar/spc.hpp"
#include "spcdiar/types.hpp"

namespace spcdiar {

// ─── conversation generation ─────────────────────────────────────────────────

struct ConversationSpec {
    int n_speakers = 2;
    std::pair<int, int> sentences_per_speaker = {3, 5};
    std::pair<int, int> words_per_sentence = {5, 10};
    std::pair<double, double> word_duration = {0.25, 0.45};
    std::pair<double, double> pause = {0.2, 0.8};
    double overlap_fraction = 0.0;  // target share of speech time with >1 active speaker
    std::vector<std::string> vocabulary;  // empty -> default_vocabulary()
    std::uint64_t seed = 0;
};

// 200 lowercase tokens, 15% carrying a terminal '.'.
const std::vector<std::string>& default_vocabulary();

// Deterministic in spec.seed. Speaker indices are assigned by order of first
// appearance. Words tile each sentence's interval; activity intervals are the
// sentence spans; energy is 1.0 per active speaker plus uniform noise in
// [0, 0.05) per 10 ms frame. Throws InfeasibleSpec on contradictory settings.
Conversation gen_conversation(const ConversationSpec& spec);

// Realized share of speech time where more than one speaker is active.
double measure_overlap_fraction(const Conversation& conv);

// ─── simulated recognizer ────────────────────────────────────────────────────

enum class PermutationMode { kIdentity, kOrderOfAppearance, kRandomPerChunk };

struct RecognizerBehavior {
    PermutationMode permutation_mode = PermutationMode::kIdentity;
    double word_error_rate = 0.0;        // substitute/delete/insert mix per word
    double speaker_confusion_rate = 0.0; // per-segment label flip probability
    std::uint64_t seed = 0;
};

// Reads ground-truth words inside the chunk and re-labels them. With a prefix,
// true speakers recognized in the prefix keep the prefix's indices and unseen
// speakers get the next free ones; without a prefix, labels follow
// permutation_mode. Word noise and segment confusion are applied per behavior;
// a segment whose speaker arrives with a full-sentence prompt (enough words,
// terminal punctuation) confuses at a quarter of the configured rate. Output is
// deterministic in (behavior.seed, chunk span, chunk index).
class SimulatedRecognizer : public LocalRecognizer {
public:
    SimulatedRecognizer(Conversation truth, RecognizerBehavior behavior);

    SpeakerAttributedTranscript transcribe(const InferenceInput& input) const override;

    // Prompt quality rule shared with tests.
    static bool prompt_is_strong(const std::string& text);
    static constexpr double kWeakPromptConfusionFactor = 0.25;

private:
    Conversation truth_;
    RecognizerBehavior behavior_;
    std::vector<std::string> vocabulary_;
};

// ─── mock embedder ───────────────────────────────────────────────────────────

// Every true speaker owns a fixed random unit centroid. A span embeds to the
// duration-weighted mean of active-speaker centroids plus Gaussian noise whose
// norm concentrates at 3 * noise_sigma, then normalized. Deterministic in
// (seed, span). Throws EmptySpan when no speaker is active in the span.
class MockEmbedder : public Embedder {
public:
    MockEmbedder(Conversation truth, double noise_sigma, std::uint64_t seed, int dim = 64);

    EmbeddingVector embed(const AudioSpan& span) const override;

    const EmbeddingVector& centroid(int speaker_index) const;

private:
    Conversation truth_;
    double noise_sigma_;
    std::uint64_t seed_;
    int dim_;
    std::vector<EmbeddingVector> centroids_;
};

// ─── oracle word timing ──────────────────────────────────────────────────────

// Aligns hypothesis words to the ground-truth words of the chunk by text
// (Levenshtein). Matched and substituted words inherit the true word's span and
// overlap flag; inserted words get spans interpolated between their neighbors
// and are marked overlapped so they never enter the cache.
class OracleWordTiming : public WordTimingModel {
public:
    explicit OracleWordTiming(Conversation truth);

    std::vector<TimedWord> align(const TimeSpan& chunk_span,
                                 const std::vector<TimedWord>& hyp_words) const override;

private:
    Conversation truth_;
};

// Ground-truth words whose start lies inside the span, in time order. Shared
// read rule for the simulated recognizer and the timing oracle.
std::vector<TimedWord> reference_words_in_span(const Conversation& conv, const TimeSpan& span);

}  // namespace spcdiar

#endif
