#ifndef SPCDIAR_SPC_HPP
#define SPCDIAR_SPC_HPP

#include <map>
#include <optional>

#include "spcdiar/chunking.hpp"
#include "spcdiar/types.hpp"

namespace spcdiar {

inline constexpr const char* kDefaultPrompt = "Transcribe the audio with speaker labels.";

// ─── cache ───────────────────────────────────────────────────────────────────

// One cached speaker prompt: a clean audio clip and what was said in it.
struct CacheEntry {
    SpeakerLabel speaker;
    AudioSpan audio;
    std::string text;                      // words of the clip, space separated
    std::vector<TimedWord> words;          // the clip's words with timings
    mutable std::optional<EmbeddingVector> embedding;  // filled on first use

    int word_count() const;
    bool has_punctuation() const;  // any of . ? ! in the text
};

// Per-speaker prompt store. One entry per speaker index; iteration runs in
// ascending index order.
class SpeakerPromptCache {
public:
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    bool contains(int speaker_index) const { return entries_.contains(speaker_index); }

    const CacheEntry* find(int speaker_index) const;
    void put(CacheEntry entry);  // insert or replace

    const std::map<int, CacheEntry>& entries() const { return entries_; }

    // Smallest index not yet present, starting from 1.
    int next_free_index() const;

private:
    std::map<int, CacheEntry> entries_;
};

struct SpcParams {
    double l = 5.0;     // max cached clip length, seconds
    int n = 8;          // word count above which a punctuated entry is final
    double theta = 0.7; // cosine gate for replacement
    bool update_enabled = true;
};

// ─── recognizer-facing input ─────────────────────────────────────────────────

struct PrefixClip {
    SpeakerLabel speaker;
    AudioSpan audio;
    std::string text;
};

// What one recognition call sees: cached clips (ascending speaker index), the
// chunk to transcribe, and the text context. audio_prefix order matches the
// speaker order in context_text.
struct InferenceInput {
    std::vector<PrefixClip> audio_prefix;
    Chunk chunk;
    std::string prompt;
    std::string context_text;
};

// ─── model interfaces ────────────────────────────────────────────────────────

// Chunk-level speaker-attributed recognizer. Implementations must be safe to
// call concurrently from multiple threads.
class LocalRecognizer {
public:
    virtual ~LocalRecognizer() = default;
    virtual SpeakerAttributedTranscript transcribe(const InferenceInput& input) const = 0;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    // Throws EmptySpan when the span contains no speech.
    virtual EmbeddingVector embed(const AudioSpan& span) const = 0;
};

// Fills start/end/overlapped on hypothesis words by aligning them to the
// chunk's audio.
class WordTimingModel {
public:
    virtual ~WordTimingModel() = default;
    virtual std::vector<TimedWord> align(const TimeSpan& chunk_span,
                                         const std::vector<TimedWord>& hyp_words) const = 0;
};

// ─── engine operations ───────────────────────────────────────────────────────

InferenceInput build_inference_input(const SpeakerPromptCache& cache, const Chunk& chunk,
                                     const std::string& prompt);

// Candidate clip for the cache: a run of clean words by one speaker.
struct CandidateSegment {
    TimeSpan span;
    std::string text;
    std::vector<TimedWord> words;
};

// Maximal runs of consecutive non-overlapped words per speaker, each truncated
// into sub-segments of span <= max_len by cutting at the latest word boundary
// that fits. Input words must carry timings and overlap flags.
std::map<int, std::vector<CandidateSegment>> segment_speaker_runs(
    const std::vector<TimedWord>& words, double max_len);

enum class CacheEventKind { kInsert, kReplace, kSkip };

struct CacheEvent {
    CacheEventKind kind;
    int speaker_index = 0;
    TimeSpan span;          // candidate span ({0,0} when none)
    std::string detail;     // skip reason or replacement note
};

// One cache pass over a recognized chunk. For each speaker in the result: new
// speakers with a usable candidate are inserted; known speakers are replaced
// only when the cached text is short or unpunctuated, the candidate is longer,
// and the two clips embed as the same voice (cosine > theta). Returns the
// updated cache; the input value is not modified.
SpeakerPromptCache update_cache(SpeakerPromptCache cache, const Chunk& chunk,
                                const SpeakerAttributedTranscript& chunk_result,
                                const WordTimingModel& timing, const Embedder& embedder,
                                const SpcParams& p, const std::string& conversation_id = {},
                                std::vector<CacheEvent>* events = nullptr);

// ─── profiles ────────────────────────────────────────────────────────────────

struct ProfileClip {
    AudioSpan audio;
    std::string text;
    std::string display_name;
};

// Builds a fixed cache from enrollment clips. Speaker k gets index k in the
// given order plus the clip's display name. Throws ProfileTooLong when a clip
// exceeds max_len and EmptyProfileText when a clip has no text.
SpeakerPromptCache attach_profiles(const std::vector<ProfileClip>& clips, double max_len);

// ─── streaming loop ──────────────────────────────────────────────────────────

struct ChunkTrace {
    int chunk_index = 0;
    std::size_t prefix_entries = 0;
    std::size_t cache_size_after = 0;
    std::vector<CacheEvent> events;
    std::vector<std::string> violations;  // cache invariant breaks, expected empty
};

struct StreamResult {
    SpeakerAttributedTranscript transcript;
    SpeakerPromptCache final_cache;
    std::vector<ChunkTrace> trace;
};

// Chunk-by-chunk inference with the prompt cache threaded through. With
// profiles the cache is fixed to them and never updated; otherwise it starts
// empty and grows per update_cache. Recognizer failures are rethrown as
// RecognizerError with the chunk index.
StreamResult run_streaming(const std::vector<Chunk>& chunks, const LocalRecognizer& recognizer,
                           const Embedder& embedder, const WordTimingModel& timing,
                           const SpcParams& params, const std::string& prompt = kDefaultPrompt,
                           const std::optional<SpeakerPromptCache>& profiles = std::nullopt,
                           const std::string& conversation_id = {});

// Negative control: per-chunk inference with no prefix, outputs concatenated
// as-is.
SpeakerAttributedTranscript naive_concat(const std::vector<Chunk>& chunks,
                                         const LocalRecognizer& recognizer,
                                         const std::string& prompt = kDefaultPrompt);

// Invariant check used by the trace: spans within length, clean words, entry
// speaker consistent with its key. Returns human-readable violations.
std::vector<std::string> check_cache(const SpeakerPromptCache& cache, const SpcParams& p);

}  // namespace spcdiar

#endif
