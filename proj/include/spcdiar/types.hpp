#ifndef SPCDIAR_TYPES_HPP
#define SPCDIAR_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spcdiar {

// ─── speakers ────────────────────────────────────────────────────────────────

// Speaker identity within one transcript. The index is 1-based and identifies
// the speaker; the display name, when present, is what gets rendered and scored
// against (profile runs attach names like "mike").
struct SpeakerLabel {
    int index = 0;
    std::string display_name;

    // Marker/scoring key: "speaker<K>" unless a display name is attached.
    std::string key() const {
        return display_name.empty() ? "speaker" + std::to_string(index) : display_name;
    }

    bool operator==(const SpeakerLabel&) const = default;
};

// ─── time ────────────────────────────────────────────────────────────────────

// Half-open interval [start, end) in seconds.
struct TimeSpan {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t < end; }
    bool overlaps(const TimeSpan& o) const { return start < o.end && o.start < end; }

    bool operator==(const TimeSpan&) const = default;
};

// Reference into a conversation's audio timeline.
struct AudioSpan {
    std::string conversation_id;
    TimeSpan span;
};

// ─── words and transcripts ───────────────────────────────────────────────────

// One word. Hypothesis words have no timings until a timing model fills them in;
// start < 0 means untimed. `overlapped` is true when another speaker is active
// somewhere inside [start, end).
struct TimedWord {
    std::string text;
    double start = -1.0;
    double end = -1.0;
    SpeakerLabel speaker;
    bool overlapped = false;

    bool has_timing() const { return start >= 0.0; }
    double duration() const { return end - start; }

    bool operator==(const TimedWord&) const = default;
};

// Maximal run of consecutive words by one speaker, as indices into a word list.
struct Segment {
    SpeakerLabel speaker;
    std::size_t first = 0;
    std::size_t count = 0;
};

// Word sequence with speaker attribution. Canonical storage is the word list;
// segments are derived. Fully timed transcripts are kept sorted by (start, end),
// untimed ones keep insertion order.
class SpeakerAttributedTranscript {
public:
    SpeakerAttributedTranscript() = default;
    explicit SpeakerAttributedTranscript(std::vector<TimedWord> words);

    const std::vector<TimedWord>& words() const { return words_; }
    std::vector<TimedWord>& mutable_words() { return words_; }

    std::vector<Segment> segments() const;

    void append(const SpeakerAttributedTranscript& other);

    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }

    // Distinct speaker keys in order of first appearance.
    std::vector<std::string> speaker_keys() const;

    bool operator==(const SpeakerAttributedTranscript&) const = default;

private:
    std::vector<TimedWord> words_;
};

// ─── conversations ───────────────────────────────────────────────────────────

// A conversation ties the reference transcript to per-speaker activity
// intervals and a 10 ms energy track. activity[k] belongs to speaker index k+1.
struct Conversation {
    static constexpr double kFrameLen = 0.01;

    std::string id;
    double duration = 0.0;
    SpeakerAttributedTranscript reference;
    std::vector<std::vector<TimeSpan>> activity;
    std::vector<double> energy;

    int n_speakers() const { return static_cast<int>(activity.size()); }
    bool speaker_active_at(int index, double t) const;
    // Speakers (1-based indices) active anywhere inside the span.
    std::vector<int> active_speakers(const TimeSpan& span) const;
    // Total time speaker `index` is active inside the span.
    double active_time(int index, const TimeSpan& span) const;
};

// ─── embeddings ──────────────────────────────────────────────────────────────

using EmbeddingVector = std::vector<double>;

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace spcdiar

#endif
