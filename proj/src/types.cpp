#include "spcdiar/types.hpp"

#include <algorithm>
#include <cmath>

namespace spcdiar {

SpeakerAttributedTranscript::SpeakerAttributedTranscript(std::vector<TimedWord> words)
    : words_(std::move(words)) {
    const bool all_timed =
        std::all_of(words_.begin(), words_.end(), [](const TimedWord& w) { return w.has_timing(); });
    if (all_timed) {
        std::stable_sort(words_.begin(), words_.end(), [](const TimedWord& a, const TimedWord& b) {
            if (a.start != b.start) return a.start < b.start;
            return a.end < b.end;
        });
    }
}

std::vector<Segment> SpeakerAttributedTranscript::segments() const {
    std::vector<Segment> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (out.empty() || !(out.back().speaker == words_[i].speaker)) {
            out.push_back({words_[i].speaker, i, 1});
        } else {
            ++out.back().count;
        }
    }
    return out;
}

void SpeakerAttributedTranscript::append(const SpeakerAttributedTranscript& other) {
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
}

std::vector<std::string> SpeakerAttributedTranscript::speaker_keys() const {
    std::vector<std::string> keys;
    for (const TimedWord& w : words_) {
        const std::string k = w.speaker.key();
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
    return keys;
}

bool Conversation::speaker_active_at(int index, double t) const {
    if (index < 1 || index > n_speakers()) return false;
    for (const TimeSpan& iv : activity[static_cast<std::size_t>(index - 1)]) {
        if (iv.contains(t)) return true;
    }
    return false;
}

std::vector<int> Conversation::active_speakers(const TimeSpan& span) const {
    std::vector<int> out;
    for (int s = 1; s <= n_speakers(); ++s) {
        if (active_time(s, span) > 0.0) out.push_back(s);
    }
    return out;
}

double Conversation::active_time(int index, const TimeSpan& span) const {
    if (index < 1 || index > n_speakers()) return 0.0;
    double total = 0.0;
    for (const TimeSpan& iv : activity[static_cast<std::size_t>(index - 1)]) {
        const double lo = std::max(iv.start, span.start);
        const double hi = std::min(iv.end, span.end);
        if (hi > lo) total += hi - lo;
    }
    return total;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace spcdiar
