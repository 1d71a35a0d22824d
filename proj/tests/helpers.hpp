// Shared builders for tests: hand-constructed words, transcripts, and random
// transcript/mutation generators driven by a seeded engine.

#ifndef SPCDIAR_TESTS_HELPERS_HPP
#define SPCDIAR_TESTS_HELPERS_HPP

#include <random>
#include <string>
#include <vector>

#include "spcdiar/types.hpp"

namespace helpers {

using spcdiar::SpeakerAttributedTranscript;
using spcdiar::SpeakerLabel;
using spcdiar::TimedWord;

inline TimedWord word(std::string text, int speaker, double start = -1.0, double end = -1.0,
                      bool overlapped = false, std::string name = "") {
    TimedWord w;
    w.text = std::move(text);
    w.start = start;
    w.end = end;
    w.speaker = SpeakerLabel{speaker, std::move(name)};
    w.overlapped = overlapped;
    return w;
}

// Untimed transcript from (speaker, space-joined words) runs.
inline SpeakerAttributedTranscript transcript(
    const std::vector<std::pair<int, std::string>>& runs) {
    std::vector<TimedWord> words;
    for (const auto& [speaker, text] : runs) {
        std::string token;
        for (const char c : text + " ") {
            if (c == ' ') {
                if (!token.empty()) words.push_back(word(token, speaker));
                token.clear();
            } else {
                token += c;
            }
        }
    }
    return SpeakerAttributedTranscript(std::move(words));
}

// Timed transcript: words every 0.3 s in list order.
inline SpeakerAttributedTranscript timed_transcript(
    const std::vector<std::pair<int, std::string>>& runs) {
    SpeakerAttributedTranscript flat = transcript(runs);
    std::vector<TimedWord> words = flat.words();
    double t = 0.0;
    for (TimedWord& w : words) {
        w.start = t;
        w.end = t + 0.3;
        t += 0.3;
    }
    return SpeakerAttributedTranscript(std::move(words));
}

inline const std::vector<std::string>& small_vocab() {
    static const std::vector<std::string> v = {"ba",  "ko",   "timu", "rela", "son.", "vi",
                                               "dar", "meno", "lup",  "chi.", "wex",  "olo"};
    return v;
}

// Random untimed transcript with 1..max_speakers speakers.
inline SpeakerAttributedTranscript random_transcript(std::mt19937_64& rng, int max_speakers = 4,
                                                     int max_words = 40) {
    const int n_speakers = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_speakers));
    const int n_words = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_words));
    const auto& vocab = small_vocab();
    std::vector<TimedWord> words;
    int speaker = 1 + static_cast<int>(rng() % static_cast<unsigned>(n_speakers));
    for (int i = 0; i < n_words; ++i) {
        if (rng() % 4 == 0) speaker = 1 + static_cast<int>(rng() % static_cast<unsigned>(n_speakers));
        words.push_back(word(vocab[rng() % vocab.size()], speaker));
    }
    return SpeakerAttributedTranscript(std::move(words));
}

// Noisy copy: per word, maybe drop / substitute / insert / flip the label.
inline SpeakerAttributedTranscript mutate(std::mt19937_64& rng,
                                          const SpeakerAttributedTranscript& ref,
                                          int max_speakers = 5) {
    const auto& vocab = small_vocab();
    std::vector<TimedWord> words;
    for (const TimedWord& w : ref.words()) {
        const unsigned roll = rng() % 100;
        if (roll < 8) continue;  // deletion
        TimedWord copy = w;
        copy.start = copy.end = -1.0;
        if (roll < 20) copy.text = vocab[rng() % vocab.size()];  // substitution
        if (rng() % 100 < 15) {
            copy.speaker = SpeakerLabel{1 + static_cast<int>(rng() % static_cast<unsigned>(max_speakers)), ""};
        }
        words.push_back(copy);
        if (rng() % 100 < 8) {
            TimedWord extra = copy;
            extra.text = vocab[rng() % vocab.size()];
            words.push_back(extra);  // insertion
        }
    }
    return SpeakerAttributedTranscript(std::move(words));
}

}  // namespace helpers

#endif
