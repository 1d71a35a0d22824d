#include "spcdiar/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spcdiar/errors.hpp"
#include "spcdiar/rng.hpp"

namespace spcdiar {

namespace {

constexpr double kFrame = Conversation::kFrameLen;
constexpr double kEnergyNoise = 0.05;
// Noise vector norm for MockEmbedder concentrates at this multiple of sigma.
constexpr double kNoiseNormScale = 3.0;

struct SentenceDraft {
    int speaker = 0;  // internal 0-based id before appearance remap
    std::vector<std::string> texts;
    std::vector<double> durations;
    double start = 0.0;

    double length() const {
        double d = 0.0;
        for (const double x : durations) d += x;
        return d;
    }
    double end() const { return start + length(); }
};

void require(bool cond, const char* what) {
    if (!cond) throw InfeasibleSpec(what);
}

}  // namespace

const std::vector<std::string>& default_vocabulary() {
    static const std::vector<std::string> vocab = [] {
        const char* cons = "bdfgklmnprstvz";
        const char* vows = "aeiou";
        const char* tails[] = {"n", "ra", "lo"};
        std::vector<std::string> v;
        v.reserve(200);
        for (int i = 0; i < 200; ++i) {
            std::string w;
            w.push_back(cons[i % 14]);
            w.push_back(vows[(i / 14) % 5]);
            w += tails[i / 70];
            if (i % 20 < 3) w.push_back('.');
            v.push_back(std::move(w));
        }
        return v;
    }();
    return vocab;
}

Conversation gen_conversation(const ConversationSpec& spec) {
    require(spec.n_speakers >= 1, "need at least one speaker");
    require(spec.overlap_fraction >= 0.0 && spec.overlap_fraction < 1.0,
            "overlap_fraction must be in [0, 1)");
    require(!(spec.overlap_fraction > 0.0 && spec.n_speakers < 2),
            "overlap requires at least two speakers");
    require(spec.sentences_per_speaker.first >= 1 &&
                spec.sentences_per_speaker.second >= spec.sentences_per_speaker.first,
            "bad sentences_per_speaker range");
    require(spec.words_per_sentence.first >= 1 &&
                spec.words_per_sentence.second >= spec.words_per_sentence.first,
            "bad words_per_sentence range");
    require(spec.word_duration.first > 0.0 &&
                spec.word_duration.second >= spec.word_duration.first,
            "bad word_duration range");
    require(spec.pause.first >= 0.0 && spec.pause.second >= spec.pause.first, "bad pause range");

    const std::vector<std::string>& vocab =
        spec.vocabulary.empty() ? default_vocabulary() : spec.vocabulary;
    require(!vocab.empty(), "empty vocabulary");

    std::mt19937_64 gen(rng::splitmix64(spec.seed));

    std::vector<SentenceDraft> sentences;
    for (int s = 0; s < spec.n_speakers; ++s) {
        const auto n_sent = rng::uniform_int(gen, spec.sentences_per_speaker.first,
                                             spec.sentences_per_speaker.second);
        for (int k = 0; k < n_sent; ++k) {
            SentenceDraft d;
            d.speaker = s;
            const auto n_words =
                rng::uniform_int(gen, spec.words_per_sentence.first, spec.words_per_sentence.second);
            for (int w = 0; w < n_words; ++w) {
                d.texts.push_back(
                    vocab[static_cast<std::size_t>(rng::uniform_int(gen, 0, vocab.size() - 1))]);
                d.durations.push_back(
                    rng::uniform(gen, spec.word_duration.first, spec.word_duration.second));
            }
            sentences.push_back(std::move(d));
        }
    }
    rng::shuffle(gen, sentences);

    // Sequential placement; the controller steals part of the previous
    // sentence's tail to track the overlap target. Chains are not allowed, so
    // at most two speakers are ever active at once.
    const double f = spec.overlap_fraction;
    double speech_total = 0.0, overlap_total = 0.0;
    double cursor = rng::uniform(gen, spec.pause.first, spec.pause.second);
    bool prev_overlapped = false;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        SentenceDraft& cur = sentences[i];
        const double dur = cur.length();
        double start = cursor + rng::uniform(gen, spec.pause.first, spec.pause.second);
        if (i > 0 && f > 0.0 && !prev_overlapped && sentences[i - 1].speaker != cur.speaker) {
            const double prev_dur = sentences[i - 1].length();
            const double desired = f / (1.0 + f) * (speech_total + dur);
            const double o =
                std::min(desired - overlap_total, 0.9 * std::min(prev_dur, dur));
            if (o >= 0.05) {
                start = cursor - o;
                overlap_total += o;
                prev_overlapped = true;
            } else {
                prev_overlapped = false;
            }
        } else {
            prev_overlapped = false;
        }
        cur.start = start;
        speech_total += dur;
        cursor = std::max(cursor, cur.end());
    }

    // Final speaker indices by order of first appearance.
    std::vector<int> appearance(static_cast<std::size_t>(spec.n_speakers), 0);
    int next_index = 0;
    for (const SentenceDraft& s : sentences) {
        if (appearance[static_cast<std::size_t>(s.speaker)] == 0) {
            appearance[static_cast<std::size_t>(s.speaker)] = ++next_index;
        }
    }
    // Speakers that drew zero sentences cannot happen (range starts at 1), but
    // keep the remap total just in case the spec evolves.
    for (int& a : appearance) {
        if (a == 0) a = ++next_index;
    }

    Conversation conv;
    conv.id = "conv-" + std::to_string(spec.seed);
    conv.activity.resize(static_cast<std::size_t>(spec.n_speakers));
    for (const SentenceDraft& s : sentences) {
        conv.activity[static_cast<std::size_t>(appearance[static_cast<std::size_t>(s.speaker)] - 1)]
            .push_back({s.start, s.end()});
    }
    for (auto& ivs : conv.activity) {
        std::sort(ivs.begin(), ivs.end(),
                  [](const TimeSpan& a, const TimeSpan& b) { return a.start < b.start; });
    }

    std::vector<TimedWord> words;
    double last_end = 0.0;
    for (const SentenceDraft& s : sentences) {
        const int idx = appearance[static_cast<std::size_t>(s.speaker)];
        double t = s.start;
        for (std::size_t w = 0; w < s.texts.size(); ++w) {
            TimedWord word;
            word.text = s.texts[w];
            word.start = t;
            word.end = t + s.durations[w];
            word.speaker = {idx, ""};
            t = word.end;
            words.push_back(std::move(word));
        }
        last_end = std::max(last_end, s.end());
    }
    for (TimedWord& w : words) {
        for (int other = 1; other <= spec.n_speakers && !w.overlapped; ++other) {
            if (other == w.speaker.index) continue;
            for (const TimeSpan& iv : conv.activity[static_cast<std::size_t>(other - 1)]) {
                const double lo = std::max(iv.start, w.start);
                const double hi = std::min(iv.end, w.end);
                if (hi - lo > 1e-12) {
                    w.overlapped = true;
                    break;
                }
            }
        }
    }
    conv.reference = SpeakerAttributedTranscript(std::move(words));

    conv.duration = last_end + rng::uniform(gen, spec.pause.first, spec.pause.second);
    const auto frames = static_cast<std::size_t>(std::ceil(conv.duration / kFrame));
    conv.energy.resize(frames);
    for (std::size_t fi = 0; fi < frames; ++fi) {
        const double mid = (static_cast<double>(fi) + 0.5) * kFrame;
        int active = 0;
        for (int s = 1; s <= spec.n_speakers; ++s) {
            if (conv.speaker_active_at(s, mid)) ++active;
        }
        conv.energy[fi] = active + rng::uniform(gen, 0.0, kEnergyNoise);
    }
    return conv;
}

double measure_overlap_fraction(const Conversation& conv) {
    std::vector<std::pair<double, int>> edges;
    for (const auto& ivs : conv.activity) {
        for (const TimeSpan& iv : ivs) {
            edges.emplace_back(iv.start, +1);
            edges.emplace_back(iv.end, -1);
        }
    }
    std::sort(edges.begin(), edges.end());
    double speech = 0.0, overlap = 0.0, prev = 0.0;
    int active = 0;
    for (const auto& [t, d] : edges) {
        if (active >= 1) speech += t - prev;
        if (active >= 2) overlap += t - prev;
        active += d;
        prev = t;
    }
    return speech > 0.0 ? overlap / speech : 0.0;
}

// ─── SimulatedRecognizer ─────────────────────────────────────────────────────

std::vector<TimedWord> reference_words_in_span(const Conversation& conv, const TimeSpan& span) {
    std::vector<TimedWord> out;
    for (const TimedWord& w : conv.reference.words()) {
        if (w.start >= span.start && w.start < span.end) out.push_back(w);
    }
    return out;
}

SimulatedRecognizer::SimulatedRecognizer(Conversation truth, RecognizerBehavior behavior)
    : truth_(std::move(truth)), behavior_(behavior), vocabulary_(default_vocabulary()) {}

bool SimulatedRecognizer::prompt_is_strong(const std::string& text) {
    int words = 0;
    bool in_word = false;
    for (const char c : text) {
        if (c == ' ') {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words >= 8 && text.find_first_of(".?!") != std::string::npos;
}

SpeakerAttributedTranscript SimulatedRecognizer::transcribe(const InferenceInput& input) const {
    const TimeSpan span = input.chunk.span;
    const std::vector<TimedWord> gt = reference_words_in_span(truth_, span);
    if (gt.empty()) return {};

    std::mt19937_64 gen(rng::mix(rng::mix(rng::mix(behavior_.seed, rng::key(span.start)),
                                          rng::key(span.end)),
                                 static_cast<std::uint64_t>(input.chunk.index)));

    // True speakers in order of first appearance inside this chunk.
    std::vector<int> order;
    for (const TimedWord& w : gt) {
        if (std::find(order.begin(), order.end(), w.speaker.index) == order.end()) {
            order.push_back(w.speaker.index);
        }
    }

    std::map<int, SpeakerLabel> mapping;       // true speaker index -> output label
    std::map<int, bool> strong_prompt;          // output label index -> prompt quality
    if (!input.audio_prefix.empty()) {
        std::set<int> used;
        for (const PrefixClip& clip : input.audio_prefix) used.insert(clip.speaker.index);
        // A cached clip names the voice that dominates its span.
        for (const PrefixClip& clip : input.audio_prefix) {
            int dominant = 0;
            double best = 0.0;
            for (int s = 1; s <= truth_.n_speakers(); ++s) {
                const double t = truth_.active_time(s, clip.audio.span);
                if (t > best + 1e-12) {
                    best = t;
                    dominant = s;
                }
            }
            if (dominant > 0 && !mapping.contains(dominant)) {
                mapping[dominant] = clip.speaker;
                strong_prompt[clip.speaker.index] = prompt_is_strong(clip.text);
            }
        }
        for (const int ts : order) {
            if (mapping.contains(ts)) continue;
            int idx = 1;
            while (used.contains(idx)) ++idx;
            used.insert(idx);
            mapping[ts] = SpeakerLabel{idx, ""};
        }
    } else {
        switch (behavior_.permutation_mode) {
            case PermutationMode::kIdentity:
                for (const int ts : order) mapping[ts] = SpeakerLabel{ts, ""};
                break;
            case PermutationMode::kOrderOfAppearance:
                for (std::size_t i = 0; i < order.size(); ++i) {
                    mapping[order[i]] = SpeakerLabel{static_cast<int>(i) + 1, ""};
                }
                break;
            case PermutationMode::kRandomPerChunk: {
                std::vector<int> labels(order.size());
                for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i) + 1;
                rng::shuffle(gen, labels);
                for (std::size_t i = 0; i < order.size(); ++i) {
                    mapping[order[i]] = SpeakerLabel{labels[i], ""};
                }
                break;
            }
        }
    }

    // Word noise. Draw counts are fixed per word so runs differing only in
    // thresholds stay draw-for-draw comparable.
    const double wer = behavior_.word_error_rate;
    std::vector<TimedWord> words;
    words.reserve(gt.size());
    for (const TimedWord& w : gt) {
        const double r_class = rng::uniform(gen);
        const auto sub_pick =
            static_cast<std::size_t>(rng::uniform_int(gen, 0, vocabulary_.size() - 1));
        const double r_ins = rng::uniform(gen);
        const auto ins_pick =
            static_cast<std::size_t>(rng::uniform_int(gen, 0, vocabulary_.size() - 1));

        const SpeakerLabel label = mapping.at(w.speaker.index);
        if (r_class >= wer / 3.0) {
            TimedWord out;
            out.text = r_class < 2.0 * wer / 3.0 ? vocabulary_[sub_pick] : w.text;
            out.speaker = label;
            words.push_back(std::move(out));
        }
        if (r_ins < wer / 3.0) {
            TimedWord out;
            out.text = vocabulary_[ins_pick];
            out.speaker = label;
            words.push_back(std::move(out));
        }
    }

    // Per-segment label confusion. A strong cached prompt anchors the label, so
    // those segments flip at a fraction of the configured rate.
    std::vector<SpeakerLabel> present;
    for (const TimedWord& w : words) {
        if (std::find_if(present.begin(), present.end(), [&](const SpeakerLabel& l) {
                return l.index == w.speaker.index;
            }) == present.end()) {
            present.push_back(w.speaker);
        }
    }
    std::size_t seg_start = 0;
    while (seg_start < words.size()) {
        std::size_t seg_end = seg_start;
        while (seg_end < words.size() &&
               words[seg_end].speaker.index == words[seg_start].speaker.index) {
            ++seg_end;
        }
        const double r_conf = rng::uniform(gen);
        const double r_target = rng::uniform(gen);
        const int label_index = words[seg_start].speaker.index;
        double rate = behavior_.speaker_confusion_rate;
        const auto sp = strong_prompt.find(label_index);
        if (sp != strong_prompt.end() && sp->second) rate *= kWeakPromptConfusionFactor;
        if (present.size() >= 2 && r_conf < rate) {
            std::vector<SpeakerLabel> others;
            for (const SpeakerLabel& l : present) {
                if (l.index != label_index) others.push_back(l);
            }
            const auto pick = std::min(others.size() - 1,
                                       static_cast<std::size_t>(r_target * others.size()));
            for (std::size_t i = seg_start; i < seg_end; ++i) words[i].speaker = others[pick];
        }
        seg_start = seg_end;
    }

    return SpeakerAttributedTranscript(std::move(words));
}

// ─── MockEmbedder ────────────────────────────────────────────────────────────

MockEmbedder::MockEmbedder(Conversation truth, double noise_sigma, std::uint64_t seed, int dim)
    : truth_(std::move(truth)), noise_sigma_(noise_sigma), seed_(seed), dim_(dim) {
    centroids_.resize(static_cast<std::size_t>(truth_.n_speakers()));
    for (int s = 1; s <= truth_.n_speakers(); ++s) {
        std::mt19937_64 gen(rng::mix(seed_, 0xC0FFEEull + static_cast<std::uint64_t>(s)));
        EmbeddingVector c(static_cast<std::size_t>(dim_));
        double norm = 0.0;
        for (double& x : c) {
            x = rng::gaussian(gen);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (double& x : c) x /= norm;
        centroids_[static_cast<std::size_t>(s - 1)] = std::move(c);
    }
}

const EmbeddingVector& MockEmbedder::centroid(int speaker_index) const {
    return centroids_.at(static_cast<std::size_t>(speaker_index - 1));
}

EmbeddingVector MockEmbedder::embed(const AudioSpan& span) const {
    std::vector<double> weights(centroids_.size(), 0.0);
    double total = 0.0;
    for (int s = 1; s <= truth_.n_speakers(); ++s) {
        const double t = truth_.active_time(s, span.span);
        weights[static_cast<std::size_t>(s - 1)] = t;
        total += t;
    }
    if (total <= 0.0) {
        throw EmptySpan("no speech in span");
    }

    EmbeddingVector v(static_cast<std::size_t>(dim_), 0.0);
    for (std::size_t s = 0; s < centroids_.size(); ++s) {
        if (weights[s] <= 0.0) continue;
        const double w = weights[s] / total;
        for (int d = 0; d < dim_; ++d) {
            v[static_cast<std::size_t>(d)] += w * centroids_[s][static_cast<std::size_t>(d)];
        }
    }
    if (noise_sigma_ > 0.0) {
        std::mt19937_64 gen(rng::mix(rng::mix(seed_, rng::key(span.span.start)),
                                     rng::key(span.span.end)));
        const double comp_sigma = kNoiseNormScale * noise_sigma_ / std::sqrt(dim_);
        for (double& x : v) x += comp_sigma * rng::gaussian(gen);
    }
    double norm = 0.0;
    for (const double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
        for (double& x : v) x /= norm;
    }
    return v;
}

// ─── OracleWordTiming ────────────────────────────────────────────────────────

OracleWordTiming::OracleWordTiming(Conversation truth) : truth_(std::move(truth)) {}

std::vector<TimedWord> OracleWordTiming::align(const TimeSpan& chunk_span,
                                               const std::vector<TimedWord>& hyp_words) const {
    const std::vector<TimedWord> gt = reference_words_in_span(truth_, chunk_span);
    const std::size_t n = gt.size(), m = hyp_words.size();

    // Levenshtein on raw text, backtrace preferring matches.
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = d[i - 1][j - 1] + (gt[i - 1].text == hyp_words[j - 1].text ? 0 : 1);
            d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
        }
    }

    std::vector<TimedWord> out = hyp_words;
    std::vector<bool> anchored(m, false);
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 &&
            (d[i][j] == d[i - 1][j - 1] + (gt[i - 1].text == hyp_words[j - 1].text ? 0 : 1))) {
            out[j - 1].start = gt[i - 1].start;
            out[j - 1].end = gt[i - 1].end;
            out[j - 1].overlapped = gt[i - 1].overlapped;
            anchored[j - 1] = true;
            --i, --j;
        } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
            --i;
        } else {
            --j;
        }
    }

    // Inserted words: spread inside the gap between neighbors, flagged
    // overlapped so they never become cache candidates.
    std::size_t k = 0;
    while (k < m) {
        if (anchored[k]) {
            ++k;
            continue;
        }
        std::size_t run_end = k;
        while (run_end < m && !anchored[run_end]) ++run_end;
        const double lo = k > 0 ? out[k - 1].end : chunk_span.start;
        const double hi = run_end < m ? out[run_end].start : std::max(chunk_span.end, lo);
        const auto count = static_cast<double>(run_end - k);
        const double width = std::max((hi - lo) / count, 1e-3);
        for (std::size_t w = k; w < run_end; ++w) {
            const double base = lo + static_cast<double>(w - k) * width;
            out[w].start = base + 0.1 * width;
            out[w].end = base + 0.9 * width;
            out[w].overlapped = true;
        }
        k = run_end;
    }
    return out;
}

}  // namespace spcdiar
