#include "spcdiar/chunking.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spcdiar/errors.hpp"

namespace spcdiar {

namespace {

constexpr double kFrame = Conversation::kFrameLen;

int frames_needed(double seconds) {
    return std::max(1, static_cast<int>(std::lround(seconds / kFrame)));
}

// Splits a speech region at minimum-energy frames until every piece fits.
void split_region(const Conversation& conv, TimeSpan region, double max_len,
                  std::vector<TimeSpan>& out) {
    if (region.length() <= max_len + 1e-9) {
        out.push_back(region);
        return;
    }
    const int first = static_cast<int>(std::lround(region.start / kFrame));
    const int last = static_cast<int>(std::lround(region.end / kFrame));  // exclusive
    int best = -1;
    double best_energy = 0.0;
    for (int f = first + 1; f < last - 1; ++f) {
        const double e = conv.energy[static_cast<std::size_t>(f)];
        if (best < 0 || e < best_energy) {  // strict < keeps the earliest on ties
            best = f;
            best_energy = e;
        }
    }
    if (best < 0) {
        out.push_back(region);  // two frames or fewer, nothing to split
        return;
    }
    const double cut = best * kFrame;
    split_region(conv, {region.start, cut}, max_len, out);
    split_region(conv, {cut, region.end}, max_len, out);
}

std::vector<Chunk> pack_spans(const std::vector<TimeSpan>& spans, double max_len) {
    std::vector<Chunk> chunks;
    std::size_t i = 0;
    while (i < spans.size()) {
        TimeSpan cur = spans[i];
        std::size_t j = i + 1;
        while (j < spans.size() && spans[j].end - cur.start <= max_len + 1e-9) {
            cur.end = spans[j].end;
            ++j;
        }
        chunks.push_back({static_cast<int>(chunks.size()), cur});
        i = j;
    }
    return chunks;
}

}  // namespace

std::vector<Sentence> sentences_of(const Conversation& conv) {
    std::vector<Sentence> out;
    for (int s = 1; s <= conv.n_speakers(); ++s) {
        for (const TimeSpan& iv : conv.activity[static_cast<std::size_t>(s - 1)]) {
            out.push_back({s, iv});
        }
    }
    std::sort(out.begin(), out.end(), [](const Sentence& a, const Sentence& b) {
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        return a.span.end < b.span.end;
    });
    return out;
}

std::vector<Chunk> oracle_chunks(const Conversation& conv, double max_chunk_len) {
    if (max_chunk_len <= 0.0) throw SentenceTooLong("max_chunk_len must be positive");
    const std::vector<Sentence> sentences = sentences_of(conv);

    // Overlapping sentences must share a chunk, so group them first.
    std::vector<TimeSpan> groups;
    for (const Sentence& s : sentences) {
        if (!groups.empty() && s.span.start < groups.back().end - 1e-9) {
            groups.back().end = std::max(groups.back().end, s.span.end);
        } else {
            groups.push_back(s.span);
        }
    }
    for (const TimeSpan& g : groups) {
        if (g.length() > max_chunk_len + 1e-9) {
            std::ostringstream msg;
            msg << "sentence group [" << g.start << ", " << g.end << ") exceeds max chunk length "
                << max_chunk_len;
            throw SentenceTooLong(msg.str());
        }
    }
    return pack_spans(groups, max_chunk_len);
}

std::vector<Chunk> vad_chunks(const Conversation& conv, const VadParams& p) {
    const int n = static_cast<int>(conv.energy.size());
    const int open_after = frames_needed(p.min_speech);
    const int close_after = frames_needed(p.min_silence);

    std::vector<TimeSpan> regions;
    int run_start = -1;   // current run of same-state frames
    int region_start = -1;
    bool in_speech = false;
    for (int f = 0; f <= n; ++f) {
        const bool loud = f < n && conv.energy[static_cast<std::size_t>(f)] >= p.energy_threshold;
        if (loud == in_speech) {
            run_start = -1;
            continue;
        }
        if (run_start < 0) run_start = f;
        const int run_len = f - run_start + 1;
        if (!in_speech && loud && run_len >= open_after) {
            in_speech = true;
            region_start = run_start;
            run_start = -1;
        } else if (in_speech && !loud && (run_len >= close_after || f == n)) {
            in_speech = false;
            regions.push_back({region_start * kFrame, run_start * kFrame});
            run_start = -1;
        }
    }
    if (in_speech) regions.push_back({region_start * kFrame, n * kFrame});

    std::vector<TimeSpan> pieces;
    for (const TimeSpan& r : regions) split_region(conv, r, p.max_chunk_len, pieces);
    return pack_spans(pieces, p.max_chunk_len);
}

Conversation trim_to_reference(const Conversation& conv) {
    if (conv.reference.empty()) return conv;

    double lo = conv.duration, hi = 0.0;
    for (const TimedWord& w : conv.reference.words()) {
        lo = std::min(lo, w.start);
        hi = std::max(hi, w.end);
    }
    // Frame-aligned cut keeps the energy track consistent with shifted times.
    const int first_frame = std::max(0, static_cast<int>(std::floor(lo / kFrame)));
    const int last_frame = std::min(static_cast<int>(conv.energy.size()),
                                    static_cast<int>(std::ceil(hi / kFrame)));
    const double t0 = first_frame * kFrame;

    Conversation out;
    out.id = conv.id;
    out.duration = (last_frame - first_frame) * kFrame;
    out.energy.assign(conv.energy.begin() + first_frame, conv.energy.begin() + last_frame);

    std::vector<TimedWord> words = conv.reference.words();
    for (TimedWord& w : words) {
        w.start -= t0;
        w.end -= t0;
    }
    out.reference = SpeakerAttributedTranscript(std::move(words));

    out.activity.resize(conv.activity.size());
    for (std::size_t s = 0; s < conv.activity.size(); ++s) {
        for (const TimeSpan& iv : conv.activity[s]) {
            out.activity[s].push_back({iv.start - t0, iv.end - t0});
        }
    }
    return out;
}

std::string chunks_to_csv(const std::vector<Chunk>& chunks) {
    std::ostringstream out;
    out << "index,start,end\n";
    char buf[64];
    for (const Chunk& c : chunks) {
        std::snprintf(buf, sizeof(buf), "%d,%.3f,%.3f\n", c.index, c.span.start, c.span.end);
        out << buf;
    }
    return out.str();
}

}  // namespace spcdiar
