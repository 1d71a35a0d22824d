#include "spcdiar/spc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spcdiar/errors.hpp"

namespace spcdiar {

namespace {

std::vector<std::string> split_words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(std::move(t));
    return out;
}

std::string join_words(const std::vector<TimedWord>& words) {
    std::string out;
    for (const TimedWord& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w.text;
    }
    return out;
}

const EmbeddingVector& entry_embedding(const CacheEntry& e, const Embedder& embedder) {
    if (!e.embedding) e.embedding = embedder.embed(e.audio);
    return *e.embedding;
}

// Longest span wins; earliest start breaks ties.
const CandidateSegment* find_longest(const std::vector<CandidateSegment>& candidates) {
    const CandidateSegment* best = nullptr;
    for (const CandidateSegment& c : candidates) {
        if (!best || c.span.length() > best->span.length() + 1e-12 ||
            (std::abs(c.span.length() - best->span.length()) <= 1e-12 &&
             c.span.start < best->span.start)) {
            best = &c;
        }
    }
    return best;
}

}  // namespace

int CacheEntry::word_count() const {
    return static_cast<int>(split_words(text).size());
}

bool CacheEntry::has_punctuation() const {
    return text.find_first_of(".?!") != std::string::npos;
}

const CacheEntry* SpeakerPromptCache::find(int speaker_index) const {
    const auto it = entries_.find(speaker_index);
    return it == entries_.end() ? nullptr : &it->second;
}

void SpeakerPromptCache::put(CacheEntry entry) {
    entries_[entry.speaker.index] = std::move(entry);
}

int SpeakerPromptCache::next_free_index() const {
    int idx = 1;
    while (entries_.contains(idx)) ++idx;
    return idx;
}

InferenceInput build_inference_input(const SpeakerPromptCache& cache, const Chunk& chunk,
                                     const std::string& prompt) {
    InferenceInput input;
    input.chunk = chunk;
    input.prompt = prompt;
    for (const auto& [index, entry] : cache.entries()) {
        input.audio_prefix.push_back({entry.speaker, entry.audio, entry.text});
        if (!input.context_text.empty()) input.context_text.push_back(' ');
        input.context_text += "<|" + entry.speaker.key() + "|> " + entry.text;
    }
    return input;
}

std::map<int, std::vector<CandidateSegment>> segment_speaker_runs(
    const std::vector<TimedWord>& words, double max_len) {
    std::map<int, std::vector<CandidateSegment>> out;

    std::size_t i = 0;
    while (i < words.size()) {
        if (words[i].overlapped || !words[i].has_timing()) {
            ++i;
            continue;
        }
        const SpeakerLabel speaker = words[i].speaker;
        std::size_t j = i;
        while (j < words.size() && words[j].speaker == speaker && !words[j].overlapped &&
               words[j].has_timing()) {
            ++j;
        }
        // Truncate the run [i, j) into sub-segments of span <= max_len.
        std::size_t k = i;
        while (k < j) {
            std::size_t m = k;
            while (m + 1 < j && words[m + 1].end - words[k].start <= max_len + 1e-9) ++m;
            if (words[m].end - words[k].start > max_len + 1e-9) {
                ++k;  // single word longer than max_len, not usable
                continue;
            }
            CandidateSegment seg;
            seg.span = {words[k].start, words[m].end};
            seg.words.assign(words.begin() + static_cast<std::ptrdiff_t>(k),
                             words.begin() + static_cast<std::ptrdiff_t>(m + 1));
            seg.text = join_words(seg.words);
            out[speaker.index].push_back(std::move(seg));
            k = m + 1;
        }
        i = j;
    }
    return out;
}

SpeakerPromptCache update_cache(SpeakerPromptCache cache, const Chunk& chunk,
                                const SpeakerAttributedTranscript& chunk_result,
                                const WordTimingModel& timing, const Embedder& embedder,
                                const SpcParams& p, const std::string& conversation_id,
                                std::vector<CacheEvent>* events) {
    const auto note = [events](CacheEventKind kind, int speaker, TimeSpan span,
                               std::string detail) {
        if (events) events->push_back({kind, speaker, span, std::move(detail)});
    };

    // Speakers in order of first appearance in the result.
    std::vector<SpeakerLabel> speakers;
    for (const TimedWord& w : chunk_result.words()) {
        if (std::find_if(speakers.begin(), speakers.end(), [&](const SpeakerLabel& s) {
                return s.index == w.speaker.index;
            }) == speakers.end()) {
            speakers.push_back(w.speaker);
        }
    }

    // Timing pass per speaker, reassembled in result order so run boundaries at
    // speaker changes survive.
    std::vector<TimedWord> timed(chunk_result.words());
    for (const SpeakerLabel& s : speakers) {
        std::vector<TimedWord> mine;
        std::vector<std::size_t> positions;
        for (std::size_t i = 0; i < timed.size(); ++i) {
            if (timed[i].speaker.index == s.index) {
                mine.push_back(timed[i]);
                positions.push_back(i);
            }
        }
        const std::vector<TimedWord> aligned = timing.align(chunk.span, mine);
        for (std::size_t i = 0; i < positions.size() && i < aligned.size(); ++i) {
            timed[positions[i]] = aligned[i];
        }
    }

    auto candidates_by_speaker = segment_speaker_runs(timed, p.l);

    for (const SpeakerLabel& s : speakers) {
        const auto cand_it = candidates_by_speaker.find(s.index);
        const CandidateSegment* best =
            cand_it == candidates_by_speaker.end() ? nullptr : find_longest(cand_it->second);

        if (!cache.contains(s.index)) {
            if (!best || best->text.empty()) {
                note(CacheEventKind::kSkip, s.index, {}, "new speaker without clean segment");
                continue;
            }
            CacheEntry entry;
            entry.speaker = s;
            entry.audio = {conversation_id, best->span};
            entry.text = best->text;
            entry.words = best->words;
            cache.put(std::move(entry));
            note(CacheEventKind::kInsert, s.index, best->span, "");
            continue;
        }

        if (!p.update_enabled) continue;

        const CacheEntry& cached = *cache.find(s.index);
        if (cached.word_count() >= p.n && cached.has_punctuation()) {
            note(CacheEventKind::kSkip, s.index, best ? best->span : TimeSpan{},
                 "cached entry already good");
            continue;
        }
        if (!best) {
            note(CacheEventKind::kSkip, s.index, {}, "no clean candidate");
            continue;
        }
        if (best->span.length() <= cached.audio.span.length() + 1e-12) {
            note(CacheEventKind::kSkip, s.index, best->span, "candidate not longer");
            continue;
        }
        double sim = 0.0;
        try {
            const EmbeddingVector cand_emb = embedder.embed({conversation_id, best->span});
            sim = cosine_similarity(cand_emb, entry_embedding(cached, embedder));
        } catch (const EmptySpan&) {
            note(CacheEventKind::kSkip, s.index, best->span, "candidate span empty");
            continue;
        }
        if (sim <= p.theta) {
            std::ostringstream detail;
            detail << "similarity " << sim << " below gate";
            note(CacheEventKind::kSkip, s.index, best->span, detail.str());
            continue;
        }
        CacheEntry entry;
        entry.speaker = cached.speaker;
        entry.audio = {conversation_id, best->span};
        entry.text = best->text;
        entry.words = best->words;
        cache.put(std::move(entry));
        note(CacheEventKind::kReplace, s.index, best->span, "");
    }
    return cache;
}

SpeakerPromptCache attach_profiles(const std::vector<ProfileClip>& clips, double max_len) {
    SpeakerPromptCache cache;
    int index = 1;
    for (const ProfileClip& clip : clips) {
        if (clip.audio.span.length() > max_len + 1e-9) {
            std::ostringstream msg;
            msg << "profile clip " << index << " is " << clip.audio.span.length()
                << " s, max " << max_len;
            throw ProfileTooLong(msg.str());
        }
        if (split_words(clip.text).empty()) {
            throw EmptyProfileText("profile clip " + std::to_string(index) + " has no text");
        }
        CacheEntry entry;
        entry.speaker = {index, clip.display_name};
        entry.audio = clip.audio;
        entry.text = clip.text;
        cache.put(std::move(entry));
        ++index;
    }
    return cache;
}

StreamResult run_streaming(const std::vector<Chunk>& chunks, const LocalRecognizer& recognizer,
                           const Embedder& embedder, const WordTimingModel& timing,
                           const SpcParams& params, const std::string& prompt,
                           const std::optional<SpeakerPromptCache>& profiles,
                           const std::string& conversation_id) {
    StreamResult result;
    SpeakerPromptCache cache = profiles.value_or(SpeakerPromptCache{});

    for (const Chunk& chunk : chunks) {
        const InferenceInput input = build_inference_input(cache, chunk, prompt);

        SpeakerAttributedTranscript r;
        try {
            r = recognizer.transcribe(input);
        } catch (const std::exception& e) {
            throw RecognizerError(chunk.index, e.what());
        }
        result.transcript.append(r);

        ChunkTrace trace;
        trace.chunk_index = chunk.index;
        trace.prefix_entries = input.audio_prefix.size();
        if (!profiles) {
            cache = update_cache(std::move(cache), chunk, r, timing, embedder, params,
                                 conversation_id, &trace.events);
        }
        trace.cache_size_after = cache.size();
        trace.violations = check_cache(cache, params);
        result.trace.push_back(std::move(trace));
    }
    result.final_cache = std::move(cache);
    return result;
}

SpeakerAttributedTranscript naive_concat(const std::vector<Chunk>& chunks,
                                         const LocalRecognizer& recognizer,
                                         const std::string& prompt) {
    SpeakerAttributedTranscript out;
    for (const Chunk& chunk : chunks) {
        InferenceInput input;
        input.chunk = chunk;
        input.prompt = prompt;
        out.append(recognizer.transcribe(input));
    }
    return out;
}

std::vector<std::string> check_cache(const SpeakerPromptCache& cache, const SpcParams& p) {
    std::vector<std::string> violations;
    for (const auto& [index, entry] : cache.entries()) {
        std::ostringstream who;
        who << "speaker " << index << ": ";
        if (entry.speaker.index != index) {
            violations.push_back(who.str() + "entry labeled " +
                                 std::to_string(entry.speaker.index));
        }
        if (entry.audio.span.length() > p.l + 1e-9) {
            violations.push_back(who.str() + "span exceeds max length");
        }
        if (entry.audio.span.length() <= 0.0) {
            violations.push_back(who.str() + "empty span");
        }
        if (split_words(entry.text).empty()) {
            violations.push_back(who.str() + "empty text");
        }
        for (const TimedWord& w : entry.words) {
            if (w.overlapped) {
                violations.push_back(who.str() + "overlapped word in entry");
                break;
            }
        }
    }
    return violations;
}

}  // namespace spcdiar
