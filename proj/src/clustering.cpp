#include "spcdiar/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spcdiar/errors.hpp"

namespace spcdiar {

std::vector<int> agglomerate(const std::vector<EmbeddingVector>& embeddings, double threshold) {
    const int n = static_cast<int>(embeddings.size());
    std::vector<int> cluster(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cluster[static_cast<std::size_t>(i)] = i;
    if (n < 2) return cluster;

    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = 1.0 - cosine_similarity(embeddings[static_cast<std::size_t>(i)],
                                                     embeddings[static_cast<std::size_t>(j)]);
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }
    }

    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

    // Average linkage between live clusters a and b.
    const auto linkage = [&](int a, int b) {
        double sum = 0.0;
        for (const int x : members[static_cast<std::size_t>(a)]) {
            for (const int y : members[static_cast<std::size_t>(b)]) {
                sum += dist[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            }
        }
        return sum / (static_cast<double>(members[static_cast<std::size_t>(a)].size()) *
                      static_cast<double>(members[static_cast<std::size_t>(b)].size()));
    };

    while (true) {
        int best_a = -1, best_b = -1;
        double best = 0.0;
        for (int a = 0; a < n; ++a) {
            if (!alive[static_cast<std::size_t>(a)]) continue;
            for (int b = a + 1; b < n; ++b) {
                if (!alive[static_cast<std::size_t>(b)]) continue;
                const double d = linkage(a, b);
                if (best_a < 0 || d < best) {
                    best = d;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a < 0 || best > threshold) break;
        auto& ma = members[static_cast<std::size_t>(best_a)];
        auto& mb = members[static_cast<std::size_t>(best_b)];
        ma.insert(ma.end(), mb.begin(), mb.end());
        mb.clear();
        alive[static_cast<std::size_t>(best_b)] = false;
    }

    for (int a = 0; a < n; ++a) {
        for (const int x : members[static_cast<std::size_t>(a)]) {
            cluster[static_cast<std::size_t>(x)] = a;
        }
    }
    return cluster;
}

SpeakerAttributedTranscript offline_global(const std::vector<Chunk>& chunks,
                                           const LocalRecognizer& recognizer,
                                           const Embedder& embedder, const WordTimingModel& timing,
                                           const ClusterParams& p, const std::string& prompt,
                                           const std::string& conversation_id) {
    const int n_chunks = static_cast<int>(chunks.size());
    std::vector<SpeakerAttributedTranscript> results(static_cast<std::size_t>(n_chunks));

    // Chunks are independent here; order is restored by indexing into results.
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_chunks; ++i) {
        InferenceInput input;
        input.chunk = chunks[static_cast<std::size_t>(i)];
        input.prompt = prompt;
        results[static_cast<std::size_t>(i)] = recognizer.transcribe(input);
    }

    // One embedding per (chunk, local speaker) from its longest clean segment.
    struct LocalSpeaker {
        int chunk = 0;
        int label_index = 0;
        double mid = 0.0;        // time anchor for short-speech fallback
        int embedding_id = -1;   // -1 when below min_segment
    };
    std::vector<LocalSpeaker> locals;
    std::vector<EmbeddingVector> embeddings;
    for (int c = 0; c < n_chunks; ++c) {
        const auto& r = results[static_cast<std::size_t>(c)];
        if (r.empty()) continue;

        std::vector<TimedWord> timed(r.words());
        std::vector<int> order;
        for (const TimedWord& w : r.words()) {
            if (std::find(order.begin(), order.end(), w.speaker.index) == order.end()) {
                order.push_back(w.speaker.index);
            }
        }
        for (const int s : order) {
            std::vector<TimedWord> mine;
            std::vector<std::size_t> positions;
            for (std::size_t i = 0; i < timed.size(); ++i) {
                if (timed[i].speaker.index == s) {
                    mine.push_back(timed[i]);
                    positions.push_back(i);
                }
            }
            const std::vector<TimedWord> aligned =
                timing.align(chunks[static_cast<std::size_t>(c)].span, mine);
            for (std::size_t i = 0; i < positions.size() && i < aligned.size(); ++i) {
                timed[positions[i]] = aligned[i];
            }
        }

        auto candidates = segment_speaker_runs(timed, chunks[static_cast<std::size_t>(c)].span.length());
        for (const int s : order) {
            LocalSpeaker ls;
            ls.chunk = c;
            ls.label_index = s;
            double first = 0.0, last = 0.0;
            bool seen = false;
            for (const TimedWord& w : timed) {
                if (w.speaker.index != s || !w.has_timing()) continue;
                if (!seen) first = w.start;
                last = w.end;
                seen = true;
            }
            ls.mid = seen ? 0.5 * (first + last) : chunks[static_cast<std::size_t>(c)].span.start;

            const CandidateSegment* best = nullptr;
            const auto it = candidates.find(s);
            if (it != candidates.end()) {
                for (const CandidateSegment& cand : it->second) {
                    if (!best || cand.span.length() > best->span.length()) best = &cand;
                }
            }
            if (best && best->span.length() >= p.min_segment) {
                try {
                    embeddings.push_back(embedder.embed({conversation_id, best->span}));
                    ls.embedding_id = static_cast<int>(embeddings.size()) - 1;
                } catch (const EmptySpan&) {
                    ls.embedding_id = -1;
                }
            }
            locals.push_back(ls);
        }
    }

    const std::vector<int> cluster_of = agglomerate(embeddings, p.cosine_distance_threshold);

    // Short speakers join the nearest-in-time embedded segment of their chunk.
    std::vector<int> local_cluster(locals.size(), -1);
    for (std::size_t i = 0; i < locals.size(); ++i) {
        if (locals[i].embedding_id >= 0) {
            local_cluster[i] = cluster_of[static_cast<std::size_t>(locals[i].embedding_id)];
        }
    }
    int fresh = static_cast<int>(embeddings.size());
    for (std::size_t i = 0; i < locals.size(); ++i) {
        if (local_cluster[i] >= 0) continue;
        int best = -1;
        double best_dist = 0.0;
        for (std::size_t j = 0; j < locals.size(); ++j) {
            if (locals[j].chunk != locals[i].chunk || locals[j].embedding_id < 0) continue;
            const double d = std::abs(locals[j].mid - locals[i].mid);
            if (best < 0 || d < best_dist) {
                best = static_cast<int>(j);
                best_dist = d;
            }
        }
        local_cluster[i] = best >= 0 ? local_cluster[static_cast<std::size_t>(best)] : fresh++;
    }

    // Global ids by order of first appearance, then relabel every word.
    std::map<std::pair<int, int>, int> global_of;  // (chunk, local label) -> global index
    std::map<int, int> cluster_global;
    int next_global = 0;
    SpeakerAttributedTranscript out;
    for (std::size_t i = 0; i < locals.size(); ++i) {
        const auto [it, inserted] = cluster_global.try_emplace(local_cluster[i], next_global + 1);
        if (inserted) ++next_global;
        global_of[{locals[i].chunk, locals[i].label_index}] = it->second;
    }
    for (int c = 0; c < n_chunks; ++c) {
        std::vector<TimedWord> words = results[static_cast<std::size_t>(c)].words();
        for (TimedWord& w : words) {
            w.speaker = SpeakerLabel{global_of.at({c, w.speaker.index}), ""};
        }
        out.append(SpeakerAttributedTranscript(std::move(words)));
    }
    return out;
}

}  // namespace spcdiar
