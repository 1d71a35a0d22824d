#ifndef SPCDIAR_CLUSTERING_HPP
#define SPCDIAR_CLUSTERING_HPP

#include "spcdiar/spc.hpp"

namespace spcdiar {

struct ClusterParams {
    double cosine_distance_threshold = 0.5;  // stop merging above this linkage
    double min_segment = 0.5;                // seconds of clean speech to embed a speaker
};

// Offline baseline: every chunk is recognized without any prefix, each chunk's
// local speakers are embedded from their longest clean segment, and the
// embeddings are merged by average-linkage agglomerative clustering on cosine
// distance. Clusters become global speakers numbered by order of first
// appearance. Local speakers too short to embed inherit the cluster of the
// nearest embedded segment in time within their chunk. Per-chunk recognition
// fans out across threads; results are ordered by chunk index regardless.
SpeakerAttributedTranscript offline_global(const std::vector<Chunk>& chunks,
                                           const LocalRecognizer& recognizer,
                                           const Embedder& embedder,
                                           const WordTimingModel& timing,
                                           const ClusterParams& p = {},
                                           const std::string& prompt = kDefaultPrompt,
                                           const std::string& conversation_id = {});

// Average-linkage agglomerative clustering: merges the closest pair of clusters
// until the smallest pairwise average cosine distance exceeds the threshold.
// Returns a cluster id per input embedding. Exposed for direct testing.
std::vector<int> agglomerate(const std::vector<EmbeddingVector>& embeddings, double threshold);

}  // namespace spcdiar

#endif
