#ifndef SPCDIAR_METRICS_HPP
#define SPCDIAR_METRICS_HPP

#include <map>
#include <optional>

#include "spcdiar/types.hpp"

namespace spcdiar {

// Scoring normalization: case and punctuation are stripped before any word
// comparison. Tokens that strip to nothing are dropped from scoring.
std::string normalize_token(const std::string& token);

// ─── word alignment ──────────────────────────────────────────────────────────

enum class AlignKind { kMatch, kSubstitute, kDelete, kInsert };

// One edit step. Indices point into the ORIGINAL word lists; -1 on the side an
// op does not touch (ref for inserts, hyp for deletes).
struct AlignmentOp {
    AlignKind kind;
    int ref_index = -1;
    int hyp_index = -1;
};

// Minimum-cost Levenshtein alignment with unit costs over normalized tokens.
// Backtrace prefers match > substitute > delete > insert.
std::vector<AlignmentOp> align_words(const std::vector<std::string>& ref,
                                     const std::vector<std::string>& hyp);

// Edit distance only (no backtrace), same normalization.
long long word_edit_distance(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp);

// ─── speaker-attributed metrics ──────────────────────────────────────────────

struct CpwerResult {
    double rate = 0.0;
    long long total_errors = 0;
    long long ref_words = 0;
    // Optimal pairing of real speaker streams, hyp key -> ref key.
    std::map<std::string, std::string> assignment;
    // Edit errors charged per reference speaker under that pairing.
    std::map<std::string, long long> per_ref_speaker_errors;
};

// Concatenated-stream WER minimized over speaker pairings. Streams are paired
// by a minimum-cost assignment over a square cost matrix padded with empty
// streams. Denominator is the total reference word count. Throws EmptyReference
// when the reference has no scorable words.
CpwerResult cpwer(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp);

// Fraction of time-aligned word pairs (matches + substitutions from a
// speaker-agnostic alignment) whose speakers disagree under the cpWER-optimal
// pairing. Returns 0 when nothing aligns.
double wder(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp);

// Like cpWER but streams are paired by label key directly (display name when
// present, else index); no permutation search. sawer >= cpwer.rate always.
double sawer(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp);

struct ScoreReport {
    double wder = 0.0;
    double cpwer = 0.0;
    double sawer = 0.0;
    double delta = 0.0;  // sawer - cpwer
    long long ref_words = 0;
    int ref_speakers = 0;
    int hyp_speakers = 0;
    std::map<std::string, std::string> assignment;
    std::map<std::string, long long> per_ref_speaker_errors;
};

ScoreReport score(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp);

// ─── speaker counting ────────────────────────────────────────────────────────

struct SpeakerCountAccuracy {
    // true speaker count -> (correct runs, total runs)
    std::map<int, std::pair<int, int>> by_true_count;
    double average = 0.0;  // over all pairs

    double bucket_accuracy(int true_count) const {
        const auto it = by_true_count.find(true_count);
        if (it == by_true_count.end() || it->second.second == 0) return 0.0;
        return static_cast<double>(it->second.first) / it->second.second;
    }
};

SpeakerCountAccuracy speaker_count_accuracy(
    const std::vector<std::pair<SpeakerAttributedTranscript, SpeakerAttributedTranscript>>& pairs);

// ─── assignment kernel ───────────────────────────────────────────────────────

// Minimum-cost perfect matching on a square cost matrix (Hungarian algorithm).
// Returns the column assigned to each row. Exposed for direct testing against
// exhaustive enumeration.
std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost);

}  // namespace spcdiar

#endif
