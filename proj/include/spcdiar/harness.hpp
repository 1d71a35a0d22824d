#ifndef SPCDIAR_HARNESS_HPP
#define SPCDIAR_HARNESS_HPP

#include <unordered_map>

#include "spcdiar/clustering.hpp"
#include "spcdiar/metrics.hpp"
#include "spcdiar/simulate.hpp"
#include "spcdiar/spc.hpp"

namespace spcdiar {

// ─── configuration ───────────────────────────────────────────────────────────

enum class EngineKind { kSpc, kSpcNoUpdate, kOfflineClustering, kNaiveConcat };
enum class ChunkerKind { kOracle, kVad };

struct Condition {
    std::string name;
    ChunkerKind chunker = ChunkerKind::kOracle;
    EngineKind engine = EngineKind::kSpc;
    double chunk_len = 10.0;
    double spc_len = 5.0;
    int n = 8;
    double theta = 0.7;
    // "", "auto" (derive per-conversation enrollment clips from the reference),
    // or a path to a profile clip file.
    std::string profiles;
    ClusterParams cluster;
};

struct ExperimentConfig {
    ConversationSpec conversation;      // used when inputs is empty
    std::vector<std::string> inputs;    // timed-reference files
    std::vector<std::uint64_t> seeds;
    RecognizerBehavior behavior;        // seed field is derived per run
    double embedder_noise = 0.0;
    int embedding_dim = 64;
    std::string prompt = kDefaultPrompt;
    std::vector<Condition> conditions;
    int threads = 0;  // 0 = all available
};

// Parses the JSON config; throws ConfigError with the offending key on any
// schema violation.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// ─── execution ───────────────────────────────────────────────────────────────

struct RunRecord {
    std::string condition;
    std::uint64_t seed = 0;
    std::string conversation_id;
    ScoreReport report;
    long long cache_violations = 0;
    std::string error;       // empty on success; failed runs keep their slot
    std::string trace_text;  // filled when tracing is on
};

struct ExperimentResult {
    std::vector<RunRecord> runs;  // condition-major, then seed order
    int failures = 0;
};

// Runs the full (conversation x seed x condition) matrix across threads.
// Output is identical for any thread count: every run writes its own slot.
ExperimentResult run_experiment(const ExperimentConfig& config, bool verbose_trace = false);

// Plain single-threaded loop over the same matrix; reference for the parallel
// path and the benchmark.
ExperimentResult run_experiment_serial(const ExperimentConfig& config, bool verbose_trace = false);

// ─── outputs ─────────────────────────────────────────────────────────────────

// One structured-text record per run.
std::string results_to_jsonl(const ExperimentResult& result);

// Aligned per-condition table: WDER % / cpWER % / SA-WER % / delta %, two
// decimals, plus speaker-count accuracy.
std::string emit_report(const ExperimentResult& result);

// Writes results.jsonl + report.txt (+ trace.txt when traces were collected)
// into out_dir, creating it if needed.
void write_outputs(const ExperimentResult& result, const std::string& out_dir);

// ─── profile enrollment ──────────────────────────────────────────────────────

struct AutoProfiles {
    std::vector<ProfileClip> clips;
    // Reference relabel map attaching the enrollment names for scoring.
    std::unordered_map<int, SpeakerLabel> ref_rename;
};

// Enrollment clips per reference speaker: the longest clean run up to max_len,
// one clip per speaker in index order, with display names from a fixed pool.
AutoProfiles auto_profiles(const Conversation& conv, double max_len);

}  // namespace spcdiar

#endif
