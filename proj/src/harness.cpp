#include "spcdiar/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "spcdiar/errors.hpp"
#include "spcdiar/io.hpp"
#include "spcdiar/rng.hpp"
#include "spcdiar/transcript.hpp"

namespace spcdiar {

namespace {

using nlohmann::ordered_json;

const char* kProfileNames[] = {"mike",  "susan",  "alex",   "jordan", "taylor", "casey",
                               "riley", "morgan", "dakota", "avery",  "quinn",  "rowan"};

template <typename T>
std::pair<T, T> parse_range(const ordered_json& j, const std::string& key) {
    const auto& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(key + " must be a [lo, hi] pair");
    return {v[0].get<T>(), v[1].get<T>()};
}

PermutationMode parse_mode(const std::string& s) {
    if (s == "identity") return PermutationMode::kIdentity;
    if (s == "order-of-appearance") return PermutationMode::kOrderOfAppearance;
    if (s == "random-per-chunk") return PermutationMode::kRandomPerChunk;
    throw ConfigError("unknown permutation_mode: " + s);
}

EngineKind parse_engine(const std::string& s) {
    if (s == "spc") return EngineKind::kSpc;
    if (s == "spc-noupdate") return EngineKind::kSpcNoUpdate;
    if (s == "offline-clustering") return EngineKind::kOfflineClustering;
    if (s == "naive-concat") return EngineKind::kNaiveConcat;
    throw ConfigError("unknown engine: " + s);
}

ChunkerKind parse_chunker(const std::string& s) {
    if (s == "oracle") return ChunkerKind::kOracle;
    if (s == "vad") return ChunkerKind::kVad;
    throw ConfigError("unknown chunker: " + s);
}

struct RunTask {
    int condition = 0;
    int base = 0;  // index into the conversation bases
    std::uint64_t seed = 0;
};

std::string trace_to_text(const std::vector<ChunkTrace>& trace) {
    std::ostringstream out;
    for (const ChunkTrace& t : trace) {
        out << "chunk=" << t.chunk_index << " prefix=" << t.prefix_entries
            << " cache=" << t.cache_size_after;
        for (const CacheEvent& e : t.events) {
            const char* kind = e.kind == CacheEventKind::kInsert    ? "insert"
                               : e.kind == CacheEventKind::kReplace ? "replace"
                                                                    : "skip";
            out << ' ' << kind << ":speaker" << e.speaker_index;
            char buf[48];
            std::snprintf(buf, sizeof(buf), "[%.3f,%.3f)", e.span.start, e.span.end);
            out << buf;
            if (!e.detail.empty()) out << '{' << e.detail << '}';
        }
        for (const std::string& v : t.violations) out << " VIOLATION{" << v << '}';
        out << '\n';
    }
    return out.str();
}

RunRecord execute_run(const ExperimentConfig& config, const Condition& cond,
                      const Conversation& base, std::uint64_t seed, bool verbose_trace) {
    RunRecord rec;
    rec.condition = cond.name;
    rec.seed = seed;
    rec.conversation_id = base.id;

    const Conversation conv = trim_to_reference(base);

    std::vector<Chunk> chunks;
    if (cond.chunker == ChunkerKind::kOracle) {
        chunks = oracle_chunks(conv, cond.chunk_len);
    } else {
        VadParams vp;
        vp.max_chunk_len = cond.chunk_len;
        chunks = vad_chunks(conv, vp);
    }

    RecognizerBehavior behavior = config.behavior;
    behavior.seed = rng::mix(seed, 0xBEEFull);
    const SimulatedRecognizer recognizer(conv, behavior);
    const MockEmbedder embedder(conv, config.embedder_noise, rng::mix(seed, 0xE14Bull),
                                config.embedding_dim);
    const OracleWordTiming timing(conv);

    SpcParams params;
    params.l = cond.spc_len;
    params.n = cond.n;
    params.theta = cond.theta;
    params.update_enabled = cond.engine != EngineKind::kSpcNoUpdate;

    SpeakerAttributedTranscript reference = conv.reference;
    std::optional<SpeakerPromptCache> profiles;
    if (!cond.profiles.empty()) {
        if (cond.engine != EngineKind::kSpc && cond.engine != EngineKind::kSpcNoUpdate) {
            throw ConfigError("profiles require an spc engine");
        }
        if (cond.profiles == "auto") {
            AutoProfiles ap = auto_profiles(conv, cond.spc_len);
            profiles = attach_profiles(ap.clips, cond.spc_len);
            reference = relabel(reference, ap.ref_rename);
        } else {
            profiles = attach_profiles(load_profile_clips(cond.profiles, conv.id), cond.spc_len);
        }
    }

    SpeakerAttributedTranscript hypothesis;
    switch (cond.engine) {
        case EngineKind::kSpc:
        case EngineKind::kSpcNoUpdate: {
            StreamResult sr = run_streaming(chunks, recognizer, embedder, timing, params,
                                            config.prompt, profiles, conv.id);
            hypothesis = std::move(sr.transcript);
            for (const ChunkTrace& t : sr.trace) {
                rec.cache_violations += static_cast<long long>(t.violations.size());
            }
            if (verbose_trace) rec.trace_text = trace_to_text(sr.trace);
            break;
        }
        case EngineKind::kOfflineClustering:
            hypothesis =
                offline_global(chunks, recognizer, embedder, timing, cond.cluster, config.prompt,
                               conv.id);
            break;
        case EngineKind::kNaiveConcat:
            hypothesis = naive_concat(chunks, recognizer, config.prompt);
            break;
    }

    rec.report = score(reference, hypothesis);
    return rec;
}

std::vector<Conversation> resolve_bases(const ExperimentConfig& config) {
    std::vector<Conversation> bases;
    if (!config.inputs.empty()) {
        for (const std::string& path : config.inputs) bases.push_back(load_timed_reference(path));
    }
    return bases;
}

ExperimentResult run_matrix(const ExperimentConfig& config, bool verbose_trace, int threads) {
    if (config.conditions.empty()) throw ConfigError("no conditions configured");
    if (config.seeds.empty()) throw ConfigError("no seeds configured");

    const std::vector<Conversation> inputs = resolve_bases(config);

    // Generated mode pairs each seed with its own conversation; input mode
    // crosses every input with every seed.
    std::vector<RunTask> tasks;
    for (int c = 0; c < static_cast<int>(config.conditions.size()); ++c) {
        if (inputs.empty()) {
            for (const std::uint64_t seed : config.seeds) tasks.push_back({c, -1, seed});
        } else {
            for (int b = 0; b < static_cast<int>(inputs.size()); ++b) {
                for (const std::uint64_t seed : config.seeds) tasks.push_back({c, b, seed});
            }
        }
    }

    ExperimentResult result;
    result.runs.resize(tasks.size());

    const int n_tasks = static_cast<int>(tasks.size());
#ifndef _OPENMP
    (void)threads;
#else
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads != 1)
#endif
    for (int i = 0; i < n_tasks; ++i) {
        const RunTask& task = tasks[static_cast<std::size_t>(i)];
        const Condition& cond = config.conditions[static_cast<std::size_t>(task.condition)];
        RunRecord& rec = result.runs[static_cast<std::size_t>(i)];
        try {
            Conversation generated;
            const Conversation* base;
            if (task.base < 0) {
                ConversationSpec spec = config.conversation;
                spec.seed = task.seed;
                generated = gen_conversation(spec);
                base = &generated;
            } else {
                base = &inputs[static_cast<std::size_t>(task.base)];
            }
            rec = execute_run(config, cond, *base, task.seed, verbose_trace);
        } catch (const std::exception& e) {
            rec.condition = cond.name;
            rec.seed = task.seed;
            rec.error = e.what();
        }
    }

    for (const RunRecord& r : result.runs) {
        if (!r.error.empty()) ++result.failures;
    }
    return result;
}

int resolved_threads(const ExperimentConfig& config) {
#ifdef _OPENMP
    return config.threads > 0 ? config.threads : omp_get_max_threads();
#else
    (void)config;
    return 1;
#endif
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig config;
    try {
        if (j.contains("inputs")) {
            config.inputs = j.at("inputs").get<std::vector<std::string>>();
        }
        if (j.contains("conversation")) {
            const auto& c = j.at("conversation");
            config.conversation.n_speakers = c.value("n_speakers", 2);
            if (c.contains("sentences_per_speaker"))
                config.conversation.sentences_per_speaker = parse_range<int>(c, "sentences_per_speaker");
            if (c.contains("words_per_sentence"))
                config.conversation.words_per_sentence = parse_range<int>(c, "words_per_sentence");
            if (c.contains("word_duration"))
                config.conversation.word_duration = parse_range<double>(c, "word_duration");
            if (c.contains("pause")) config.conversation.pause = parse_range<double>(c, "pause");
            config.conversation.overlap_fraction = c.value("overlap_fraction", 0.0);
        } else if (config.inputs.empty()) {
            throw ConfigError("config needs either conversation or inputs");
        }

        const auto& seeds = j.at("seeds");
        if (seeds.is_array()) {
            config.seeds = seeds.get<std::vector<std::uint64_t>>();
        } else {
            const auto base = seeds.at("base").get<std::uint64_t>();
            const auto count = seeds.at("count").get<std::uint64_t>();
            for (std::uint64_t k = 0; k < count; ++k) config.seeds.push_back(base + k);
        }

        if (j.contains("recognizer")) {
            const auto& r = j.at("recognizer");
            config.behavior.permutation_mode = parse_mode(r.value("permutation_mode", "identity"));
            config.behavior.word_error_rate = r.value("word_error_rate", 0.0);
            config.behavior.speaker_confusion_rate = r.value("speaker_confusion_rate", 0.0);
        }
        if (j.contains("embedder")) {
            config.embedder_noise = j.at("embedder").value("noise_sigma", 0.0);
            config.embedding_dim = j.at("embedder").value("dim", 64);
        }
        config.prompt = j.value("prompt", std::string(kDefaultPrompt));
        config.threads = j.value("threads", 0);

        for (const auto& cj : j.at("conditions")) {
            Condition cond;
            cond.name = cj.at("name").get<std::string>();
            cond.chunker = parse_chunker(cj.value("chunker", "oracle"));
            cond.engine = parse_engine(cj.value("engine", "spc"));
            cond.chunk_len = cj.value("chunk_len", 10.0);
            cond.spc_len = cj.value("spc_len", 5.0);
            cond.n = cj.value("n", 8);
            cond.theta = cj.value("theta", 0.7);
            cond.profiles = cj.value("profiles", "");
            cond.cluster.cosine_distance_threshold = cj.value("cluster_threshold", 0.5);
            cond.cluster.min_segment = cj.value("cluster_min_segment", 0.5);
            if (cond.chunk_len <= 0 || cond.spc_len <= 0) {
                throw ConfigError(cond.name + ": chunk_len and spc_len must be positive");
            }
            if (!cond.profiles.empty() && cond.engine != EngineKind::kSpc &&
                cond.engine != EngineKind::kSpcNoUpdate) {
                throw ConfigError(cond.name + ": profiles require an spc engine");
            }
            config.conditions.push_back(std::move(cond));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }

    if (config.conditions.empty()) throw ConfigError("no conditions configured");
    if (config.seeds.empty()) throw ConfigError("no seeds configured");
    for (std::size_t i = 0; i < config.conditions.size(); ++i) {
        for (std::size_t k = i + 1; k < config.conditions.size(); ++k) {
            if (config.conditions[i].name == config.conditions[k].name) {
                throw ConfigError("duplicate condition name: " + config.conditions[i].name);
            }
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool verbose_trace) {
    return run_matrix(config, verbose_trace, resolved_threads(config));
}

ExperimentResult run_experiment_serial(const ExperimentConfig& config, bool verbose_trace) {
    return run_matrix(config, verbose_trace, 1);
}

std::string results_to_jsonl(const ExperimentResult& result) {
    std::ostringstream out;
    for (const RunRecord& r : result.runs) {
        ordered_json rec;
        rec["condition"] = r.condition;
        rec["seed"] = r.seed;
        rec["conversation"] = r.conversation_id;
        if (r.error.empty()) {
            rec["wder"] = r.report.wder;
            rec["cpwer"] = r.report.cpwer;
            rec["sawer"] = r.report.sawer;
            rec["delta"] = r.report.delta;
            rec["ref_words"] = r.report.ref_words;
            rec["ref_speakers"] = r.report.ref_speakers;
            rec["hyp_speakers"] = r.report.hyp_speakers;
            rec["cache_violations"] = r.cache_violations;
        } else {
            rec["error"] = r.error;
        }
        out << rec.dump() << '\n';
    }
    return out.str();
}

std::string emit_report(const ExperimentResult& result) {
    struct Agg {
        std::vector<double> wder, cpwer, sawer, delta;
        int count_correct = 0;
        int runs = 0, failures = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, Agg> agg;
    for (const RunRecord& r : result.runs) {
        if (std::find(order.begin(), order.end(), r.condition) == order.end()) {
            order.push_back(r.condition);
        }
        Agg& a = agg[r.condition];
        ++a.runs;
        if (!r.error.empty()) {
            ++a.failures;
            continue;
        }
        a.wder.push_back(r.report.wder);
        a.cpwer.push_back(r.report.cpwer);
        a.sawer.push_back(r.report.sawer);
        a.delta.push_back(r.report.delta);
        if (r.report.ref_speakers == r.report.hyp_speakers) ++a.count_correct;
    }

    const auto mean_std = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {0.0, 0.0};
        double mean = 0.0;
        for (const double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return {mean, 0.0};
        double var = 0.0;
        for (const double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return {mean, std::sqrt(var)};
    };

    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-24s %5s  %-15s %-15s %-15s %-15s %7s\n", "condition",
                  "runs", "WDER %", "cpWER %", "SA-WER %", "delta %", "spk acc");
    out << line;
    out << std::string(104, '-') << '\n';
    for (const std::string& name : order) {
        const Agg& a = agg[name];
        const auto fmt = [&](const std::vector<double>& v) {
            const auto [m, s] = mean_std(v);
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%6.2f \xc2\xb1 %5.2f", 100.0 * m, 100.0 * s);
            return std::string(buf);
        };
        const double acc =
            a.wder.empty() ? 0.0 : static_cast<double>(a.count_correct) / a.wder.size();
        std::snprintf(line, sizeof(line), "%-24s %5d  %-15s %-15s %-15s %-15s %7.2f\n",
                      name.c_str(), a.runs, fmt(a.wder).c_str(), fmt(a.cpwer).c_str(),
                      fmt(a.sawer).c_str(), fmt(a.delta).c_str(), acc);
        out << line;
        if (a.failures > 0) {
            std::snprintf(line, sizeof(line), "%-24s %5d runs failed\n", "", a.failures);
            out << line;
        }
    }
    return out.str();
}

void write_outputs(const ExperimentResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/results.jsonl");
        if (!f) throw ConfigError("cannot write " + out_dir + "/results.jsonl");
        f << results_to_jsonl(result);
    }
    {
        std::ofstream f(out_dir + "/report.txt");
        f << emit_report(result);
    }
    bool any_trace = false;
    for (const RunRecord& r : result.runs) any_trace = any_trace || !r.trace_text.empty();
    if (any_trace) {
        std::ofstream f(out_dir + "/trace.txt");
        for (const RunRecord& r : result.runs) {
            if (r.trace_text.empty()) continue;
            f << "== " << r.condition << " seed=" << r.seed << " ==\n" << r.trace_text;
        }
    }
}

AutoProfiles auto_profiles(const Conversation& conv, double max_len) {
    AutoProfiles out;
    auto candidates = segment_speaker_runs(conv.reference.words(), max_len);
    int clip_no = 0;
    for (int s = 1; s <= conv.n_speakers(); ++s) {
        out.ref_rename[s] = SpeakerLabel{s, ""};
        const auto it = candidates.find(s);
        if (it == candidates.end() || it->second.empty()) continue;
        const CandidateSegment* best = nullptr;
        for (const CandidateSegment& c : it->second) {
            if (!best || c.span.length() > best->span.length()) best = &c;
        }
        std::string name;
        if (clip_no < static_cast<int>(std::size(kProfileNames))) {
            name = kProfileNames[clip_no];
        } else {
            name = "guest" + std::to_string(clip_no + 1);
        }
        ++clip_no;
        out.clips.push_back({{conv.id, best->span}, best->text, name});
        out.ref_rename[s] = SpeakerLabel{s, name};
    }
    return out;
}

}  // namespace spcdiar
