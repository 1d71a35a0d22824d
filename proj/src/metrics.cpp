#include "spcdiar/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "spcdiar/errors.hpp"

namespace spcdiar {

std::string normalize_token(const std::string& token) {
    std::string out;
    out.reserve(token.size());
    for (const char c : token) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
    }
    return out;
}

namespace {

struct NormalizedWords {
    std::vector<std::string> tokens;  // normalized, empties dropped
    std::vector<int> source_index;    // position in the original list
};

NormalizedWords normalize_list(const std::vector<std::string>& words) {
    NormalizedWords out;
    out.tokens.reserve(words.size());
    out.source_index.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::string t = normalize_token(words[i]);
        if (t.empty()) continue;
        out.tokens.push_back(std::move(t));
        out.source_index.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<std::string> texts_of(const std::vector<TimedWord>& words) {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const TimedWord& w : words) out.push_back(w.text);
    return out;
}

long long edit_distance_normalized(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<long long> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<long long>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<long long>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const long long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

// Per-speaker word streams keyed by label key; ref in time order, hyp in output
// order (the transcript word order is already the right one for each side).
std::map<std::string, std::vector<std::string>> speaker_streams(
    const SpeakerAttributedTranscript& t) {
    std::map<std::string, std::vector<std::string>> out;
    for (const TimedWord& w : t.words()) {
        std::string norm = normalize_token(w.text);
        if (norm.empty()) continue;
        out[w.speaker.key()].push_back(std::move(norm));
    }
    return out;
}

}  // namespace

std::vector<AlignmentOp> align_words(const std::vector<std::string>& ref,
                                     const std::vector<std::string>& hyp) {
    const NormalizedWords r = normalize_list(ref);
    const NormalizedWords h = normalize_list(hyp);
    const std::size_t n = r.tokens.size(), m = h.tokens.size();

    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = d[i - 1][j - 1] + (r.tokens[i - 1] == h.tokens[j - 1] ? 0 : 1);
            d[i][j] = std::min({sub, d[i - 1][j] + 1, d[i][j - 1] + 1});
        }
    }

    // Backtrace, preferring match > substitute > delete > insert.
    std::vector<AlignmentOp> ops;
    std::size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && r.tokens[i - 1] == h.tokens[j - 1] && d[i][j] == d[i - 1][j - 1]) {
            ops.push_back({AlignKind::kMatch, r.source_index[i - 1], h.source_index[j - 1]});
            --i, --j;
        } else if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1) {
            ops.push_back({AlignKind::kSubstitute, r.source_index[i - 1], h.source_index[j - 1]});
            --i, --j;
        } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
            ops.push_back({AlignKind::kDelete, r.source_index[i - 1], -1});
            --i;
        } else {
            ops.push_back({AlignKind::kInsert, -1, h.source_index[j - 1]});
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());
    return ops;
}

long long word_edit_distance(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
    return edit_distance_normalized(normalize_list(ref).tokens, normalize_list(hyp).tokens);
}

std::vector<int> min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
    // Hungarian algorithm with potentials, O(n^3).
    const int n = static_cast<int>(cost.size());
    if (n == 0) return {};
    const long long kInf = std::numeric_limits<long long>::max() / 4;

    std::vector<long long> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<long long> minv(n + 1, kInf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            long long delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

CpwerResult cpwer(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp) {
    const auto ref_streams = speaker_streams(ref);
    const auto hyp_streams = speaker_streams(hyp);

    long long ref_words = 0;
    for (const auto& [key, stream] : ref_streams) ref_words += static_cast<long long>(stream.size());
    if (ref_words == 0) throw EmptyReference("reference has no scorable words");

    std::vector<const std::pair<const std::string, std::vector<std::string>>*> rs, hs;
    for (const auto& kv : ref_streams) rs.push_back(&kv);
    for (const auto& kv : hyp_streams) hs.push_back(&kv);

    // Square matrix padded with empty streams; an unpaired stream costs its length.
    const int n = static_cast<int>(std::max(rs.size(), hs.size()));
    const std::vector<std::string> empty_stream;
    std::vector<std::vector<long long>> cost(n, std::vector<long long>(n, 0));
    for (int i = 0; i < n; ++i) {
        const auto& a = i < static_cast<int>(rs.size()) ? rs[i]->second : empty_stream;
        for (int j = 0; j < n; ++j) {
            const auto& b = j < static_cast<int>(hs.size()) ? hs[j]->second : empty_stream;
            cost[i][j] = edit_distance_normalized(a, b);
        }
    }

    const std::vector<int> match = min_cost_assignment(cost);

    CpwerResult out;
    out.ref_words = ref_words;
    for (int i = 0; i < n; ++i) {
        const int j = match.empty() ? -1 : match[i];
        const long long e = j >= 0 ? cost[i][j] : 0;
        out.total_errors += e;
        if (i < static_cast<int>(rs.size())) {
            out.per_ref_speaker_errors[rs[i]->first] = e;
            if (j >= 0 && j < static_cast<int>(hs.size())) out.assignment[hs[j]->first] = rs[i]->first;
        }
    }
    out.rate = static_cast<double>(out.total_errors) / static_cast<double>(ref_words);
    return out;
}

double wder(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp) {
    const std::vector<AlignmentOp> ops = align_words(texts_of(ref.words()), texts_of(hyp.words()));

    long long pairs = 0;
    std::vector<const AlignmentOp*> aligned;
    for (const AlignmentOp& op : ops) {
        if (op.kind == AlignKind::kMatch || op.kind == AlignKind::kSubstitute) {
            ++pairs;
            aligned.push_back(&op);
        }
    }
    if (pairs == 0) return 0.0;

    const CpwerResult cp = cpwer(ref, hyp);
    long long wrong = 0;
    for (const AlignmentOp* op : aligned) {
        const std::string rk = ref.words()[static_cast<std::size_t>(op->ref_index)].speaker.key();
        const std::string hk = hyp.words()[static_cast<std::size_t>(op->hyp_index)].speaker.key();
        const auto it = cp.assignment.find(hk);
        if (it == cp.assignment.end() || it->second != rk) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(pairs);
}

double sawer(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp) {
    const auto ref_streams = speaker_streams(ref);
    const auto hyp_streams = speaker_streams(hyp);

    long long ref_words = 0;
    for (const auto& [key, stream] : ref_streams) ref_words += static_cast<long long>(stream.size());
    if (ref_words == 0) throw EmptyReference("reference has no scorable words");

    const std::vector<std::string> empty_stream;
    long long errors = 0;
    for (const auto& [key, stream] : ref_streams) {
        const auto it = hyp_streams.find(key);
        errors += edit_distance_normalized(stream, it == hyp_streams.end() ? empty_stream : it->second);
    }
    for (const auto& [key, stream] : hyp_streams) {
        if (!ref_streams.contains(key)) errors += static_cast<long long>(stream.size());
    }
    return static_cast<double>(errors) / static_cast<double>(ref_words);
}

ScoreReport score(const SpeakerAttributedTranscript& ref, const SpeakerAttributedTranscript& hyp) {
    ScoreReport r;
    const CpwerResult cp = cpwer(ref, hyp);
    r.cpwer = cp.rate;
    r.wder = wder(ref, hyp);
    r.sawer = sawer(ref, hyp);
    r.delta = r.sawer - r.cpwer;
    r.ref_words = cp.ref_words;
    r.ref_speakers = static_cast<int>(ref.speaker_keys().size());
    r.hyp_speakers = static_cast<int>(hyp.speaker_keys().size());
    r.assignment = cp.assignment;
    r.per_ref_speaker_errors = cp.per_ref_speaker_errors;
    return r;
}

SpeakerCountAccuracy speaker_count_accuracy(
    const std::vector<std::pair<SpeakerAttributedTranscript, SpeakerAttributedTranscript>>& pairs) {
    SpeakerCountAccuracy out;
    int correct_total = 0;
    for (const auto& [ref, hyp] : pairs) {
        const int true_count = static_cast<int>(ref.speaker_keys().size());
        const int hyp_count = static_cast<int>(hyp.speaker_keys().size());
        auto& [correct, total] = out.by_true_count[true_count];
        ++total;
        if (true_count == hyp_count) {
            ++correct;
            ++correct_total;
        }
    }
    if (!pairs.empty()) out.average = static_cast<double>(correct_total) / pairs.size();
    return out;
}

}  // namespace spcdiar
