#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "spcdiar/errors.hpp"
#include "spcdiar/metrics.hpp"
#include "spcdiar/transcript.hpp"

#include "helpers.hpp"
#include "oracles.hpp"

using namespace spcdiar;

namespace {

long long op_cost(const std::vector<AlignmentOp>& ops) {
    long long cost = 0;
    for (const AlignmentOp& op : ops) {
        if (op.kind != AlignKind::kMatch) ++cost;
    }
    return cost;
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, int max_len) {
    const auto& vocab = helpers::small_vocab();
    std::vector<std::string> out;
    const int n = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
    for (int i = 0; i < n; ++i) out.push_back(vocab[rng() % vocab.size()]);
    return out;
}

// Random permutation of the speaker indices present in t.
std::unordered_map<int, SpeakerLabel> random_permutation(std::mt19937_64& rng,
                                                         const SpeakerAttributedTranscript& t) {
    std::vector<int> indices;
    for (const TimedWord& w : t.words()) {
        if (std::find(indices.begin(), indices.end(), w.speaker.index) == indices.end()) {
            indices.push_back(w.speaker.index);
        }
    }
    std::vector<int> targets = indices;
    std::shuffle(targets.begin(), targets.end(), rng);
    std::unordered_map<int, SpeakerLabel> map;
    for (std::size_t i = 0; i < indices.size(); ++i) map[indices[i]] = SpeakerLabel{targets[i], ""};
    return map;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("align_words basics") {
    const auto same = align_words({"a", "b", "c", "d", "e"}, {"a", "b", "c", "d", "e"});
    REQUIRE(same.size() == 5);
    for (const auto& op : same) CHECK(op.kind == AlignKind::kMatch);

    const auto del = align_words({"a", "b", "c"}, {"a", "c"});
    REQUIRE(del.size() == 3);
    CHECK(del[0].kind == AlignKind::kMatch);
    CHECK(del[1].kind == AlignKind::kDelete);
    CHECK(del[1].ref_index == 1);
    CHECK(del[2].kind == AlignKind::kMatch);
}

TEST_CASE("alignment strips punctuation and case") {
    const auto ops = align_words({"Hello.", "there!"}, {"hello", "THERE"});
    REQUIRE(ops.size() == 2);
    CHECK(ops[0].kind == AlignKind::kMatch);
    CHECK(ops[1].kind == AlignKind::kMatch);

    // A token that strips to nothing is dropped from scoring entirely.
    CHECK(word_edit_distance({"a", "?!", "b"}, {"a", "b"}) == 0);
}

TEST_CASE("alignment cost equals the naive DP oracle on random pairs") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        const auto ref = random_tokens(rng, 30);
        const auto hyp = random_tokens(rng, 30);
        const long long expected = oracles::edit_distance(ref, hyp);
        CHECK(op_cost(align_words(ref, hyp)) == expected);
        CHECK(word_edit_distance(ref, hyp) == expected);
    }
}

TEST_CASE("alignment op indices are consistent") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto ref = random_tokens(rng, 20);
        const auto hyp = random_tokens(rng, 20);
        for (const AlignmentOp& op : align_words(ref, hyp)) {
            switch (op.kind) {
                case AlignKind::kMatch:
                case AlignKind::kSubstitute:
                    CHECK(op.ref_index >= 0);
                    CHECK(op.hyp_index >= 0);
                    break;
                case AlignKind::kDelete:
                    CHECK(op.ref_index >= 0);
                    CHECK(op.hyp_index == -1);
                    break;
                case AlignKind::kInsert:
                    CHECK(op.ref_index == -1);
                    CHECK(op.hyp_index >= 0);
                    break;
            }
        }
    }
}

TEST_CASE("hungarian assignment equals exhaustive minimum") {
    std::mt19937_64 rng(99);
    for (int n = 1; n <= 6; ++n) {
        for (int rep = 0; rep < 40; ++rep) {
            std::vector<std::vector<long long>> cost(n, std::vector<long long>(n));
            for (auto& row : cost) {
                for (auto& c : row) c = static_cast<long long>(rng() % 50);
            }
            const auto match = min_cost_assignment(cost);
            long long got = 0;
            for (int i = 0; i < n; ++i) got += cost[i][match[i]];

            std::vector<int> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            long long best = -1;
            do {
                long long total = 0;
                for (int i = 0; i < n; ++i) total += cost[i][perm[i]];
                if (best < 0 || total < best) best = total;
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(got == best);
        }
    }
}

TEST_CASE("cpwer basics") {
    const auto ref = helpers::transcript({{1, "a b c"}, {2, "d e"}});
    CHECK(cpwer(ref, ref).rate == 0.0);
    CHECK(cpwer(ref, ref).assignment.at("speaker1") == "speaker1");

    const std::unordered_map<int, SpeakerLabel> swap = {{1, {2, ""}}, {2, {1, ""}}};
    const auto res = cpwer(ref, relabel(ref, swap));
    CHECK(res.rate == 0.0);
    CHECK(res.assignment.at("speaker2") == "speaker1");
    CHECK(res.assignment.at("speaker1") == "speaker2");

    CHECK_THROWS_AS(cpwer(SpeakerAttributedTranscript{}, ref), EmptyReference);
}

TEST_CASE("cpwer equals factorial brute force on random pairs") {
    std::mt19937_64 rng(31337);
    for (int k = 2; k <= 6; ++k) {
        for (int rep = 0; rep < 50; ++rep) {
            SpeakerAttributedTranscript ref;
            do {
                ref = helpers::random_transcript(rng, k, 40);
            } while (ref.words().empty());
            const auto hyp = helpers::mutate(rng, ref, k + 1);
            // Same integer division on both sides, so equality is exact.
            CHECK(cpwer(ref, hyp).rate == oracles::brute_force_cpwer(ref, hyp));
        }
    }
}

TEST_CASE("wder basics") {
    const auto ref = helpers::transcript({{1, "a b c"}, {2, "d e"}});
    CHECK(wder(ref, ref) == 0.0);

    const std::unordered_map<int, SpeakerLabel> swap = {{1, {2, ""}}, {2, {1, ""}}};
    CHECK(wder(ref, relabel(ref, swap)) == 0.0);
}

TEST_CASE("wder counts misattributed aligned words") {
    // 10 words speaker1 + 10 words speaker2; the hyp flips 2 of speaker2's
    // words to speaker1 -> 2/20.
    const auto ref = helpers::transcript({{1, "a b c d e f g h i j"},
                                          {2, "k l m n o p q r s t"}});
    const auto hyp = helpers::transcript({{1, "a b c d e f g h i j k l"},
                                          {2, "m n o p q r s t"}});
    CHECK(wder(ref, hyp) == doctest::Approx(0.10).epsilon(1e-12));
}

TEST_CASE("sawer basics and relation to cpwer") {
    const auto ref = helpers::transcript({{1, "a b c"}, {2, "d e"}});
    CHECK(sawer(ref, ref) == 0.0);

    // Disjoint vocabularies, labels swapped: cpWER resolves the permutation,
    // SA-WER pays for both streams.
    const std::unordered_map<int, SpeakerLabel> swap = {{1, {2, ""}}, {2, {1, ""}}};
    const auto swapped = relabel(ref, swap);
    CHECK(cpwer(ref, swapped).rate == 0.0);
    CHECK(sawer(ref, swapped) > 0.0);
}

TEST_CASE("sawer matches display names when present") {
    auto ref_words = helpers::transcript({{1, "a b"}}).words();
    for (auto& w : ref_words) w.speaker.display_name = "mike";
    const SpeakerAttributedTranscript ref{ref_words};

    // Hyp uses a different index but the same name: streams pair up.
    auto hyp_words = helpers::transcript({{7, "a b"}}).words();
    for (auto& w : hyp_words) w.speaker.display_name = "mike";
    CHECK(sawer(ref, SpeakerAttributedTranscript{hyp_words}) == 0.0);
}

TEST_CASE("metric axioms on random transcripts") {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 200; ++i) {
        SpeakerAttributedTranscript ref;
        do {
            ref = helpers::random_transcript(rng);
        } while (ref.words().empty());
        const auto hyp = helpers::mutate(rng, ref);

        const double base = cpwer(ref, hyp).rate;
        CHECK(cpwer(ref, relabel(hyp, random_permutation(rng, hyp))).rate == base);
        CHECK(sawer(ref, hyp) >= base);

        const auto self = score(ref, ref);
        CHECK(self.wder == 0.0);
        CHECK(self.cpwer == 0.0);
        CHECK(self.sawer == 0.0);
        CHECK(self.delta == 0.0);
    }
}

TEST_CASE("score report fields are consistent") {
    const auto ref = helpers::transcript({{1, "a b c"}, {2, "d e"}});
    const auto hyp = helpers::transcript({{1, "a b"}, {3, "d e x"}});
    const auto r = score(ref, hyp);
    CHECK(r.delta == doctest::Approx(r.sawer - r.cpwer).epsilon(1e-15));
    CHECK(r.ref_words == 5);
    CHECK(r.ref_speakers == 2);
    CHECK(r.hyp_speakers == 2);
}

TEST_CASE("speaker count accuracy") {
    const auto two = helpers::transcript({{1, "a"}, {2, "b"}});
    const auto merged = helpers::transcript({{1, "a b"}});

    const auto all_right = speaker_count_accuracy({{two, two}, {merged, merged}});
    CHECK(all_right.average == 1.0);
    CHECK(all_right.bucket_accuracy(2) == 1.0);
    CHECK(all_right.bucket_accuracy(1) == 1.0);

    const auto bad = speaker_count_accuracy({{two, merged}});
    CHECK(bad.bucket_accuracy(2) == 0.0);

    // 10 pairs, 7 with the right count.
    std::vector<std::pair<SpeakerAttributedTranscript, SpeakerAttributedTranscript>> pairs;
    for (int i = 0; i < 7; ++i) pairs.emplace_back(two, two);
    for (int i = 0; i < 3; ++i) pairs.emplace_back(two, merged);
    CHECK(speaker_count_accuracy(pairs).average == doctest::Approx(0.7).epsilon(1e-12));
}

}  // TEST_SUITE
