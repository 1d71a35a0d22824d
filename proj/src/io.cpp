#include "spcdiar/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spcdiar/errors.hpp"
#include "spcdiar/transcript.hpp"

namespace spcdiar {

namespace {

using nlohmann::ordered_json;

double round_ms(double t) {
    return std::round(t * 1000.0) / 1000.0;
}

int speaker_index_from_field(const std::string& field) {
    // "speaker3" or a bare number.
    if (field.starts_with("speaker")) return std::stoi(field.substr(7));
    return std::stoi(field);
}

}  // namespace

std::string write_timed_reference(const Conversation& conv) {
    std::ostringstream out;
    for (const TimedWord& w : conv.reference.words()) {
        ordered_json rec;
        rec["text"] = w.text;
        rec["start"] = round_ms(w.start);
        rec["end"] = round_ms(w.end);
        rec["speaker"] = w.speaker.key();
        rec["overlapped"] = w.overlapped;
        out << rec.dump() << '\n';
    }
    return out.str();
}

void save_timed_reference(const Conversation& conv, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << write_timed_reference(conv);
}

Conversation load_timed_reference(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);

    std::vector<TimedWord> words;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json rec;
        try {
            rec = ordered_json::parse(line);
            TimedWord w;
            w.text = rec.at("text").get<std::string>();
            w.start = rec.at("start").get<double>();
            w.end = rec.at("end").get<double>();
            w.speaker = SpeakerLabel{speaker_index_from_field(rec.at("speaker").get<std::string>()), ""};
            w.overlapped = rec.value("overlapped", false);
            words.push_back(std::move(w));
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }

    Conversation conv;
    conv.id = path;
    conv.reference = SpeakerAttributedTranscript(std::move(words));

    int max_speaker = 0;
    for (const TimedWord& w : conv.reference.words()) {
        max_speaker = std::max(max_speaker, w.speaker.index);
    }
    conv.activity.resize(static_cast<std::size_t>(max_speaker));

    // Words tile their sentences, so merging near-adjacent spans per speaker
    // recovers the sentence intervals.
    constexpr double kMergeGap = 0.02;
    for (const TimedWord& w : conv.reference.words()) {
        auto& ivs = conv.activity[static_cast<std::size_t>(w.speaker.index - 1)];
        if (!ivs.empty() && w.start - ivs.back().end <= kMergeGap && w.start >= ivs.back().start) {
            ivs.back().end = std::max(ivs.back().end, w.end);
        } else {
            ivs.push_back({w.start, w.end});
        }
    }

    double last = 0.0;
    for (const TimedWord& w : conv.reference.words()) last = std::max(last, w.end);
    conv.duration = std::ceil(last / Conversation::kFrameLen) * Conversation::kFrameLen;
    const auto frames = static_cast<std::size_t>(std::ceil(conv.duration / Conversation::kFrameLen));
    conv.energy.assign(frames, 0.02);
    for (std::size_t fi = 0; fi < frames; ++fi) {
        const double mid = (static_cast<double>(fi) + 0.5) * Conversation::kFrameLen;
        int active = 0;
        for (int s = 1; s <= conv.n_speakers(); ++s) {
            if (conv.speaker_active_at(s, mid)) ++active;
        }
        conv.energy[fi] += active;
    }
    return conv;
}

void save_transcript_lines(const std::vector<SpeakerAttributedTranscript>& transcripts,
                           const std::string& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    for (const auto& t : transcripts) f << render_transcript(t) << '\n';
}

std::vector<SpeakerAttributedTranscript> load_transcript_lines(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    std::vector<SpeakerAttributedTranscript> out;
    std::string line;
    while (std::getline(f, line)) out.push_back(parse_transcript(line));
    return out;
}

std::vector<ProfileClip> load_profile_clips(const std::string& path,
                                            const std::string& conversation_id) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    std::vector<ProfileClip> clips;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const ordered_json rec = ordered_json::parse(line);
            ProfileClip clip;
            clip.audio = {conversation_id,
                          {rec.at("start").get<double>(), rec.at("end").get<double>()}};
            clip.text = rec.at("text").get<std::string>();
            clip.display_name = rec.value("name", "");
            clips.push_back(std::move(clip));
        } catch (const std::exception& e) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return clips;
}

}  // namespace spcdiar
