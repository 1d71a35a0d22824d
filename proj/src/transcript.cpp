#include "spcdiar/transcript.hpp"

#include <cctype>
#include <sstream>

#include "spcdiar/errors.hpp"

namespace spcdiar {

namespace {

bool is_marker(const std::string& tok) {
    return tok.size() >= 4 && tok.starts_with("<|") && tok.ends_with("|>");
}

// "speaker<digits>" -> index, anything else -> 0.
int parse_index(const std::string& body) {
    if (!body.starts_with("speaker") || body.size() == 7) return 0;
    int idx = 0;
    for (std::size_t i = 7; i < body.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(body[i]))) return 0;
        idx = idx * 10 + (body[i] - '0');
        if (idx > 1000000) throw MalformedTranscript("speaker index out of range: " + body);
    }
    if (idx < 1) throw MalformedTranscript("speaker index must be >= 1: " + body);
    return idx;
}

}  // namespace

std::string render_transcript(const SpeakerAttributedTranscript& t) {
    std::ostringstream out;
    bool first = true;
    for (const Segment& seg : t.segments()) {
        if (!first) out << ' ';
        first = false;
        out << "<|" << seg.speaker.key() << "|>";
        for (std::size_t i = seg.first; i < seg.first + seg.count; ++i) {
            out << ' ' << t.words()[i].text;
        }
    }
    return out.str();
}

SpeakerAttributedTranscript parse_transcript(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(std::move(tok));
    if (tokens.empty()) return {};

    // First pass: number named markers after the largest explicit index.
    int max_explicit = 0;
    for (const std::string& tok : tokens) {
        if (!is_marker(tok)) {
            if (tok.starts_with("<|") || tok.ends_with("|>"))
                throw MalformedTranscript("malformed marker token: " + tok);
            continue;
        }
        const std::string body = tok.substr(2, tok.size() - 4);
        if (body.empty()) throw MalformedTranscript("empty speaker marker");
        max_explicit = std::max(max_explicit, parse_index(body));
    }

    std::unordered_map<std::string, int> named_index;
    std::vector<TimedWord> words;
    SpeakerLabel current;
    for (const std::string& tok : tokens) {
        if (is_marker(tok)) {
            const std::string body = tok.substr(2, tok.size() - 4);
            if (const int idx = parse_index(body); idx > 0) {
                current = SpeakerLabel{idx, ""};
            } else {
                auto [it, inserted] = named_index.try_emplace(body, max_explicit + 1);
                if (inserted) ++max_explicit;
                current = SpeakerLabel{it->second, body};
            }
        } else {
            if (current.index == 0) throw MalformedTranscript("text before first speaker marker");
            words.push_back(TimedWord{tok, -1.0, -1.0, current, false});
        }
    }
    return SpeakerAttributedTranscript(std::move(words));
}

SpeakerAttributedTranscript relabel(const SpeakerAttributedTranscript& t,
                                    const std::unordered_map<int, SpeakerLabel>& map) {
    std::vector<TimedWord> words = t.words();
    for (TimedWord& w : words) {
        const auto it = map.find(w.speaker.index);
        if (it == map.end())
            throw MissingMapping("no mapping for speaker index " + std::to_string(w.speaker.index));
        w.speaker = it->second;
    }
    return SpeakerAttributedTranscript(std::move(words));
}

}  // namespace spcdiar
