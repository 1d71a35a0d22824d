#ifndef SPCDIAR_TRANSCRIPT_HPP
#define SPCDIAR_TRANSCRIPT_HPP

#include <unordered_map>

#include "spcdiar/types.hpp"

namespace spcdiar {

// Serialized speaker-attributed form: `<|speaker1|> hello there <|speaker2|> hi`.
// A speaker change inserts a marker; words are single-space separated. Labels
// with a display name render as `<|name|>` instead of `<|speakerK|>`.

std::string render_transcript(const SpeakerAttributedTranscript& t);

// Inverse of render for strings in its image. Indexed markers keep their index;
// named markers are numbered after the largest explicit index, in order of first
// appearance. Parsed words carry no timings. Throws MalformedTranscript on text
// before the first marker, empty markers, or markers that fail to parse.
SpeakerAttributedTranscript parse_transcript(const std::string& line);

// Applies `map` (old speaker index -> new label) to every word. Throws
// MissingMapping when a word's speaker index has no entry. Non-injective maps
// are allowed and merge segments.
SpeakerAttributedTranscript relabel(const SpeakerAttributedTranscript& t,
                                    const std::unordered_map<int, SpeakerLabel>& map);

}  // namespace spcdiar

#endif
