#ifndef SPCDIAR_IO_HPP
#define SPCDIAR_IO_HPP

#include "spcdiar/spc.hpp"
#include "spcdiar/types.hpp"

namespace spcdiar {

// Timed reference: one record per line with fields
// (text, start, end, speaker, overlapped); times in seconds, millisecond
// precision or better.
std::string write_timed_reference(const Conversation& conv);
void save_timed_reference(const Conversation& conv, const std::string& path);

// Rebuilds a conversation from a timed reference: activity intervals from
// merged word spans, flat energy from activity. Good enough to chunk and score
// against; the original energy noise is not preserved.
Conversation load_timed_reference(const std::string& path);

// Transcript interchange: one conversation per line in marker form.
void save_transcript_lines(const std::vector<SpeakerAttributedTranscript>& transcripts,
                           const std::string& path);
std::vector<SpeakerAttributedTranscript> load_transcript_lines(const std::string& path);

// Profile clips: one record per line with fields (start, end, text, name).
std::vector<ProfileClip> load_profile_clips(const std::string& path,
                                            const std::string& conversation_id = {});

}  // namespace spcdiar

#endif
