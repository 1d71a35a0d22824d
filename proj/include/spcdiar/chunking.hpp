#ifndef SPCDIAR_CHUNKING_HPP
#define SPCDIAR_CHUNKING_HPP

#include "spcdiar/types.hpp"

namespace spcdiar {

// Contiguous audio region handed to the recognizer. Chunks are emitted in
// temporal order, never overlap, and are indexed from 0.
struct Chunk {
    int index = 0;
    TimeSpan span;
};

struct VadParams {
    double energy_threshold = 0.5;
    double min_silence = 0.2;  // seconds of quiet to close a region
    double min_speech = 0.1;   // seconds of energy to open a region
    double max_chunk_len = 10.0;
};

// One sentence of the reference: an activity interval with its speaker.
struct Sentence {
    int speaker_index = 0;
    TimeSpan span;
};

// Reference sentences (activity intervals) sorted by start time.
std::vector<Sentence> sentences_of(const Conversation& conv);

// Greedy packing of consecutive sentences into chunks of span <= max_chunk_len.
// Sentences connected by overlap stay in the same chunk. Throws SentenceTooLong
// when a sentence (or overlap-connected group) alone exceeds max_chunk_len.
std::vector<Chunk> oracle_chunks(const Conversation& conv, double max_chunk_len);

// Energy-based chunking: threshold with hysteresis yields speech regions;
// regions longer than max_chunk_len are split at their minimum-energy frame
// (ties -> earliest); adjacent regions are then packed into chunks up to
// max_chunk_len.
std::vector<Chunk> vad_chunks(const Conversation& conv, const VadParams& p = {});

// Drops the untranscribed head and tail: shifts the timeline so the first
// reference word starts near t=0 and cuts energy frames outside
// [first word start, last word end]. Applied before chunking.
Conversation trim_to_reference(const Conversation& conv);

// Debug export, one `index,start,end` line per chunk.
std::string chunks_to_csv(const std::vector<Chunk>& chunks);

}  // namespace spcdiar

#endif
