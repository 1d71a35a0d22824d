#ifndef SPCDIAR_ERRORS_HPP
#define SPCDIAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spcdiar {

// Base for everything this library throws on contract violations.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedTranscript : Error {
    using Error::Error;
};

struct MissingMapping : Error {
    using Error::Error;
};

struct InfeasibleSpec : Error {
    using Error::Error;
};

struct EmptySpan : Error {
    using Error::Error;
};

struct SentenceTooLong : Error {
    using Error::Error;
};

struct ProfileTooLong : Error {
    using Error::Error;
};

struct EmptyProfileText : Error {
    using Error::Error;
};

struct EmptyReference : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Recognizer failure surfaced by the streaming loop; carries the chunk it happened in.
struct RecognizerError : Error {
    RecognizerError(int chunk_index, const std::string& what)
        : Error("chunk " + std::to_string(chunk_index) + ": " + what), chunk_index(chunk_index) {}
    int chunk_index;
};

}  // namespace spcdiar

#endif
