#pragma once

#include <stdexcept>
#include <string>

namespace gazenote {

/// Base for all recoverable toolkit errors. The subclass identifies the
/// failure mode; the message carries context (file, line, reason).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// session / file I/O
struct MissingFile : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& reason)
        : Error(file + ":" + std::to_string(line) + ": " + reason), line_(line) {}
    explicit ParseError(const std::string& reason) : Error(reason), line_(0) {}
    std::size_t line() const { return line_; }
private:
    std::size_t line_;
};

// geometry / layout
struct UnknownPage : Error { using Error::Error; };
struct NoPassagesOnPage : Error { using Error::Error; };
struct EmptyImage : Error { using Error::Error; };
struct EmptyLayout : Error { using Error::Error; };
struct LayoutTooSmall : Error { using Error::Error; };
struct NoVisiblePassages : Error { using Error::Error; };

// audio
struct EmptyAudio : Error { using Error::Error; };

// model training / persistence
struct EmptyData : Error { using Error::Error; };
struct SingleClassData : Error { using Error::Error; };
struct VersionMismatch : Error { using Error::Error; };
struct CorruptModel : Error { using Error::Error; };

// evaluation
struct LengthMismatch : Error { using Error::Error; };
struct SingleClass : Error { using Error::Error; };
struct TooFewNotes : Error { using Error::Error; };
struct TooFewParticipants : Error { using Error::Error; };
struct UnknownTag : Error { using Error::Error; };

// configuration
struct ConfigError : Error { using Error::Error; };

} // namespace gazenote
