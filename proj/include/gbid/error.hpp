#pragma once

#include <stdexcept>
#include <string>

namespace gbid {

/// Specific failure conditions raised by the library.
enum class Errc {
    InvalidArgument,
    InvalidConfig,
    SeriesTooShort,
    SplitTooSmall,
    RankDeficient,
    Diverged,
    DegenerateStaticGain,
    ArchiveTooSmall,
    Io,
    Parse,
};

/// Coarse class of an error; drives CLI exit codes (config 2, data 3, numerical 4).
enum class ErrorKind { Config = 2, Data = 3, Numerical = 4 };

constexpr ErrorKind kind_of(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument:
        case Errc::InvalidConfig:
            return ErrorKind::Config;
        case Errc::SeriesTooShort:
        case Errc::SplitTooSmall:
        case Errc::Io:
        case Errc::Parse:
            return ErrorKind::Data;
        case Errc::RankDeficient:
        case Errc::Diverged:
        case Errc::DegenerateStaticGain:
        case Errc::ArchiveTooSmall:
            return ErrorKind::Numerical;
    }
    return ErrorKind::Config;
}

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_of(code_); }

private:
    Errc code_;
};

}  // namespace gbid
