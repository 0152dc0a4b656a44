#include "gbid/error.hpp"

namespace gbid {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::SeriesTooShort: return "SeriesTooShort";
        case Errc::SplitTooSmall: return "SplitTooSmall";
        case Errc::RankDeficient: return "RankDeficient";
        case Errc::Diverged: return "Diverged";
        case Errc::DegenerateStaticGain: return "DegenerateStaticGain";
        case Errc::ArchiveTooSmall: return "ArchiveTooSmall";
        case Errc::Io: return "Io";
        case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace gbid
