#pragma once

#include <stdexcept>
#include <string>

namespace questd {

/// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Stable machine-readable name, e.g. "MalformedReport".
    virtual const char* kind() const noexcept = 0;
};

#define QUESTD_DEFINE_ERROR(Name)                                     \
    class Name : public Error {                                       \
    public:                                                           \
        using Error::Error;                                           \
        const char* kind() const noexcept override { return #Name; }  \
    }

QUESTD_DEFINE_ERROR(MalformedReport);
QUESTD_DEFINE_ERROR(InvalidEvent);
QUESTD_DEFINE_ERROR(OutOfOrderEvent);
QUESTD_DEFINE_ERROR(SnapshotMismatch);
QUESTD_DEFINE_ERROR(CorruptState);
QUESTD_DEFINE_ERROR(NotConfirmed);
QUESTD_DEFINE_ERROR(WatchUnavailable);
QUESTD_DEFINE_ERROR(PortInUse);
QUESTD_DEFINE_ERROR(StateLocked);
QUESTD_DEFINE_ERROR(ConfigError);

// stats
QUESTD_DEFINE_ERROR(EmptySample);
QUESTD_DEFINE_ERROR(SampleTooLarge);
QUESTD_DEFINE_ERROR(InvalidTable);
QUESTD_DEFINE_ERROR(ZeroVariance);
QUESTD_DEFINE_ERROR(TooFewValues);
QUESTD_DEFINE_ERROR(LengthMismatch);

#undef QUESTD_DEFINE_ERROR

}  // namespace questd
