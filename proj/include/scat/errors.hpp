#pragma once

#include <stdexcept>
#include <string>

namespace scat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularOnPath : Error { using Error::Error; };
struct AmbiguousBranch : Error { using Error::Error; };
struct DegenerateMatrix : Error { using Error::Error; };
struct DegreeCapExceeded : Error { using Error::Error; };
struct NonPositiveRadius : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct NotOrthogonal : Error { using Error::Error; };
struct TrappedTrajectory : Error { using Error::Error; };
struct CausticError : Error { using Error::Error; };
struct OffShell : Error { using Error::Error; };
struct UnsupportedOrder : Error { using Error::Error; };
struct Multimodal : Error { using Error::Error; };
struct BoxTooSmall : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace scat
