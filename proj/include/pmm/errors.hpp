#pragma once
// Every failure mode the library reports deliberately gets its own type, so
// callers and tests can match on identity instead of parsing messages.

#include <stdexcept>
#include <string>

namespace pmm {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// field / polynomial layer
struct NonPrimeModulus : Error { using Error::Error; };
struct DuplicateEvaluationPoint : Error { using Error::Error; };
struct UncorrectableErrors : Error { using Error::Error; };

// matrix layer
struct DimensionMismatch : Error { using Error::Error; };
struct IndivisibleDimensions : Error { using Error::Error; };

// storage layer
struct InsufficientShards : Error { using Error::Error; };
struct CorruptManifest : Error { using Error::Error; };
struct ModulusMismatch : Error { using Error::Error; };

// strategy layer
struct NotAchievable : Error { using Error::Error; };
struct NoFeasiblePlan : Error { using Error::Error; };

// protocol layer
struct ShapeMismatch : Error { using Error::Error; };
struct InsufficientResponses : Error { using Error::Error; };

// cost model
struct FactorizationInvalid : Error { using Error::Error; };

// audit
struct EnumerationTooLarge : Error { using Error::Error; };

// wire / transport
struct MalformedFrame : Error { using Error::Error; };
struct UnknownTag : Error { using Error::Error; };
struct TransportError : Error { using Error::Error; };

// configuration
struct ConfigError : Error { using Error::Error; };

}  // namespace pmm
