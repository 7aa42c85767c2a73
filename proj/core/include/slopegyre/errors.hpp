#ifndef SLOPEGYRE_ERRORS_HPP
#define SLOPEGYRE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace slopegyre {

// Base class for all solver errors. `kind()` returns a stable machine-readable
// name; the what() string carries the detail.
class SolverError : public std::runtime_error {
public:
    SolverError(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }
private:
    std::string kind_;
};

#define SLOPEGYRE_DEFINE_ERROR(Name)                                  \
    class Name : public SolverError {                                 \
    public:                                                           \
        explicit Name(const std::string& msg)                         \
            : SolverError(#Name, msg) {}                              \
    }

SLOPEGYRE_DEFINE_ERROR(RegimeViolation);
SLOPEGYRE_DEFINE_ERROR(RegimeError);
SLOPEGYRE_DEFINE_ERROR(H4Violation);
SLOPEGYRE_DEFINE_ERROR(TailTooLarge);
SLOPEGYRE_DEFINE_ERROR(PureImaginaryRoot);
SLOPEGYRE_DEFINE_ERROR(SignSplitViolation);
SLOPEGYRE_DEFINE_ERROR(IllConditioned);
SLOPEGYRE_DEFINE_ERROR(GammaTooLarge);
SLOPEGYRE_DEFINE_ERROR(SingularTraceSystem);
SLOPEGYRE_DEFINE_ERROR(VerticalTraceNonzero);
SLOPEGYRE_DEFINE_ERROR(HypothesisViolated);
SLOPEGYRE_DEFINE_ERROR(DegenerateTilt);
SLOPEGYRE_DEFINE_ERROR(MatchFailure);
SLOPEGYRE_DEFINE_ERROR(NullspaceFailure);
SLOPEGYRE_DEFINE_ERROR(InconsistentRegime);
SLOPEGYRE_DEFINE_ERROR(DepthExhausted);
SLOPEGYRE_DEFINE_ERROR(MissingRun);
SLOPEGYRE_DEFINE_ERROR(ConfigError);

#undef SLOPEGYRE_DEFINE_ERROR

} // namespace slopegyre

#endif
