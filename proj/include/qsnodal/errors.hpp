#pragma once

#include <stdexcept>
#include <string>

namespace qsnodal {

// Base class for all library failures.  Every error carries a stable
// machine-readable name (used in run records and tests) plus a human message.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define QSNODAL_DEFINE_ERROR(Type)                                     \
    class Type : public Error {                                        \
    public:                                                            \
        explicit Type(const std::string& what) : Error(#Type, what) {} \
    }

// Transform / numerics
QSNODAL_DEFINE_ERROR(NonConvergence);

// Grid construction and field operations
QSNODAL_DEFINE_ERROR(BadDimension);
QSNODAL_DEFINE_ERROR(BadResolution);
QSNODAL_DEFINE_ERROR(GridMismatch);
QSNODAL_DEFINE_ERROR(TooFewNodes);

// Model / hypothesis auditing
QSNODAL_DEFINE_ERROR(InvalidSampleSpec);

// Constraint-manifold projections
QSNODAL_DEFINE_ERROR(ZeroField);
QSNODAL_DEFINE_ERROR(NotProjectable);
QSNODAL_DEFINE_ERROR(MissingSign);

// Solvers
QSNODAL_DEFINE_ERROR(SeedNotProjectable);
QSNODAL_DEFINE_ERROR(SeedConstructionFailed);
QSNODAL_DEFINE_ERROR(InfeasiblePartition);
QSNODAL_DEFINE_ERROR(InnerSolveFailed);
QSNODAL_DEFINE_ERROR(MaxItersExceeded);

// Verification / reporting
QSNODAL_DEFINE_ERROR(MissingBaseline);
QSNODAL_DEFINE_ERROR(BadConfig);

#undef QSNODAL_DEFINE_ERROR

} // namespace qsnodal
