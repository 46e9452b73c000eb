#ifndef KRYDOM_ERRORS_HPP
#define KRYDOM_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace krydom {

/// Input carries NaN/Inf entries or is structurally unusable.
struct InvalidInput : std::invalid_argument {
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument outside the documented domain (index range, shape mismatch, ...).
struct InvalidArgument : std::invalid_argument {
    explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

/// A strict singular gap was required at the given index but is absent.
struct NoGapAtIndex : std::runtime_error {
    NoGapAtIndex(const std::string& what, std::int64_t index)
        : std::runtime_error(what), index(index) {}
    std::int64_t index;
};

/// The guess/matrix pair fails a compatibility or rank hypothesis.
struct NotCompatible : std::runtime_error {
    explicit NotCompatible(const std::string& what) : std::runtime_error(what) {}
};

/// Krylov block has lower numerical rank than the requested target dimension.
struct InsufficientKrylovRank : std::runtime_error {
    InsufficientKrylovRank(const std::string& what, std::int64_t achieved)
        : std::runtime_error(what), achieved(achieved) {}
    std::int64_t achieved;
};

}  // namespace krydom

#endif
