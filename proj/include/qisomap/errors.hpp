#pragma once

#include <stdexcept>
#include <string>

namespace qisomap {

struct OverflowError : std::runtime_error {
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};
struct LayoutMismatch : std::runtime_error {
    explicit LayoutMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct FlagNotClean : std::runtime_error {
    explicit FlagNotClean(const std::string& what) : std::runtime_error(what) {}
};
struct TargetNotClean : std::runtime_error {
    explicit TargetNotClean(const std::string& what) : std::runtime_error(what) {}
};
struct DirtyAncilla : std::runtime_error {
    explicit DirtyAncilla(const std::string& what) : std::runtime_error(what) {}
};
struct OddValue : std::runtime_error {
    explicit OddValue(const std::string& what) : std::runtime_error(what) {}
};
struct AllZeroValues : std::runtime_error {
    explicit AllZeroValues(const std::string& what) : std::runtime_error(what) {}
};
struct AsymmetricInput : std::runtime_error {
    explicit AsymmetricInput(const std::string& what) : std::runtime_error(what) {}
};
struct ConvergenceFailure : std::runtime_error {
    explicit ConvergenceFailure(const std::string& what) : std::runtime_error(what) {}
};
struct InsufficientPositiveSpectrum : std::runtime_error {
    explicit InsufficientPositiveSpectrum(const std::string& what) : std::runtime_error(what) {}
};
struct SampleBudgetExceeded : std::runtime_error {
    explicit SampleBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct ZeroColumn : std::runtime_error {
    explicit ZeroColumn(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateSubspace : std::runtime_error {
    explicit DegenerateSubspace(const std::string& what) : std::runtime_error(what) {}
};
struct ShotBudgetTooSmall : std::runtime_error {
    explicit ShotBudgetTooSmall(const std::string& what) : std::runtime_error(what) {}
};
struct InsufficientCopies : std::runtime_error {
    explicit InsufficientCopies(const std::string& what) : std::runtime_error(what) {}
};
struct DisconnectedGraph : std::runtime_error {
    explicit DisconnectedGraph(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownGenerator : std::runtime_error {
    explicit UnknownGenerator(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qisomap
