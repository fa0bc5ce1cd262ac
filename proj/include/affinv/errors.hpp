#pragma once

#include <stdexcept>
#include <string>

namespace affinv {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};
struct IndexError : Error {
    explicit IndexError(const std::string& msg) : Error(msg) {}
};
struct OrderOverflow : Error {
    explicit OrderOverflow(const std::string& msg) : Error(msg) {}
};
struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& msg) : Error(msg) {}
};
struct NonpositiveArgument : Error {
    explicit NonpositiveArgument(const std::string& msg) : Error(msg) {}
};
struct ChartDomainViolation : Error {
    explicit ChartDomainViolation(const std::string& msg) : Error(msg) {}
};
struct DegenerateImmersion : Error {
    explicit DegenerateImmersion(const std::string& msg) : Error(msg) {}
};
struct DegenerateHessian : Error {
    explicit DegenerateHessian(const std::string& msg) : Error(msg) {}
};
struct NotLocallyConvex : Error {
    explicit NotLocallyConvex(const std::string& msg) : Error(msg) {}
};
struct SingularFrame : Error {
    explicit SingularFrame(const std::string& msg) : Error(msg) {}
};
struct DimensionTooSmall : Error {
    explicit DimensionTooSmall(const std::string& msg) : Error(msg) {}
};
struct InvalidParameter : Error {
    explicit InvalidParameter(const std::string& msg) : Error(msg) {}
};
struct PartitionMismatch : Error {
    explicit PartitionMismatch(const std::string& msg) : Error(msg) {}
};
struct RankContradiction : Error {
    explicit RankContradiction(const std::string& msg) : Error(msg) {}
};

} // namespace affinv
