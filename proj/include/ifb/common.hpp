#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ifb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(const std::string& where, Index expected, Index got)
        : Error(where + ": dimension mismatch (expected " + std::to_string(expected) +
                ", got " + std::to_string(got) + ")") {}
};

class ParamViolation : public Error {
public:
    using Error::Error;
};

class OracleFailure : public Error {
public:
    using Error::Error;
};

class NonFiniteIterate : public Error {
public:
    explicit NonFiniteIterate(long iteration)
        : Error("non-finite iterate at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}
    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

class NotOrthogonal : public Error {
public:
    using Error::Error;
};

class InvalidKernel : public Error {
public:
    using Error::Error;
};

class BadDimensions : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class EmptyGrid : public Error {
public:
    using Error::Error;
};

class ImageLoadError : public Error {
public:
    using Error::Error;
};

class MalformedPgm : public ImageLoadError {
public:
    MalformedPgm(const std::string& what, std::size_t offset)
        : ImageLoadError("malformed PGM at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

inline void require_same_size(const char* where, const Vector& a, const Vector& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch(where, a.size(), b.size());
}

} // namespace ifb
