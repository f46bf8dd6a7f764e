#pragma once

#include <stdexcept>
#include <string>

namespace causalattn {

// Base class for all recoverable errors raised by the library. The CLI maps
// these to nonzero exit codes; batch commands catch them per item.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Attention-matrix validation failures. Each carries the first offending index.
class ValidationError : public Error {
public:
    enum class Kind { NotLowerTriangular, NegativeEntry, ZeroDiagonal, RowSumOff };

    ValidationError(Kind kind, int row, int col, const std::string& what)
        : Error(what), kind(kind), row(row), col(col) {}

    Kind kind;
    int row;
    int col;
};

class ZeroVarianceError : public Error {
public:
    ZeroVarianceError(int index, const std::string& what) : Error(what), index(index) {}
    int index;
};

class SingularSubmatrixError : public Error {
public:
    explicit SingularSubmatrixError(const std::string& what) : Error(what) {}
};

class InsufficientSamplesError : public Error {
public:
    explicit InsufficientSamplesError(const std::string& what) : Error(what) {}
};

class TooFewSamplesError : public Error {
public:
    explicit TooFewSamplesError(const std::string& what) : Error(what) {}
};

class NoSuchEdgeError : public Error {
public:
    explicit NoSuchEdgeError(const std::string& what) : Error(what) {}
};

class CannotPlaceLatentsError : public Error {
public:
    explicit CannotPlaceLatentsError(const std::string& what) : Error(what) {}
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

}  // namespace causalattn
