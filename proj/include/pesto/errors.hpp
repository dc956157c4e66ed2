#pragma once

#include <stdexcept>
#include <string>

namespace pesto {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpecMismatch : Error {
    SpecMismatch() : Error("field spec mismatch between operands") {}
};

struct DivisionByZero : Error {
    DivisionByZero() : Error("division by zero in finite field") {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct ParamRange : Error {
    explicit ParamRange(const std::string& what) : Error("parameter out of range: " + what) {}
};

struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& what) : Error("budget exceeded: " + what) {}
};

struct RngExhausted : Error {
    RngExhausted() : Error("rejection sampling exhausted its retry budget") {}
};

struct SigningFailed : Error {
    SigningFailed() : Error("no consistent oil system found within the vinegar retry cap") {}
};

struct DegreeTooHigh : Error {
    explicit DegreeTooHigh(const std::string& what) : Error("degree too high: " + what) {}
};

struct InsufficientSamples : Error {
    explicit InsufficientSamples(const std::string& what) : Error("insufficient samples: " + what) {}
};

struct IsolationAmbiguous : Error {
    explicit IsolationAmbiguous(const std::string& what) : Error("quadratic isolation ambiguous: " + what) {}
};

struct NoSolutionFound : Error {
    explicit NoSolutionFound(unsigned d_max)
        : Error("no witness found up to degree " + std::to_string(d_max)) {}
};

struct CodecError : Error {
    using Error::Error;
};

struct BadMagic : CodecError {
    BadMagic() : CodecError("unrecognized key file magic or kind") {}
};

struct TruncatedStream : CodecError {
    TruncatedStream() : CodecError("key stream ends before the declared payload") {}
};

struct ParamSanity : CodecError {
    explicit ParamSanity(const std::string& what) : CodecError("parameter sanity check failed: " + what) {}
};

}  // namespace pesto
