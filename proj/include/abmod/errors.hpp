#pragma once

#include <stdexcept>
#include <string>

namespace abmod {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotAUnit : Error {
    explicit NotAUnit(const std::string& msg = "series is not a unit (constant term is zero)")
        : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg = "dimension mismatch") : Error(msg) {}
};

struct PrecisionMismatch : Error {
    explicit PrecisionMismatch(const std::string& msg = "operands have different precision")
        : Error(msg) {}
};

struct NotInvertible : Error {
    explicit NotInvertible(const std::string& msg = "matrix is not invertible over the series ring")
        : Error(msg) {}
};

struct NotEndomorphism : Error {
    explicit NotEndomorphism(const std::string& msg = "morphism is not an endomorphism")
        : Error(msg) {}
};

struct NotNormal : Error {
    explicit NotNormal(const std::string& msg = "submodule is not normal (quotient has b-torsion)")
        : Error(msg) {}
};

struct NotCompatible : Error {
    explicit NotCompatible(const std::string& msg = "pairing does not satisfy the compatibility identity")
        : Error(msg) {}
};

struct WrongCodomain : Error {
    explicit WrongCodomain(const std::string& msg = "morphism has unexpected codomain") : Error(msg) {}
};

struct NotSelfAdjoint : Error {
    explicit NotSelfAdjoint(const std::string& msg = "module admits no nondegenerate sesquilinear form")
        : Error(msg) {}
};

struct NonRationalExponent : Error {
    explicit NonRationalExponent(const std::string& msg = "exponent is not a Gaussian rational")
        : Error(msg) {}
};

struct NotIsomorphism : Error {
    explicit NotIsomorphism(const std::string& msg = "morphism is not an isomorphism") : Error(msg) {}
};

struct DegenerateSymmetrization : Error {
    explicit DegenerateSymmetrization(const std::string& msg = "symmetrized morphism is degenerate")
        : Error(msg) {}
};

// Parse-time diagnostics carry a source position.
struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " at line " + std::to_string(line_) + ", column " + std::to_string(col_)),
          line(line_), column(col_) {}
};

struct UndeclaredSymbol : ParseError {
    UndeclaredSymbol(const std::string& name, int line_, int col_)
        : ParseError("undeclared basis symbol '" + name + "'", line_, col_) {}
};

struct NonRationalCoefficient : ParseError {
    NonRationalCoefficient(const std::string& name, int line_, int col_)
        : ParseError("coefficient '" + name + "' is not a Gaussian rational", line_, col_) {}
};

} // namespace abmod
