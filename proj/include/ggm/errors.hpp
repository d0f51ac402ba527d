#pragma once

#include <stdexcept>
#include <string>

namespace ggm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

// Operation requires a decomposable (chordal) graph.
struct NotDecomposableError : Error {
    NotDecomposableError() : Error("graph is not decomposable") {}
    explicit NotDecomposableError(const std::string& what) : Error(what) {}
};

// A symmetric matrix (or principal submatrix) failed Cholesky factorization.
struct NotPositiveDefiniteError : Error {
    NotPositiveDefiniteError() : Error("matrix is not positive definite") {}
    explicit NotPositiveDefiniteError(const std::string& what) : Error(what) {}
};

struct TooLargeError : Error {
    using Error::Error;
};

struct EmptyListError : Error {
    EmptyListError() : Error("scored graph list is empty") {}
};

struct UnattainableError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct EmptyAfterFilteringError : Error {
    EmptyAfterFilteringError() : Error("no complete rows left after filtering") {}
    explicit EmptyAfterFilteringError(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace ggm
