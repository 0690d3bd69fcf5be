#ifndef FLUXLATTICE_ERRORS_HPP
#define FLUXLATTICE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fluxlattice {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input documents or configs.
struct ParseError : Error {
    using Error::Error;
};

// A model violated a structural precondition (singular transform,
// variable present in the potential, non-Hermitian operator, ...).
struct ModelError : Error {
    using Error::Error;
};

// A numeric computation failed its own quality gate (norm drift,
// truncation too small, resonant divergence, infeasible search).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace fluxlattice

#endif
