#ifndef SNNE_ERRORS_HPP
#define SNNE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace snne {

// Dimension disagreement between operands (matmul shapes, column counts, ...).
struct ShapeError : std::invalid_argument {
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// A precondition other than shape was violated (non-scalar loss, sigma <= 0, ...).
struct ContractError : std::invalid_argument {
  explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// File could not be read/written or has malformed content.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model container rejection reasons, kept distinct so callers can tell
// an unrecognized file from a damaged one.
struct BadMagicError : std::runtime_error {
  explicit BadMagicError(const std::string& msg) : std::runtime_error(msg) {}
};
struct BadChecksumError : std::runtime_error {
  explicit BadChecksumError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace snne

#endif  // SNNE_ERRORS_HPP
