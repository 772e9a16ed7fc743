#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace defidx {

using Index = std::ptrdiff_t;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (α ≤ 0, vertex out of range, ...).
struct DomainError : Error {
  using Error::Error;
};

/// Precondition of an operation not met by otherwise valid arguments.
struct ContractError : Error {
  using Error::Error;
};

/// A stored object violates its own invariant (e.g. a non-positive off-diagonal).
struct InvariantViolation : Error {
  using Error::Error;
};

/// Two decisive results disagree, or a consistency check exceeded its tolerance.
struct InconsistencyError : Error {
  using Error::Error;
};

/// An operator was applied where the finite truncation does not determine the value.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::vector<Index> vertices);
  const std::vector<Index>& vertices() const noexcept { return vertices_; }

 private:
  std::vector<Index> vertices_;
};

}  // namespace defidx
