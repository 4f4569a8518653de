#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace crrhedge {

/// Base class for domain errors raised by pricing operations. `kind()` is a
/// stable machine-readable tag; the CLI maps these to exit code 3 and maps
/// malformed input (ScenarioError) to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// A structurally invalid object: bad step count, mismatched trajectory
/// length, broken recombining constraint, and the like.
struct InvalidParams : Error {
  explicit InvalidParams(const std::string& what) : Error("InvalidParams", what) {}
};

/// Arbitrage bound violated: the one-step state prices would leave (0,1).
struct OutOfRange : Error {
  explicit OutOfRange(const std::string& what) : Error("OutOfRange", what) {}
};

/// A strike that does not coincide with any terminal lattice node.
struct StrikeOffLattice : Error {
  explicit StrikeOffLattice(const std::string& what) : Error("StrikeOffLattice", what) {}
};

/// A path-dependent payoff was passed to an operation defined only for
/// terminal-state payoffs.
struct PathDependentPayoffRejected : Error {
  explicit PathDependentPayoffRejected(const std::string& what)
      : Error("PathDependentPayoffRejected", what) {}
};

/// Exhaustive 2^T trajectory enumeration was requested beyond the cap.
struct EnumerationCapExceeded : Error {
  explicit EnumerationCapExceeded(const std::string& what)
      : Error("EnumerationCapExceeded", what) {}
};

/// The backward walk cannot reach the target in exactly T net moves.
struct Unreachable : Error {
  explicit Unreachable(const std::string& what) : Error("Unreachable", what) {}
};

/// Gross returns fail D < R < U.
struct NoArbitrageViolated : Error {
  explicit NoArbitrageViolated(const std::string& what)
      : Error("NoArbitrageViolated", what) {}
};

}  // namespace crrhedge
