#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scatter {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violation on an argument (bad length, bad parameter, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public InvalidArgument {
 public:
  LengthMismatch(std::size_t expected, std::size_t got)
      : InvalidArgument("length mismatch: expected " + std::to_string(expected) +
                        ", got " + std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

/// Malformed input file (CSV, JSON, raw + .meta).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The scattering tree would exceed the configured depth/breadth budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t estimated_paths)
      : Error(what + " (estimated " + std::to_string(estimated_paths) + " paths)"),
        estimated_paths_(estimated_paths) {}
  std::uint64_t estimated_paths() const noexcept { return estimated_paths_; }

 private:
  std::uint64_t estimated_paths_;
};

/// Energy balance requested for a wavelet/low-pass pair that is not tight.
class NonTightPair : public Error {
 public:
  using Error::Error;
};

/// Failure while constructing the decay constants or their preconditions.
class ConstantsError : public Error {
 public:
  enum class Kind {
    coverage_hole,      // S vanishes somewhere on the validated band
    c_nonpositive,      // asymmetry too weak on the sampled octave
    degenerate_octave,  // c^2 >= C
    vanishing_order,    // psi_hat vanishes too slowly at 0
    littlewood_paley,   // filter energies sum above 1
    asymmetry,          // negative frequencies dominate
    empty_band,         // validated band holds no full octave
    no_x_found,         // no initialization width on the search grid
  };

  ConstantsError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline const char* to_string(ConstantsError::Kind kind) {
  switch (kind) {
    case ConstantsError::Kind::coverage_hole: return "coverage_hole";
    case ConstantsError::Kind::c_nonpositive: return "c_nonpositive";
    case ConstantsError::Kind::degenerate_octave: return "degenerate_octave";
    case ConstantsError::Kind::vanishing_order: return "vanishing_order";
    case ConstantsError::Kind::littlewood_paley: return "littlewood_paley";
    case ConstantsError::Kind::asymmetry: return "asymmetry";
    case ConstantsError::Kind::empty_band: return "empty_band";
    case ConstantsError::Kind::no_x_found: return "no_x_found";
  }
  return "unknown";
}

}  // namespace scatter
