#ifndef LEVELSET_ERRORS_HPP
#define LEVELSET_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace levelset {

// Argument outside the mathematical domain of an operation.
using DomainError = std::domain_error;

// An operation was asked to produce constants for a case the hypothesis
// does not belong to.
class WrongCaseError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

// A fit or test did not have enough usable samples.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The minimizer hit a non-finite energy or gradient.
class NonFiniteEnergyError : public std::runtime_error {
public:
  NonFiniteEnergyError(const std::string &what, std::size_t iterate)
      : std::runtime_error(what + " (iterate " + std::to_string(iterate) + ")"),
        iterate_(iterate) {}

  std::size_t iterate() const noexcept { return iterate_; }

private:
  std::size_t iterate_;
};

} // namespace levelset

#endif // LEVELSET_ERRORS_HPP
