#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace topobohm {

// Exit-code classes used by the runner: schema (2), physics (3), numerics (4).
// Everything else derives from std::runtime_error / std::invalid_argument.

/// Input that violates a construction precondition (non-unimodular character,
/// non-reduced word, dimension cap, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deck element or cover point outside the materialized sheet window.
class OutOfWindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A topological factor that cannot be combined with the requested potential
/// or operation (the factor does not commute with every V(q), the generators
/// do not commute, ...).
class IncompatibleFactorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cover-side quantity that does not descend to the base space.
class NonProjectableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical invariant breached its tolerance. `invariant` names it.
inline std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class ToleranceBreach : public std::runtime_error {
 public:
  ToleranceBreach(std::string invariant, double residual, double tolerance)
      : std::runtime_error(invariant + ": residual " + format_g(residual) + " violates tolerance " +
                           format_g(tolerance)),
        invariant_(std::move(invariant)),
        residual_(residual),
        tolerance_(tolerance) {}

  const std::string& invariant() const noexcept { return invariant_; }
  double residual() const noexcept { return residual_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  std::string invariant_;
  double residual_;
  double tolerance_;
};

/// Config document that does not match the published schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace topobohm
