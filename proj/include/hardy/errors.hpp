#ifndef HARDY_ERRORS_HPP
#define HARDY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hardy {

/// Rejected input: a precondition on arguments or configuration is violated.
class invalid_input : public std::invalid_argument {
 public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

/// Evaluation requested at (or within 1e-9 of) a pole of the potential.
class singular_point_error : public std::domain_error {
 public:
  explicit singular_point_error(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation at a zero of the pole field v with 1 < p < 4, p != 2, where
/// |v|^{p-4} diverges.  Quadrature treats this as "resample elsewhere".
class degenerate_point_error : public std::domain_error {
 public:
  explicit degenerate_point_error(const std::string& what) : std::domain_error(what) {}
};

/// Numerical failure: non-convergence, resample budget exhausted, etc.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hardy

#endif
