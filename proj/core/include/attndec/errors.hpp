// Error taxonomy shared by all modules.
//
// invalid_argument  — caller violated a documented precondition
// numeric_degeneracy — input was shaped correctly but numerically unusable
//                      (e.g. a covariance block that is not positive definite)
// invalid_dataset   — a dataset/manifest violates structural invariants
// io_error          — filesystem or parse failure
#pragma once

#include <stdexcept>
#include <string>

namespace attndec {

using invalid_argument = std::invalid_argument;

class numeric_degeneracy : public std::runtime_error {
public:
  explicit numeric_degeneracy(const std::string& what) : std::runtime_error(what) {}
};

class invalid_dataset : public std::runtime_error {
public:
  explicit invalid_dataset(const std::string& what) : std::runtime_error(what) {}
};

class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace attndec
