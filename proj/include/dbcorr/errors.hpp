// Copyright 2026 The dbcorr Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef DBCORR_ERRORS_HPP_
#define DBCORR_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dbcorr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rho = 0 where a correlated (alternate) model is required.
class InvalidAlternate : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// An enumeration or exact-arithmetic cap was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A precondition of a bound (an inequality on its parameters) fails.
// The message names the inequality.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

class InversionUndefined : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dbcorr

#endif  // DBCORR_ERRORS_HPP_
