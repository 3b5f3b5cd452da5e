// Copyright 2026 The CineLens Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cinelens {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Input outside the mathematical or physical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

class NoTargetError : public Error {
  public:
    NoTargetError() : Error("scene has no focus target") {}
    using Error::Error;
};

class EmptyTrackError : public Error {
  public:
    EmptyTrackError() : Error("track has no keyframes") {}
    using Error::Error;
};

// Structurally invalid input documents (scenario, catalog, scene).
class ValidationError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class BindError : public Error {
  public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
  public:
    using Error::Error;
};

} // namespace cinelens
