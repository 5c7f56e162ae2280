// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rfpc {

/// Base class for all rfpc errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class InvalidPose : public Error {
public:
  using Error::Error;
};

class EmptySet : public Error {
public:
  using Error::Error;
};

class OutOfBounds : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class TooFewCameras : public Error {
public:
  using Error::Error;
};

class DegenerateInput : public Error {
public:
  using Error::Error;
};

class DegenerateDomain : public Error {
public:
  using Error::Error;
};

class NonUnitDirection : public Error {
public:
  using Error::Error;
};

class BadRange : public Error {
public:
  using Error::Error;
};

class BadThresholds : public Error {
public:
  using Error::Error;
};

class DegenerateDirections : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class EmptyCloud : public Error {
public:
  using Error::Error;
};

} // namespace rfpc
