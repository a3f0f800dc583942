// Copyright 2026 The asearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace asearch {

/// An argument violated an operation precondition (bad parameter, mismatched
/// dimensions, empty input where content is required).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// External data (dataset files, score tables, configs, model files) failed
/// validation. Messages name the offending record or field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dataset holds no usable training data for the requested class.
class NoTrainingDataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace asearch
