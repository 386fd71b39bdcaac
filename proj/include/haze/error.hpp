//*****************************************************************************
// Copyright 2026 The haze-restore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//*****************************************************************************

#pragma once

#include <stdexcept>
#include <string>

namespace haze {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid hyperparameters or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Tensor shape, image size or file content the operation cannot accept.
class InputError : public Error {
public:
    using Error::Error;
};

/// Unreadable, truncated or incompatible checkpoint file.
class CheckpointError : public Error {
public:
    using Error::Error;
};

/// Training produced a NaN/Inf loss.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace haze
