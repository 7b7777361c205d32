/*
 * Copyright 2026 The spinflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spinflow {

/// Invalid argument to a library operation (size mismatch, out-of-range index, ...).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid or inconsistent simulation configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stored file has the wrong version, is truncated or cannot be parsed.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The state became non-finite during time stepping.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, std::uint64_t step, double dt)
        : std::runtime_error(what), step_(step), dt_(dt) {}

    std::uint64_t step() const noexcept { return step_; }
    double dt() const noexcept { return dt_; }

private:
    std::uint64_t step_;
    double dt_;
};

} // namespace spinflow
