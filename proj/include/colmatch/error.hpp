/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace colmatch
{

/// Root of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error
{
public:
    using Error::Error;
};

/// Malformed input text. `row()` is the 1-based data row (0 = header / whole file).
class ParseError : public Error
{
public:
    ParseError(const std::string& message, std::size_t row = 0) : Error(message), row_(row) { }
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A numerical precondition was violated (empty sample, bad edges, out-of-domain argument).
class DomainError : public Error
{
public:
    using Error::Error;
};

/// Variance-based test on a sample with zero variance. The pair is incomparable.
class DegenerateVarianceError : public DomainError
{
public:
    using DomainError::DomainError;
};

/// Numeric conversion requested on a column that is not numeric.
class KindError : public Error
{
public:
    using Error::Error;
};

/// Input is structurally valid but violates a contract (duplicates, bad config, unknown names).
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// Request conflicts with current state (e.g. a new column already consumed).
class ConflictError : public Error
{
public:
    using Error::Error;
};

class NotFoundError : public Error
{
public:
    using Error::Error;
};

}
