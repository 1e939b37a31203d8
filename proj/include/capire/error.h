/*
 * Copyright (C) 2026 The capire authors
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
#ifndef CAPIRE_ERROR_H
#define CAPIRE_ERROR_H

#include <stdexcept>
#include <string>

namespace capire
{

/// Base class of every error raised by the library.
/// `kind()` is a short machine-readable tag used by the CLI error line.
class Error : public std::runtime_error
{
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message)
        , m_kind(std::move(kind))
    {
    }

    const std::string& kind() const noexcept
    {
        return m_kind;
    }

private:
    std::string m_kind;
};

/// Malformed or inconsistent input data (files, tables, identifiers).
class InputError : public Error
{
public:
    explicit InputError(const std::string& message)
        : Error("input", message)
    {
    }
};

/// Curriculum graph would contain a cycle.
class CycleError : public Error
{
public:
    explicit CycleError(const std::string& message)
        : Error("cycle", message)
    {
    }
};

class IoError : public Error
{
public:
    explicit IoError(const std::string& message)
        : Error("io", message)
    {
    }
};

/// Operation called in a state it does not accept (e.g. stepping a terminal agent).
class StateError : public Error
{
public:
    explicit StateError(const std::string& message)
        : Error("state", message)
    {
    }
};

} // namespace capire

#endif // CAPIRE_ERROR_H
