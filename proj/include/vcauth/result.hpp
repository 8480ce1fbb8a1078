/*
 * Copyright 2026 vcauth Contributors
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

#ifndef VCAUTH_RESULT_HPP
#define VCAUTH_RESULT_HPP

#include <string>
#include <utility>
#include <variant>

namespace vcauth {

/// An error code plus a human-readable detail string. Verification
/// pipelines report distinct codes so callers can map them to protocol
/// errors without parsing text.
template <typename E>
struct Err {
    E code;
    std::string detail;
};

template <typename E>
Err<E> fail(E code, std::string detail = {}) {
    return Err<E>{code, std::move(detail)};
}

/// Value-or-error. Deliberately minimal: the project targets C++20 and
/// only needs the subset of std::expected it would use.
template <typename T, typename E>
class Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Err<E> err) : v_(std::move(err)) {}

    explicit operator bool() const { return v_.index() == 0; }
    bool ok() const { return v_.index() == 0; }

    const T& value() const& { return std::get<0>(v_); }
    T& value() & { return std::get<0>(v_); }
    T&& value() && { return std::get<0>(std::move(v_)); }

    const T& operator*() const& { return value(); }
    T& operator*() & { return value(); }

    const T* operator->() const { return &value(); }
    T* operator->() { return &value(); }

    const Err<E>& error() const { return std::get<1>(v_); }

private:
    std::variant<T, Err<E>> v_;
};

/// Tag for operations that succeed without producing a value.
struct Ok {};

}  // namespace vcauth

#endif  // VCAUTH_RESULT_HPP
