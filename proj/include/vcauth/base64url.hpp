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

#ifndef VCAUTH_BASE64URL_HPP
#define VCAUTH_BASE64URL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vcauth::base64url {

/// RFC 4648 §5 encoding, always without padding. Output never contains
/// '+', '/' or '='.
std::string encode(std::span<const std::uint8_t> data);
std::string encode(std::string_view data);

/// Strict decoder: rejects characters outside the base64url alphabet
/// (including '=' padding and whitespace), impossible lengths, and
/// non-canonical trailing bits, so each byte string has exactly one
/// accepted encoding.
std::optional<std::vector<std::uint8_t>> decode(std::string_view encoded);
std::optional<std::string> decode_string(std::string_view encoded);

}  // namespace vcauth::base64url

#endif  // VCAUTH_BASE64URL_HPP
