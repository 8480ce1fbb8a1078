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

#include "vcauth/base64url.hpp"

#include <array>

namespace vcauth::base64url {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

constexpr std::array<std::int8_t, 256> make_inverse() {
    std::array<std::int8_t, 256> inv{};
    for (auto& v : inv) v = -1;
    for (int i = 0; i < 64; ++i)
        inv[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
    return inv;
}

constexpr auto kInverse = make_inverse();

}  // namespace

std::string encode(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve((data.size() * 4 + 2) / 3);
    std::uint32_t buf = 0;
    int bits = 0;
    for (std::uint8_t byte : data) {
        buf = (buf << 8) | byte;
        bits += 8;
        while (bits >= 6) {
            bits -= 6;
            out.push_back(kAlphabet[(buf >> bits) & 0x3f]);
        }
    }
    if (bits > 0)
        out.push_back(kAlphabet[(buf << (6 - bits)) & 0x3f]);
    return out;
}

std::string encode(std::string_view data) {
    return encode(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::optional<std::vector<std::uint8_t>> decode(std::string_view encoded) {
    if (encoded.size() % 4 == 1)
        return std::nullopt;  // no byte length produces a 4k+1 encoding
    std::vector<std::uint8_t> out;
    out.reserve(encoded.size() * 3 / 4);
    std::uint32_t buf = 0;
    int bits = 0;
    for (char c : encoded) {
        std::int8_t v = kInverse[static_cast<unsigned char>(c)];
        if (v < 0)
            return std::nullopt;
        buf = (buf << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((buf >> bits) & 0xff));
        }
    }
    // Canonical encodings leave only zero bits unconsumed.
    if (bits > 0 && (buf & ((1u << bits) - 1)) != 0)
        return std::nullopt;
    return out;
}

std::optional<std::string> decode_string(std::string_view encoded) {
    auto bytes = decode(encoded);
    if (!bytes)
        return std::nullopt;
    return std::string(bytes->begin(), bytes->end());
}

}  // namespace vcauth::base64url
