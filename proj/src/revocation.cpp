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

#include "vcauth/revocation.hpp"

#include "vcauth/base64url.hpp"

namespace vcauth::revocation {

namespace {

// Index i lives in byte i/8, MSB first.
constexpr std::uint8_t bit_mask(std::size_t index) {
    return static_cast<std::uint8_t>(1u << (7 - index % 8));
}

}  // namespace

const char* to_string(RevocationError e) {
    switch (e) {
        case RevocationError::InvalidLength: return "invalid_length";
        case RevocationError::IndexOutOfRange: return "index_out_of_range";
        case RevocationError::BadSignature: return "bad_signature";
        case RevocationError::MalformedList: return "malformed_list";
    }
    return "unknown";
}

Result<RevocationList, RevocationError> RevocationList::create(
    std::size_t length_bits) {
    if (length_bits == 0 || length_bits % 8 != 0)
        return fail(RevocationError::InvalidLength,
                    "length must be a positive multiple of 8");
    RevocationList list;
    list.bytes_.assign(length_bits / 8, 0);
    return list;
}

Result<RevocationList, RevocationError> RevocationList::from_bytes(
    std::vector<std::uint8_t> bytes) {
    if (bytes.empty())
        return fail(RevocationError::InvalidLength, "empty bitstring");
    RevocationList list;
    list.bytes_ = std::move(bytes);
    return list;
}

Result<Ok, RevocationError> RevocationList::revoke(std::size_t index) {
    if (index >= length_bits())
        return fail(RevocationError::IndexOutOfRange);
    bytes_[index / 8] |= bit_mask(index);
    ++version_;
    return Ok{};
}

Result<Ok, RevocationError> RevocationList::clear(std::size_t index) {
    if (index >= length_bits())
        return fail(RevocationError::IndexOutOfRange);
    bytes_[index / 8] &= static_cast<std::uint8_t>(~bit_mask(index));
    ++version_;
    return Ok{};
}

Result<bool, RevocationError> RevocationList::is_revoked(
    std::size_t index) const {
    if (index >= length_bits())
        return fail(RevocationError::IndexOutOfRange);
    return (bytes_[index / 8] & bit_mask(index)) != 0;
}

std::string encode_list_credential(const RevocationList& list,
                                   std::string_view issuer,
                                   const jose::KeyPair& signer,
                                   std::int64_t now) {
    jose::Json payload;
    payload["iss"] = std::string(issuer);
    payload["iat"] = now;
    payload["encodedList"] = base64url::encode(list.bytes());
    return jose::jws_sign(payload, "jwt", signer);
}

Result<DecodedListCredential, RevocationError> decode_list_credential(
    std::string_view compact, const jose::PublicKeyJwk& issuer_key) {
    auto verified = jose::jws_verify(compact, issuer_key);
    if (!verified) {
        if (verified.error().code == jose::JoseError::BadSignature)
            return fail(RevocationError::BadSignature, verified.error().detail);
        return fail(RevocationError::MalformedList, verified.error().detail);
    }
    const jose::Json& payload = verified->payload;
    if (!payload.contains("iss") || !payload["iss"].is_string() ||
        !payload.contains("iat") || !payload["iat"].is_number_integer() ||
        !payload.contains("encodedList") || !payload["encodedList"].is_string())
        return fail(RevocationError::MalformedList,
                    "missing iss/iat/encodedList");
    auto bytes = base64url::decode(payload["encodedList"].get<std::string>());
    if (!bytes || bytes->empty())
        return fail(RevocationError::MalformedList, "bad encodedList");
    auto list = RevocationList::from_bytes(std::move(*bytes));
    if (!list)
        return fail(RevocationError::MalformedList, "bad bitstring length");
    return DecodedListCredential{std::move(*list),
                                 payload["iss"].get<std::string>(),
                                 payload["iat"].get<std::int64_t>()};
}

}  // namespace vcauth::revocation
