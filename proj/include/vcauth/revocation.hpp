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

/*
 * Fixed-length bitstring revocation list: bit i set means credential
 * index i is revoked. Verifiers download the signed list once and
 * answer status checks locally, so the issuer never learns which
 * credential was checked.
 */

#ifndef VCAUTH_REVOCATION_HPP
#define VCAUTH_REVOCATION_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"

namespace vcauth::revocation {

inline constexpr std::size_t kDefaultLengthBits = 131072;

enum class RevocationError {
    InvalidLength,
    IndexOutOfRange,
    BadSignature,
    MalformedList,
};

const char* to_string(RevocationError e);

class RevocationList {
public:
    /// All-zero list; length must be a positive multiple of 8 and is
    /// immutable afterwards.
    static Result<RevocationList, RevocationError> create(
        std::size_t length_bits);

    static Result<RevocationList, RevocationError> from_bytes(
        std::vector<std::uint8_t> bytes);

    std::size_t length_bits() const { return bytes_.size() * 8; }
    std::uint64_t version() const { return version_; }
    std::span<const std::uint8_t> bytes() const { return bytes_; }

    /// Sets the bit (idempotent on the bit, version always advances).
    Result<Ok, RevocationError> revoke(std::size_t index);

    /// Administrative un-revocation.
    Result<Ok, RevocationError> clear(std::size_t index);

    Result<bool, RevocationError> is_revoked(std::size_t index) const;

private:
    RevocationList() = default;
    std::vector<std::uint8_t> bytes_;
    std::uint64_t version_ = 0;
};

/// The signed list credential: claims {iss, iat, encodedList} in a JWS
/// signed by the issuing AS, served as application/jwt.
std::string encode_list_credential(const RevocationList& list,
                                   std::string_view issuer,
                                   const jose::KeyPair& signer,
                                   std::int64_t now);

struct DecodedListCredential {
    RevocationList list;
    std::string issuer;
    std::int64_t issued_at = 0;
};

Result<DecodedListCredential, RevocationError> decode_list_credential(
    std::string_view compact, const jose::PublicKeyJwk& issuer_key);

}  // namespace vcauth::revocation

#endif  // VCAUTH_REVOCATION_HPP
