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
 * JWK / JWS / JWT layer.
 *
 * The only supported signature suite is EdDSA over Ed25519; anything
 * else is rejected outright so a token can never downgrade the
 * verifier. Compact serialization is three unpadded base64url segments
 * joined by '.', with the signature computed over the ASCII bytes of
 * "b64(header).b64(payload)".
 */

#ifndef VCAUTH_JOSE_HPP
#define VCAUTH_JOSE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vcauth/crypto.hpp"
#include "vcauth/result.hpp"

namespace vcauth::jose {

/// Claims and headers keep their insertion order when serialized, so
/// token layouts are stable and predictable.
using Json = nlohmann::ordered_json;

enum class JoseError {
    MalformedToken,
    UnsupportedAlgorithm,
    BadSignature,
};

const char* to_string(JoseError e);

/// An Ed25519 public key in JWK form ("kty":"OKP", "crv":"Ed25519").
/// Identity of clients and authorization servers alike.
struct PublicKeyJwk {
    crypto::PublicKey x{};

    std::string x_b64() const;

    /// Canonical serialization: keys in lexicographic order (crv, kty,
    /// x), minified. Confirmation-key comparison and hashing both
    /// operate on these exact bytes.
    std::string canonical() const;

    Json to_json() const;
    static std::optional<PublicKeyJwk> from_json(const Json& j);

    friend bool operator==(const PublicKeyJwk&, const PublicKeyJwk&) = default;
};

struct KeyPair {
    PublicKeyJwk pub;
    crypto::Seed seed{};  // never serialized into tokens

    static KeyPair generate();
    static KeyPair from_seed(const crypto::Seed& seed);
};

/// Private JWK file format ("d" carries the seed). Written 0600.
void save_keypair(const std::string& path, const KeyPair& kp);
std::optional<KeyPair> load_keypair(const std::string& path);

struct DecodedJws {
    Json header;
    Json payload;
};

/// Sign `payload` into compact serialization with header
/// {"typ": typ, "alg": "EdDSA"}. `extra_header` fields (e.g. an
/// embedded "jwk") are appended after "alg".
std::string jws_sign(const Json& payload, std::string_view typ,
                     const KeyPair& signer, const Json& extra_header = Json());

/// Full verification: structure, alg, and signature under `key`.
Result<DecodedJws, JoseError> jws_verify(std::string_view compact,
                                         const PublicKeyJwk& key);

/// Structural decode without any signature check. Callers use this to
/// discover which key a token claims before verifying with it.
Result<DecodedJws, JoseError> jws_peek(std::string_view compact);

enum class TimeCheck {
    Ok,
    Expired,
    NotFresh,
};

const char* to_string(TimeCheck c);

struct TimeWindow {
    std::int64_t iat = 0;
    std::optional<std::int64_t> exp;
};

/// Rejects Expired when `now > exp + skew`, NotFresh when
/// `now < iat - skew`.
TimeCheck check_time_window(const TimeWindow& claims, std::int64_t now,
                            std::int64_t skew);

/// Lowercase hex sha-256 of the canonical JWK serialization.
std::string jwk_sha256_hex(const PublicKeyJwk& key);

}  // namespace vcauth::jose

#endif  // VCAUTH_JOSE_HPP
