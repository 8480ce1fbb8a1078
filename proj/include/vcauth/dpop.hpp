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
 * Single-message proof-of-possession proofs pinned to an HTTP method
 * and URI. A proof is a self-signed JWS whose header carries the
 * signing key ("typ":"dpop+jwt"); the verifier extracts that key,
 * checks the signature with it, matches method/URI, rejects replayed
 * identifiers, and enforces freshness — in that order.
 */

#ifndef VCAUTH_DPOP_HPP
#define VCAUTH_DPOP_HPP

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"

namespace vcauth::dpop {

enum class DpopError {
    MalformedProof,
    WrongType,
    BadSignature,
    MethodMismatch,
    UriMismatch,
    Replayed,
    Stale,
};

const char* to_string(DpopError e);

/// Tracks proof identifiers this verifier has already accepted.
/// Entries expire after `ttl` seconds; by then the proof is stale
/// anyway, so eviction never re-opens a replay window. check/insert is
/// atomic: of two racing presentations of the same jti, at most one is
/// admitted.
class ReplayCache {
public:
    explicit ReplayCache(std::int64_t ttl_seconds = 65)
        : ttl_(ttl_seconds) {}

    enum class Admission { Ok, Replayed, Stale };

    /// Replay check first, freshness second (a replayed stale proof
    /// reports Replayed). Records the jti only when admitted.
    Admission admit(std::string_view jti, bool fresh, std::int64_t now);

    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::int64_t> seen_;  // jti -> expiry
    std::int64_t ttl_;
};

struct VerifyOptions {
    std::int64_t freshness_window = 60;
    std::int64_t skew = 5;
};

/// Builds a proof for `method` on `uri` at time `now`. The identifier
/// is 16 random bytes, hex-encoded with an "0x" prefix. `uri` must be
/// absolute (scheme and host); anything else is a caller bug.
std::string build_proof(std::string_view method, std::string_view uri,
                        const jose::KeyPair& signer, std::int64_t now);

/// Verification order: (1) extract the JWK from the header, (2) check
/// the proof's signature with it, (3) match htm/htu against the
/// expected request, (4) reject seen jti values, (5) enforce
/// freshness. On success the jti is recorded in `cache` and the
/// embedded key is returned.
Result<jose::PublicKeyJwk, DpopError> verify_proof(
    std::string_view compact, std::string_view expected_method,
    std::string_view expected_uri, ReplayCache& cache, std::int64_t now,
    const VerifyOptions& opts = {});

/// Header JWK without any signature check, for confirmation-key
/// comparison before the full verification runs.
Result<jose::PublicKeyJwk, DpopError> peek_jwk(std::string_view compact);

/// Lowercases scheme and host, strips the scheme's default port,
/// leaves path and query untouched.
std::string normalize_uri(std::string_view uri);

}  // namespace vcauth::dpop

#endif  // VCAUTH_DPOP_HPP
