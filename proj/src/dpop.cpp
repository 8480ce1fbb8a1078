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

#include "vcauth/dpop.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "vcauth/crypto.hpp"

namespace vcauth::dpop {

namespace {

constexpr std::string_view kProofType = "dpop+jwt";
// 16 bytes hex-encoded is 32 chars; 16 bytes base64url is 22. Anything
// shorter cannot carry the required identifier entropy.
constexpr std::size_t kMinJtiLength = 22;

std::string to_upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

struct UriParts {
    std::string scheme;
    std::string host;
    std::string port;  // empty when absent
    std::string rest;  // path + query, verbatim
};

std::optional<UriParts> parse_uri(std::string_view uri) {
    auto scheme_end = uri.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0)
        return std::nullopt;
    UriParts parts;
    parts.scheme = std::string(uri.substr(0, scheme_end));
    auto authority_start = scheme_end + 3;
    auto rest_start = uri.find('/', authority_start);
    std::string_view authority =
        rest_start == std::string_view::npos
            ? uri.substr(authority_start)
            : uri.substr(authority_start, rest_start - authority_start);
    if (authority.empty())
        return std::nullopt;
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        parts.host = std::string(authority.substr(0, colon));
        parts.port = std::string(authority.substr(colon + 1));
    } else {
        parts.host = std::string(authority);
    }
    if (parts.host.empty())
        return std::nullopt;
    if (rest_start != std::string_view::npos)
        parts.rest = std::string(uri.substr(rest_start));
    return parts;
}

bool is_default_port(const std::string& scheme, const std::string& port) {
    return (scheme == "http" && port == "80") ||
           (scheme == "https" && port == "443");
}

}  // namespace

const char* to_string(DpopError e) {
    switch (e) {
        case DpopError::MalformedProof: return "malformed_proof";
        case DpopError::WrongType: return "wrong_type";
        case DpopError::BadSignature: return "bad_signature";
        case DpopError::MethodMismatch: return "method_mismatch";
        case DpopError::UriMismatch: return "uri_mismatch";
        case DpopError::Replayed: return "replayed";
        case DpopError::Stale: return "stale";
    }
    return "unknown";
}

std::string normalize_uri(std::string_view uri) {
    auto parts = parse_uri(uri);
    if (!parts)
        return std::string(uri);
    std::string scheme = to_lower(parts->scheme);
    std::string out = scheme + "://" + to_lower(parts->host);
    if (!parts->port.empty() && !is_default_port(scheme, parts->port))
        out += ":" + parts->port;
    out += parts->rest.empty() ? std::string("/") : parts->rest;
    return out;
}

ReplayCache::Admission ReplayCache::admit(std::string_view jti, bool fresh,
                                          std::int64_t now) {
    std::lock_guard lock(mu_);
    std::erase_if(seen_, [now](const auto& e) { return e.second <= now; });
    if (seen_.contains(std::string(jti)))
        return Admission::Replayed;
    if (!fresh)
        return Admission::Stale;
    seen_.emplace(std::string(jti), now + ttl_);
    return Admission::Ok;
}

std::size_t ReplayCache::size() const {
    std::lock_guard lock(mu_);
    return seen_.size();
}

std::string build_proof(std::string_view method, std::string_view uri,
                        const jose::KeyPair& signer, std::int64_t now) {
    if (!parse_uri(uri))
        throw std::invalid_argument("DPoP htu must be an absolute URI: " +
                                    std::string(uri));
    jose::Json payload;
    payload["htm"] = to_upper(method);
    payload["htu"] = std::string(uri);
    payload["iat"] = now;
    payload["jti"] = "0x" + crypto::random_hex(16);
    jose::Json extra;
    extra["jwk"] = signer.pub.to_json();
    return jose::jws_sign(payload, kProofType, signer, extra);
}

Result<jose::PublicKeyJwk, DpopError> peek_jwk(std::string_view compact) {
    auto decoded = jose::jws_peek(compact);
    if (!decoded)
        return fail(DpopError::MalformedProof, decoded.error().detail);
    const jose::Json& header = decoded->header;
    if (header.value("typ", "") != kProofType)
        return fail(DpopError::WrongType, "typ is not dpop+jwt");
    if (!header.contains("jwk"))
        return fail(DpopError::MalformedProof, "header has no jwk");
    auto jwk = jose::PublicKeyJwk::from_json(header["jwk"]);
    if (!jwk)
        return fail(DpopError::MalformedProof, "header jwk is not a valid Ed25519 key");
    return *jwk;
}

Result<jose::PublicKeyJwk, DpopError> verify_proof(
    std::string_view compact, std::string_view expected_method,
    std::string_view expected_uri, ReplayCache& cache, std::int64_t now,
    const VerifyOptions& opts) {
    // 1. The verification key travels in the proof's own header.
    auto jwk = peek_jwk(compact);
    if (!jwk)
        return jwk;

    // 2. Signature under the embedded key.
    auto verified = jose::jws_verify(compact, *jwk);
    if (!verified) {
        if (verified.error().code == jose::JoseError::BadSignature)
            return fail(DpopError::BadSignature, verified.error().detail);
        return fail(DpopError::MalformedProof, verified.error().detail);
    }
    const jose::Json& payload = verified->payload;
    if (!payload.contains("htm") || !payload["htm"].is_string() ||
        !payload.contains("htu") || !payload["htu"].is_string() ||
        !payload.contains("iat") || !payload["iat"].is_number_integer() ||
        !payload.contains("jti") || !payload["jti"].is_string())
        return fail(DpopError::MalformedProof, "payload misses htm/htu/iat/jti");
    std::string jti = payload["jti"].get<std::string>();
    if (jti.size() < kMinJtiLength)
        return fail(DpopError::MalformedProof, "jti too short");

    // 3. The proof must be pinned to this exact request.
    if (to_upper(payload["htm"].get<std::string>()) !=
        to_upper(expected_method))
        return fail(DpopError::MethodMismatch, "htm does not match request");
    if (normalize_uri(payload["htu"].get<std::string>()) !=
        normalize_uri(expected_uri))
        return fail(DpopError::UriMismatch, "htu does not match request");

    // 4 + 5. Replay check, then freshness, atomically against the cache.
    std::int64_t iat = payload["iat"].get<std::int64_t>();
    bool fresh = iat >= now - opts.freshness_window && iat <= now + opts.skew;
    switch (cache.admit(jti, fresh, now)) {
        case ReplayCache::Admission::Replayed:
            return fail(DpopError::Replayed, "jti already presented");
        case ReplayCache::Admission::Stale:
            return fail(DpopError::Stale, "proof iat outside freshness window");
        case ReplayCache::Admission::Ok:
            break;
    }
    return *jwk;
}

}  // namespace vcauth::dpop
