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
 * Verifiable Credentials carried as JWT claims, and Verifiable
 * Presentations that bundle several of them under one holder
 * signature. Construction and parsing only — signature verification
 * policy lives with the resource server.
 */

#ifndef VCAUTH_VC_HPP
#define VCAUTH_VC_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"

namespace vcauth::vc {

inline constexpr std::string_view kW3cCredentialsContext =
    "https://www.w3.org/2018/credentials/v1";
inline constexpr std::string_view kVerifiableCredentialType =
    "VerifiableCredential";
inline constexpr std::string_view kRevocationStatusType =
    "RevocationList2020Status";

enum class VcError {
    EmptyCapabilities,
    InvalidValidity,
    CnfMismatch,
    EmptyTokenList,
    MalformedToken,
    NestedPresentation,
};

const char* to_string(VcError e);

enum class Right : char {
    Read = 'r',
    Write = 'w',
    Delete = 'd',
};

std::optional<Right> right_from_char(char c);

/// Subset of {r, w, d}; serialized in that canonical order.
struct Rights {
    bool read = false;
    bool write = false;
    bool del = false;

    bool contains(Right r) const;
    bool empty() const { return !read && !write && !del; }
    void add(Right r);

    friend bool operator==(const Rights&, const Rights&) = default;
};

/// A (path, rights) grant. Paths are relative to the tenant prefix:
/// no leading '/', never a ".." segment.
struct Capability {
    std::string path;
    Rights rights;

    /// Wire form {<path>: ["r","w","d"]}.
    jose::Json to_json() const;
    static std::optional<Capability> from_json(const jose::Json& j);

    friend bool operator==(const Capability&, const Capability&) = default;
};

/// Schema rules shared by credential parsing and table loading.
bool valid_capability_path(std::string_view path);

struct RevocationStatusRef {
    std::uint64_t index = 0;  // serialized as a decimal string
    std::string list_url;

    jose::Json to_json() const;
    static std::optional<RevocationStatusRef> from_json(const jose::Json& j);

    friend bool operator==(const RevocationStatusRef&,
                           const RevocationStatusRef&) = default;
};

struct VcObject {
    std::vector<std::string> context;  // first entry is the W3C context
    std::vector<std::string> type;     // contains "VerifiableCredential"
    std::optional<RevocationStatusRef> status;
    std::vector<Capability> capabilities;  // credentialSubject.capabilities

    jose::Json to_json() const;
    static std::optional<VcObject> from_json(const jose::Json& j);
};

/// The claims set an authorization server signs into an access token.
struct AccessTokenVc {
    std::string jti;
    std::string iss;
    std::int64_t iat = 0;
    std::int64_t exp = 0;
    jose::PublicKeyJwk cnf_jwk;
    VcObject vc;

    jose::Json to_claims() const;
    static std::optional<AccessTokenVc> from_claims(const jose::Json& claims);
};

/// The "well-known" credential shape a resource server accepts: a type
/// string plus a context URI, compared as opaque strings.
struct CredentialDefinition {
    std::string type;
    std::string context;

    static CredentialDefinition capabilities_v1();
    static std::optional<CredentialDefinition> from_json(const jose::Json& j);
};

enum class DefinitionCheck {
    Ok,
    MissingType,
    MissingContext,
    BadSubjectSchema,
};

const char* to_string(DefinitionCheck c);

DefinitionCheck validate_credential_definition(
    const VcObject& vc, const CredentialDefinition& definition);

/// Builds the claims set for a capability credential. When `jti` is
/// not supplied one is minted as "<issuer>/credentials/<n>" from a
/// per-issuer counter.
Result<AccessTokenVc, VcError> build_capability_vc(
    const std::string& issuer_url, const jose::PublicKeyJwk& subject_key,
    std::vector<Capability> capabilities, std::int64_t validity_seconds,
    RevocationStatusRef revocation_ref, std::int64_t now,
    const CredentialDefinition& definition =
        CredentialDefinition::capabilities_v1(),
    std::optional<std::string> jti = std::nullopt);

/// Signs the claims set; the signer must be the AS named in `iss`.
std::string encode_vc_jwt(const AccessTokenVc& token,
                          const jose::KeyPair& signer);

/// Combines access tokens into one holder-signed presentation. Every
/// member must be bound to the holder's key; the payload `iss` is the
/// sha-256 of the holder's canonical JWK.
Result<std::string, VcError> build_vp(const std::vector<std::string>& tokens,
                                      const jose::KeyPair& holder,
                                      std::int64_t now);

struct ParsedSingle {
    AccessTokenVc claims;
};

struct ParsedVp {
    std::string iss_hash_hex;
    std::int64_t iat = 0;
    std::vector<std::string> members;
};

using Parsed = std::variant<ParsedSingle, ParsedVp>;

/// Discriminates a presentation from a single token by the presence of
/// a `vp` claim (the outer wrapper wins if both appear). No signature
/// checks here.
Result<Parsed, VcError> parse_presentation(std::string_view compact);

}  // namespace vcauth::vc

#endif  // VCAUTH_VC_HPP
