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

#include "vcauth/vc.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <mutex>

namespace vcauth::vc {

namespace {

bool has_string_in(const std::vector<std::string>& haystack,
                   std::string_view needle) {
    return std::find(haystack.begin(), haystack.end(), needle) !=
           haystack.end();
}

std::optional<std::vector<std::string>> string_array(const jose::Json& j) {
    if (!j.is_array())
        return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string())
            return std::nullopt;
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::optional<std::uint64_t> parse_decimal(std::string_view s) {
    if (s.empty() || s.size() > 19)
        return std::nullopt;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return value;
}

// Per-issuer credential counters backing default jti assignment.
std::string next_jti(const std::string& issuer) {
    static std::mutex mu;
    static std::map<std::string, std::uint64_t> counters;
    std::lock_guard lock(mu);
    return issuer + "/credentials/" + std::to_string(++counters[issuer]);
}

}  // namespace

const char* to_string(VcError e) {
    switch (e) {
        case VcError::EmptyCapabilities: return "empty_capabilities";
        case VcError::InvalidValidity: return "invalid_validity";
        case VcError::CnfMismatch: return "cnf_mismatch";
        case VcError::EmptyTokenList: return "empty_token_list";
        case VcError::MalformedToken: return "malformed_token";
        case VcError::NestedPresentation: return "nested_presentation";
    }
    return "unknown";
}

const char* to_string(DefinitionCheck c) {
    switch (c) {
        case DefinitionCheck::Ok: return "ok";
        case DefinitionCheck::MissingType: return "missing_type";
        case DefinitionCheck::MissingContext: return "missing_context";
        case DefinitionCheck::BadSubjectSchema: return "bad_subject_schema";
    }
    return "unknown";
}

std::optional<Right> right_from_char(char c) {
    switch (c) {
        case 'r': return Right::Read;
        case 'w': return Right::Write;
        case 'd': return Right::Delete;
        default: return std::nullopt;
    }
}

bool Rights::contains(Right r) const {
    switch (r) {
        case Right::Read: return read;
        case Right::Write: return write;
        case Right::Delete: return del;
    }
    return false;
}

void Rights::add(Right r) {
    switch (r) {
        case Right::Read: read = true; break;
        case Right::Write: write = true; break;
        case Right::Delete: del = true; break;
    }
}

bool valid_capability_path(std::string_view path) {
    if (!path.empty() && path.front() == '/')
        return false;
    // Reject ".." anywhere in the segment list.
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos)
            end = path.size();
        if (path.substr(start, end - start) == "..")
            return false;
        start = end + 1;
    }
    return true;
}

jose::Json Capability::to_json() const {
    jose::Json arr = jose::Json::array();
    if (rights.read) arr.push_back("r");
    if (rights.write) arr.push_back("w");
    if (rights.del) arr.push_back("d");
    jose::Json j;
    j[path] = std::move(arr);
    return j;
}

std::optional<Capability> Capability::from_json(const jose::Json& j) {
    if (!j.is_object() || j.size() != 1)
        return std::nullopt;
    Capability cap;
    auto it = j.begin();
    cap.path = it.key();
    if (!valid_capability_path(cap.path))
        return std::nullopt;
    auto rights = string_array(it.value());
    if (!rights || rights->empty())
        return std::nullopt;
    for (const auto& r : *rights) {
        if (r.size() != 1)
            return std::nullopt;
        auto right = right_from_char(r[0]);
        if (!right)
            return std::nullopt;
        cap.rights.add(*right);
    }
    return cap;
}

jose::Json RevocationStatusRef::to_json() const {
    jose::Json j;
    j["type"] = std::string(kRevocationStatusType);
    j["revocationListIndex"] = std::to_string(index);
    j["revocationListCredential"] = list_url;
    return j;
}

std::optional<RevocationStatusRef> RevocationStatusRef::from_json(
    const jose::Json& j) {
    if (!j.is_object())
        return std::nullopt;
    if (j.value("type", "") != kRevocationStatusType)
        return std::nullopt;
    if (!j.contains("revocationListIndex") ||
        !j["revocationListIndex"].is_string())
        return std::nullopt;
    auto index = parse_decimal(j["revocationListIndex"].get<std::string>());
    if (!index)
        return std::nullopt;
    if (!j.contains("revocationListCredential") ||
        !j["revocationListCredential"].is_string())
        return std::nullopt;
    RevocationStatusRef ref;
    ref.index = *index;
    ref.list_url = j["revocationListCredential"].get<std::string>();
    return ref;
}

jose::Json VcObject::to_json() const {
    jose::Json j;
    j["@context"] = context;
    j["type"] = type;
    if (status)
        j["credentialStatus"] = status->to_json();
    jose::Json caps = jose::Json::array();
    for (const auto& cap : capabilities)
        caps.push_back(cap.to_json());
    j["credentialSubject"]["capabilities"] = std::move(caps);
    return j;
}

std::optional<VcObject> VcObject::from_json(const jose::Json& j) {
    if (!j.is_object())
        return std::nullopt;
    VcObject out;
    if (!j.contains("@context"))
        return std::nullopt;
    auto ctx = string_array(j["@context"]);
    if (!ctx || ctx->empty())
        return std::nullopt;
    out.context = std::move(*ctx);
    if (!j.contains("type"))
        return std::nullopt;
    auto types = string_array(j["type"]);
    if (!types || types->size() < 2 ||
        !has_string_in(*types, kVerifiableCredentialType))
        return std::nullopt;
    out.type = std::move(*types);
    if (j.contains("credentialStatus")) {
        auto status = RevocationStatusRef::from_json(j["credentialStatus"]);
        if (!status)
            return std::nullopt;
        out.status = std::move(*status);
    }
    if (!j.contains("credentialSubject") ||
        !j["credentialSubject"].is_object() ||
        !j["credentialSubject"].contains("capabilities") ||
        !j["credentialSubject"]["capabilities"].is_array())
        return std::nullopt;
    for (const auto& item : j["credentialSubject"]["capabilities"]) {
        auto cap = Capability::from_json(item);
        if (!cap)
            return std::nullopt;
        out.capabilities.push_back(std::move(*cap));
    }
    if (out.capabilities.empty())
        return std::nullopt;
    return out;
}

jose::Json AccessTokenVc::to_claims() const {
    jose::Json j;
    j["jti"] = jti;
    j["iss"] = iss;
    j["iat"] = iat;
    j["exp"] = exp;
    j["cnf"]["jwk"] = cnf_jwk.to_json();
    j["vc"] = vc.to_json();
    return j;
}

std::optional<AccessTokenVc> AccessTokenVc::from_claims(
    const jose::Json& claims) {
    if (!claims.is_object())
        return std::nullopt;
    if (claims.contains("vp"))
        return std::nullopt;  // presentations never parse as single tokens
    AccessTokenVc out;
    if (!claims.contains("jti") || !claims["jti"].is_string() ||
        !claims.contains("iss") || !claims["iss"].is_string() ||
        !claims.contains("iat") || !claims["iat"].is_number_integer() ||
        !claims.contains("exp") || !claims["exp"].is_number_integer())
        return std::nullopt;
    out.jti = claims["jti"].get<std::string>();
    out.iss = claims["iss"].get<std::string>();
    out.iat = claims["iat"].get<std::int64_t>();
    out.exp = claims["exp"].get<std::int64_t>();
    if (out.exp <= out.iat)
        return std::nullopt;
    if (!claims.contains("cnf") || !claims["cnf"].is_object() ||
        !claims["cnf"].contains("jwk"))
        return std::nullopt;
    auto jwk = jose::PublicKeyJwk::from_json(claims["cnf"]["jwk"]);
    if (!jwk)
        return std::nullopt;
    out.cnf_jwk = *jwk;
    if (!claims.contains("vc"))
        return std::nullopt;
    auto vc_obj = VcObject::from_json(claims["vc"]);
    if (!vc_obj)
        return std::nullopt;
    out.vc = std::move(*vc_obj);
    return out;
}

CredentialDefinition CredentialDefinition::capabilities_v1() {
    return CredentialDefinition{
        "capabilities", "https://mm.aueb.gr/contexts/capabilities/v1"};
}

std::optional<CredentialDefinition> CredentialDefinition::from_json(
    const jose::Json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string() ||
        !j.contains("context") || !j["context"].is_string())
        return std::nullopt;
    return CredentialDefinition{j["type"].get<std::string>(),
                                j["context"].get<std::string>()};
}

DefinitionCheck validate_credential_definition(
    const VcObject& vc, const CredentialDefinition& definition) {
    if (!has_string_in(vc.type, kVerifiableCredentialType) ||
        !has_string_in(vc.type, definition.type))
        return DefinitionCheck::MissingType;
    if (!has_string_in(vc.context, definition.context))
        return DefinitionCheck::MissingContext;
    if (vc.capabilities.empty())
        return DefinitionCheck::BadSubjectSchema;
    for (const auto& cap : vc.capabilities) {
        if (cap.rights.empty() || !valid_capability_path(cap.path))
            return DefinitionCheck::BadSubjectSchema;
    }
    return DefinitionCheck::Ok;
}

Result<AccessTokenVc, VcError> build_capability_vc(
    const std::string& issuer_url, const jose::PublicKeyJwk& subject_key,
    std::vector<Capability> capabilities, std::int64_t validity_seconds,
    RevocationStatusRef revocation_ref, std::int64_t now,
    const CredentialDefinition& definition, std::optional<std::string> jti) {
    if (capabilities.empty())
        return fail(VcError::EmptyCapabilities);
    if (validity_seconds <= 0)
        return fail(VcError::InvalidValidity, "exp must exceed iat");
    for (const auto& cap : capabilities) {
        if (cap.rights.empty())
            return fail(VcError::EmptyCapabilities,
                        "capability with no rights: " + cap.path);
    }
    AccessTokenVc token;
    token.jti = jti ? std::move(*jti) : next_jti(issuer_url);
    token.iss = issuer_url;
    token.iat = now;
    token.exp = now + validity_seconds;
    token.cnf_jwk = subject_key;
    token.vc.context = {std::string(kW3cCredentialsContext),
                        definition.context};
    token.vc.type = {std::string(kVerifiableCredentialType), definition.type};
    token.vc.status = std::move(revocation_ref);
    token.vc.capabilities = std::move(capabilities);
    return token;
}

std::string encode_vc_jwt(const AccessTokenVc& token,
                          const jose::KeyPair& signer) {
    return jose::jws_sign(token.to_claims(), "jwt", signer);
}

Result<std::string, VcError> build_vp(const std::vector<std::string>& tokens,
                                      const jose::KeyPair& holder,
                                      std::int64_t now) {
    if (tokens.empty())
        return fail(VcError::EmptyTokenList);
    for (const auto& token : tokens) {
        auto decoded = jose::jws_peek(token);
        if (!decoded)
            return fail(VcError::MalformedToken, decoded.error().detail);
        auto claims = AccessTokenVc::from_claims(decoded->payload);
        if (!claims) {
            if (decoded->payload.contains("vp"))
                return fail(VcError::NestedPresentation,
                            "presentations cannot nest");
            return fail(VcError::MalformedToken, "member is not an access token");
        }
        if (!(claims->cnf_jwk == holder.pub))
            return fail(VcError::CnfMismatch,
                        "member token is bound to a different key");
    }
    jose::Json payload;
    payload["iss"] = jose::jwk_sha256_hex(holder.pub);
    payload["iat"] = now;
    payload["vp"] = tokens;
    return jose::jws_sign(payload, "jwt", holder);
}

Result<Parsed, VcError> parse_presentation(std::string_view compact) {
    auto decoded = jose::jws_peek(compact);
    if (!decoded)
        return fail(VcError::MalformedToken, decoded.error().detail);
    const jose::Json& payload = decoded->payload;
    if (payload.contains("vp")) {
        ParsedVp vp;
        if (!payload.contains("iss") || !payload["iss"].is_string())
            return fail(VcError::MalformedToken, "presentation has no iss");
        vp.iss_hash_hex = payload["iss"].get<std::string>();
        if (!payload.contains("iat") || !payload["iat"].is_number_integer())
            return fail(VcError::MalformedToken, "presentation has no iat");
        vp.iat = payload["iat"].get<std::int64_t>();
        auto members = string_array(payload["vp"]);
        if (!members || members->empty())
            return fail(VcError::MalformedToken,
                        "vp must be a non-empty array of tokens");
        vp.members = std::move(*members);
        return Parsed{std::move(vp)};
    }
    auto claims = AccessTokenVc::from_claims(payload);
    if (!claims)
        return fail(VcError::MalformedToken, "not a capability access token");
    return Parsed{ParsedSingle{std::move(*claims)}};
}

}  // namespace vcauth::vc
