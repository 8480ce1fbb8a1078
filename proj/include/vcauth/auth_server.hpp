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
 * Per-organization authorization server: holds the access table, runs
 * the client-credentials grant (DPoP-authenticated, no client
 * secrets), and serves token introspection plus the signed revocation
 * list.
 */

#ifndef VCAUTH_AUTH_SERVER_HPP
#define VCAUTH_AUTH_SERVER_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vcauth/dpop.hpp"
#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"
#include "vcauth/revocation.hpp"
#include "vcauth/vc.hpp"

namespace vcauth {

/// Maps canonical client JWKs to the capabilities an organization has
/// granted them. One table per resource server.
class AccessTable {
public:
    void insert(const jose::PublicKeyJwk& key,
                std::vector<vc::Capability> capabilities);

    const std::vector<vc::Capability>* find(
        const jose::PublicKeyJwk& key) const;

    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, std::vector<vc::Capability>> entries_;
};

struct SchemaError {
    std::string path;     // JSON pointer-ish location of the bad entry
    std::string message;
};

/// Loads {"clients": [{"key": <jwk>, "capabilities": [{<path>: [..]}]}]}.
/// Any malformed entry fails the whole load.
Result<AccessTable, SchemaError> load_access_table(const jose::Json& doc);

struct AuthServerConfig {
    std::string base_url;               // URL_AS; endpoints live under it
    std::int64_t token_lifetime = 864000;  // 10 days
    std::size_t list_bits = revocation::kDefaultLengthBits;
    std::int64_t dpop_window = 60;
    std::int64_t skew = 5;
    vc::CredentialDefinition definition =
        vc::CredentialDefinition::capabilities_v1();
    std::optional<std::string> persist_path;  // JSON state file, flushed on change
};

struct TokenResponse {
    std::string access_token;
    std::string token_type = "DPoP";
    std::int64_t expires_in = 0;
};

/// OAuth-shaped error: {"error": code} body with the given status.
struct OAuthError {
    std::string error;
    int http_status = 400;
    std::string detail;
};

struct IssuedTokenRecord {
    std::string jti;
    std::uint64_t revocation_index = 0;
    jose::PublicKeyJwk subject;
    std::int64_t exp = 0;
};

enum class AsError {
    NotFound,
};

class AuthServer {
public:
    /// Single access table (the usual one-RS deployment).
    AuthServer(jose::KeyPair key, AccessTable table, AuthServerConfig config);

    /// Multiple tables, keyed by resource-server identifier. Requests
    /// select one with a `resource` form field; with exactly one table
    /// the field is optional.
    AuthServer(jose::KeyPair key,
               std::map<std::string, AccessTable> tables,
               AuthServerConfig config);

    const jose::PublicKeyJwk& public_key() const { return key_.pub; }
    const AuthServerConfig& config() const { return config_; }

    std::string token_endpoint() const { return config_.base_url + "/token"; }
    std::string introspection_endpoint() const {
        return config_.base_url + "/introspect";
    }
    std::string revocation_list_url() const {
        return config_.base_url + "/revocation-list";
    }

    /// The client-credentials grant. Expects form fields
    /// grant_type=client_credentials and dpop=<compact proof>; the
    /// proof must cover this endpoint's method and URI. Exactly one
    /// signature verification and one signature generation per
    /// successful issuance.
    std::variant<TokenResponse, OAuthError> handle_token_request(
        std::string_view method, std::string_view uri,
        const std::map<std::string, std::string>& form, std::int64_t now);

    /// {"active": true, iss, exp, cnf} for live tokens issued here;
    /// {"active": false} for everything else, with no reason leakage.
    std::variant<jose::Json, OAuthError> handle_introspection(
        const std::map<std::string, std::string>& form, std::int64_t now);

    Result<Ok, AsError> revoke_token(std::string_view jti);

    /// Signed list credential (application/jwt).
    std::string revocation_list_credential(std::int64_t now);

    std::optional<IssuedTokenRecord> find_record(std::string_view jti) const;
    bool index_revoked(std::uint64_t index) const;

private:
    void persist_locked();
    void restore();

    jose::KeyPair key_;
    std::map<std::string, AccessTable> tables_;
    AuthServerConfig config_;

    mutable std::mutex mu_;
    dpop::ReplayCache replay_cache_;
    revocation::RevocationList list_;
    std::map<std::string, IssuedTokenRecord, std::less<>> records_;
    std::uint64_t next_credential_ = 1;
    std::uint64_t next_index_ = 0;
};

}  // namespace vcauth

#endif  // VCAUTH_AUTH_SERVER_HPP
