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
 * Multi-tenant file store. A resource table maps path prefixes to the
 * AS responsible for them; requests carry a capability access token
 * (or presentation) plus a DPoP proof, and are allowed only when a
 * verified capability covers the requested operation on the requested
 * path.
 */

#ifndef VCAUTH_RESOURCE_SERVER_HPP
#define VCAUTH_RESOURCE_SERVER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vcauth/dpop.hpp"
#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"
#include "vcauth/revocation.hpp"
#include "vcauth/vc.hpp"

namespace vcauth {

enum class RsError {
    UnknownResource,
    MalformedToken,
    IssuerMismatch,
    BadTokenSignature,
    CnfMismatch,
    BadProof,
    Expired,
    Revoked,
    RevocationUnavailable,
    UnsupportedCredential,
    MixedCnf,
    BadVpSignature,
    VpIssuerMismatch,
    InsufficientCapabilities,
    InvalidPath,
    FileNotFound,
};

const char* to_string(RsError e);

struct ResourceTableEntry {
    std::string prefix;  // normalized absolute path
    std::string as_url;
    jose::PublicKeyJwk as_key;
    std::optional<std::string> introspection_url;
    bool use_introspection = false;
    // Revocation lists may live anywhere the VC points, but only on
    // these URLs. Defaults to the AS's own list endpoint.
    std::vector<std::string> revocation_allowlist;
};

class ResourceTable {
public:
    void add(ResourceTableEntry entry);

    /// Longest-prefix match on a normalized path.
    const ResourceTableEntry* resolve(std::string_view path) const;

    /// Entry whose AS issued `iss`, for presentation members.
    const ResourceTableEntry* find_by_issuer(std::string_view as_url) const;

    std::size_t size() const { return entries_.size(); }
    const std::vector<ResourceTableEntry>& entries() const { return entries_; }

private:
    std::vector<ResourceTableEntry> entries_;
};

struct RsSchemaError {
    std::string path;
    std::string message;
};

Result<ResourceTable, RsSchemaError> load_resource_table(const jose::Json& doc);

/// Percent-decodes once, collapses duplicate slashes, drops trailing
/// slashes, and rejects any ".." segment or relative path.
std::optional<std::string> normalize_path(std::string_view raw);

/// GET -> r, PUT/POST -> w, DELETE -> d.
std::optional<vc::Right> operation_for_method(std::string_view method);

/// Pure capability decision: allow iff some capability's
/// tenant-relative path is a segment-wise prefix of `path` and its
/// rights include `operation`.
bool evaluate_capabilities(const std::vector<vc::Capability>& capabilities,
                           vc::Right operation, std::string_view path,
                           std::string_view tenant_prefix);

/// Transport used to reach AS endpoints (revocation lists,
/// introspection). Swappable so the whole pipeline runs in-process.
struct Fetcher {
    std::function<Result<std::string, std::string>(const std::string& url)>
        get;
    std::function<Result<std::string, std::string>(
        const std::string& url,
        const std::map<std::string, std::string>& form)>
        post_form;
};

struct ResourceServerConfig {
    std::string base_url;      // scheme://host[:port], no trailing slash
    std::string storage_root;  // directory the path space maps into
    std::int64_t dpop_window = 60;
    std::int64_t skew = 5;
    std::int64_t revocation_max_age = 300;  // seconds a cached list stays fresh
    bool fail_open_on_revocation_error = false;
    vc::CredentialDefinition definition =
        vc::CredentialDefinition::capabilities_v1();
    std::function<void(const std::string&)> warn_log;
};

struct ResourceRequest {
    std::string method;
    std::string path;           // raw request path, also used for htu
    std::string authorization;  // Authorization header value
    std::string dpop;           // DPoP header value
    std::string body;
};

struct ResourceResponse {
    int status = 0;
    std::string body;
    std::string content_type = "application/octet-stream";
    std::string www_authenticate;  // set on 401
};

/// A verified capability together with the AS that vouched for it;
/// grants only count toward paths governed by that same AS.
struct VerifiedCapability {
    std::string issuer;
    vc::Capability capability;
};

class ResourceServer {
public:
    ResourceServer(ResourceTable table, ResourceServerConfig config,
                   Fetcher fetcher);

    const ResourceTable& table() const { return table_; }
    const ResourceServerConfig& config() const { return config_; }

    /// Full pipeline: resolve, verify, evaluate, perform.
    ResourceResponse handle(const ResourceRequest& request, std::int64_t now);

    /// Single-token verification. In order: token signature under the
    /// entry's AS key with iss pinned to the entry's AS URL; byte-wise
    /// canonical comparison of cnf.jwk against the proof's header key;
    /// full DPoP verification; then expiry and revocation status.
    /// Exactly two signature verifications on the happy path.
    Result<std::vector<vc::Capability>, RsError> verify_access_token(
        const std::string& token, const std::string& proof,
        const std::string& method, const std::string& htu,
        const ResourceTableEntry& entry, std::int64_t now);

    /// Presentation verification: every member token is checked
    /// against its own issuer's table entry, the holder signature and
    /// iss digest are checked with the shared confirmation key, and
    /// the single DPoP proof once — n + 2 verifications for n members.
    Result<std::vector<VerifiedCapability>, RsError> verify_vp_token(
        const std::string& vp, const std::string& proof,
        const std::string& method, const std::string& htu, std::int64_t now);

    /// Drops any cached revocation lists (tests use this to force a
    /// fresh fetch).
    void flush_revocation_cache();

private:
    struct CachedList {
        revocation::RevocationList list;
        std::int64_t fetched_at = 0;
    };

    Result<vc::AccessTokenVc, RsError> verify_token_signature(
        const std::string& token, const ResourceTableEntry& entry);

    Result<Ok, RsError> check_token_validity(const std::string& raw_token,
                                             const vc::AccessTokenVc& claims,
                                             const ResourceTableEntry& entry,
                                             std::int64_t now);

    Result<vc::AccessTokenVc, RsError> verify_token_claims(
        const std::string& token, const ResourceTableEntry& entry,
        std::int64_t now);

    Result<Ok, RsError> check_revocation(const std::string& raw_token,
                                         const vc::AccessTokenVc& claims,
                                         const ResourceTableEntry& entry,
                                         std::int64_t now);

    Result<Ok, RsError> check_list_status(const vc::RevocationStatusRef& ref,
                                          const ResourceTableEntry& entry,
                                          std::int64_t now);

    ResourceResponse perform(vc::Right op, const std::string& path,
                             const std::string& body);

    std::string storage_path(std::string_view normalized) const;
    std::mutex& path_lock(const std::string& path);
    void warn(const std::string& message) const;

    ResourceTable table_;
    ResourceServerConfig config_;
    Fetcher fetcher_;
    dpop::ReplayCache replay_cache_;

    std::mutex cache_mu_;
    std::map<std::string, CachedList> list_cache_;  // by list URL

    std::mutex locks_mu_;
    std::map<std::string, std::unique_ptr<std::mutex>> path_locks_;
};

}  // namespace vcauth

#endif  // VCAUTH_RESOURCE_SERVER_HPP
