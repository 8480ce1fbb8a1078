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

#include "vcauth/resource_server.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vcauth {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> segments_of(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos)
            end = path.size();
        if (end > start)
            out.push_back(path.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

bool segmentwise_prefix(std::string_view prefix, std::string_view path) {
    auto pre = segments_of(prefix);
    auto full = segments_of(path);
    if (pre.size() > full.size())
        return false;
    return std::equal(pre.begin(), pre.end(), full.begin());
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string scheme_reason(RsError code, const std::string& detail) {
    std::string reason = to_string(code);
    if (!detail.empty())
        reason += ": " + detail;
    return reason;
}

}  // namespace

const char* to_string(RsError e) {
    switch (e) {
        case RsError::UnknownResource: return "unknown_resource";
        case RsError::MalformedToken: return "malformed_token";
        case RsError::IssuerMismatch: return "issuer_mismatch";
        case RsError::BadTokenSignature: return "bad_token_signature";
        case RsError::CnfMismatch: return "cnf_mismatch";
        case RsError::BadProof: return "bad_proof";
        case RsError::Expired: return "expired";
        case RsError::Revoked: return "revoked";
        case RsError::RevocationUnavailable: return "revocation_unavailable";
        case RsError::UnsupportedCredential: return "unsupported_credential";
        case RsError::MixedCnf: return "mixed_cnf";
        case RsError::BadVpSignature: return "bad_vp_signature";
        case RsError::VpIssuerMismatch: return "vp_issuer_mismatch";
        case RsError::InsufficientCapabilities:
            return "insufficient_capabilities";
        case RsError::InvalidPath: return "invalid_path";
        case RsError::FileNotFound: return "file_not_found";
    }
    return "unknown";
}

void ResourceTable::add(ResourceTableEntry entry) {
    if (entry.revocation_allowlist.empty())
        entry.revocation_allowlist = {entry.as_url + "/revocation-list"};
    entries_.push_back(std::move(entry));
}

const ResourceTableEntry* ResourceTable::resolve(std::string_view path) const {
    const ResourceTableEntry* best = nullptr;
    for (const auto& entry : entries_) {
        if (!segmentwise_prefix(entry.prefix, path))
            continue;
        if (!best || entry.prefix.size() > best->prefix.size())
            best = &entry;
    }
    return best;
}

const ResourceTableEntry* ResourceTable::find_by_issuer(
    std::string_view as_url) const {
    for (const auto& entry : entries_) {
        if (entry.as_url == as_url)
            return &entry;
    }
    return nullptr;
}

Result<ResourceTable, RsSchemaError> load_resource_table(
    const jose::Json& doc) {
    if (!doc.is_object() || !doc.contains("entries") ||
        !doc["entries"].is_array())
        return Err<RsSchemaError>{
            {"entries", "document must contain an entries array"}};
    ResourceTable table;
    std::size_t i = 0;
    for (const auto& entry : doc["entries"]) {
        std::string where = "entries[" + std::to_string(i) + "]";
        if (!entry.is_object())
            return Err<RsSchemaError>{{where, "entry must be an object"}};
        ResourceTableEntry out;
        if (!entry.contains("prefix") || !entry["prefix"].is_string())
            return Err<RsSchemaError>{{where + ".prefix", "missing prefix"}};
        auto normalized = normalize_path(entry["prefix"].get<std::string>());
        if (!normalized)
            return Err<RsSchemaError>{
                {where + ".prefix", "prefix must be a normalized absolute path"}};
        out.prefix = *normalized;
        if (!entry.contains("as_url") || !entry["as_url"].is_string())
            return Err<RsSchemaError>{{where + ".as_url", "missing as_url"}};
        out.as_url = entry["as_url"].get<std::string>();
        if (!entry.contains("as_key"))
            return Err<RsSchemaError>{{where + ".as_key", "missing as_key"}};
        auto key = jose::PublicKeyJwk::from_json(entry["as_key"]);
        if (!key)
            return Err<RsSchemaError>{
                {where + ".as_key", "not an Ed25519 JWK"}};
        out.as_key = *key;
        if (entry.contains("introspection_url")) {
            if (!entry["introspection_url"].is_string())
                return Err<RsSchemaError>{
                    {where + ".introspection_url", "must be a string"}};
            out.introspection_url = entry["introspection_url"].get<std::string>();
        }
        out.use_introspection = entry.value("use_introspection", false);
        if (out.use_introspection && !out.introspection_url)
            return Err<RsSchemaError>{
                {where, "use_introspection requires introspection_url"}};
        if (entry.contains("revocation_allowlist")) {
            if (!entry["revocation_allowlist"].is_array())
                return Err<RsSchemaError>{
                    {where + ".revocation_allowlist", "must be an array"}};
            for (const auto& url : entry["revocation_allowlist"]) {
                if (!url.is_string())
                    return Err<RsSchemaError>{
                        {where + ".revocation_allowlist", "must hold strings"}};
                out.revocation_allowlist.push_back(url.get<std::string>());
            }
        }
        table.add(std::move(out));
        ++i;
    }
    return table;
}

std::optional<std::string> normalize_path(std::string_view raw) {
    if (raw.empty() || raw.front() != '/')
        return std::nullopt;
    // Percent-decode exactly once.
    std::string decoded;
    decoded.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '%') {
            if (i + 2 >= raw.size())
                return std::nullopt;
            int hi = hex_value(raw[i + 1]);
            int lo = hex_value(raw[i + 2]);
            if (hi < 0 || lo < 0)
                return std::nullopt;
            decoded.push_back(static_cast<char>((hi << 4) | lo));
            i += 2;
        } else {
            decoded.push_back(raw[i]);
        }
    }
    std::string out = "/";
    for (auto segment : segments_of(decoded)) {
        if (segment == "..")
            return std::nullopt;
        if (out.size() > 1)
            out.push_back('/');
        out.append(segment);
    }
    return out;
}

std::optional<vc::Right> operation_for_method(std::string_view method) {
    std::string upper(method);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (upper == "GET") return vc::Right::Read;
    if (upper == "PUT" || upper == "POST") return vc::Right::Write;
    if (upper == "DELETE") return vc::Right::Delete;
    return std::nullopt;
}

bool evaluate_capabilities(const std::vector<vc::Capability>& capabilities,
                           vc::Right operation, std::string_view path,
                           std::string_view tenant_prefix) {
    for (const auto& cap : capabilities) {
        if (!cap.rights.contains(operation))
            continue;
        std::string granted(tenant_prefix);
        if (!cap.path.empty()) {
            granted.push_back('/');
            granted.append(cap.path);
        }
        if (segmentwise_prefix(granted, path))
            return true;
    }
    return false;
}

ResourceServer::ResourceServer(ResourceTable table,
                               ResourceServerConfig config, Fetcher fetcher)
    : table_(std::move(table)),
      config_(std::move(config)),
      fetcher_(std::move(fetcher)),
      replay_cache_(config_.dpop_window + config_.skew) {}

void ResourceServer::warn(const std::string& message) const {
    if (config_.warn_log)
        config_.warn_log(message);
    else
        std::fprintf(stderr, "[resource-server] %s\n", message.c_str());
}

Result<vc::AccessTokenVc, RsError> ResourceServer::verify_token_signature(
    const std::string& token, const ResourceTableEntry& entry) {
    auto peeked = jose::jws_peek(token);
    if (!peeked)
        return fail(RsError::MalformedToken, peeked.error().detail);
    // iss is pinned to the entry's AS before any signature work; a
    // cross-tenant token never reaches the key of the wrong AS.
    if (peeked->payload.value("iss", "") != entry.as_url)
        return fail(RsError::IssuerMismatch,
                    "token iss is not the AS for this resource");
    auto verified = jose::jws_verify(token, entry.as_key);
    if (!verified)
        return fail(RsError::BadTokenSignature, verified.error().detail);
    auto claims = vc::AccessTokenVc::from_claims(verified->payload);
    if (!claims) {
        if (verified->payload.contains("vp"))
            return fail(RsError::MalformedToken,
                        "nested presentations are not accepted");
        return fail(RsError::MalformedToken, "not a capability access token");
    }
    return *claims;
}

Result<Ok, RsError> ResourceServer::check_token_validity(
    const std::string& raw_token, const vc::AccessTokenVc& claims,
    const ResourceTableEntry& entry, std::int64_t now) {
    auto check =
        vc::validate_credential_definition(claims.vc, config_.definition);
    if (check != vc::DefinitionCheck::Ok)
        return fail(RsError::UnsupportedCredential, vc::to_string(check));
    auto window =
        jose::check_time_window({claims.iat, claims.exp}, now, config_.skew);
    if (window != jose::TimeCheck::Ok)
        return fail(RsError::Expired, jose::to_string(window));
    return check_revocation(raw_token, claims, entry, now);
}

Result<vc::AccessTokenVc, RsError> ResourceServer::verify_token_claims(
    const std::string& token, const ResourceTableEntry& entry,
    std::int64_t now) {
    auto claims = verify_token_signature(token, entry);
    if (!claims)
        return claims;
    if (auto valid = check_token_validity(token, *claims, entry, now); !valid)
        return valid.error();
    return claims;
}

Result<Ok, RsError> ResourceServer::check_revocation(
    const std::string& raw_token, const vc::AccessTokenVc& claims,
    const ResourceTableEntry& entry, std::int64_t now) {
    if (entry.use_introspection && entry.introspection_url) {
        if (!fetcher_.post_form) {
            if (config_.fail_open_on_revocation_error) {
                warn("no transport for introspection, failing open");
                return Ok{};
            }
            return fail(RsError::RevocationUnavailable,
                        "no transport for introspection");
        }
        auto response = fetcher_.post_form(*entry.introspection_url,
                                           {{"token", raw_token}});
        if (!response) {
            if (config_.fail_open_on_revocation_error) {
                warn("introspection failed, failing open: " +
                     response.error().detail);
                return Ok{};
            }
            return fail(RsError::RevocationUnavailable,
                        response.error().detail);
        }
        jose::Json body = jose::Json::parse(*response, nullptr, false);
        if (body.is_discarded() || !body.is_object() ||
            !body.contains("active") || !body["active"].is_boolean())
            return fail(RsError::RevocationUnavailable,
                        "malformed introspection response");
        if (!body["active"].get<bool>())
            return fail(RsError::Revoked, "introspection reports inactive");
        return Ok{};
    }
    if (!claims.vc.status)
        return Ok{};  // no status mechanism; nothing to check
    return check_list_status(*claims.vc.status, entry, now);
}

Result<Ok, RsError> ResourceServer::check_list_status(
    const vc::RevocationStatusRef& ref, const ResourceTableEntry& entry,
    std::int64_t now) {
    bool allowed =
        std::find(entry.revocation_allowlist.begin(),
                  entry.revocation_allowlist.end(),
                  ref.list_url) != entry.revocation_allowlist.end();
    if (!allowed) {
        if (config_.fail_open_on_revocation_error) {
            warn("revocation list URL not allow-listed, failing open: " +
                 ref.list_url);
            return Ok{};
        }
        return fail(RsError::RevocationUnavailable,
                    "list URL not allow-listed: " + ref.list_url);
    }

    std::lock_guard lock(cache_mu_);
    auto it = list_cache_.find(ref.list_url);
    if (it == list_cache_.end() ||
        now - it->second.fetched_at > config_.revocation_max_age) {
        auto body = fetcher_.get
                        ? fetcher_.get(ref.list_url)
                        : Result<std::string, std::string>(
                              Err<std::string>{{}, "no transport configured"});
        if (!body) {
            if (config_.fail_open_on_revocation_error) {
                warn("revocation list fetch failed, failing open: " +
                     body.error().detail);
                if (it != list_cache_.end())
                    it->second.fetched_at = now;  // keep serving stale copy
                return Ok{};
            }
            return fail(RsError::RevocationUnavailable, body.error().detail);
        }
        auto decoded = revocation::decode_list_credential(*body, entry.as_key);
        if (!decoded) {
            if (config_.fail_open_on_revocation_error) {
                warn("revocation list rejected, failing open: " +
                     std::string(revocation::to_string(decoded.error().code)));
                return Ok{};
            }
            return fail(RsError::RevocationUnavailable,
                        revocation::to_string(decoded.error().code));
        }
        it = list_cache_
                 .insert_or_assign(ref.list_url,
                                   CachedList{std::move(decoded->list), now})
                 .first;
    }
    auto revoked = it->second.list.is_revoked(ref.index);
    if (!revoked)
        return fail(RsError::RevocationUnavailable,
                    "revocation index outside the list");
    if (*revoked)
        return fail(RsError::Revoked, "credential is revoked");
    return Ok{};
}

Result<std::vector<vc::Capability>, RsError>
ResourceServer::verify_access_token(const std::string& token,
                                    const std::string& proof,
                                    const std::string& method,
                                    const std::string& htu,
                                    const ResourceTableEntry& entry,
                                    std::int64_t now) {
    auto claims = verify_token_signature(token, entry);
    if (!claims)
        return claims.error();

    // The confirmation key must equal the proof's header key
    // byte-for-byte in canonical form before the proof itself runs.
    auto proof_key = dpop::peek_jwk(proof);
    if (!proof_key)
        return fail(RsError::BadProof, dpop::to_string(proof_key.error().code));
    if (claims->cnf_jwk.canonical() != proof_key->canonical())
        return fail(RsError::CnfMismatch,
                    "token cnf key differs from DPoP key");

    auto proven = dpop::verify_proof(
        proof, method, htu, replay_cache_, now,
        {.freshness_window = config_.dpop_window, .skew = config_.skew});
    if (!proven)
        return fail(RsError::BadProof, dpop::to_string(proven.error().code));

    if (auto valid = check_token_validity(token, *claims, entry, now); !valid)
        return valid.error();
    return claims->vc.capabilities;
}

Result<std::vector<VerifiedCapability>, RsError> ResourceServer::verify_vp_token(
    const std::string& vp, const std::string& proof,
    const std::string& method, const std::string& htu, std::int64_t now) {
    auto parsed = vc::parse_presentation(vp);
    if (!parsed)
        return fail(RsError::MalformedToken, parsed.error().detail);
    auto* presentation = std::get_if<vc::ParsedVp>(&*parsed);
    if (!presentation)
        return fail(RsError::MalformedToken, "not a presentation");

    // Every member must be bound to one and the same confirmation key.
    std::optional<jose::PublicKeyJwk> shared_cnf;
    std::vector<VerifiedCapability> out;
    for (const auto& member : presentation->members) {
        auto peeked = jose::jws_peek(member);
        if (!peeked)
            return fail(RsError::MalformedToken, peeked.error().detail);
        if (peeked->payload.contains("vp"))
            return fail(RsError::MalformedToken,
                        "nested presentations are not accepted");
        auto claims = vc::AccessTokenVc::from_claims(peeked->payload);
        if (!claims)
            return fail(RsError::MalformedToken,
                        "presentation member is not an access token");
        if (!shared_cnf) {
            shared_cnf = claims->cnf_jwk;
        } else if (!(claims->cnf_jwk == *shared_cnf)) {
            return fail(RsError::MixedCnf,
                        "members are bound to different keys");
        }
        const ResourceTableEntry* entry =
            table_.find_by_issuer(claims->iss);
        if (!entry)
            return fail(RsError::IssuerMismatch,
                        "no resource-table entry for issuer " + claims->iss);
        auto token_claims = verify_token_claims(member, *entry, now);
        if (!token_claims)
            return token_claims.error();
        for (const auto& cap : token_claims->vc.capabilities)
            out.push_back({token_claims->iss, cap});
    }

    // Holder signature over the wrapper, made with the shared key.
    auto outer = jose::jws_verify(vp, *shared_cnf);
    if (!outer)
        return fail(RsError::BadVpSignature, outer.error().detail);
    if (presentation->iss_hash_hex != jose::jwk_sha256_hex(*shared_cnf))
        return fail(RsError::VpIssuerMismatch,
                    "presentation iss is not the sha-256 of the holder key");

    // One DPoP proof covers the whole presentation.
    auto proof_key = dpop::peek_jwk(proof);
    if (!proof_key)
        return fail(RsError::BadProof, dpop::to_string(proof_key.error().code));
    if (proof_key->canonical() != shared_cnf->canonical())
        return fail(RsError::CnfMismatch,
                    "presentation cnf key differs from DPoP key");
    auto proven = dpop::verify_proof(
        proof, method, htu, replay_cache_, now,
        {.freshness_window = config_.dpop_window, .skew = config_.skew});
    if (!proven)
        return fail(RsError::BadProof, dpop::to_string(proven.error().code));
    return out;
}

ResourceResponse ResourceServer::handle(const ResourceRequest& request,
                                        std::int64_t now) {
    auto deny = [](int status, RsError code, const std::string& detail) {
        ResourceResponse resp;
        resp.status = status;
        jose::Json body;
        body["error"] = to_string(code);
        if (!detail.empty())
            body["error_description"] = detail;
        resp.body = body.dump();
        resp.content_type = "application/json";
        if (status == 401)
            resp.www_authenticate =
                "DPoP error=\"" + scheme_reason(code, detail) + "\"";
        return resp;
    };

    auto operation = operation_for_method(request.method);
    if (!operation) {
        ResourceResponse resp;
        resp.status = 405;
        resp.body = "method not allowed";
        resp.content_type = "text/plain";
        return resp;
    }

    auto normalized = normalize_path(request.path);
    if (!normalized)
        return deny(400, RsError::InvalidPath,
                    "path must be absolute without .. segments");

    const ResourceTableEntry* entry = table_.resolve(*normalized);
    if (!entry)
        return deny(404, RsError::UnknownResource,
                    "no authorization authority for this path");

    // Authorization: DPoP <token>, plus the proof in its own header.
    constexpr std::string_view kScheme = "DPoP ";
    if (request.authorization.size() <= kScheme.size() ||
        request.authorization.compare(0, kScheme.size(), kScheme) != 0)
        return deny(401, RsError::MalformedToken,
                    "Authorization header must be 'DPoP <token>'");
    std::string token = request.authorization.substr(kScheme.size());
    if (request.dpop.empty())
        return deny(401, RsError::BadProof, "missing DPoP header");

    std::string htu = config_.base_url + request.path;

    auto parsed = vc::parse_presentation(token);
    if (!parsed)
        return deny(401, RsError::MalformedToken, parsed.error().detail);

    std::vector<vc::Capability> relevant;
    if (std::holds_alternative<vc::ParsedVp>(*parsed)) {
        auto verified =
            verify_vp_token(token, request.dpop, request.method, htu, now);
        if (!verified)
            return deny(401, verified.error().code, verified.error().detail);
        // Only grants vouched for by this path's own AS count here.
        for (const auto& vcap : *verified) {
            if (vcap.issuer == entry->as_url)
                relevant.push_back(vcap.capability);
        }
    } else {
        auto verified = verify_access_token(token, request.dpop,
                                            request.method, htu, *entry, now);
        if (!verified)
            return deny(401, verified.error().code, verified.error().detail);
        relevant = *verified;
    }

    if (!evaluate_capabilities(relevant, *operation, *normalized,
                               entry->prefix))
        return deny(403, RsError::InsufficientCapabilities,
                    "capabilities do not cover this operation");

    return perform(*operation, *normalized, request.body);
}

ResourceResponse ResourceServer::perform(vc::Right op, const std::string& path,
                                         const std::string& body) {
    std::string target = storage_path(path);
    std::lock_guard lock(path_lock(target));
    ResourceResponse resp;
    std::error_code ec;
    switch (op) {
        case vc::Right::Read: {
            std::ifstream in(target, std::ios::binary);
            if (!in) {
                resp.status = 404;
                resp.body = "file not found";
                resp.content_type = "text/plain";
                return resp;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            resp.status = 200;
            resp.body = buf.str();
            return resp;
        }
        case vc::Right::Write: {
            fs::path p(target);
            fs::create_directories(p.parent_path(), ec);
            std::ofstream out(target, std::ios::binary | std::ios::trunc);
            if (!out) {
                resp.status = 500;
                resp.body = "write failed";
                resp.content_type = "text/plain";
                return resp;
            }
            out << body;
            resp.status = 200;
            resp.body = "";
            return resp;
        }
        case vc::Right::Delete: {
            if (!fs::remove(target, ec) || ec) {
                resp.status = 404;
                resp.body = "file not found";
                resp.content_type = "text/plain";
                return resp;
            }
            resp.status = 200;
            return resp;
        }
    }
    resp.status = 500;
    return resp;
}

std::string ResourceServer::storage_path(std::string_view normalized) const {
    return config_.storage_root + std::string(normalized);
}

std::mutex& ResourceServer::path_lock(const std::string& path) {
    std::lock_guard lock(locks_mu_);
    auto& slot = path_locks_[path];
    if (!slot)
        slot = std::make_unique<std::mutex>();
    return *slot;
}

void ResourceServer::flush_revocation_cache() {
    std::lock_guard lock(cache_mu_);
    list_cache_.clear();
}

}  // namespace vcauth
