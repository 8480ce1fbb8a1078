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

#include "vcauth/auth_server.hpp"

#include <fstream>
#include <sstream>

#include "vcauth/base64url.hpp"

namespace vcauth {

namespace {

std::optional<std::string> form_value(
    const std::map<std::string, std::string>& form, const std::string& key) {
    auto it = form.find(key);
    if (it == form.end())
        return std::nullopt;
    return it->second;
}

}  // namespace

void AccessTable::insert(const jose::PublicKeyJwk& key,
                         std::vector<vc::Capability> capabilities) {
    entries_[key.canonical()] = std::move(capabilities);
}

const std::vector<vc::Capability>* AccessTable::find(
    const jose::PublicKeyJwk& key) const {
    auto it = entries_.find(key.canonical());
    return it == entries_.end() ? nullptr : &it->second;
}

Result<AccessTable, SchemaError> load_access_table(const jose::Json& doc) {
    if (!doc.is_object() || !doc.contains("clients") ||
        !doc["clients"].is_array())
        return Err<SchemaError>{
            {"clients", "document must contain a clients array"}};
    AccessTable table;
    std::size_t i = 0;
    for (const auto& entry : doc["clients"]) {
        std::string where = "clients[" + std::to_string(i) + "]";
        if (!entry.is_object() || !entry.contains("key"))
            return Err<SchemaError>{{where, "entry must carry a key"}};
        auto key = jose::PublicKeyJwk::from_json(entry["key"]);
        if (!key)
            return Err<SchemaError>{
                {where + ".key", "not an Ed25519 JWK"}};
        if (!entry.contains("capabilities") ||
            !entry["capabilities"].is_array() ||
            entry["capabilities"].empty())
            return Err<SchemaError>{
                {where + ".capabilities", "must be a non-empty array"}};
        std::vector<vc::Capability> caps;
        std::size_t j = 0;
        for (const auto& cap_json : entry["capabilities"]) {
            auto cap = vc::Capability::from_json(cap_json);
            if (!cap)
                return Err<SchemaError>{
                    {where + ".capabilities[" + std::to_string(j) + "]",
                     "expected {<path>: [subset of r,w,d]}"}};
            caps.push_back(std::move(*cap));
            ++j;
        }
        table.insert(*key, std::move(caps));
        ++i;
    }
    return table;
}

AuthServer::AuthServer(jose::KeyPair key, AccessTable table,
                       AuthServerConfig config)
    : AuthServer(std::move(key),
                 std::map<std::string, AccessTable>{
                     {"default", std::move(table)}},
                 std::move(config)) {}

AuthServer::AuthServer(jose::KeyPair key,
                       std::map<std::string, AccessTable> tables,
                       AuthServerConfig config)
    : key_(std::move(key)),
      tables_(std::move(tables)),
      config_(std::move(config)),
      replay_cache_(config_.dpop_window + config_.skew),
      list_(*revocation::RevocationList::create(config_.list_bits)) {
    restore();
}

std::variant<TokenResponse, OAuthError> AuthServer::handle_token_request(
    std::string_view method, std::string_view uri,
    const std::map<std::string, std::string>& form, std::int64_t now) {
    auto grant_type = form_value(form, "grant_type");
    auto proof = form_value(form, "dpop");
    if (!grant_type || !proof)
        return OAuthError{"invalid_request", 400,
                          "grant_type and dpop are required"};
    if (*grant_type != "client_credentials")
        return OAuthError{"unsupported_grant_type", 400,
                          "only client_credentials is supported"};

    auto client_key = dpop::verify_proof(
        *proof, method, uri, replay_cache_, now,
        {.freshness_window = config_.dpop_window, .skew = config_.skew});
    if (!client_key)
        return OAuthError{"invalid_dpop_proof", 400,
                          std::string(dpop::to_string(client_key.error().code))};

    const AccessTable* table = nullptr;
    if (auto resource = form_value(form, "resource")) {
        auto it = tables_.find(*resource);
        if (it == tables_.end())
            return OAuthError{"invalid_request", 400,
                              "unknown resource: " + *resource};
        table = &it->second;
    } else if (tables_.size() == 1) {
        table = &tables_.begin()->second;
    } else {
        return OAuthError{"invalid_request", 400,
                          "resource field required with multiple tables"};
    }

    const auto* capabilities = table->find(*client_key);
    if (!capabilities)
        return OAuthError{"invalid_client", 401,
                          "client key is not registered"};

    std::lock_guard lock(mu_);
    if (next_index_ >= list_.length_bits())
        return OAuthError{"server_error", 500, "revocation list exhausted"};
    std::uint64_t index = next_index_++;
    std::string jti = config_.base_url + "/credentials/" +
                      std::to_string(next_credential_++);
    auto token = vc::build_capability_vc(
        config_.base_url, *client_key, *capabilities, config_.token_lifetime,
        vc::RevocationStatusRef{index, revocation_list_url()}, now,
        config_.definition, jti);
    if (!token)
        return OAuthError{"server_error", 500,
                          std::string(vc::to_string(token.error().code))};
    std::string access_token = vc::encode_vc_jwt(*token, key_);
    records_[jti] =
        IssuedTokenRecord{jti, index, *client_key, token->exp};
    persist_locked();
    return TokenResponse{std::move(access_token), "DPoP",
                         config_.token_lifetime};
}

std::variant<jose::Json, OAuthError> AuthServer::handle_introspection(
    const std::map<std::string, std::string>& form, std::int64_t now) {
    auto token = form_value(form, "token");
    if (!token)
        return OAuthError{"invalid_request", 400, "token field is required"};

    jose::Json inactive;
    inactive["active"] = false;

    // Unknown, malformed, foreign, expired, and revoked tokens all look
    // the same from the outside.
    auto verified = jose::jws_verify(*token, key_.pub);
    if (!verified)
        return inactive;
    auto claims = vc::AccessTokenVc::from_claims(verified->payload);
    if (!claims || claims->iss != config_.base_url)
        return inactive;

    std::lock_guard lock(mu_);
    auto it = records_.find(claims->jti);
    if (it == records_.end())
        return inactive;
    const IssuedTokenRecord& record = it->second;
    if (now > record.exp + config_.skew)
        return inactive;
    auto revoked = list_.is_revoked(record.revocation_index);
    if (!revoked.ok() || *revoked)
        return inactive;

    jose::Json active;
    active["active"] = true;
    active["iss"] = config_.base_url;
    active["exp"] = record.exp;
    active["cnf"]["jwk"] = record.subject.to_json();
    return active;
}

Result<Ok, AsError> AuthServer::revoke_token(std::string_view jti) {
    std::lock_guard lock(mu_);
    auto it = records_.find(jti);
    if (it == records_.end())
        return fail(AsError::NotFound, "no such jti");
    auto res = list_.revoke(it->second.revocation_index);
    if (!res)
        return fail(AsError::NotFound, "revocation index out of range");
    persist_locked();
    return Ok{};
}

std::string AuthServer::revocation_list_credential(std::int64_t now) {
    std::lock_guard lock(mu_);
    return revocation::encode_list_credential(list_, config_.base_url, key_,
                                              now);
}

std::optional<IssuedTokenRecord> AuthServer::find_record(
    std::string_view jti) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(jti);
    if (it == records_.end())
        return std::nullopt;
    return it->second;
}

bool AuthServer::index_revoked(std::uint64_t index) const {
    std::lock_guard lock(mu_);
    auto res = list_.is_revoked(index);
    return res.ok() && *res;
}

void AuthServer::persist_locked() {
    if (!config_.persist_path)
        return;
    jose::Json state;
    state["next_credential"] = next_credential_;
    state["next_index"] = next_index_;
    state["list"] = base64url::encode(list_.bytes());
    jose::Json records = jose::Json::array();
    for (const auto& [jti, record] : records_) {
        jose::Json r;
        r["jti"] = record.jti;
        r["index"] = record.revocation_index;
        r["subject"] = record.subject.to_json();
        r["exp"] = record.exp;
        records.push_back(std::move(r));
    }
    state["records"] = std::move(records);
    std::ofstream out(*config_.persist_path, std::ios::trunc);
    out << state.dump();
}

void AuthServer::restore() {
    if (!config_.persist_path)
        return;
    std::ifstream in(*config_.persist_path);
    if (!in)
        return;
    std::stringstream buf;
    buf << in.rdbuf();
    jose::Json state = jose::Json::parse(buf.str(), nullptr, false);
    if (state.is_discarded() || !state.is_object())
        return;
    next_credential_ = state.value("next_credential", std::uint64_t{1});
    next_index_ = state.value("next_index", std::uint64_t{0});
    if (state.contains("list") && state["list"].is_string()) {
        auto bytes = base64url::decode(state["list"].get<std::string>());
        if (bytes && bytes->size() * 8 == config_.list_bits) {
            if (auto list = revocation::RevocationList::from_bytes(*bytes))
                list_ = std::move(*list);
        }
    }
    if (state.contains("records") && state["records"].is_array()) {
        for (const auto& r : state["records"]) {
            if (!r.is_object() || !r.contains("subject") || !r.contains("jti"))
                continue;
            auto subject = jose::PublicKeyJwk::from_json(r["subject"]);
            if (!subject)
                continue;
            IssuedTokenRecord record;
            record.jti = r["jti"].get<std::string>();
            record.revocation_index = r.value("index", std::uint64_t{0});
            record.subject = *subject;
            record.exp = r.value("exp", std::int64_t{0});
            records_[record.jti] = std::move(record);
        }
    }
}

}  // namespace vcauth
