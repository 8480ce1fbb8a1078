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

#include "vcauth/client.hpp"

#include <sys/file.h>
#include <sys/stat.h>
#include <fcntl.h>
#include <unistd.h>

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vcauth/dpop.hpp"
#include "vcauth/vc.hpp"

namespace vcauth {

namespace {

namespace fs = std::filesystem;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string strip_whitespace(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' ||
                          s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && (s[start] == ' ' || s[start] == '\t'))
        ++start;
    return s.substr(start);
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

/// flock-based guard so concurrent CLI invocations do not interleave
/// cache writes.
class CacheLock {
public:
    explicit CacheLock(const std::string& dir) {
        fs::create_directories(dir);
        fd_ = ::open((dir + "/.lock").c_str(), O_CREAT | O_RDWR, 0600);
        if (fd_ >= 0)
            ::flock(fd_, LOCK_EX);
    }
    ~CacheLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

}  // namespace

const char* to_string(ClientError e) {
    switch (e) {
        case ClientError::AuthorizationFailed: return "authorization_failed";
        case ClientError::Usage: return "usage_error";
        case ClientError::Network: return "network_error";
    }
    return "unknown";
}

Result<ClientConfig, std::string> ClientConfig::load(const std::string& path) {
    auto text = read_file(path);
    if (!text)
        return Err<std::string>{{}, "cannot read config: " + path};
    jose::Json j = jose::Json::parse(*text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return Err<std::string>{{}, "config is not a JSON object"};
    ClientConfig cfg;
    cfg.keypair_path = j.value("keypair", "");
    cfg.rs_base = j.value("rs_base", "");
    cfg.cache_dir = j.value("cache_dir", "");
    if (j.contains("token_endpoints") && j["token_endpoints"].is_object()) {
        for (const auto& [name, url] : j["token_endpoints"].items()) {
            if (!url.is_string())
                return Err<std::string>{{}, "token_endpoints values must be URLs"};
            cfg.token_endpoints[name] = url.get<std::string>();
        }
    }
    if (cfg.keypair_path.empty())
        return Err<std::string>{{}, "config misses keypair path"};
    if (cfg.cache_dir.empty())
        cfg.cache_dir = fs::path(cfg.keypair_path).parent_path().string() +
                        "/token-cache";
    return cfg;
}

Client::Client(ClientConfig config, Transport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

Result<jose::KeyPair, ClientError> Client::keypair() const {
    auto kp = jose::load_keypair(config_.keypair_path);
    if (!kp)
        return fail(ClientError::Usage,
                    "no keypair at " + config_.keypair_path +
                        " (run keygen first)");
    return *kp;
}

Result<std::string, ClientError> Client::keygen(const std::string& path,
                                                bool force) {
    if (!force && fs::exists(path))
        return fail(ClientError::Usage,
                    "refusing to overwrite existing keypair: " + path);
    auto kp = jose::KeyPair::generate();
    try {
        jose::save_keypair(path, kp);
    } catch (const std::exception& e) {
        return fail(ClientError::Usage, e.what());
    }
    return kp.pub.canonical();
}

std::string Client::cache_file(const std::string& as_name) const {
    return config_.cache_dir + "/" + sanitize_name(as_name) + ".json";
}

void Client::store_token(const CachedToken& entry) const {
    CacheLock lock(config_.cache_dir);
    jose::Json j;
    j["as"] = entry.as_name;
    j["rs"] = entry.rs_base;
    j["token"] = entry.token;
    j["exp"] = entry.exp;
    std::ofstream out(cache_file(entry.as_name), std::ios::trunc);
    out << j.dump();
}

std::optional<CachedToken> Client::cached_token(
    const std::string& as_name) const {
    CacheLock lock(config_.cache_dir);
    auto text = read_file(cache_file(as_name));
    if (!text)
        return std::nullopt;
    jose::Json j = jose::Json::parse(*text, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("token"))
        return std::nullopt;
    CachedToken entry;
    entry.token = j["token"].get<std::string>();
    entry.exp = j.value("exp", std::int64_t{0});
    entry.as_name = j.value("as", as_name);
    entry.rs_base = j.value("rs", "");
    return entry;
}

Result<std::string, ClientError> Client::get_token(const std::string& as_name,
                                                   std::int64_t now) {
    auto endpoint = config_.token_endpoints.find(as_name);
    if (endpoint == config_.token_endpoints.end())
        return fail(ClientError::Usage, "unknown AS: " + as_name);
    auto kp = keypair();
    if (!kp)
        return kp.error();

    std::map<std::string, std::string> form;
    form["grant_type"] = "client_credentials";
    form["dpop"] = dpop::build_proof("POST", endpoint->second, *kp, now);

    auto response = transport_("POST", endpoint->second, {}, form, "");
    if (!response)
        return fail(ClientError::Network, response.error().detail);
    jose::Json body = jose::Json::parse(response->body, nullptr, false);
    if (response->status != 200) {
        std::string reason = "HTTP " + std::to_string(response->status);
        if (body.is_object() && body.contains("error"))
            reason = body["error"].get<std::string>();
        return fail(ClientError::AuthorizationFailed, reason);
    }
    if (body.is_discarded() || !body.is_object() ||
        !body.contains("access_token") || !body["access_token"].is_string())
        return fail(ClientError::Network, "malformed token response");
    std::string token = body["access_token"].get<std::string>();

    std::int64_t exp = now + body.value("expires_in", std::int64_t{0});
    if (auto decoded = jose::jws_peek(token);
        decoded && decoded->payload.contains("exp") &&
        decoded->payload["exp"].is_number_integer())
        exp = decoded->payload["exp"].get<std::int64_t>();
    store_token({token, exp, as_name, config_.rs_base});
    return token;
}

Result<std::string, ClientError> Client::combine(
    const std::vector<std::string>& token_files, std::int64_t now) {
    auto kp = keypair();
    if (!kp)
        return kp.error();
    std::vector<std::string> tokens;
    for (const auto& file : token_files) {
        auto text = read_file(file);
        if (!text)
            return fail(ClientError::Usage, "cannot read token file: " + file);
        tokens.push_back(strip_whitespace(*text));
    }
    auto vp = vc::build_vp(tokens, *kp, now);
    if (!vp)
        return fail(ClientError::Usage,
                    std::string(vc::to_string(vp.error().code)) +
                        (vp.error().detail.empty() ? ""
                                                   : ": " + vp.error().detail));
    return *vp;
}

std::map<std::string, std::string> Client::prepare_headers(
    const std::string& method, const std::string& url,
    const std::string& token, std::int64_t now) const {
    auto kp = jose::load_keypair(config_.keypair_path);
    std::map<std::string, std::string> headers;
    headers["Authorization"] = "DPoP " + token;
    if (kp)
        headers["DPoP"] = dpop::build_proof(method, url, *kp, now);
    return headers;
}

Result<HttpResponse, ClientError> Client::access(
    const std::string& method, const std::string& url,
    const std::string& body, const std::string& token_ref, std::int64_t now,
    bool auto_renew) {
    std::string token;
    if (auto text = read_file(token_ref)) {
        token = strip_whitespace(*text);
    } else if (auto cached = cached_token(token_ref)) {
        if (now >= cached->exp && auto_renew) {
            auto renewed = get_token(token_ref, now);
            if (!renewed)
                return renewed.error();
            token = *renewed;
        } else {
            token = cached->token;
        }
    } else if (config_.token_endpoints.contains(token_ref) && auto_renew) {
        auto requested = get_token(token_ref, now);
        if (!requested)
            return requested.error();
        token = *requested;
    } else {
        return fail(ClientError::Usage,
                    "no token file or cached token named: " + token_ref);
    }

    auto headers = prepare_headers(method, url, token, now);
    if (!headers.contains("DPoP"))
        return fail(ClientError::Usage,
                    "no keypair at " + config_.keypair_path);
    auto response = transport_(method, url, headers, {}, body);
    if (!response)
        return fail(ClientError::Network, response.error().detail);
    if (response->status == 401 || response->status == 403) {
        std::string reason = "HTTP " + std::to_string(response->status);
        if (auto it = response->headers.find("WWW-Authenticate");
            it != response->headers.end())
            reason += " " + it->second;
        return fail(ClientError::AuthorizationFailed, reason);
    }
    return *response;
}

}  // namespace vcauth
