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
 * Client-side logic behind the CLI: key management, token acquisition
 * over the client-credentials grant, presentation assembly, and
 * authorized resource access. One fresh DPoP proof per outgoing
 * request, never reused.
 */

#ifndef VCAUTH_CLIENT_HPP
#define VCAUTH_CLIENT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vcauth/jose.hpp"
#include "vcauth/result.hpp"

namespace vcauth {

/// What a command exits with: 0 success, 1 authorization failure,
/// 2 usage/config error, 3 network error.
enum class ClientError {
    AuthorizationFailed = 1,
    Usage = 2,
    Network = 3,
};

const char* to_string(ClientError e);

struct HttpResponse {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Minimal HTTP hook. `form` non-empty means a form-encoded POST body;
/// otherwise `body` is sent raw. Errors are transport-level only.
using Transport = std::function<Result<HttpResponse, std::string>(
    const std::string& method, const std::string& url,
    const std::map<std::string, std::string>& headers,
    const std::map<std::string, std::string>& form, const std::string& body)>;

struct ClientConfig {
    std::string keypair_path;
    std::map<std::string, std::string> token_endpoints;  // AS name -> URL
    std::string rs_base;
    std::string cache_dir;

    static Result<ClientConfig, std::string> load(const std::string& path);
};

struct CachedToken {
    std::string token;
    std::int64_t exp = 0;
    std::string as_name;
    std::string rs_base;
};

class Client {
public:
    Client(ClientConfig config, Transport transport);

    /// Writes a fresh keypair (0600) and returns the canonical public
    /// JWK for pasting into an access table. Refuses to overwrite
    /// without `force`.
    Result<std::string, ClientError> keygen(const std::string& path,
                                            bool force);

    /// Runs the client-credentials grant against the named AS and
    /// caches the token. Exactly one signature (the DPoP proof).
    Result<std::string, ClientError> get_token(const std::string& as_name,
                                               std::int64_t now);

    /// Combines cached/stored tokens into one presentation.
    Result<std::string, ClientError> combine(
        const std::vector<std::string>& token_files, std::int64_t now);

    /// Sends an authorized request. `token_ref` is a file path or an
    /// AS name (cache lookup); with `auto_renew`, an expired cached
    /// token is re-requested first.
    Result<HttpResponse, ClientError> access(const std::string& method,
                                             const std::string& url,
                                             const std::string& body,
                                             const std::string& token_ref,
                                             std::int64_t now,
                                             bool auto_renew = false);

    std::optional<CachedToken> cached_token(const std::string& as_name) const;

    /// Headers for one authorized request: Authorization and a fresh
    /// DPoP proof pinned to (method, url). One signature.
    std::map<std::string, std::string> prepare_headers(
        const std::string& method, const std::string& url,
        const std::string& token, std::int64_t now) const;

private:
    Result<jose::KeyPair, ClientError> keypair() const;
    std::string cache_file(const std::string& as_name) const;
    void store_token(const CachedToken& entry) const;

    ClientConfig config_;
    Transport transport_;
};

}  // namespace vcauth

#endif  // VCAUTH_CLIENT_HPP
