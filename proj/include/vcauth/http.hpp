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

#ifndef VCAUTH_HTTP_HPP
#define VCAUTH_HTTP_HPP

#include <string>

#include "vcauth/auth_server.hpp"
#include "vcauth/client.hpp"
#include "vcauth/resource_server.hpp"

namespace httplib {
class Server;
}

namespace vcauth::http {

/// Mounts POST {base-path}/token, POST {base-path}/introspect and
/// GET {base-path}/revocation-list. The server must outlive `srv`.
void mount_auth_server(httplib::Server& srv, AuthServer& as);

/// Mounts GET/PUT/POST/DELETE on the whole path space.
void mount_resource_server(httplib::Server& srv, ResourceServer& rs);

/// httplib-backed implementations of the outbound interfaces.
Fetcher make_http_fetcher();
Transport make_http_transport();

/// Path component of an absolute URL ("" when none).
std::string url_path(const std::string& url);

}  // namespace vcauth::http

#endif  // VCAUTH_HTTP_HPP
