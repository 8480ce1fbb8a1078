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

#include "vcauth/http.hpp"

#include <ctime>

#include <httplib.h>

namespace vcauth::http {

namespace {

std::int64_t wall_clock() {
    return static_cast<std::int64_t>(std::time(nullptr));
}

std::map<std::string, std::string> form_of(const httplib::Request& req) {
    std::map<std::string, std::string> form;
    for (const auto& [k, v] : req.params)
        form[k] = v;
    return form;
}

/// Splits an absolute URL into scheme://host[:port] and the rest.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        return {url, ""};
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, ""};
    return {url.substr(0, path_start), url.substr(path_start)};
}

void send_oauth_error(httplib::Response& res, const OAuthError& err) {
    jose::Json body;
    body["error"] = err.error;
    if (!err.detail.empty())
        body["error_description"] = err.detail;
    res.status = err.http_status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

std::string url_path(const std::string& url) {
    return split_url(url).second;
}

void mount_auth_server(httplib::Server& srv, AuthServer& as) {
    std::string prefix = url_path(as.config().base_url);

    srv.Post(prefix + "/token",
             [&as](const httplib::Request& req, httplib::Response& res) {
                 auto outcome = as.handle_token_request(
                     "POST", as.token_endpoint(), form_of(req), wall_clock());
                 if (auto* err = std::get_if<OAuthError>(&outcome)) {
                     send_oauth_error(res, *err);
                     return;
                 }
                 const auto& token = std::get<TokenResponse>(outcome);
                 jose::Json body;
                 body["access_token"] = token.access_token;
                 body["token_type"] = token.token_type;
                 body["expires_in"] = token.expires_in;
                 res.status = 200;
                 res.set_content(body.dump(), "application/json");
             });

    srv.Post(prefix + "/introspect",
             [&as](const httplib::Request& req, httplib::Response& res) {
                 auto outcome =
                     as.handle_introspection(form_of(req), wall_clock());
                 if (auto* err = std::get_if<OAuthError>(&outcome)) {
                     send_oauth_error(res, *err);
                     return;
                 }
                 res.status = 200;
                 res.set_content(std::get<jose::Json>(outcome).dump(),
                                 "application/json");
             });

    srv.Get(prefix + "/revocation-list",
            [&as](const httplib::Request&, httplib::Response& res) {
                res.status = 200;
                res.set_content(as.revocation_list_credential(wall_clock()),
                                "application/jwt");
            });
}

void mount_resource_server(httplib::Server& srv, ResourceServer& rs) {
    auto handler = [&rs](const httplib::Request& req, httplib::Response& res) {
        ResourceRequest request;
        request.method = req.method;
        // Raw target keeps the proof's htu and the server's view
        // byte-identical; the query part is not resource namespace.
        std::string target = req.target.empty() ? req.path : req.target;
        if (auto q = target.find('?'); q != std::string::npos)
            target = target.substr(0, q);
        request.path = target;
        request.authorization = req.get_header_value("Authorization");
        request.dpop = req.get_header_value("DPoP");
        request.body = req.body;
        ResourceResponse out = rs.handle(request, wall_clock());
        res.status = out.status;
        if (!out.www_authenticate.empty())
            res.set_header("WWW-Authenticate", out.www_authenticate);
        res.set_content(out.body, out.content_type);
    };
    srv.Get(R"(/.*)", handler);
    srv.Put(R"(/.*)", handler);
    srv.Post(R"(/.*)", handler);
    srv.Delete(R"(/.*)", handler);
}

Fetcher make_http_fetcher() {
    Fetcher fetcher;
    fetcher.get = [](const std::string& url)
        -> Result<std::string, std::string> {
        auto [host, path] = split_url(url);
        httplib::Client cli(host);
        cli.set_connection_timeout(5);
        auto res = cli.Get(path.empty() ? "/" : path);
        if (!res)
            return Err<std::string>{{}, httplib::to_string(res.error())};
        if (res->status != 200)
            return Err<std::string>{{}, "HTTP " + std::to_string(res->status)};
        return res->body;
    };
    fetcher.post_form = [](const std::string& url,
                           const std::map<std::string, std::string>& form)
        -> Result<std::string, std::string> {
        auto [host, path] = split_url(url);
        httplib::Client cli(host);
        cli.set_connection_timeout(5);
        httplib::Params params(form.begin(), form.end());
        auto res = cli.Post(path.empty() ? "/" : path, params);
        if (!res)
            return Err<std::string>{{}, httplib::to_string(res.error())};
        if (res->status != 200)
            return Err<std::string>{{}, "HTTP " + std::to_string(res->status)};
        return res->body;
    };
    return fetcher;
}

Transport make_http_transport() {
    return [](const std::string& method, const std::string& url,
              const std::map<std::string, std::string>& headers,
              const std::map<std::string, std::string>& form,
              const std::string& body) -> Result<HttpResponse, std::string> {
        auto [host, path] = split_url(url);
        if (path.empty())
            path = "/";
        httplib::Client cli(host);
        cli.set_connection_timeout(5);
        httplib::Headers hdrs(headers.begin(), headers.end());
        httplib::Result res;
        if (method == "GET") {
            res = cli.Get(path, hdrs);
        } else if (method == "DELETE") {
            res = cli.Delete(path, hdrs);
        } else if (method == "POST" && !form.empty()) {
            httplib::Params params(form.begin(), form.end());
            res = cli.Post(path, hdrs, params);
        } else if (method == "POST") {
            res = cli.Post(path, hdrs, body, "application/octet-stream");
        } else if (method == "PUT") {
            res = cli.Put(path, hdrs, body, "application/octet-stream");
        } else {
            return Err<std::string>{{}, "unsupported method: " + method};
        }
        if (!res)
            return Err<std::string>{{}, httplib::to_string(res.error())};
        HttpResponse out;
        out.status = res->status;
        out.body = res->body;
        for (const auto& [k, v] : res->headers)
            out.headers[k] = v;
        return out;
    };
}

}  // namespace vcauth::http
