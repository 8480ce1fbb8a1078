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
 * Client CLI. Subcommands: keygen | token <as> | combine <files...> |
 * get/put/delete <url>. Config comes from --config or $VCAUTH_CONFIG.
 *
 * Exit codes: 0 success, 1 authorization failure, 2 usage/config
 * error, 3 network error.
 */

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "vcauth/client.hpp"
#include "vcauth/http.hpp"

namespace {

int exit_code(const vcauth::Err<vcauth::ClientError>& err) {
    std::fprintf(stderr, "error: %s\n", err.detail.c_str());
    return static_cast<int>(err.code);
}

std::optional<std::string> read_body_file(const std::string& path) {
    if (path.empty())
        return std::string{};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vcauth client"};
    app.require_subcommand(1);

    std::string config_path;
    if (const char* env = std::getenv("VCAUTH_CONFIG"))
        config_path = env;
    app.add_option("-c,--config", config_path,
                   "Config file (overrides $VCAUTH_CONFIG)");

    auto* keygen = app.add_subcommand("keygen", "Generate a client keypair");
    std::string keygen_out;
    bool keygen_force = false;
    keygen->add_option("-o,--output", keygen_out,
                       "Output path (defaults to the configured keypair)");
    keygen->add_flag("-f,--force", keygen_force, "Overwrite an existing file");

    auto* token = app.add_subcommand("token", "Request an access token");
    std::string token_as;
    token->add_option("as", token_as, "Authorization server name")->required();

    auto* combine = app.add_subcommand(
        "combine", "Combine stored tokens into one presentation");
    std::vector<std::string> combine_files;
    combine->add_option("files", combine_files, "Token files")->required();
    std::string combine_out;
    combine->add_option("-o,--output", combine_out, "Write the result here");

    std::string access_url, access_body_file, access_token_ref = "org1";
    bool auto_renew = false;
    auto add_access_opts = [&](CLI::App* cmd, bool with_body) {
        cmd->add_option("url", access_url, "Resource URL")->required();
        cmd->add_option("-t,--token", access_token_ref,
                        "Token file or AS name");
        cmd->add_flag("--auto-renew", auto_renew,
                      "Re-request the token if the cached one expired");
        if (with_body)
            cmd->add_option("-d,--data", access_body_file,
                            "File whose contents become the request body");
    };
    add_access_opts(app.add_subcommand("get", "Read a resource"), false);
    add_access_opts(app.add_subcommand("put", "Write a resource"), true);
    add_access_opts(app.add_subcommand("delete", "Delete a resource"), false);

    CLI11_PARSE(app, argc, argv);

    if (config_path.empty()) {
        std::fprintf(stderr,
                     "error: no config (use --config or $VCAUTH_CONFIG)\n");
        return 2;
    }
    auto cfg = vcauth::ClientConfig::load(config_path);
    if (!cfg) {
        std::fprintf(stderr, "error: %s\n", cfg.error().detail.c_str());
        return 2;
    }

    vcauth::Client client(*cfg, vcauth::http::make_http_transport());
    std::int64_t now = static_cast<std::int64_t>(std::time(nullptr));

    if (keygen->parsed()) {
        std::string out = keygen_out.empty() ? cfg->keypair_path : keygen_out;
        auto jwk = client.keygen(out, keygen_force);
        if (!jwk)
            return exit_code(jwk.error());
        std::printf("%s\n", jwk->c_str());
        return 0;
    }

    if (token->parsed()) {
        auto issued = client.get_token(token_as, now);
        if (!issued)
            return exit_code(issued.error());
        std::printf("%s\n", issued->c_str());
        return 0;
    }

    if (combine->parsed()) {
        auto vp = client.combine(combine_files, now);
        if (!vp)
            return exit_code(vp.error());
        if (combine_out.empty()) {
            std::printf("%s\n", vp->c_str());
        } else {
            std::ofstream out(combine_out, std::ios::trunc);
            out << *vp << "\n";
            std::printf("wrote %s\n", combine_out.c_str());
        }
        return 0;
    }

    std::string method;
    if (app.got_subcommand("get"))
        method = "GET";
    else if (app.got_subcommand("put"))
        method = "PUT";
    else if (app.got_subcommand("delete"))
        method = "DELETE";

    auto body = read_body_file(access_body_file);
    if (!body) {
        std::fprintf(stderr, "error: cannot read body file %s\n",
                     access_body_file.c_str());
        return 2;
    }
    auto res =
        client.access(method, access_url, *body, access_token_ref, now,
                      auto_renew);
    if (!res)
        return exit_code(res.error());
    std::fprintf(stderr, "HTTP %d\n", res->status);
    if (!res->body.empty())
        std::fwrite(res->body.data(), 1, res->body.size(), stdout);
    return 0;
}
