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
 * Authorization server daemon.
 *
 * Config file (JSON):
 * {
 *   "base_url": "http://127.0.0.1:7001/as",
 *   "keypair": "as.jwk",                  // created if absent
 *   "access_tables": {"cloud": "org1-clients.json"},
 *   "token_lifetime": 864000,
 *   "list_bits": 131072,
 *   "persist": "as-state.json",
 *   "listen": {"host": "127.0.0.1", "port": 7001}
 * }
 */

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vcauth/auth_server.hpp"
#include "vcauth/http.hpp"

namespace {

std::optional<vcauth::jose::Json> load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    auto j = vcauth::jose::Json::parse(buf.str(), nullptr, false);
    if (j.is_discarded())
        return std::nullopt;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vcauth authorization server"};
    std::string config_path = "as-config.json";
    app.add_option("-c,--config", config_path, "Path to the config file");
    CLI11_PARSE(app, argc, argv);

    auto config = load_json(config_path);
    if (!config) {
        std::fprintf(stderr, "cannot read config: %s\n", config_path.c_str());
        return 2;
    }

    vcauth::AuthServerConfig cfg;
    cfg.base_url = config->value("base_url", "");
    cfg.token_lifetime = config->value("token_lifetime", std::int64_t{864000});
    cfg.list_bits = config->value("list_bits", std::size_t{131072});
    if (config->contains("persist"))
        cfg.persist_path = (*config)["persist"].get<std::string>();
    if (cfg.base_url.empty()) {
        std::fprintf(stderr, "config needs base_url\n");
        return 2;
    }
    if (config->contains("definition")) {
        auto def =
            vcauth::vc::CredentialDefinition::from_json((*config)["definition"]);
        if (!def) {
            std::fprintf(stderr, "bad credential definition\n");
            return 2;
        }
        cfg.definition = *def;
    }

    std::string keypair_path = config->value("keypair", "as.jwk");
    auto key = vcauth::jose::load_keypair(keypair_path);
    if (!key) {
        auto fresh = vcauth::jose::KeyPair::generate();
        vcauth::jose::save_keypair(keypair_path, fresh);
        key = fresh;
        std::printf("generated signing key at %s\n", keypair_path.c_str());
    }
    std::printf("AS public key: %s\n", key->pub.canonical().c_str());

    std::map<std::string, vcauth::AccessTable> tables;
    auto load_table = [&](const std::string& name,
                          const std::string& path) -> bool {
        auto doc = load_json(path);
        if (!doc) {
            std::fprintf(stderr, "cannot read access table: %s\n",
                         path.c_str());
            return false;
        }
        auto table = vcauth::load_access_table(*doc);
        if (!table) {
            std::fprintf(stderr, "access table %s: %s at %s\n", path.c_str(),
                         table.error().code.message.c_str(),
                         table.error().code.path.c_str());
            return false;
        }
        std::printf("loaded access table '%s' with %zu clients\n",
                    name.c_str(), table->size());
        tables.emplace(name, std::move(*table));
        return true;
    };
    if (config->contains("access_tables") &&
        (*config)["access_tables"].is_object()) {
        for (const auto& [name, path] : (*config)["access_tables"].items()) {
            if (!load_table(name, path.get<std::string>()))
                return 2;
        }
    } else if (config->contains("access_table")) {
        if (!load_table("default",
                        (*config)["access_table"].get<std::string>()))
            return 2;
    } else {
        std::fprintf(stderr, "config needs access_table or access_tables\n");
        return 2;
    }

    vcauth::AuthServer as(*key, std::move(tables), cfg);

    httplib::Server srv;
    vcauth::http::mount_auth_server(srv, as);

    std::string host = "127.0.0.1";
    int port = 7001;
    if (config->contains("listen")) {
        host = (*config)["listen"].value("host", host);
        port = (*config)["listen"].value("port", port);
    }
    std::printf("listening on %s:%d (token endpoint %s)\n", host.c_str(), port,
                as.token_endpoint().c_str());
    if (!srv.listen(host, port)) {
        std::fprintf(stderr, "cannot listen on %s:%d\n", host.c_str(), port);
        return 2;
    }
    return 0;
}
