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
 * Multi-tenant resource server daemon.
 *
 * Config file (JSON):
 * {
 *   "base_url": "http://127.0.0.1:7080",
 *   "storage_root": "./storage",
 *   "resource_table": "resources.json",
 *   "revocation_max_age": 300,
 *   "fail_open_on_revocation_error": false,
 *   "listen": {"host": "127.0.0.1", "port": 7080}
 * }
 */

#include <CLI11.hpp>
#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vcauth/http.hpp"
#include "vcauth/resource_server.hpp"

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
    CLI::App app{"vcauth resource server"};
    std::string config_path = "rs-config.json";
    app.add_option("-c,--config", config_path, "Path to the config file");
    CLI11_PARSE(app, argc, argv);

    auto config = load_json(config_path);
    if (!config) {
        std::fprintf(stderr, "cannot read config: %s\n", config_path.c_str());
        return 2;
    }

    vcauth::ResourceServerConfig cfg;
    cfg.base_url = config->value("base_url", "");
    cfg.storage_root = config->value("storage_root", "");
    cfg.revocation_max_age =
        config->value("revocation_max_age", std::int64_t{300});
    cfg.fail_open_on_revocation_error =
        config->value("fail_open_on_revocation_error", false);
    if (cfg.base_url.empty() || cfg.storage_root.empty()) {
        std::fprintf(stderr, "config needs base_url and storage_root\n");
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

    std::string table_path = config->value("resource_table", "resources.json");
    auto doc = load_json(table_path);
    if (!doc) {
        std::fprintf(stderr, "cannot read resource table: %s\n",
                     table_path.c_str());
        return 2;
    }
    auto table = vcauth::load_resource_table(*doc);
    if (!table) {
        std::fprintf(stderr, "resource table %s: %s at %s\n",
                     table_path.c_str(), table.error().code.message.c_str(),
                     table.error().code.path.c_str());
        return 2;
    }
    std::printf("loaded %zu resource prefixes\n", table->size());

    vcauth::ResourceServer rs(std::move(*table), cfg,
                              vcauth::http::make_http_fetcher());

    httplib::Server srv;
    vcauth::http::mount_resource_server(srv, rs);

    std::string host = "127.0.0.1";
    int port = 7080;
    if (config->contains("listen")) {
        host = (*config)["listen"].value("host", host);
        port = (*config)["listen"].value("port", port);
    }
    std::printf("serving %s on %s:%d\n", cfg.storage_root.c_str(),
                host.c_str(), port);
    if (!srv.listen(host, port)) {
        std::fprintf(stderr, "cannot listen on %s:%d\n", host.c_str(), port);
        return 2;
    }
    return 0;
}
