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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "test_util.hpp"
#include "vcauth/auth_server.hpp"
#include "vcauth/base64url.hpp"
#include "vcauth/client.hpp"
#include "vcauth/dpop.hpp"
#include "vcauth/resource_server.hpp"

using namespace vcauth;

namespace {

namespace fs = std::filesystem;

constexpr std::int64_t kNow = 1617559370;

/// In-process transport wiring the client to one AS and one RS.
struct FakeBackend {
    jose::KeyPair as_key = test::fixed_keypair(0x02);
    std::string storage;
    AuthServer as;
    ResourceServer rs;

    explicit FakeBackend(const jose::PublicKeyJwk& client_key,
                         std::int64_t lifetime = 864000)
        : storage((fs::temp_directory_path() /
                   ("vcauth-client-" + crypto::random_hex(6)))
                      .string()),
          as(as_key, table_for(client_key), as_config(lifetime)),
          rs(rs_table(as_key.pub), rs_config(storage), make_fetcher()) {
        fs::create_directories(storage);
    }

    Fetcher make_fetcher() {
        Fetcher f;
        f.get = [this](const std::string& url)
            -> Result<std::string, std::string> {
            if (url == as.revocation_list_url())
                return as.revocation_list_credential(kNow);
            return Err<std::string>{{}, "unreachable: " + url};
        };
        return f;
    }

    ~FakeBackend() {
        std::error_code ec;
        fs::remove_all(storage, ec);
    }

    static AccessTable table_for(const jose::PublicKeyJwk& key) {
        AccessTable t;
        t.insert(key, {vc::Capability{"folder1", {true, true, false}},
                       vc::Capability{"folder2", {true, false, false}}});
        return t;
    }

    static AuthServerConfig as_config(std::int64_t lifetime) {
        AuthServerConfig cfg;
        cfg.base_url = "https://org1.example/as";
        cfg.token_lifetime = lifetime;
        return cfg;
    }

    static ResourceTable rs_table(const jose::PublicKeyJwk& as_pub) {
        ResourceTable t;
        t.add({"/home/org1", "https://org1.example/as", as_pub, std::nullopt,
               false, {}});
        return t;
    }

    static ResourceServerConfig rs_config(const std::string& storage) {
        ResourceServerConfig cfg;
        cfg.base_url = "https://rs.example";
        cfg.storage_root = storage;
        cfg.warn_log = [](const std::string&) {};
        return cfg;
    }

    Transport transport(std::int64_t now) {
        return [this, now](const std::string& method, const std::string& url,
                           const std::map<std::string, std::string>& headers,
                           const std::map<std::string, std::string>& form,
                           const std::string& body)
                   -> Result<HttpResponse, std::string> {
            if (url == as.token_endpoint()) {
                auto outcome = as.handle_token_request("POST", url, form, now);
                HttpResponse resp;
                if (auto* err = std::get_if<OAuthError>(&outcome)) {
                    resp.status = err->http_status;
                    jose::Json j;
                    j["error"] = err->error;
                    resp.body = j.dump();
                    return resp;
                }
                const auto& token = std::get<TokenResponse>(outcome);
                jose::Json j;
                j["access_token"] = token.access_token;
                j["token_type"] = token.token_type;
                j["expires_in"] = token.expires_in;
                resp.status = 200;
                resp.body = j.dump();
                return resp;
            }
            // Everything else is the resource server.
            constexpr std::string_view kRsBase = "https://rs.example";
            if (url.compare(0, kRsBase.size(), kRsBase) != 0)
                return Err<std::string>{{}, "unknown host: " + url};
            ResourceRequest req;
            req.method = method;
            req.path = url.substr(kRsBase.size());
            auto auth = headers.find("Authorization");
            auto proof = headers.find("DPoP");
            if (auth != headers.end())
                req.authorization = auth->second;
            if (proof != headers.end())
                req.dpop = proof->second;
            req.body = body;
            auto out = rs.handle(req, now);
            HttpResponse resp;
            resp.status = out.status;
            resp.body = out.body;
            if (!out.www_authenticate.empty())
                resp.headers["WWW-Authenticate"] = out.www_authenticate;
            return resp;
        };
    }
};

struct ClientHome {
    std::string dir;
    ClientHome()
        : dir((fs::temp_directory_path() /
               ("vcauth-home-" + crypto::random_hex(6)))
                  .string()) {
        fs::create_directories(dir);
    }
    ~ClientHome() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    ClientConfig config() const {
        ClientConfig cfg;
        cfg.keypair_path = dir + "/client.jwk";
        cfg.token_endpoints = {{"org1", "https://org1.example/as/token"}};
        cfg.rs_base = "https://rs.example";
        cfg.cache_dir = dir + "/cache";
        return cfg;
    }
};

}  // namespace

TEST_CASE("keygen writes a reloadable key and prints canonical JWK") {
    ClientHome home;
    Client client(home.config(), Transport{});
    auto jwk = client.keygen(home.config().keypair_path, false);
    REQUIRE(jwk.ok());
    CHECK(jwk->find("\"kty\":\"OKP\"") != std::string::npos);
    CHECK(jwk->find("\"crv\":\"Ed25519\"") != std::string::npos);

    // A second keygen without force refuses.
    auto refused = client.keygen(home.config().keypair_path, false);
    REQUIRE_FALSE(refused.ok());
    CHECK(refused.error().code == ClientError::Usage);

    // Reparsing the printed JWK reproduces it byte-identically.
    auto parsed = jose::PublicKeyJwk::from_json(jose::Json::parse(*jwk));
    REQUIRE(parsed.has_value());
    CHECK(parsed->canonical() == *jwk);

    auto forced = client.keygen(home.config().keypair_path, true);
    CHECK(forced.ok());
}

TEST_CASE("get_token caches the token and matches the access table") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());
    auto kp = jose::load_keypair(cfg.keypair_path);
    REQUIRE(kp.has_value());

    FakeBackend backend(kp->pub);
    Client client(cfg, backend.transport(kNow));

    auto token = client.get_token("org1", kNow);
    REQUIRE(token.ok());
    auto claims =
        vc::AccessTokenVc::from_claims(jose::jws_peek(*token)->payload);
    REQUIRE(claims.has_value());
    CHECK(claims->cnf_jwk == kp->pub);
    CHECK(claims->vc.capabilities.size() == 2);

    auto cached = client.cached_token("org1");
    REQUIRE(cached.has_value());
    CHECK(cached->token == *token);
    CHECK(cached->exp == claims->exp);

    // The cache directory never holds the secret key.
    for (const auto& entry : fs::recursive_directory_iterator(cfg.cache_dir)) {
        if (!entry.is_regular_file())
            continue;
        std::ifstream in(entry.path());
        std::string contents((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
        CHECK(contents.find(base64url::encode(
                  std::span<const std::uint8_t>(kp->seed))) ==
              std::string::npos);
    }
}

TEST_CASE("get_token surfaces OAuth errors verbatim") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());

    // Backend registered for a *different* key.
    FakeBackend backend(jose::KeyPair::generate().pub);
    Client client(cfg, backend.transport(kNow));
    auto token = client.get_token("org1", kNow);
    REQUIRE_FALSE(token.ok());
    CHECK(token.error().code == ClientError::AuthorizationFailed);
    CHECK(token.error().detail == "invalid_client");
}

TEST_CASE("token request signs exactly once on the client side") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());
    auto kp = jose::load_keypair(cfg.keypair_path);
    FakeBackend backend(kp->pub);

    // Count only client-side work: capture the form, do not run the AS.
    std::map<std::string, std::string> captured;
    Transport capture = [&](const std::string&, const std::string&,
                            const std::map<std::string, std::string>&,
                            const std::map<std::string, std::string>& form,
                            const std::string&)
        -> Result<HttpResponse, std::string> {
        captured = form;
        HttpResponse resp;
        resp.status = 400;
        resp.body = R"({"error":"invalid_request"})";
        return resp;
    };
    Client client(cfg, capture);
    auto before = crypto::op_counts();
    (void)client.get_token("org1", kNow);
    auto after = crypto::op_counts();
    CHECK(after.signatures - before.signatures == 1);
    CHECK(captured.contains("dpop"));
    CHECK(captured["grant_type"] == "client_credentials");
}

TEST_CASE("access: end-to-end reads and distinct proofs per request") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());
    auto kp = jose::load_keypair(cfg.keypair_path);
    FakeBackend backend(kp->pub);

    {
        fs::path p(backend.storage + "/home/org1/folder2/a.txt");
        fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << "file contents";
    }

    Client client(cfg, backend.transport(kNow));
    REQUIRE(client.get_token("org1", kNow).ok());

    auto first = client.access("GET", "https://rs.example/home/org1/folder2/a.txt",
                               "", "org1", kNow);
    REQUIRE(first.ok());
    CHECK(first->status == 200);
    CHECK(first->body == "file contents");

    auto second = client.access(
        "GET", "https://rs.example/home/org1/folder2/a.txt", "", "org1", kNow);
    REQUIRE(second.ok());  // fresh jti per request, no replay

    // Writing where only read is granted maps to exit-code 1 semantics.
    auto denied = client.access(
        "PUT", "https://rs.example/home/org1/folder2/a.txt", "data", "org1",
        kNow);
    REQUIRE_FALSE(denied.ok());
    CHECK(denied.error().code == ClientError::AuthorizationFailed);

    // Unknown token reference is a usage error.
    auto missing = client.access(
        "GET", "https://rs.example/home/org1/folder2/a.txt", "", "nothere",
        kNow);
    REQUIRE_FALSE(missing.ok());
    CHECK(missing.error().code == ClientError::Usage);
}

TEST_CASE("auto-renew replaces an expired cached token") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());
    auto kp = jose::load_keypair(cfg.keypair_path);

    // Two-second token lifetime, as a tiny test AS would be set up.
    FakeBackend backend(kp->pub, /*lifetime=*/2);
    {
        fs::path p(backend.storage + "/home/org1/folder2/a.txt");
        fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << "x";
    }

    Client early(cfg, backend.transport(kNow));
    REQUIRE(early.get_token("org1", kNow).ok());
    auto cached = early.cached_token("org1");
    REQUIRE(cached.has_value());
    CHECK(cached->exp == kNow + 2);

    std::int64_t later = kNow + 10;
    Client later_client(cfg, backend.transport(later));

    // Without auto-renew the stale token is presented and rejected.
    auto stale = later_client.access(
        "GET", "https://rs.example/home/org1/folder2/a.txt", "", "org1", later,
        false);
    REQUIRE_FALSE(stale.ok());
    CHECK(stale.error().code == ClientError::AuthorizationFailed);

    // With auto-renew a new token is requested first.
    auto renewed = later_client.access(
        "GET", "https://rs.example/home/org1/folder2/a.txt", "", "org1", later,
        true);
    REQUIRE(renewed.ok());
    CHECK(renewed->status == 200);
    CHECK(later_client.cached_token("org1")->exp == later + 2);
}

TEST_CASE("combine builds a presentation from stored token files") {
    ClientHome home;
    ClientConfig cfg = home.config();
    Client bootstrap(cfg, Transport{});
    REQUIRE(bootstrap.keygen(cfg.keypair_path, false).ok());
    auto kp = jose::load_keypair(cfg.keypair_path);

    auto as1 = test::fixed_keypair(0x02);
    auto as2 = test::fixed_keypair(0x03);
    auto t1 = vc::encode_vc_jwt(test::conformance_token(kp->pub), as1);
    auto t2 = vc::encode_vc_jwt(
        *vc::build_capability_vc(
            "https://org2.example/as", kp->pub,
            {vc::Capability{"folder3", {true, true, false}}}, 864000,
            {4, "https://org2.example/as/revocation-list"}, kNow),
        as2);
    std::ofstream(home.dir + "/t1.jwt") << t1 << "\n";
    std::ofstream(home.dir + "/t2.jwt") << t2 << "\n";

    Client client(cfg, Transport{});
    auto vp = client.combine({home.dir + "/t1.jwt", home.dir + "/t2.jwt"},
                             kNow);
    REQUIRE(vp.ok());
    auto parsed = vc::parse_presentation(*vp);
    REQUIRE(parsed.ok());
    REQUIRE(std::holds_alternative<vc::ParsedVp>(*parsed));
    CHECK(std::get<vc::ParsedVp>(*parsed).members.size() == 2);

    SUBCASE("single-file combine degenerates cleanly") {
        auto single = client.combine({home.dir + "/t1.jwt"}, kNow);
        REQUIRE(single.ok());
        CHECK(std::get<vc::ParsedVp>(*vc::parse_presentation(*single))
                  .members.size() == 1);
    }

    SUBCASE("foreign-bound token fails with cnf mismatch") {
        auto stranger = jose::KeyPair::generate();
        auto foreign =
            vc::encode_vc_jwt(test::conformance_token(stranger.pub), as1);
        std::ofstream(home.dir + "/foreign.jwt") << foreign << "\n";
        auto bad = client.combine(
            {home.dir + "/t1.jwt", home.dir + "/foreign.jwt"}, kNow);
        REQUIRE_FALSE(bad.ok());
        CHECK(bad.error().detail.find("cnf_mismatch") != std::string::npos);
    }
}

TEST_CASE("client config loads from JSON and validates") {
    ClientHome home;
    std::string path = home.dir + "/config.json";
    std::ofstream(path) << R"({
        "keypair": ")" << home.dir
                        << R"(/client.jwk",
        "token_endpoints": {"org1": "https://org1.example/as/token"},
        "rs_base": "https://rs.example",
        "cache_dir": ")" << home.dir
                        << R"(/cache"
    })";
    auto cfg = ClientConfig::load(path);
    REQUIRE(cfg.ok());
    CHECK(cfg->token_endpoints.at("org1") ==
          "https://org1.example/as/token");

    auto missing = ClientConfig::load(home.dir + "/nope.json");
    REQUIRE_FALSE(missing.ok());
}
