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

#include "test_util.hpp"
#include "vcauth/vc.hpp"

using namespace vcauth;
using vc::VcError;

namespace {

constexpr std::int64_t kNow = 1617559370;

// sha-256 of the canonical JWK for the 0x00..01 seed key, frozen from
// an independent digest tool run on the same bytes.
constexpr const char* kSeed01JwkSha256 =
    "de247e1fa5f1ff7ae9b7b78d31454d6b34999147256ff71e90125964be26954b";

vc::Capability cap(const std::string& path, bool r, bool w, bool d) {
    return vc::Capability{path, vc::Rights{r, w, d}};
}

}  // namespace

TEST_CASE("conformance claims set matches the published token layout") {
    auto kp = test::fixed_keypair();
    auto token = test::conformance_token(kp.pub);
    jose::Json claims = token.to_claims();

    CHECK(claims["jti"] == "https://mm.aueb.gr/credentials/1");
    CHECK(claims["iss"] == "https://mm.aueb.gr/as");
    CHECK(claims["iat"] == 1617559370);
    CHECK(claims["exp"] == 1618423370);
    CHECK(claims["exp"].get<std::int64_t>() -
              claims["iat"].get<std::int64_t>() ==
          864000);  // 10 days
    CHECK(claims["cnf"]["jwk"]["kty"] == "OKP");
    CHECK(claims["cnf"]["jwk"]["crv"] == "Ed25519");
    const auto& vc_obj = claims["vc"];
    CHECK(vc_obj["@context"][0] == "https://www.w3.org/2018/credentials/v1");
    CHECK(vc_obj["@context"][1] ==
          "https://mm.aueb.gr/contexts/capabilities/v1");
    CHECK(vc_obj["type"][0] == "VerifiableCredential");
    CHECK(vc_obj["type"][1] == "capabilities");
    CHECK(vc_obj["credentialStatus"]["type"] == "RevocationList2020Status");
    CHECK(vc_obj["credentialStatus"]["revocationListIndex"] == "94567");
    CHECK(vc_obj["credentialStatus"]["revocationListCredential"] ==
          "https://aueb.gr/rl");
    const auto& caps = vc_obj["credentialSubject"]["capabilities"];
    REQUIRE(caps.size() == 2);
    CHECK(caps[0]["folder1"] == jose::Json::array({"r", "w", "d"}));
    CHECK(caps[1]["folder2"] == jose::Json::array({"r"}));
}

TEST_CASE("build_capability_vc enforces its preconditions") {
    auto kp = test::fixed_keypair();
    vc::RevocationStatusRef ref{1, "https://as.example/revocation-list"};

    auto empty = vc::build_capability_vc("https://as.example", kp.pub, {},
                                         864000, ref, kNow);
    REQUIRE_FALSE(empty.ok());
    CHECK(empty.error().code == VcError::EmptyCapabilities);

    // validity 0 would make exp == iat, which the claims shape forbids.
    auto zero = vc::build_capability_vc("https://as.example", kp.pub,
                                        {cap("docs", true, false, false)}, 0,
                                        ref, kNow);
    REQUIRE_FALSE(zero.ok());
    CHECK(zero.error().code == VcError::InvalidValidity);

    auto single = vc::build_capability_vc("https://as.example", kp.pub,
                                          {cap("docs", true, false, false)},
                                          864000, ref, kNow);
    REQUIRE(single.ok());
    CHECK(single->vc.capabilities.size() == 1);
    CHECK(single->vc.capabilities[0].path == "docs");
}

TEST_CASE("default jti values count up per issuer") {
    auto kp = test::fixed_keypair();
    vc::RevocationStatusRef ref{1, "https://x/rl"};
    std::string issuer = "https://counter-" + crypto::random_hex(6) + ".example";
    auto a = vc::build_capability_vc(issuer, kp.pub,
                                     {cap("a", true, false, false)}, 10, ref,
                                     kNow);
    auto b = vc::build_capability_vc(issuer, kp.pub,
                                     {cap("a", true, false, false)}, 10, ref,
                                     kNow);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a->jti == issuer + "/credentials/1");
    CHECK(b->jti == issuer + "/credentials/2");
}

TEST_CASE("encode_vc_jwt round-trips claims byte-for-byte") {
    auto as_key = test::fixed_keypair(0x02);
    auto client = test::fixed_keypair(0x01);
    auto token = test::conformance_token(client.pub);
    std::string compact = vc::encode_vc_jwt(token, as_key);

    auto verified = jose::jws_verify(compact, as_key.pub);
    REQUIRE(verified.ok());
    CHECK(verified->header["typ"] == "jwt");
    CHECK(verified->payload.dump() == token.to_claims().dump());

    auto reparsed = vc::AccessTokenVc::from_claims(verified->payload);
    REQUIRE(reparsed.has_value());
    CHECK(reparsed->to_claims().dump() == token.to_claims().dump());
}

TEST_CASE("conformance token size: structure fixed, arithmetic verified") {
    // The compact serialization length is fully determined by the
    // payload length: 36 header chars + 86 signature chars + 2 dots.
    auto as_key = test::fixed_keypair(0x02);
    auto token = test::conformance_token(test::fixed_keypair().pub);
    std::string compact = vc::encode_vc_jwt(token, as_key);
    std::size_t payload_len = token.to_claims().dump().size();
    auto b64len = [](std::size_t n) { return (4 * n + 2) / 3; };
    CHECK(compact.size() == 36 + 1 + b64len(payload_len) + 1 + 86);
    // Measured footprint for the full claims set with a complete
    // Ed25519 key; key bytes cannot move this by more than encoding
    // jitter.
    CHECK(compact.size() >= 860);
    CHECK(compact.size() <= 920);
}

TEST_CASE("capability schema rejections") {
    CHECK_FALSE(vc::Capability::from_json(
                    jose::Json::parse(R"({"folder1": ["x"]})"))
                    .has_value());
    CHECK_FALSE(vc::Capability::from_json(
                    jose::Json::parse(R"({"folder1": []})"))
                    .has_value());
    CHECK_FALSE(vc::Capability::from_json(
                    jose::Json::parse(R"({"/abs": ["r"]})"))
                    .has_value());
    CHECK_FALSE(vc::Capability::from_json(
                    jose::Json::parse(R"({"a/../b": ["r"]})"))
                    .has_value());
    CHECK_FALSE(vc::Capability::from_json(
                    jose::Json::parse(R"({"a": ["r"], "b": ["w"]})"))
                    .has_value());
    auto ok = vc::Capability::from_json(
        jose::Json::parse(R"({"folder1/sub": ["r", "d"]})"));
    REQUIRE(ok.has_value());
    CHECK(ok->rights.read);
    CHECK_FALSE(ok->rights.write);
    CHECK(ok->rights.del);
}

TEST_CASE("validate_credential_definition accepts the conformance vc") {
    auto token = test::conformance_token(test::fixed_keypair().pub);
    auto def = vc::CredentialDefinition::capabilities_v1();
    CHECK(vc::validate_credential_definition(token.vc, def) ==
          vc::DefinitionCheck::Ok);

    SUBCASE("foreign credential type") {
        auto vc_obj = token.vc;
        vc_obj.type = {"VerifiableCredential", "UserId"};
        CHECK(vc::validate_credential_definition(vc_obj, def) ==
              vc::DefinitionCheck::MissingType);
    }
    SUBCASE("missing context") {
        auto vc_obj = token.vc;
        vc_obj.context = {std::string(vc::kW3cCredentialsContext)};
        CHECK(vc::validate_credential_definition(vc_obj, def) ==
              vc::DefinitionCheck::MissingContext);
    }
    SUBCASE("rights outside r/w/d never parse") {
        jose::Json bad = token.to_claims();
        bad["vc"]["credentialSubject"]["capabilities"][0]["folder1"] =
            jose::Json::array({"x"});
        CHECK_FALSE(vc::AccessTokenVc::from_claims(bad).has_value());
    }
}

TEST_CASE("build_vp binds members to the holder and hashes its key") {
    auto holder = test::fixed_keypair(0x01);
    auto as1 = test::fixed_keypair(0x02);
    auto as2 = test::fixed_keypair(0x03);

    auto t1 = vc::encode_vc_jwt(test::conformance_token(holder.pub), as1);
    auto t2 = vc::encode_vc_jwt(
        *vc::build_capability_vc("https://org2.example/as", holder.pub,
                                 {cap("folder3", true, true, false)}, 864000,
                                 {7, "https://org2.example/as/revocation-list"},
                                 kNow),
        as2);

    auto vp = vc::build_vp({t1, t2}, holder, kNow);
    REQUIRE(vp.ok());
    auto verified = jose::jws_verify(*vp, holder.pub);
    REQUIRE(verified.ok());
    CHECK(verified->payload["iss"] == kSeed01JwkSha256);
    CHECK(verified->payload["iat"] == kNow);
    REQUIRE(verified->payload["vp"].size() == 2);
    CHECK(verified->payload["vp"][0] == t1);
    CHECK(verified->payload["vp"][1] == t2);

    SUBCASE("single-member presentations are valid") {
        auto single = vc::build_vp({t1}, holder, kNow);
        REQUIRE(single.ok());
    }

    SUBCASE("foreign-bound member is rejected") {
        auto stranger = jose::KeyPair::generate();
        auto foreign =
            vc::encode_vc_jwt(test::conformance_token(stranger.pub), as1);
        auto bad = vc::build_vp({t1, foreign}, holder, kNow);
        REQUIRE_FALSE(bad.ok());
        CHECK(bad.error().code == VcError::CnfMismatch);
    }

    SUBCASE("empty list is rejected") {
        auto bad = vc::build_vp({}, holder, kNow);
        REQUIRE_FALSE(bad.ok());
        CHECK(bad.error().code == VcError::EmptyTokenList);
    }

    SUBCASE("presentations do not nest") {
        auto nested = vc::build_vp({*vp}, holder, kNow);
        REQUIRE_FALSE(nested.ok());
        CHECK(nested.error().code == VcError::NestedPresentation);
    }
}

TEST_CASE("vp iss digest matches recomputing from any member's cnf key") {
    test::Rng rng(0x76706469676573);
    for (int i = 0; i < 25; ++i) {
        auto holder = jose::KeyPair::from_seed(rng.seed());
        auto as_key = jose::KeyPair::from_seed(rng.seed());
        auto token =
            vc::encode_vc_jwt(test::conformance_token(holder.pub), as_key);
        auto vp = vc::build_vp({token}, holder, kNow);
        REQUIRE(vp.ok());
        auto outer = jose::jws_peek(*vp);
        auto member = jose::jws_peek(outer->payload["vp"][0].get<std::string>());
        auto cnf = jose::PublicKeyJwk::from_json(
            member->payload["cnf"]["jwk"]);
        REQUIRE(cnf.has_value());
        CHECK(outer->payload["iss"] == jose::jwk_sha256_hex(*cnf));
    }
}

TEST_CASE("parse_presentation discriminates singles from presentations") {
    auto holder = test::fixed_keypair(0x01);
    auto as_key = test::fixed_keypair(0x02);
    auto single = vc::encode_vc_jwt(test::conformance_token(holder.pub), as_key);

    auto parsed_single = vc::parse_presentation(single);
    REQUIRE(parsed_single.ok());
    REQUIRE(std::holds_alternative<vc::ParsedSingle>(*parsed_single));
    CHECK(std::get<vc::ParsedSingle>(*parsed_single).claims.iss ==
          "https://mm.aueb.gr/as");

    auto vp = vc::build_vp({single, single}, holder, kNow);
    REQUIRE(vp.ok());
    auto parsed_vp = vc::parse_presentation(*vp);
    REQUIRE(parsed_vp.ok());
    REQUIRE(std::holds_alternative<vc::ParsedVp>(*parsed_vp));
    CHECK(std::get<vc::ParsedVp>(*parsed_vp).members.size() == 2);

    SUBCASE("payload carrying both vc and vp parses as presentation") {
        jose::Json pathological;
        pathological["iss"] = jose::jwk_sha256_hex(holder.pub);
        pathological["iat"] = kNow;
        pathological["vp"] = jose::Json::array({single});
        pathological["vc"] = test::conformance_token(holder.pub)
                                 .to_claims()["vc"];
        auto compact = jose::jws_sign(pathological, "jwt", holder);
        auto parsed = vc::parse_presentation(compact);
        REQUIRE(parsed.ok());
        CHECK(std::holds_alternative<vc::ParsedVp>(*parsed));
    }

    SUBCASE("garbage is malformed") {
        auto parsed = vc::parse_presentation("garbage");
        REQUIRE_FALSE(parsed.ok());
        CHECK(parsed.error().code == VcError::MalformedToken);
    }
}

TEST_CASE("property: built tokens always satisfy their own definition") {
    test::Rng rng(0x646566636865636b);
    auto def = vc::CredentialDefinition::capabilities_v1();
    for (int i = 0; i < 100; ++i) {
        auto kp = jose::KeyPair::from_seed(rng.seed());
        std::vector<vc::Capability> caps;
        std::size_t n = 1 + rng.next(4);
        for (std::size_t c = 0; c < n; ++c)
            caps.push_back(vc::Capability{rng.segment(), rng.rights()});
        auto token = vc::build_capability_vc(
            "https://as.example", kp.pub, caps, 1 + rng.next(864000),
            {rng.next(131072), "https://as.example/revocation-list"}, kNow);
        REQUIRE(token.ok());
        CHECK(vc::validate_credential_definition(token->vc, def) ==
              vc::DefinitionCheck::Ok);
        // And the claims shape survives a serialization round-trip.
        auto reparsed = vc::AccessTokenVc::from_claims(token->to_claims());
        REQUIRE(reparsed.has_value());
        CHECK(reparsed->vc.capabilities.size() == caps.size());
    }
}
