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

#include "vcauth/jose.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vcauth/base64url.hpp"

namespace vcauth::jose {

namespace {

constexpr std::string_view kAlg = "EdDSA";

std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

struct Segments {
    std::string_view header;
    std::string_view payload;
    std::string_view signature;
};

std::optional<Segments> split_segments(std::string_view compact) {
    auto first = compact.find('.');
    if (first == std::string_view::npos)
        return std::nullopt;
    auto second = compact.find('.', first + 1);
    if (second == std::string_view::npos)
        return std::nullopt;
    if (compact.find('.', second + 1) != std::string_view::npos)
        return std::nullopt;
    return Segments{compact.substr(0, first),
                    compact.substr(first + 1, second - first - 1),
                    compact.substr(second + 1)};
}

std::optional<Json> parse_object(std::string_view text) {
    Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        return std::nullopt;
    return j;
}

}  // namespace

const char* to_string(JoseError e) {
    switch (e) {
        case JoseError::MalformedToken: return "malformed_token";
        case JoseError::UnsupportedAlgorithm: return "unsupported_algorithm";
        case JoseError::BadSignature: return "bad_signature";
    }
    return "unknown";
}

const char* to_string(TimeCheck c) {
    switch (c) {
        case TimeCheck::Ok: return "ok";
        case TimeCheck::Expired: return "expired";
        case TimeCheck::NotFresh: return "not_fresh";
    }
    return "unknown";
}

std::string PublicKeyJwk::x_b64() const {
    return base64url::encode(std::span<const std::uint8_t>(x));
}

std::string PublicKeyJwk::canonical() const {
    return "{\"crv\":\"Ed25519\",\"kty\":\"OKP\",\"x\":\"" + x_b64() + "\"}";
}

Json PublicKeyJwk::to_json() const {
    Json j;
    j["crv"] = "Ed25519";
    j["kty"] = "OKP";
    j["x"] = x_b64();
    return j;
}

std::optional<PublicKeyJwk> PublicKeyJwk::from_json(const Json& j) {
    if (!j.is_object())
        return std::nullopt;
    if (j.value("kty", "") != "OKP" || j.value("crv", "") != "Ed25519")
        return std::nullopt;
    if (!j.contains("x") || !j["x"].is_string())
        return std::nullopt;
    auto bytes = base64url::decode(j["x"].get<std::string>());
    if (!bytes || bytes->size() != crypto::kPublicKeySize)
        return std::nullopt;
    PublicKeyJwk key;
    std::copy(bytes->begin(), bytes->end(), key.x.begin());
    return key;
}

KeyPair KeyPair::generate() {
    return from_seed(crypto::random_seed());
}

KeyPair KeyPair::from_seed(const crypto::Seed& seed) {
    KeyPair kp;
    kp.seed = seed;
    kp.pub.x = crypto::derive_public_key(seed);
    return kp;
}

void save_keypair(const std::string& path, const KeyPair& kp) {
    Json j;
    j["crv"] = "Ed25519";
    j["kty"] = "OKP";
    j["x"] = kp.pub.x_b64();
    j["d"] = base64url::encode(std::span<const std::uint8_t>(kp.seed));
    std::string text = j.dump();
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write keypair file: " + path);
    out << text << '\n';
    out.close();
    ::chmod(path.c_str(), 0600);
}

std::optional<KeyPair> load_keypair(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        return std::nullopt;
    std::stringstream buf;
    buf << in.rdbuf();
    auto j = parse_object(buf.str());
    if (!j || !j->contains("d") || !(*j)["d"].is_string())
        return std::nullopt;
    auto seed_bytes = base64url::decode((*j)["d"].get<std::string>());
    if (!seed_bytes || seed_bytes->size() != crypto::kSeedSize)
        return std::nullopt;
    crypto::Seed seed{};
    std::copy(seed_bytes->begin(), seed_bytes->end(), seed.begin());
    auto kp = KeyPair::from_seed(seed);
    // Cross-check the stored public half when present.
    if (auto pub = PublicKeyJwk::from_json(*j); pub && !(*pub == kp.pub))
        return std::nullopt;
    return kp;
}

std::string jws_sign(const Json& payload, std::string_view typ,
                     const KeyPair& signer, const Json& extra_header) {
    Json header;
    header["typ"] = std::string(typ);
    header["alg"] = std::string(kAlg);
    if (extra_header.is_object()) {
        for (const auto& [k, v] : extra_header.items())
            header[k] = v;
    }
    std::string signing_input = base64url::encode(header.dump()) + "." +
                                base64url::encode(payload.dump());
    auto sig = crypto::sign(as_bytes(signing_input), signer.seed, signer.pub.x);
    return signing_input + "." +
           base64url::encode(std::span<const std::uint8_t>(sig));
}

Result<DecodedJws, JoseError> jws_peek(std::string_view compact) {
    auto segs = split_segments(compact);
    if (!segs)
        return fail(JoseError::MalformedToken, "expected three segments");
    auto header_text = base64url::decode_string(segs->header);
    auto payload_text = base64url::decode_string(segs->payload);
    if (!header_text || !payload_text)
        return fail(JoseError::MalformedToken, "invalid base64url");
    auto header = parse_object(*header_text);
    auto payload = parse_object(*payload_text);
    if (!header || !payload)
        return fail(JoseError::MalformedToken, "segment is not a JSON object");
    return DecodedJws{std::move(*header), std::move(*payload)};
}

Result<DecodedJws, JoseError> jws_verify(std::string_view compact,
                                         const PublicKeyJwk& key) {
    auto segs = split_segments(compact);
    if (!segs)
        return fail(JoseError::MalformedToken, "expected three segments");
    auto decoded = jws_peek(compact);
    if (!decoded)
        return decoded;
    const Json& header = decoded->header;
    if (!header.contains("alg") || !header["alg"].is_string())
        return fail(JoseError::MalformedToken, "header has no alg");
    if (header["alg"].get<std::string>() != kAlg)
        return fail(JoseError::UnsupportedAlgorithm,
                    "alg is not EdDSA: " + header["alg"].get<std::string>());
    auto sig_bytes = base64url::decode(segs->signature);
    if (!sig_bytes || sig_bytes->size() != crypto::kSignatureSize)
        return fail(JoseError::MalformedToken, "signature is not 64 bytes");
    crypto::Signature sig{};
    std::copy(sig_bytes->begin(), sig_bytes->end(), sig.begin());
    std::string signing_input;
    signing_input.reserve(segs->header.size() + 1 + segs->payload.size());
    signing_input.append(segs->header).push_back('.');
    signing_input.append(segs->payload);
    if (!crypto::verify(as_bytes(signing_input), sig, key.x))
        return fail(JoseError::BadSignature, "signature check failed");
    return decoded;
}

TimeCheck check_time_window(const TimeWindow& claims, std::int64_t now,
                            std::int64_t skew) {
    if (claims.exp && now > *claims.exp + skew)
        return TimeCheck::Expired;
    if (now < claims.iat - skew)
        return TimeCheck::NotFresh;
    return TimeCheck::Ok;
}

std::string jwk_sha256_hex(const PublicKeyJwk& key) {
    std::string canon = key.canonical();
    auto digest = crypto::sha256(as_bytes(canon));
    return crypto::to_hex(digest);
}

}  // namespace vcauth::jose
