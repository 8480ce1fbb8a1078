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

#include "vcauth/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace vcauth::crypto {

namespace {

std::atomic<std::uint64_t> g_signatures{0};
std::atomic<std::uint64_t> g_verifications{0};

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0)
            throw std::runtime_error("libsodium initialization failed");
    });
}

// libsodium's secret key layout is seed || public key.
std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> secret_key(
    const Seed& seed, const PublicKey& public_key) {
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    static_assert(crypto_sign_SECRETKEYBYTES == kSeedSize + kPublicKeySize);
    std::copy(seed.begin(), seed.end(), sk.begin());
    std::copy(public_key.begin(), public_key.end(), sk.begin() + kSeedSize);
    return sk;
}

}  // namespace

OpCounts op_counts() {
    return OpCounts{g_signatures.load(), g_verifications.load()};
}

void reset_op_counts() {
    g_signatures.store(0);
    g_verifications.store(0);
}

Seed random_seed() {
    ensure_sodium();
    Seed seed;
    randombytes_buf(seed.data(), seed.size());
    return seed;
}

std::string random_hex(std::size_t num_bytes) {
    ensure_sodium();
    std::vector<std::uint8_t> buf(num_bytes);
    randombytes_buf(buf.data(), buf.size());
    return to_hex(buf);
}

PublicKey derive_public_key(const Seed& seed) {
    ensure_sodium();
    PublicKey pk{};
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    if (crypto_sign_seed_keypair(pk.data(), sk.data(), seed.data()) != 0)
        throw std::runtime_error("Ed25519 key derivation failed");
    sodium_memzero(sk.data(), sk.size());
    return pk;
}

Signature sign(std::span<const std::uint8_t> message, const Seed& seed,
               const PublicKey& public_key) {
    ensure_sodium();
    Signature sig{};
    auto sk = secret_key(seed, public_key);
    if (crypto_sign_detached(sig.data(), nullptr, message.data(),
                             message.size(), sk.data()) != 0) {
        sodium_memzero(sk.data(), sk.size());
        throw std::runtime_error("Ed25519 signing failed");
    }
    sodium_memzero(sk.data(), sk.size());
    g_signatures.fetch_add(1, std::memory_order_relaxed);
    return sig;
}

bool verify(std::span<const std::uint8_t> message, const Signature& signature,
            const PublicKey& public_key) {
    ensure_sodium();
    g_verifications.fetch_add(1, std::memory_order_relaxed);
    return crypto_sign_verify_detached(signature.data(), message.data(),
                                       message.size(),
                                       public_key.data()) == 0;
}

Sha256Digest sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    Sha256Digest digest{};
    crypto_hash_sha256(digest.data(), data.data(), data.size());
    return digest;
}

std::string to_hex(std::span<const std::uint8_t> data) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0f]);
    }
    return out;
}

}  // namespace vcauth::crypto
