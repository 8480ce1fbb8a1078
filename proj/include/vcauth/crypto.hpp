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

#ifndef VCAUTH_CRYPTO_HPP
#define VCAUTH_CRYPTO_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace vcauth::crypto {

inline constexpr std::size_t kSeedSize = 32;
inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kSha256Size = 32;

using Seed = std::array<std::uint8_t, kSeedSize>;
using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using Sha256Digest = std::array<std::uint8_t, kSha256Size>;

/// Running totals of signature operations performed by this process.
/// Every Ed25519 sign/verify goes through this layer, so the counters
/// give an exact per-flow operation count when diffed around a call.
struct OpCounts {
    std::uint64_t signatures = 0;
    std::uint64_t verifications = 0;
};

OpCounts op_counts();
void reset_op_counts();

Seed random_seed();
std::string random_hex(std::size_t num_bytes);

PublicKey derive_public_key(const Seed& seed);

/// Detached Ed25519 signature over `message`. Increments the signature
/// counter.
Signature sign(std::span<const std::uint8_t> message, const Seed& seed,
               const PublicKey& public_key);

/// Detached Ed25519 verification. Increments the verification counter
/// whether or not the signature checks out.
bool verify(std::span<const std::uint8_t> message, const Signature& signature,
            const PublicKey& public_key);

Sha256Digest sha256(std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> data);

}  // namespace vcauth::crypto

#endif  // VCAUTH_CRYPTO_HPP
