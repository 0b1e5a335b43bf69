#include "ciph/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <memory>

#include "ciph/errors.hpp"

namespace ciph::crypto {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
struct PkeyDeleter {
    void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
struct MacDeleter {
    void operator()(EVP_MAC* mac) const { EVP_MAC_free(mac); }
};
struct MacCtxDeleter {
    void operator()(EVP_MAC_CTX* ctx) const { EVP_MAC_CTX_free(ctx); }
};

using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

[[noreturn]] void fail(const char* what) { throw Error(std::string("crypto: ") + what); }

Pkey ed25519_private(std::span<const std::uint8_t> seed32) {
    if (seed32.size() != kEd25519SeedBytes) fail("ed25519 seed must be 32 bytes");
    Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed32.data(), seed32.size()));
    if (!key) fail("ed25519 private key construction failed");
    return key;
}

}  // namespace

Bytes sha256(std::span<const std::uint8_t> data) {
    Bytes digest(kSha256Bytes);
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != kSha256Bytes) {
        fail("sha256 failed");
    }
    return digest;
}

Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg) {
    std::unique_ptr<EVP_MAC, MacDeleter> mac(EVP_MAC_fetch(nullptr, "HMAC", nullptr));
    if (!mac) fail("HMAC fetch failed");
    std::unique_ptr<EVP_MAC_CTX, MacCtxDeleter> ctx(EVP_MAC_CTX_new(mac.get()));
    if (!ctx) fail("HMAC ctx failed");
    char digest_name[] = "SHA256";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
        OSSL_PARAM_construct_end(),
    };
    if (EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1) fail("HMAC init failed");
    if (EVP_MAC_update(ctx.get(), msg.data(), msg.size()) != 1) fail("HMAC update failed");
    Bytes out(kSha256Bytes);
    std::size_t len = 0;
    if (EVP_MAC_final(ctx.get(), out.data(), &len, out.size()) != 1 || len != kSha256Bytes) {
        fail("HMAC final failed");
    }
    return out;
}

Ed25519KeyPair ed25519_from_seed(std::span<const std::uint8_t> seed32) {
    Pkey key = ed25519_private(seed32);
    Bytes pub(kEd25519PublicKeyBytes);
    std::size_t len = pub.size();
    if (EVP_PKEY_get_raw_public_key(key.get(), pub.data(), &len) != 1 ||
        len != kEd25519PublicKeyBytes) {
        fail("ed25519 public key extraction failed");
    }
    return Ed25519KeyPair{std::move(pub), Bytes(seed32.begin(), seed32.end())};
}

Bytes ed25519_sign(std::span<const std::uint8_t> private_seed, std::span<const std::uint8_t> msg) {
    Pkey key = ed25519_private(private_seed);
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx) fail("sign ctx failed");
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        fail("sign init failed");
    }
    Bytes sig(kEd25519SignatureBytes);
    std::size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, msg.data(), msg.size()) != 1 ||
        len != kEd25519SignatureBytes) {
        fail("sign failed");
    }
    return sig;
}

bool ed25519_verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> msg,
                    std::span<const std::uint8_t> signature) {
    if (public_key.size() != kEd25519PublicKeyBytes ||
        signature.size() != kEd25519SignatureBytes) {
        return false;
    }
    Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, public_key.data(),
                                         public_key.size()));
    if (!key) return false;
    MdCtx ctx(EVP_MD_CTX_new());
    if (!ctx) return false;
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), msg.data(),
                            msg.size()) == 1;
}

Sealed aes256gcm_seal(std::span<const std::uint8_t> key32, std::span<const std::uint8_t> nonce12,
                      std::span<const std::uint8_t> plaintext) {
    if (key32.size() != kAeadKeyBytes) throw Error("aes256gcm: key must be 256 bits");
    if (nonce12.size() != kAeadNonceBytes) throw Error("aes256gcm: nonce must be 12 bytes");
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) fail("cipher ctx failed");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key32.data(), nonce12.data()) !=
        1) {
        fail("encrypt init failed");
    }
    Bytes out(plaintext.size() + kAeadTagBytes);
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1) {
        fail("encrypt update failed");
    }
    int total = len;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) fail("encrypt final failed");
    total += len;
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kAeadTagBytes,
                            out.data() + total) != 1) {
        fail("tag extraction failed");
    }
    out.resize(static_cast<std::size_t>(total) + kAeadTagBytes);
    return Sealed{Bytes(nonce12.begin(), nonce12.end()), std::move(out)};
}

Bytes aes256gcm_open(std::span<const std::uint8_t> key32, std::span<const std::uint8_t> nonce12,
                     std::span<const std::uint8_t> ciphertext) {
    if (key32.size() != kAeadKeyBytes) throw Error("aes256gcm: key must be 256 bits");
    if (nonce12.size() != kAeadNonceBytes || ciphertext.size() < kAeadTagBytes) {
        throw AuthenticationFailure("aes256gcm: malformed ciphertext");
    }
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) fail("cipher ctx failed");
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key32.data(), nonce12.data()) !=
        1) {
        fail("decrypt init failed");
    }
    std::size_t body_len = ciphertext.size() - kAeadTagBytes;
    Bytes out(body_len);
    int len = 0;
    if (body_len > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                                          static_cast<int>(body_len)) != 1) {
        throw AuthenticationFailure("aes256gcm: decryption failed");
    }
    int total = len;
    Bytes tag(ciphertext.end() - kAeadTagBytes, ciphertext.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kAeadTagBytes, tag.data()) != 1) {
        fail("tag set failed");
    }
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) != 1) {
        throw AuthenticationFailure("aes256gcm: authentication failed");
    }
    total += len;
    out.resize(static_cast<std::size_t>(total));
    return out;
}

}  // namespace ciph::crypto
