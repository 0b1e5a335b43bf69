#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "ciph/bytes.hpp"
#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"
#include "ciph/rng.hpp"

using namespace ciph;

TEST_CASE("sha256 matches the published test vector") {
    // Standard SHA-256 of ASCII "hello"; checkable with any external tool.
    Bytes digest = crypto::sha256(to_bytes("hello"));
    CHECK(to_hex(digest) == "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
}

TEST_CASE("hmac-sha256 matches RFC 4231 test case 2") {
    Bytes key = to_bytes("Jefe");
    Bytes msg = to_bytes("what do ya want for nothing?");
    CHECK(to_hex(crypto::hmac_sha256(key, msg)) ==
          "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("ed25519 sign/verify round trip") {
    Bytes seed(32, 0x42);
    auto kp = crypto::ed25519_from_seed(seed);
    CHECK(kp.public_key.size() == 32);
    Bytes msg = to_bytes("attested message");
    Bytes sig = crypto::ed25519_sign(kp.private_seed, msg);
    CHECK(sig.size() == 64);
    CHECK(crypto::ed25519_verify(kp.public_key, msg, sig));

    Bytes other_seed(32, 0x43);
    auto other = crypto::ed25519_from_seed(other_seed);
    CHECK_FALSE(crypto::ed25519_verify(other.public_key, msg, sig));

    Bytes tampered = msg;
    tampered[0] ^= 1;
    CHECK_FALSE(crypto::ed25519_verify(kp.public_key, tampered, sig));
}

TEST_CASE("ed25519 signatures are deterministic") {
    Bytes seed(32, 0x07);
    auto kp = crypto::ed25519_from_seed(seed);
    Bytes msg = to_bytes("same input");
    CHECK(crypto::ed25519_sign(kp.private_seed, msg) ==
          crypto::ed25519_sign(kp.private_seed, msg));
}

TEST_CASE("aes-256-gcm seals and opens") {
    Bytes key(32, 0x11);
    Bytes nonce(12, 0x22);
    Bytes plaintext = to_bytes("template bytes");
    auto sealed = crypto::aes256gcm_seal(key, nonce, plaintext);
    CHECK(sealed.ciphertext.size() == plaintext.size() + crypto::kAeadTagBytes);
    CHECK(crypto::aes256gcm_open(key, sealed.nonce, sealed.ciphertext) == plaintext);

    Bytes wrong_key(32, 0x12);
    CHECK_THROWS_AS(crypto::aes256gcm_open(wrong_key, sealed.nonce, sealed.ciphertext),
                    AuthenticationFailure);

    Bytes tampered = sealed.ciphertext;
    tampered[3] ^= 0x80;
    CHECK_THROWS_AS(crypto::aes256gcm_open(key, sealed.nonce, tampered), AuthenticationFailure);
}

TEST_CASE("hex and base64url round trip") {
    Bytes data{0x00, 0xff, 0x10, 0xab, 0x7e};
    CHECK(*from_hex(to_hex(data)) == data);
    CHECK(*base64url_decode(base64url_encode(data)) == data);
    CHECK_FALSE(from_hex("abc"));
    CHECK_FALSE(from_hex("zz"));
    CHECK_FALSE(base64url_decode("a"));
    CHECK_FALSE(base64url_decode("++"));
}

TEST_CASE("rng streams are deterministic and seed-sensitive") {
    Rng a(1234), b(1234), c(1235);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    bool differs = false;
    Rng a2(1234);
    for (int i = 0; i < 100; ++i) differs |= (a2.next() != c.next());
    CHECK(differs);
}

TEST_CASE("derived substreams are independent of draw order") {
    Rng a = Rng::derive(7, "lat", 3, 1);
    Rng b = Rng::derive(7, "lat", 3, 2);
    Rng a_again = Rng::derive(7, "lat", 3, 1);
    CHECK(a.next() == a_again.next());
    CHECK(a.next() != b.next());
}

TEST_CASE("normal approximation has the right first moments") {
    Rng rng(99);
    const int n = 200'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal();
        sum += x;
        sum_sq += x * x;
        CHECK(std::abs(x) <= 6.0);
    }
    double mean = sum / n;
    double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_int stays in range and covers endpoints") {
    Rng rng(5);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        std::int64_t v = rng.uniform_int(3, 7);
        CHECK(v >= 3);
        CHECK(v <= 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}
