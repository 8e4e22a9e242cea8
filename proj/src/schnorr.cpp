// BIP-340 Schnorr signatures over secp256k1.
//
// Arithmetic uses GMP with Jacobian coordinates internally. Fixed-base
// multiplications go through 4-bit comb tables (one static table for G, a
// bounded cache for verification keys) so chain verification stays fast at
// property-test scale. This implementation is not constant-time; relay
// signing keys here attest custody, they do not guard funds.

#include "pott/schnorr.hpp"

#include "pott/errors.hpp"
#include "pott/sha256.hpp"

#include <gmpxx.h>

#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace pott::schnorr {

namespace {

const mpz_class& field_p() {
    static const mpz_class p("fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f", 16);
    return p;
}

const mpz_class& order_n() {
    static const mpz_class n("fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141", 16);
    return n;
}

mpz_class from_bytes(ByteView b) {
    mpz_class v;
    mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
    return v;
}

std::array<std::uint8_t, 32> to_bytes32(const mpz_class& v) {
    std::array<std::uint8_t, 32> out{};
    if (mpz_sizeinbase(v.get_mpz_t(), 2) > 256)
        throw Error(ErrorCode::InvalidKey, "scalar exceeds 256 bits");
    std::size_t count = 0;
    std::array<std::uint8_t, 32> raw{};
    mpz_export(raw.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
    std::copy(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(count),
              out.begin() + static_cast<std::ptrdiff_t>(32 - count));
    return out;
}

struct Affine {
    mpz_class x, y;
};

struct Jac {
    mpz_class x, y, z;
    bool inf = true;
};

void mod_p(mpz_class& v) { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), field_p().get_mpz_t()); }

Jac from_affine(const Affine& a) {
    return Jac{a.x, a.y, 1, false};
}

// dbl-2009-l
Jac dbl(const Jac& P) {
    if (P.inf) return P;
    const mpz_class& p = field_p();
    mpz_class A = P.x * P.x; mod_p(A);
    mpz_class B = P.y * P.y; mod_p(B);
    mpz_class C = B * B; mod_p(C);
    mpz_class t = P.x + B;
    mpz_class D = t * t - A - C; mod_p(D);
    D = 2 * D; mod_p(D);
    mpz_class E = 3 * A; mod_p(E);
    mpz_class F = E * E; mod_p(F);
    Jac R;
    R.inf = false;
    R.x = F - 2 * D; mod_p(R.x);
    if (R.x < 0) R.x += p;
    R.y = E * (D - R.x) - 8 * C; mod_p(R.y);
    if (R.y < 0) R.y += p;
    R.z = 2 * P.y * P.z; mod_p(R.z);
    return R;
}

// madd-2007-bl (Jacobian + affine)
Jac add_mixed(const Jac& P, const Affine& Q) {
    if (P.inf) return from_affine(Q);
    const mpz_class& p = field_p();
    mpz_class z1z1 = P.z * P.z; mod_p(z1z1);
    mpz_class u2 = Q.x * z1z1; mod_p(u2);
    mpz_class s2 = Q.y * P.z % p * z1z1; mod_p(s2);
    mpz_class h = u2 - P.x; mod_p(h);
    if (h < 0) h += p;
    mpz_class r = s2 - P.y; mod_p(r);
    if (r < 0) r += p;
    if (h == 0) {
        if (r == 0) return dbl(P);
        return Jac{}; // opposite points
    }
    r = 2 * r; mod_p(r);
    mpz_class hh = h * h; mod_p(hh);
    mpz_class i = 4 * hh; mod_p(i);
    mpz_class j = h * i; mod_p(j);
    mpz_class v = P.x * i; mod_p(v);
    Jac R;
    R.inf = false;
    R.x = r * r - j - 2 * v; mod_p(R.x);
    if (R.x < 0) R.x += p;
    R.y = r * (v - R.x) - 2 * P.y * j; mod_p(R.y);
    if (R.y < 0) R.y += p;
    mpz_class zh = P.z + h;
    R.z = zh * zh - z1z1 - hh; mod_p(R.z);
    if (R.z < 0) R.z += p;
    return R;
}

Affine to_affine(const Jac& P) {
    const mpz_class& p = field_p();
    mpz_class zinv;
    mpz_invert(zinv.get_mpz_t(), P.z.get_mpz_t(), p.get_mpz_t());
    mpz_class zinv2 = zinv * zinv % p;
    Affine a;
    a.x = P.x * zinv2 % p;
    a.y = P.y * zinv2 % p * zinv % p;
    return a;
}

// 4-bit fixed-base comb: table[i][j] = (j+1) * 16^i * B for 64 nibble positions.
struct CombTable {
    std::vector<std::array<Affine, 15>> rows;

    explicit CombTable(const Affine& base) {
        rows.resize(64);
        const mpz_class& p = field_p();
        Affine pos = base;
        for (int i = 0; i < 64; ++i) {
            std::array<Jac, 15> jac;
            jac[0] = from_affine(pos);
            for (int j = 1; j < 15; ++j)
                jac[j] = add_mixed(jac[j - 1], pos);
            // batch-normalize the row (Montgomery's trick)
            std::array<mpz_class, 15> zs, prefix;
            mpz_class acc = 1;
            for (int j = 0; j < 15; ++j) {
                zs[j] = jac[j].z;
                prefix[j] = acc;
                acc = acc * zs[j] % p;
            }
            mpz_class inv;
            mpz_invert(inv.get_mpz_t(), acc.get_mpz_t(), p.get_mpz_t());
            for (int j = 14; j >= 0; --j) {
                mpz_class zinv = inv * prefix[j] % p;
                inv = inv * zs[j] % p;
                mpz_class zinv2 = zinv * zinv % p;
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].x =
                    jac[j].x * zinv2 % p;
                rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].y =
                    jac[j].y * zinv2 % p * zinv % p;
            }
            // next position base: 16 * pos
            Jac nxt = dbl(dbl(dbl(dbl(from_affine(pos)))));
            pos = to_affine(nxt);
        }
    }

    Jac mul(const mpz_class& k) const {
        Jac acc;
        for (int i = 0; i < 64; ++i) {
            unsigned long nib = mpz_tstbit(k.get_mpz_t(), 4 * i) |
                                (mpz_tstbit(k.get_mpz_t(), 4 * i + 1) << 1) |
                                (mpz_tstbit(k.get_mpz_t(), 4 * i + 2) << 2) |
                                (mpz_tstbit(k.get_mpz_t(), 4 * i + 3) << 3);
            if (nib)
                acc = add_mixed(acc, rows[static_cast<std::size_t>(i)][nib - 1]);
        }
        return acc;
    }
};

const CombTable& generator_table() {
    static const CombTable table(Affine{
        mpz_class("79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798", 16),
        mpz_class("483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8", 16)});
    return table;
}

// Bounded per-pubkey comb cache for verification throughput.
class PubkeyTableCache {
public:
    std::shared_ptr<const CombTable> get(const NodeId& pub, const Affine& point) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(pub);
        if (it != map_.end())
            return it->second;
        if (map_.size() >= kMaxEntries)
            map_.clear();
        auto table = std::make_shared<const CombTable>(point);
        map_.emplace(pub, table);
        return table;
    }

private:
    static constexpr std::size_t kMaxEntries = 128;
    std::mutex mu_;
    std::map<NodeId, std::shared_ptr<const CombTable>> map_;
};

PubkeyTableCache& pubkey_cache() {
    static PubkeyTableCache cache;
    return cache;
}

bool lift_x(const mpz_class& x, Affine& out) {
    const mpz_class& p = field_p();
    if (x >= p)
        return false;
    mpz_class y_sq = (x * x % p * x + 7) % p;
    mpz_class exp = (p + 1) / 4;
    mpz_class y;
    mpz_powm(y.get_mpz_t(), y_sq.get_mpz_t(), exp.get_mpz_t(), p.get_mpz_t());
    if (y * y % p != y_sq)
        return false;
    out.x = x;
    out.y = mpz_even_p(y.get_mpz_t()) ? y : p - y;
    return true;
}

bool has_even_y(const Affine& a) { return mpz_even_p(a.y.get_mpz_t()) != 0; }

Digest32 challenge(const std::array<std::uint8_t, 32>& rx, const NodeId& pub, ByteView msg) {
    Bytes buf;
    buf.reserve(64 + msg.size());
    buf.insert(buf.end(), rx.begin(), rx.end());
    buf.insert(buf.end(), pub.begin(), pub.end());
    buf.insert(buf.end(), msg.begin(), msg.end());
    return tagged_sha256("BIP0340/challenge", buf);
}

} // namespace

Keypair keypair_from_secret(const std::array<std::uint8_t, 32>& secret) {
    mpz_class d = from_bytes(secret);
    if (d == 0 || d >= order_n())
        throw Error(ErrorCode::InvalidKey, "secret scalar out of range");
    Affine P = to_affine(generator_table().mul(d));
    Keypair kp;
    kp.secret = secret;
    auto xb = to_bytes32(P.x);
    std::copy(xb.begin(), xb.end(), kp.pub.begin());
    return kp;
}

Sig64 sign(ByteView msg, const Keypair& key, const std::array<std::uint8_t, 32>& aux_rand) {
    const mpz_class& n = order_n();
    mpz_class d0 = from_bytes(key.secret);
    if (d0 == 0 || d0 >= n)
        throw Error(ErrorCode::InvalidKey, "secret scalar out of range");
    Affine P = to_affine(generator_table().mul(d0));
    mpz_class d = has_even_y(P) ? d0 : n - d0;

    Digest32 aux_hash = tagged_sha256("BIP0340/aux", aux_rand);
    std::array<std::uint8_t, 32> t = to_bytes32(d);
    for (int i = 0; i < 32; ++i)
        t[static_cast<std::size_t>(i)] ^= aux_hash[static_cast<std::size_t>(i)];

    auto px = to_bytes32(P.x);
    Bytes nonce_input;
    nonce_input.reserve(64 + msg.size());
    nonce_input.insert(nonce_input.end(), t.begin(), t.end());
    nonce_input.insert(nonce_input.end(), px.begin(), px.end());
    nonce_input.insert(nonce_input.end(), msg.begin(), msg.end());
    Digest32 rand = tagged_sha256("BIP0340/nonce", nonce_input);

    mpz_class k0 = from_bytes(rand) % n;
    if (k0 == 0)
        throw Error(ErrorCode::InvalidKey, "degenerate nonce");
    Affine R = to_affine(generator_table().mul(k0));
    mpz_class k = has_even_y(R) ? k0 : n - k0;

    auto rx = to_bytes32(R.x);
    NodeId pub{};
    std::copy(px.begin(), px.end(), pub.begin());
    mpz_class e = from_bytes(challenge(rx, pub, msg)) % n;
    mpz_class s = (k + e * d) % n;

    Sig64 sig{};
    std::copy(rx.begin(), rx.end(), sig.begin());
    auto sb = to_bytes32(s);
    std::copy(sb.begin(), sb.end(), sig.begin() + 32);
    return sig;
}

bool verify(ByteView msg, const Sig64& sig, const NodeId& pub) {
    const mpz_class& p = field_p();
    const mpz_class& n = order_n();
    Affine P;
    if (!lift_x(from_bytes(ByteView(pub.data(), 32)), P))
        return false;
    mpz_class r = from_bytes(ByteView(sig.data(), 32));
    mpz_class s = from_bytes(ByteView(sig.data() + 32, 32));
    if (r >= p || s >= n)
        return false;
    std::array<std::uint8_t, 32> rx{};
    std::copy(sig.begin(), sig.begin() + 32, rx.begin());
    mpz_class e = from_bytes(challenge(rx, pub, msg)) % n;

    auto table = pubkey_cache().get(pub, P);
    Jac sG = generator_table().mul(s);
    Jac eP = table->mul((n - e) % n); // -e * P
    Jac R = eP.inf ? sG : sG;
    if (!eP.inf) {
        if (sG.inf) {
            R = eP;
        } else {
            // full Jacobian add via normalizing one side
            R = add_mixed(sG, to_affine(eP));
        }
    }
    if (R.inf)
        return false;
    Affine Ra = to_affine(R);
    if (!has_even_y(Ra))
        return false;
    return Ra.x == r;
}

bool valid_x_only_key(const NodeId& pub) {
    Affine P;
    return lift_x(from_bytes(ByteView(pub.data(), 32)), P);
}

} // namespace pott::schnorr
