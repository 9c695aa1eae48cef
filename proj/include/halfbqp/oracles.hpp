#pragma once

#include <algorithm>
#include <unordered_map>

#include "halfbqp/gates.hpp"
#include "halfbqp/rng.hpp"
#include "halfbqp/tables.hpp"

namespace halfbqp {

// O_f |x> = f(x)|x>, f in {-1,+1}.
inline GateOp phase_oracle(const BooleanFunctionTable& t) {
    t.validate();
    return PhaseOracle{t, {}};
}

// O_f |x>|y> = |x>|y xor f(x)> on explicit registers.
inline GateOp index_oracle(const VectorFunctionTable& t, std::vector<int> in_reg,
                           std::vector<int> out_reg) {
    t.validate();
    return IndexOracle{t, std::move(in_reg), std::move(out_reg)};
}

// --- Simon ------------------------------------------------------------------

struct SimonInstance {
    int n = 0;
    u64 s = 0;
    VectorFunctionTable table;
};

// Grouping by output value gives an O(2^n) exhaustive check of
// f(x) = f(y) <=> x xor y in {0, s}.
inline void verify_simon_promise(const VectorFunctionTable& t, u64 s) {
    std::unordered_map<u64, u64> first_preimage;
    std::unordered_map<u64, int> count;
    for (u64 x = 0; x < t.values.size(); ++x) {
        u64 v = t(x);
        auto it = first_preimage.find(v);
        if (it == first_preimage.end()) {
            first_preimage[v] = x;
            count[v] = 1;
        } else {
            if ((it->second ^ x) != s || s == 0)
                throw std::runtime_error("Simon promise violated: unexpected collision");
            if (++count[v] > 2) throw std::runtime_error("Simon promise violated: triple collision");
        }
    }
    if (s != 0)
        for (auto& [v, c] : count)
            if (c != 2) throw std::runtime_error("Simon promise violated: unpaired value");
}

// Random table with hidden shift s: cosets of {0, s} get distinct random
// labels. s = 0 (injective f) is rejected unless allow_injective is set.
inline SimonInstance gen_simon(int n, u64 s, Rng& rng, bool allow_injective = false) {
    if (n < 2 || n > 16) throw std::invalid_argument("gen_simon: n out of range");
    if (n < 64 && (s >> n)) throw std::invalid_argument("gen_simon: s wider than n bits");
    if (s == 0 && !allow_injective)
        throw std::invalid_argument("gen_simon: s = 0 excluded by default (injective instance)");
    u64 size = u64{1} << n;
    std::vector<u64> labels(size);
    for (u64 i = 0; i < size; ++i) labels[i] = i;
    rng.shuffle(labels);

    std::vector<u64> values(size, ~u64{0});
    u64 next = 0;
    for (u64 x = 0; x < size; ++x) {
        if (values[x] != ~u64{0}) continue;
        u64 v = labels[next++];
        values[x] = v;
        if (s != 0) values[x ^ s] = v;
    }
    SimonInstance inst{n, s, VectorFunctionTable(n, n, std::move(values))};
    verify_simon_promise(inst.table, s);
    return inst;
}

// Embeds f into 2n input bits: f~(x) = f(prefix) when the n-bit suffix is
// zero, else 0. The lifted oracles for different hidden strings are close in
// normalized trace distance, which is the Simon-flavoured hardness input.
inline VectorFunctionTable lift_simon(const SimonInstance& inst) {
    int n = inst.n;
    u64 size = u64{1} << (2 * n);
    u64 suffix_mask = (u64{1} << n) - 1;
    std::vector<u64> values(size, 0);
    for (u64 x = 0; x < size; ++x)
        if ((x & suffix_mask) == 0) values[x] = inst.table(x >> n);
    return VectorFunctionTable(2 * n, n, std::move(values));
}

// --- Period finding ----------------------------------------------------------

struct PeriodicInstance {
    int n = 0;  // Q = 2^n
    u64 r = 0;
    VectorFunctionTable table;
};

// Grouping by value makes the exhaustive promise check O(2^n): every value
// class must be exactly one residue class mod r.
inline void verify_periodic_promise(const VectorFunctionTable& t, u64 r) {
    std::unordered_map<u64, u64> rep;
    for (u64 x = 0; x < t.values.size(); ++x) {
        u64 v = t(x);
        auto it = rep.find(v);
        if (it == rep.end())
            rep[v] = x % r;
        else if (it->second != x % r)
            throw std::runtime_error("periodic promise violated: cross-residue collision");
    }
    if (rep.size() != r) throw std::runtime_error("periodic promise violated: merged residues");
    for (u64 x = 0; x + r < t.values.size(); ++x)
        if (t(x) != t(x + r)) throw std::runtime_error("periodic promise violated: f(x) != f(x+r)");
}

// f(x) = label(x mod r) with distinct random labels; requires r <= sqrt(Q).
inline PeriodicInstance gen_periodic(int n, u64 r, Rng& rng) {
    if (n < 2 || n > 20) throw std::invalid_argument("gen_periodic: n out of range");
    u64 q = u64{1} << n;
    u64 root = static_cast<u64>(std::sqrt(static_cast<double>(q)) + 1e-9);
    if (r < 1 || r > root) throw std::invalid_argument("gen_periodic: need 1 <= r <= sqrt(2^n)");
    std::vector<u64> labels(q);
    for (u64 i = 0; i < q; ++i) labels[i] = i;
    rng.shuffle(labels);
    std::vector<u64> values(q);
    for (u64 x = 0; x < q; ++x) values[x] = labels[x % r];
    PeriodicInstance inst{n, r, VectorFunctionTable(n, n, std::move(values))};
    verify_periodic_promise(inst.table, r);
    return inst;
}

// --- Modular exponentiation ---------------------------------------------------

inline u64 mulmod_u64(u64 a, u64 b, u64 mod) { return (a * b) % mod; }  // fits: mod < 2^31 here

inline u64 powmod_u64(u64 base, u64 exp, u64 mod) {
    u64 r = 1 % mod;
    base %= mod;
    while (exp) {
        if (exp & 1) r = mulmod_u64(r, base, mod);
        base = mulmod_u64(base, base, mod);
        exp >>= 1;
    }
    return r;
}

// Table of x -> a^x mod N over 2*ceil(log2 N) input bits, built from the
// precomputed square chain b_i = a^{2^i} mod N.
inline VectorFunctionTable modexp_oracle(u64 a, u64 N) {
    if (N < 3 || N > (u64{1} << 12)) throw std::invalid_argument("modexp_oracle: N out of range");
    if (a <= 1 || a >= N) throw std::invalid_argument("modexp_oracle: need 1 < a < N");
    if (gcd_u64(a, N) != 1) throw std::invalid_argument("modexp_oracle: gcd(a, N) != 1");
    int L = 1;
    while ((u64{1} << L) < N) ++L;
    int in_bits = 2 * L;
    std::vector<u64> b(in_bits);  // b[i] = a^(2^i) mod N
    b[0] = a % N;
    for (int i = 1; i < in_bits; ++i) b[i] = mulmod_u64(b[static_cast<size_t>(i - 1)], b[static_cast<size_t>(i - 1)], N);
    u64 size = u64{1} << in_bits;
    std::vector<u64> values(size);
    for (u64 x = 0; x < size; ++x) {
        u64 acc = 1 % N;
        for (int i = 0; i < in_bits; ++i)
            if ((x >> i) & 1) acc = mulmod_u64(acc, b[static_cast<size_t>(i)], N);
        values[x] = acc;
    }
    return VectorFunctionTable(in_bits, L, std::move(values));
}

inline u64 multiplicative_order(u64 a, u64 N) {
    u64 v = a % N, r = 1;
    while (v != 1) {
        v = mulmod_u64(v, a, N);
        ++r;
        if (r > N) throw std::runtime_error("order not found (gcd(a,N) != 1?)");
    }
    return r;
}

// --- Forrelation --------------------------------------------------------------

enum class ForrelationLabel { none, small, large };

struct ForrelationInstance {
    int n = 0;
    BooleanFunctionTable f, g;
    ForrelationLabel label = ForrelationLabel::none;
};

namespace detail {
// unnormalized in-place Walsh-Hadamard butterfly
inline void fwht_inplace(std::vector<double>& a) {
    for (size_t h = 1; h < a.size(); h <<= 1)
        for (size_t i = 0; i < a.size(); i += 2 * h)
            for (size_t j = i; j < i + h; ++j) {
                double x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
}
}  // namespace detail

// Phi = 2^{-3n/2} sum_{x,y} f(x) (-1)^{x.y} g(y), evaluated through the Walsh
// form Phi = 2^{-n/2} sum_y fhat(y) g(y).
inline double forrelation_value(const BooleanFunctionTable& f, const BooleanFunctionTable& g) {
    if (f.n != g.n) throw std::invalid_argument("forrelation_value: width mismatch");
    if (f.n > 14) throw std::invalid_argument("forrelation_value: n exceeds cap 14");
    u64 size = u64{1} << f.n;
    std::vector<double> fh(size);
    for (u64 x = 0; x < size; ++x) fh[x] = f(x);
    detail::fwht_inplace(fh);  // fh[y] = sum_x f(x)(-1)^{x.y}
    double acc = 0.0;
    for (u64 y = 0; y < size; ++y) acc += fh[y] * g(y);
    return acc / (static_cast<double>(size) * std::sqrt(static_cast<double>(size)));
}

inline double forrelation_value(const ForrelationInstance& inst) {
    return forrelation_value(inst.f, inst.g);
}

// Direct O(4^n) double sum; the cross-check route.
inline double forrelation_value_naive(const BooleanFunctionTable& f,
                                      const BooleanFunctionTable& g) {
    u64 size = u64{1} << f.n;
    double acc = 0.0;
    for (u64 x = 0; x < size; ++x)
        for (u64 y = 0; y < size; ++y)
            acc += f(x) * g(y) * (dot2(x, y) ? -1.0 : 1.0);
    return acc / (static_cast<double>(size) * std::sqrt(static_cast<double>(size)));
}

// Inner-product bent function (even n): |fhat| = 2^{-n/2} everywhere, so the
// sign-of-spectrum partner achieves Phi = 1 exactly.
inline BooleanFunctionTable bent_inner_product(int n) {
    if (n < 2 || n % 2) throw std::invalid_argument("bent_inner_product: even n >= 2 required");
    u64 size = u64{1} << n;
    int half = n / 2;
    u64 lo_mask = (u64{1} << half) - 1;
    std::vector<int8_t> v(size);
    for (u64 x = 0; x < size; ++x) {
        u64 hi = x >> half, lo = x & lo_mask;
        v[x] = parity(hi & lo) ? -1 : 1;
    }
    return {n, std::move(v)};
}

// `large`: bent pair with up to 2^n/5 of g's signs flipped (keeps Phi >= 3/5).
// `small`: fresh uniform pairs until |Phi| <= 1/100.
inline ForrelationInstance gen_forrelation(int n, ForrelationLabel label, Rng& rng,
                                           int resample_budget = 20000) {
    if (label == ForrelationLabel::large) {
        if (n % 2) throw std::invalid_argument("gen_forrelation large: even n required");
        auto f = bent_inner_product(n);
        u64 size = u64{1} << n;
        std::vector<double> fh(size);
        for (u64 x = 0; x < size; ++x) fh[x] = f(x);
        detail::fwht_inplace(fh);
        std::vector<int8_t> gv(size);
        for (u64 y = 0; y < size; ++y) gv[y] = fh[y] >= 0 ? 1 : -1;
        BooleanFunctionTable g{n, std::move(gv)};

        u64 cap = size / 5;
        u64 flips = rng.next_below(cap + 1);
        std::vector<u64> idx(size);
        for (u64 i = 0; i < size; ++i) idx[i] = i;
        rng.shuffle(idx);
        for (u64 i = 0; i < flips; ++i) g.values[idx[i]] = static_cast<int8_t>(-g.values[idx[i]]);

        ForrelationInstance inst{n, std::move(f), std::move(g), label};
        if (forrelation_value(inst) < 0.6 - 1e-12)
            throw std::runtime_error("gen_forrelation: large promise recheck failed");
        return inst;
    }
    if (label == ForrelationLabel::small) {
        for (int tries = 0; tries < resample_budget; ++tries) {
            ForrelationInstance inst{n, BooleanFunctionTable::random(n, rng),
                                     BooleanFunctionTable::random(n, rng), label};
            if (std::abs(forrelation_value(inst)) <= 0.01) return inst;
        }
        throw std::runtime_error(
            "gen_forrelation: resample budget exhausted (success rate ~ 0.01/sd, sd = 2^{-n/2})");
    }
    return {n, BooleanFunctionTable::random(n, rng), BooleanFunctionTable::random(n, rng), label};
}

// --- Raz-Tal ------------------------------------------------------------------

enum class RazTalSource { D, U };

struct RazTalSample {
    int n = 0;
    RazTalSource source = RazTalSource::U;
    std::vector<int8_t> x, y;  // 2^n signs each
};

inline double raz_tal_epsilon(int n) { return 1.0 / (24.0 * n); }

// D: x ~ N(0, eps)^{2^n}, y = orthonormal Hadamard transform of x, truncate
// to [-1,1], then round each entry to a sign with Pr[+1] = (1+z)/2.
// U: independent uniform signs. The orthonormal transform keeps y marginally
// N(0, eps), which the truncation step presumes.
inline RazTalSample sample_raz_tal(int n, RazTalSource source, Rng& rng) {
    if (n < 1 || n > 20) throw std::invalid_argument("sample_raz_tal: n out of range");
    u64 size = u64{1} << n;
    RazTalSample s;
    s.n = n;
    s.source = source;
    s.x.resize(size);
    s.y.resize(size);
    if (source == RazTalSource::U) {
        for (u64 i = 0; i < size; ++i) s.x[i] = rng.next_bool() ? 1 : -1;
        for (u64 i = 0; i < size; ++i) s.y[i] = rng.next_bool() ? 1 : -1;
        return s;
    }
    double sd = std::sqrt(raz_tal_epsilon(n));
    std::vector<double> x(size);
    for (double& v : x) v = sd * rng.next_normal();
    std::vector<double> y = x;
    detail::fwht_inplace(y);
    double scale = 1.0 / std::sqrt(static_cast<double>(size));
    for (double& v : y) v *= scale;
    auto round_sign = [&](double z) {
        z = std::clamp(z, -1.0, 1.0);
        return rng.next_double() < (1.0 + z) / 2.0 ? int8_t{1} : int8_t{-1};
    };
    for (u64 i = 0; i < size; ++i) s.x[i] = round_sign(x[i]);
    for (u64 i = 0; i < size; ++i) s.y[i] = round_sign(y[i]);
    return s;
}

// Phi(x, y) for sign vectors; same functional as forrelation_value.
inline double raz_tal_phi(const RazTalSample& s) {
    u64 size = s.x.size();
    std::vector<double> yh(size);
    for (u64 i = 0; i < size; ++i) yh[i] = s.y[i];
    detail::fwht_inplace(yh);
    double acc = 0.0;
    for (u64 i = 0; i < size; ++i) acc += s.x[i] * yh[i];
    return acc / (static_cast<double>(size) * std::sqrt(static_cast<double>(size)));
}

inline BooleanFunctionTable sign_table(int n, const std::vector<int8_t>& signs) {
    return BooleanFunctionTable{n, signs};
}

// Samples serialize as one sign string of length 2 * 2^n: the x half then
// the y half, '+' / '-' per entry.
inline std::string raz_tal_to_string(const RazTalSample& s) {
    std::string out;
    out.reserve(s.x.size() + s.y.size());
    for (int8_t v : s.x) out += v > 0 ? '+' : '-';
    for (int8_t v : s.y) out += v > 0 ? '+' : '-';
    return out;
}

inline RazTalSample raz_tal_from_string(int n, const std::string& str,
                                        RazTalSource source = RazTalSource::U) {
    u64 size = u64{1} << n;
    if (str.size() != 2 * size) throw std::invalid_argument("raz-tal sign string length mismatch");
    RazTalSample s;
    s.n = n;
    s.source = source;
    s.x.resize(size);
    s.y.resize(size);
    for (u64 i = 0; i < size; ++i) {
        if (str[i] != '+' && str[i] != '-') throw std::invalid_argument("bad sign character");
        s.x[i] = str[i] == '+' ? 1 : -1;
    }
    for (u64 i = 0; i < size; ++i) s.y[i] = str[size + i] == '+' ? 1 : -1;
    return s;
}

}  // namespace halfbqp
