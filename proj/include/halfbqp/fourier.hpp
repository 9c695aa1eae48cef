#pragma once

#include <functional>
#include <map>

#include "halfbqp/oracles.hpp"
#include "halfbqp/runtime.hpp"

namespace halfbqp {

// real-valued query access to f over n-bit inputs
using QueryFn = std::function<double(u64)>;

inline QueryFn table_query(const BooleanFunctionTable& t) {
    return [&t](u64 x) { return static_cast<double>(t(x)); };
}

struct FourierSpectrum {
    int n = 0;
    std::vector<double> coef;  // coef[s] = fhat_s

    double parseval_sum() const {
        double s = 0.0;
        for (double c : coef) s += c * c;
        return s;
    }

    // entries sorted by descending |coefficient|
    std::vector<std::pair<u64, double>> ranked() const {
        std::vector<std::pair<u64, double>> r;
        for (u64 s = 0; s < coef.size(); ++s) r.emplace_back(s, coef[s]);
        std::sort(r.begin(), r.end(),
                  [](auto& a, auto& b) { return std::abs(a.second) > std::abs(b.second); });
        return r;
    }
};

// fhat_s = 2^-n sum_x f(x) (-1)^{x.s} via the fast butterfly.
inline FourierSpectrum walsh_transform(const std::vector<double>& values) {
    u64 size = values.size();
    int n = 0;
    while ((u64{1} << n) < size) ++n;
    if ((u64{1} << n) != size) throw std::invalid_argument("walsh_transform: length not a power of 2");
    if (n > 24) throw std::invalid_argument("walsh_transform: n exceeds cap 24");
    FourierSpectrum sp;
    sp.n = n;
    sp.coef = values;
    detail::fwht_inplace(sp.coef);
    double inv = 1.0 / static_cast<double>(size);
    for (double& c : sp.coef) c *= inv;
    return sp;
}

inline FourierSpectrum walsh_transform(const BooleanFunctionTable& t) {
    std::vector<double> v(t.values.size());
    for (u64 i = 0; i < v.size(); ++i) v[i] = t.values[i];
    return walsh_transform(v);
}

// f(x) = sum_s fhat_s (-1)^{x.s}; exact inverse of walsh_transform.
inline std::vector<double> inverse_walsh(const FourierSpectrum& sp) {
    std::vector<double> v = sp.coef;
    detail::fwht_inplace(v);
    return v;
}

// Spectrum file format: one `<s-bits> <value>` line per coefficient,
// descending |value|.
inline void save_spectrum(std::ostream& out, const FourierSpectrum& sp) {
    out.precision(17);
    for (const auto& [s, value] : sp.ranked()) out << to_bitstring(s, sp.n) << " " << value << "\n";
}

inline FourierSpectrum load_spectrum(std::istream& in, int n) {
    FourierSpectrum sp;
    sp.n = n;
    sp.coef.assign(u64{1} << n, 0.0);
    std::string bits;
    double value;
    while (in >> bits >> value) sp.coef[parse_bitstring(bits)] = value;
    return sp;
}

// Fact 2.6 estimator: mean of f(x) (-1)^{x.s} over uniform x.
inline Estimate estimate_coefficient(const QueryFn& f, int n, u64 s, u64 samples, Rng& rng) {
    if (samples == 0) throw std::invalid_argument("estimate_coefficient: samples >= 1");
    double acc = 0.0;
    for (u64 i = 0; i < samples; ++i) {
        u64 x = rng.next_bits(n);
        acc += f(x) * (dot2(x, s) ? -1.0 : 1.0);
    }
    return {acc / static_cast<double>(samples), hoeffding_radius(samples), samples};
}

namespace detail {

// weight of the prefix bucket: W(p) = sum over s extending prefix p of fhat_s^2
//   = E_{y,y',suffix}[ f(y|suffix) f(y'|suffix) chi_p(y) chi_p(y') ]
// with y, y' over the k prefix bits and a shared suffix.
inline double estimate_bucket_weight(const QueryFn& f, int n, int k, u64 prefix, u64 samples,
                                     Rng& rng) {
    int suffix_bits = n - k;
    double acc = 0.0;
    for (u64 i = 0; i < samples; ++i) {
        u64 y = k ? rng.next_bits(k) : 0;
        u64 yp = k ? rng.next_bits(k) : 0;
        u64 suf = suffix_bits ? rng.next_bits(suffix_bits) : 0;
        double v = f((y << suffix_bits) | suf) * f((yp << suffix_bits) | suf);
        if (dot2(prefix, y ^ yp)) v = -v;
        acc += v;
    }
    return acc / static_cast<double>(samples);
}

}  // namespace detail

// Goldreich-Levin list decoding: returns every s with |fhat_s| >= tau (with
// failure probability <= fail_prob), |L| <= 4/tau^2. Prefix buckets are kept
// while their estimated weight clears tau^2/2; estimation error is held below
// tau^2/4 via a union bound over all bucket queries.
inline std::vector<u64> goldreich_levin(const QueryFn& f, int n, double tau, Rng& rng,
                                        double fail_prob = 1e-3) {
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("goldreich_levin: 0 < tau <= 1");
    double keep_threshold = tau * tau / 2.0;
    double max_error = tau * tau / 4.0;
    double max_buckets = 2.0 * n * (4.0 / (tau * tau) + 1.0) + 2.0;
    double delta_each = fail_prob / max_buckets;
    u64 samples = static_cast<u64>(std::ceil(2.0 * std::log(2.0 / delta_each) /
                                             (max_error * max_error))) + 1;

    std::vector<u64> prefixes{0};  // level 0: the empty prefix (weight 1)
    for (int k = 1; k <= n; ++k) {
        std::vector<u64> next;
        for (u64 p : prefixes) {
            for (u64 bit = 0; bit < 2; ++bit) {
                u64 child = (p << 1) | bit;
                double w = detail::estimate_bucket_weight(f, n, k, child, samples, rng);
                if (w >= keep_threshold) next.push_back(child);
            }
        }
        // cap the list: true weights sum to at most 1
        if (next.size() > static_cast<size_t>(8.0 / (tau * tau)) + 1) {
            std::sort(next.begin(), next.end());
            next.resize(static_cast<size_t>(8.0 / (tau * tau)) + 1);
        }
        prefixes = std::move(next);
        if (prefixes.empty()) break;
    }

    // soundness filter: keep candidates whose estimated |fhat_s| >= tau/2
    std::vector<u64> out;
    for (u64 s : prefixes) {
        Estimate e = estimate_coefficient(f, n, s, samples, rng);
        if (std::abs(e.value) >= tau / 2.0) out.push_back(s);
    }
    size_t cap = static_cast<size_t>(4.0 / (tau * tau));
    if (out.size() > cap) out.resize(cap);
    std::sort(out.begin(), out.end());
    return out;
}

// D_{s,s'} = 2^-n Tr(Z^s C^dag Z^{s'} C); always real.
inline double exact_trace_term(const CMatrix& u, u64 s, u64 sp) {
    int dim = u.dim;
    double acc = 0.0;
    for (int x = 0; x < dim; ++x)
        for (int y = 0; y < dim; ++y) {
            double v = std::norm(u(y, x));
            int sign = dot2(s, static_cast<u64>(x)) ^ dot2(sp, static_cast<u64>(y));
            acc += sign ? -v : v;
        }
    return acc / static_cast<double>(dim);
}

// The Fourier representation of the acceptance functional:
//   A = sum_{s,s'} fhat_{s,s'} 2^-n Tr(Z^s C^dag Z^{s'} C),
// evaluated as a full 4^n-term sum from the dense unitary. f is a table over
// (w, z) pairs indexed (w << n) | z.
inline double fourier_repr_A(const Circuit& c, const std::vector<double>& f_table, int cap = 5) {
    int n = c.n;
    if (n > cap) throw std::invalid_argument("fourier_repr_A: n exceeds cap");
    if (f_table.size() != (u64{1} << (2 * n)))
        throw std::invalid_argument("fourier_repr_A: f table must cover 2n bits");
    FourierSpectrum fhat = walsh_transform(f_table);
    CMatrix u = circuit_unitary(c, std::max(n, sim_caps().unitary));

    // D_{s,s'} for all pairs at once: two nested Walsh butterflies over the
    // probability matrix P[x][y] = |<y|C|x>|^2
    u64 dim = u64{1} << n;
    std::vector<std::vector<double>> d(dim, std::vector<double>(dim));
    for (u64 x = 0; x < dim; ++x)
        for (u64 y = 0; y < dim; ++y)
            d[x][y] = std::norm(u(static_cast<int>(y), static_cast<int>(x)));
    for (u64 x = 0; x < dim; ++x) detail::fwht_inplace(d[x]);  // over y -> s'
    std::vector<double> col(dim);
    for (u64 sp = 0; sp < dim; ++sp) {
        for (u64 x = 0; x < dim; ++x) col[x] = d[x][sp];
        detail::fwht_inplace(col);  // over x -> s
        for (u64 s = 0; s < dim; ++s) d[s][sp] = col[s];
    }

    double a = 0.0;
    double inv_dim = 1.0 / static_cast<double>(dim);
    for (u64 s = 0; s < dim; ++s)
        for (u64 sp = 0; sp < dim; ++sp)
            a += fhat.coef[(s << n) | sp] * d[s][sp] * inv_dim;
    return a;
}

struct SparseDqc1Result {
    Estimate estimate;      // radius includes the tail allowance
    std::vector<u64> support;
    u64 dqc1_samples_per_term = 0;
};

// DQC1 simulation of a half-BQP acceptance value for post-processing with a
// sparse Fourier spectrum (the coefficient set M is given explicitly, or
// discovered with Goldreich-Levin when empty). Each fhat on M is estimated by
// sampling f; each trace D_{s,s'} by the DQC1 Hadamard test on
// Z^s C^dag Z^{s'} C. The reported radius is the union-bound error budget
// plus the tail mass allowance eps_tail.
inline SparseDqc1Result dqc1_sim_sparse(const Circuit& c, const QueryFn& f,
                                        std::vector<u64> coefficient_set, double eps_tail,
                                        u64 samples, u64 master_seed, double discovery_tau = 0.0,
                                        u64 support_cap = 64) {
    int n = c.n;
    Rng rng(derive_seed(master_seed, 0));
    if (coefficient_set.empty()) {
        if (discovery_tau <= 0.0)
            throw std::invalid_argument("dqc1_sim_sparse: explicit M or discovery tau required");
        coefficient_set = goldreich_levin(f, 2 * n, discovery_tau, rng);
    }
    if (coefficient_set.size() > support_cap)
        throw std::runtime_error("dqc1_sim_sparse: discovered support exceeds cap");

    u64 mask = (u64{1} << n) - 1;
    double total = 0.0;
    double radius = eps_tail;
    u64 term_index = 1;
    for (u64 pair : coefficient_set) {
        u64 s = pair >> n, sp = pair & mask;
        Estimate fh = estimate_coefficient(f, 2 * n, pair, samples, rng);

        // V = Z^s C^dag Z^{s'} C as a circuit (rightmost factor applied first)
        Circuit v;
        v.n = n;
        for (const GateOp& g : c.ops) v.ops.push_back(g);
        v.ops.push_back(ZMask{sp});
        Circuit cinv = inverse_circuit(c);
        for (GateOp& g : cinv.ops) v.ops.push_back(std::move(g));
        v.ops.push_back(ZMask{s});

        // D is real, so the plain Hadamard test suffices: D = 2 Pr[0] - 1
        auto dq = run_dqc1(hadamard_test(v), {0}, samples, derive_seed(master_seed, term_index++));
        double d_est = 2.0 * dq.p0.value - 1.0;
        double d_rad = 2.0 * dq.p0.radius;

        total += fh.value * d_est;
        radius += fh.radius * std::abs(d_est) + std::abs(fh.value) * d_rad + fh.radius * d_rad;
    }
    SparseDqc1Result r;
    r.estimate = {total, radius, samples};
    r.support = std::move(coefficient_set);
    r.dqc1_samples_per_term = samples;
    return r;
}

}  // namespace halfbqp
