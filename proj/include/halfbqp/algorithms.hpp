#pragma once

#include "halfbqp/fourier.hpp"
#include "halfbqp/oracles.hpp"
#include "halfbqp/runtime.hpp"

namespace halfbqp {

// ---------------------------------------------------------------------------
// Fourier sampling and its single-query relatives. Every circuit here runs on
// a random |w> and undoes the displacement in post-processing; the corrected
// output y xor w carries the answer.
// ---------------------------------------------------------------------------

inline HalfBqpProgram fourier_sampling_program(const BooleanFunctionTable& f) {
    return {Circuit{f.n, {HadamardAll{}, phase_oracle(f), HadamardAll{}}},
            make_post_rule("xor-shift")};
}

// One query; output y' distributed exactly as fhat(y')^2.
inline u64 fourier_sample(const BooleanFunctionTable& f, Rng& rng) {
    return sample_run(fourier_sampling_program(f), rng).derived;
}

enum class DjVerdict { constant, balanced };

// Single query, exact under the promise: corrected outcome 0^n iff constant.
inline DjVerdict deutsch_jozsa(const BooleanFunctionTable& f, Rng& rng) {
    return fourier_sample(f, rng) == 0 ? DjVerdict::constant : DjVerdict::balanced;
}

struct BvResult {
    u64 s = 0;
    bool verified = false;  // post hoc spot check that f is the character chi_s
};

inline BvResult bernstein_vazirani(const BooleanFunctionTable& f, Rng& rng) {
    BvResult r;
    r.s = fourier_sample(f, rng);
    r.verified = true;
    for (int i = 0; i < 16; ++i) {
        u64 x = rng.next_bits(f.n);
        if (f(x) != (dot2(r.s, x) ? -1 : 1)) r.verified = false;
    }
    return r;
}

// ---------------------------------------------------------------------------
// F2 linear algebra for Simon post-processing.
// ---------------------------------------------------------------------------

// Incremental row-echelon basis over F2.
class F2Basis {
public:
    explicit F2Basis(int n) : n_(n), pivot_row_(static_cast<size_t>(n), 0) {}

    // returns true iff v was independent of the current basis
    bool add(u64 v) {
        for (int b = n_ - 1; b >= 0; --b) {
            if (!((v >> b) & 1)) continue;
            if (pivot_row_[static_cast<size_t>(b)]) {
                v ^= pivot_row_[static_cast<size_t>(b)];
            } else {
                pivot_row_[static_cast<size_t>(b)] = v;
                ++rank_;
                return true;
            }
        }
        return false;
    }

    int rank() const { return rank_; }

    // All x with row.x = 0 for every basis row; includes 0.
    std::vector<u64> kernel() const {
        std::vector<int> free_cols;
        for (int b = 0; b < n_; ++b)
            if (!pivot_row_[static_cast<size_t>(b)]) free_cols.push_back(b);
        // reduce rows to RREF
        std::vector<u64> rows;
        for (int b = n_ - 1; b >= 0; --b)
            if (pivot_row_[static_cast<size_t>(b)]) rows.push_back(pivot_row_[static_cast<size_t>(b)]);
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < rows.size(); ++j)
                if (i != j) {
                    int pb = 63 - std::countl_zero(rows[i]);
                    if ((rows[j] >> pb) & 1) rows[j] ^= rows[i];
                }
        std::vector<u64> basis;
        for (int fc : free_cols) {
            u64 v = u64{1} << fc;
            for (u64 row : rows) {
                int pb = 63 - std::countl_zero(row);
                if ((row >> fc) & 1) v |= u64{1} << pb;
            }
            basis.push_back(v);
        }
        // span the basis
        std::vector<u64> out{0};
        for (u64 b : basis) {
            size_t sz = out.size();
            for (size_t i = 0; i < sz; ++i) out.push_back(out[i] ^ b);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    int n_;
    int rank_ = 0;
    std::vector<u64> pivot_row_;
};

// Unique solution of a rank-(n-1) homogeneous system (Simon recovery).
inline u64 f2_unique_kernel_vector(const F2Basis& basis) {
    auto k = basis.kernel();
    if (k.size() != 2) throw std::runtime_error("kernel is not one-dimensional");
    return k[1];
}

struct SimonResult {
    u64 s = 0;
    u64 queries = 0;
    bool injective = false;  // opt-in s = 0 instances
};

inline HalfBqpProgram simon_program(const VectorFunctionTable& table) {
    int n = table.n;
    Circuit c;
    c.n = n + table.m;
    for (int q = 0; q < n; ++q) c.ops.push_back(Hadamard{q});
    c.ops.push_back(index_oracle(table, range_reg(0, n - 1), range_reg(n, n + table.m - 1)));
    for (int q = 0; q < n; ++q) c.ops.push_back(Hadamard{q});
    return {std::move(c), make_post_rule("simon-collect:" + std::to_string(table.m))};
}

// Collects u = w1 xor y (each orthogonal to s with probability 1), solves the
// system at rank n-1, and confirms against the table. Aborts if the rank
// stagnates past 20n queries.
inline SimonResult simon_solve(const VectorFunctionTable& table, Rng& rng) {
    int n = table.n;
    HalfBqpProgram p = simon_program(table);
    F2Basis basis(n);
    SimonResult res;
    u64 budget = 20ull * static_cast<u64>(n);
    while (res.queries < budget) {
        RunRecord rec = sample_run(p, rng);
        ++res.queries;
        basis.add(rec.derived);
        if (basis.rank() == n) {
            // only an injective (s = 0) instance produces n independent rows
            res.s = 0;
            res.injective = true;
            return res;
        }
        if (basis.rank() == n - 1) {
            u64 s = f2_unique_kernel_vector(basis);
            if (s != 0 && table(0) == table(s)) {
                res.s = s;
                return res;
            }
            // candidate not confirmed: likely injective instance, keep querying
        }
    }
    throw std::runtime_error("simon_solve: rank stagnated past 20n queries (promise violated?)");
}

// ---------------------------------------------------------------------------
// Period finding, order finding, factoring.
// ---------------------------------------------------------------------------

// Denominator of the last convergent of c/q with denominator <= bound.
// Euclid produces the partial quotients a0, a1, ...; the denominators follow
// k_i = a_i k_{i-1} + k_{i-2} with k_{-1} = 0 and k_0 = 1 (the a0 convergent).
inline u64 continued_fraction_denominator(u64 c, u64 q, u64 bound) {
    if (q == 0 || bound == 0) throw std::invalid_argument("continued fraction: bad arguments");
    u64 num = c % q, den = q;  // a0 = floor(c/q) consumed; its convergent has denominator 1
    u64 k_prev = 0, k_cur = 1;
    u64 t = num;
    num = den;
    den = t;
    while (den != 0) {
        u64 a = num / den;
        u64 next = a * k_cur + k_prev;
        if (next > bound) break;
        k_prev = k_cur;
        k_cur = next;
        u64 rem = num % den;
        num = den;
        den = rem;
    }
    return k_cur;
}

inline HalfBqpProgram period_program(const VectorFunctionTable& table) {
    int n = table.n;
    Circuit c;
    c.n = n + table.m;
    c.ops.push_back(Qft{range_reg(0, n - 1)});
    c.ops.push_back(index_oracle(table, range_reg(0, n - 1), range_reg(n, n + table.m - 1)));
    c.ops.push_back(Qft{range_reg(0, n - 1)});
    return {std::move(c), PostRule{"period-shift", {}, {}}};
}

struct PeriodResult {
    u64 r = 0;
    u64 runs = 0;
};

// Each run measures y with (w1 + y) mod Q concentrated on multiples of Q/r;
// continued fractions propose denominators, their running lcm is reduced to
// its smallest verified divisor. `verify(r)` must hold exactly for multiples
// of the true period.
inline PeriodResult period_find(const VectorFunctionTable& table, Rng& rng,
                                const std::function<bool(u64)>& verify, u64 max_runs = 64) {
    int n = table.n;
    u64 q = u64{1} << n;
    u64 bound = static_cast<u64>(std::sqrt(static_cast<double>(q)));
    while ((bound + 1) * (bound + 1) <= q) ++bound;
    while (bound * bound > q) --bound;  // floor(sqrt(Q)); the promise keeps r below this

    PeriodResult res;
    if (verify(1)) {  // constant f
        res.r = 1;
        return res;
    }
    HalfBqpProgram p = period_program(table);
    u64 acc = 1;  // lcm of proposed denominators; reset when junk overflows it
    auto reduce = [&](u64 m) -> u64 {
        // smallest divisor of m that verifies; 0 if none
        for (u64 d = 2; d * d <= m; ++d)
            if (m % d == 0 && verify(d)) return d;
        for (u64 d = static_cast<u64>(std::sqrt(static_cast<double>(m))); d >= 1; --d)
            if (m % d == 0 && verify(m / d)) return m / d;
        return 0;
    };
    auto settle = [&](u64 cand) -> u64 {
        // cand or a small multiple of it may already be a period multiple
        for (u64 mult = 1; mult <= 64 && mult * cand < (u64{1} << n); ++mult)
            if (verify(mult * cand)) {
                u64 r = reduce(mult * cand);
                if (r != 0) return r;
            }
        return 0;
    };
    while (res.runs < max_runs) {
        RunRecord rec = sample_run(p, rng);
        ++res.runs;
        u64 w1 = rec.w >> table.m;
        u64 y = rec.z >> table.m;
        u64 c = (w1 + y) & (q - 1);
        if (c == 0) continue;
        u64 d = continued_fraction_denominator(c, q, bound);
        if (d <= 1) continue;
        u64 merged = lcm_clamped(acc, d, q);
        acc = (merged >= q) ? d : merged;  // a bad run poisoning the lcm resets it
        if (u64 r = settle(acc); r != 0) {
            res.r = r;
            return res;
        }
    }
    throw std::runtime_error("period_find: verification failed within the run budget");
}

inline PeriodResult period_find(const PeriodicInstance& inst, Rng& rng, u64 max_runs = 64) {
    const VectorFunctionTable& t = inst.table;
    u64 size = t.values.size();
    auto verify = [&t, size](u64 r) {
        if (r == 0 || r >= size) return false;
        // promise makes f(0) = f(r) equivalent to "r is a multiple of the
        // period"; the second probe is a consistency guard
        return t(0) == t(r) && (r + 1 >= size || t(1) == t(r + 1));
    };
    return period_find(t, rng, verify, max_runs);
}

struct OrderResult {
    u64 order = 0;
    u64 runs = 0;
};

// Order finding = period finding over the modular-exponentiation table, with
// verification by direct modular arithmetic.
inline OrderResult order_find(u64 a, u64 N, Rng& rng, u64 max_runs = 96) {
    VectorFunctionTable t = modexp_oracle(a, N);
    auto verify = [a, N](u64 r) { return r >= 1 && powmod_u64(a, r, N) == 1; };
    PeriodResult p = period_find(t, rng, verify, max_runs);
    return {p.r, p.runs};
}

struct FactorResult {
    bool ok = false;
    u64 p = 0, q = 0;
    u64 attempts = 0;
    std::string status;  // "factored", "prime", "prime-power", "even", "budget-exhausted"
};

inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline bool is_prime_power_u64(u64 n, u64* base = nullptr) {
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        u64 m = n;
        while (m % p == 0) m /= p;
        if (m == 1) {
            if (base) *base = p;
            return true;
        }
        return false;
    }
    return false;
}

// Textbook reduction to order finding: random a, even order r with
// a^{r/2} != -1 splits N through gcd(a^{r/2} +- 1, N).
inline FactorResult factor(u64 N, Rng& rng, u64 trial_budget = 32) {
    FactorResult res;
    if (N % 2 == 0) {
        res.status = "even";
        return res;
    }
    if (is_prime_u64(N)) {
        res.status = "prime";
        return res;
    }
    if (u64 b = 0; is_prime_power_u64(N, &b)) {
        res.status = "prime-power";
        return res;
    }
    while (res.attempts < trial_budget) {
        ++res.attempts;
        u64 a = 2 + rng.next_below(N - 3);
        u64 g = gcd_u64(a, N);
        if (g != 1) {  // lucky gcd shortcut
            res.ok = true;
            res.p = g;
            res.q = N / g;
            res.status = "factored";
            return res;
        }
        u64 r = order_find(a, N, rng).order;
        if (r % 2) continue;
        u64 t = powmod_u64(a, r / 2, N);
        if (t == N - 1) continue;
        u64 g1 = gcd_u64(t >= 1 ? t - 1 : 0, N);
        u64 g2 = gcd_u64(t + 1, N);
        for (u64 cand : {g1, g2})
            if (cand != 1 && cand != N && N % cand == 0) {
                res.ok = true;
                res.p = cand;
                res.q = N / cand;
                res.status = "factored";
                return res;
            }
    }
    res.status = "budget-exhausted";
    return res;
}

// ---------------------------------------------------------------------------
// IQP sampling.
// ---------------------------------------------------------------------------

inline bool is_diagonal_gate(const GateOp& g) {
    return std::visit(
        [](const auto& op) -> bool {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, PauliZ> || std::is_same_v<T, ZMask> ||
                          std::is_same_v<T, DiagonalPhase> || std::is_same_v<T, PhaseOracle>)
                return true;
            else if constexpr (std::is_same_v<T, DenseUnitary>) {
                for (int r = 0; r < op.matrix.dim; ++r)
                    for (int c = 0; c < op.matrix.dim; ++c)
                        if (r != c && std::abs(op.matrix(r, c)) > 1e-14) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Controlled>)
                return is_diagonal_gate(*op.inner);
            else
                return false;
        },
        static_cast<const GateVariant&>(g));
}

inline HalfBqpProgram iqp_program(const Circuit& diag) {
    for (const GateOp& g : diag.ops)
        if (!is_diagonal_gate(g)) throw std::invalid_argument("iqp: non-diagonal gate in D");
    Circuit c;
    c.n = diag.n;
    c.ops.push_back(HadamardAll{});
    for (const GateOp& g : diag.ops) c.ops.push_back(g);
    c.ops.push_back(HadamardAll{});
    return {std::move(c), make_post_rule("xor-shift")};
}

// Corrected sample z xor w is distributed exactly as H D H on |0^n>.
inline u64 iqp_sample(const Circuit& diag, Rng& rng) {
    return sample_run(iqp_program(diag), rng).derived;
}

// ---------------------------------------------------------------------------
// Weighted normalized trace estimation (the Hadamard-test estimator).
// ---------------------------------------------------------------------------

struct WeightedTraceEstimate {
    Estimate real_part, imag_part;
};

// Exact W_f Tr(C) = 2^-n sum_w f(w) <w|C|w> for cross-checks.
inline cplx exact_weighted_trace(const Circuit& c, const std::function<double(u64)>& weight,
                                 int cap = 12) {
    if (c.n > cap) throw std::invalid_argument("exact_weighted_trace: n exceeds cap");
    cplx acc = 0.0;
    u64 dim = u64{1} << c.n;
    for (u64 w = 0; w < dim; ++w) {
        StateVector s = run_circuit(w, c);
        acc += weight(w) * s[w];
    }
    return acc / static_cast<double>(dim);
}

// Per-run statistic f(w) (-1)^{control bit}, whose mean is 2A - E[f] with
// A = E[f(w) 1{control = 0}]; one pass for the real part, one with the
// phase-shifted test for the imaginary part.
inline WeightedTraceEstimate weighted_trace_estimate(const Circuit& c,
                                                     const std::function<double(u64)>& weight,
                                                     u64 samples, u64 master_seed) {
    if (samples == 0) throw std::invalid_argument("weighted_trace_estimate: samples >= 1");
    WeightedTraceEstimate out;
    for (int pass = 0; pass < 2; ++pass) {
        Circuit test = hadamard_test(c, pass == 1);
        u64 ctrl = bit_of_qubit(0, test.n);
        std::vector<double> vals(samples);
        parallel_for(samples, [&](size_t i) {
            Rng rng(derive_seed(master_seed, (static_cast<u64>(pass) << 32) | i));
            u64 w = rng.next_bits(c.n);  // control starts clean
            StateVector s = run_circuit(w, test);
            u64 z = measure_all(s, rng);
            double g = weight(w);
            vals[i] = (z & ctrl) ? -g : g;
        });
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(samples);
        Estimate e{mean, hoeffding_radius(samples), samples};
        (pass == 0 ? out.real_part : out.imag_part) = e;
    }
    return out;
}

// ---------------------------------------------------------------------------
// 2-Forrelation decision and the Raz-Tal distinguisher.
// ---------------------------------------------------------------------------

inline HalfBqpProgram forrelation2_program(const BooleanFunctionTable& f,
                                           const BooleanFunctionTable& g) {
    if (f.n != g.n) throw std::invalid_argument("forrelation2: width mismatch");
    return {Circuit{f.n, {HadamardAll{}, phase_oracle(f), HadamardAll{}, phase_oracle(g),
                          HadamardAll{}}},
            make_post_rule("dot-sign")};
}

// Exact E[R] = E[(-1)^{w.z}] over the joint law; equals Phi^2.
inline double forrelation2_exact_er(const BooleanFunctionTable& f, const BooleanFunctionTable& g,
                                    int cap = 12) {
    return exact_acceptance(forrelation2_program(f, g), cap);
}

struct ForrelationDecision {
    bool accept = false;
    double statistic = 0.0;  // sum of R_i
    int m = 14;
};

// Fixed decision rule: m = 14 runs, accept iff sum R_i >= 2m/5.
inline ForrelationDecision forrelation2_decide(const BooleanFunctionTable& f,
                                               const BooleanFunctionTable& g, Rng& rng,
                                               int m = 14) {
    HalfBqpProgram p = forrelation2_program(f, g);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += sample_run(p, rng).value;
    return {sum >= 2.0 * m / 5.0, sum, m};
}

// k-Forrelation value for exploratory instance generation (no solver is
// claimed): Phi_k via k-1 unnormalized transforms.
inline double k_forrelation_value(const std::vector<BooleanFunctionTable>& funcs) {
    if (funcs.empty()) throw std::invalid_argument("k_forrelation_value: no functions");
    int n = funcs[0].n;
    u64 size = u64{1} << n;
    for (const auto& f : funcs)
        if (f.n != n) throw std::invalid_argument("k_forrelation_value: width mismatch");
    std::vector<double> acc(size);
    for (u64 x = 0; x < size; ++x) acc[x] = funcs.back()(x);
    for (size_t j = funcs.size() - 1; j-- > 0;) {
        detail::fwht_inplace(acc);
        for (u64 x = 0; x < size; ++x) acc[x] *= funcs[j](x);
    }
    double sum = 0.0;
    for (double v : acc) sum += v;
    return sum / std::pow(std::sqrt(static_cast<double>(size)), static_cast<double>(funcs.size() + 1));
}

// Decision threshold for the Raz-Tal distinguisher. The population means are
// E_U[R] = 1/2^n exactly and E_D[R] = 1/2^n + eps^2 (1 + O(eps)), so the
// separator sits halfway across the eps^2 gap. (The asymptotic regime where
// 1/2^n is negligible against eps^2/4 only opens past n ~ 21, far beyond desk
// scale, so the threshold keeps the 1/2^n baseline explicit.)
inline double raz_tal_theta(int n) {
    double eps = raz_tal_epsilon(n);
    return std::pow(2.0, -n) + eps * eps / 2.0;
}

struct RazTalDecision {
    RazTalSource verdict = RazTalSource::U;
    double mean = 0.0;
    double std_error = 0.0;
    double theta = 0.0;
    u64 batch_size = 0;
};

// Per sample, the 2-Forrelation estimator on (x, y) — exactly (E[R] = Phi^2,
// via the identity verified at 1e-10 elsewhere) when runs_per_sample = 0, or
// as the mean of that many actual circuit runs. Symmetry of Phi in (x, y)
// fixes the query order.
inline RazTalDecision raz_tal_decide(const std::vector<RazTalSample>& batch, u64 master_seed,
                                     u64 runs_per_sample = 0, double theta = -1.0) {
    if (batch.empty()) throw std::invalid_argument("raz_tal_decide: empty batch");
    int n = batch[0].n;
    if (theta < 0.0) theta = raz_tal_theta(n);
    std::vector<double> stats(batch.size());
    parallel_for(batch.size(), [&](size_t i) {
        const RazTalSample& s = batch[i];
        if (runs_per_sample == 0) {
            double phi = raz_tal_phi(s);
            stats[i] = phi * phi;
        } else {
            HalfBqpProgram p = forrelation2_program(sign_table(n, s.x), sign_table(n, s.y));
            double acc = 0.0;
            for (u64 r = 0; r < runs_per_sample; ++r)
                acc += sample_run_seeded(p, derive_seed(master_seed, i * 131071 + r)).value;
            stats[i] = acc / static_cast<double>(runs_per_sample);
        }
    });
    double mean = 0.0, sq = 0.0;
    for (double v : stats) {
        mean += v;
        sq += v * v;
    }
    mean /= static_cast<double>(stats.size());
    sq /= static_cast<double>(stats.size());
    RazTalDecision d;
    d.mean = mean;
    d.std_error = std::sqrt(std::max(0.0, sq - mean * mean) / static_cast<double>(stats.size()));
    d.theta = theta;
    d.batch_size = batch.size();
    d.verdict = mean > theta ? RazTalSource::D : RazTalSource::U;
    return d;
}

// ---------------------------------------------------------------------------
// Grover in the half-BQP model.
// ---------------------------------------------------------------------------

inline BooleanFunctionTable grover_marked_table(int n, u64 omega) {
    auto t = BooleanFunctionTable::constant(n, 1);
    t.values[omega] = -1;
    return t;
}

// One Grover iterate: phase oracle then diffusion 2|s><s| - I.
inline std::vector<GateOp> grover_iterate_ops(int n, u64 omega) {
    auto flip_zero = BooleanFunctionTable::constant(n, -1);
    flip_zero.values[0] = 1;  // diag(+1, -1, ..., -1) = 2|0><0| - I
    return {phase_oracle(grover_marked_table(n, omega)), HadamardAll{},
            phase_oracle(flip_zero), HadamardAll{}};
}

struct GroverCurve {
    int n = 0;
    u64 omega = 0;
    std::vector<double> raw_success;        // Pr[z = omega], uniform w
    std::vector<double> corrected_success;  // Pr[z xor w = omega]
    std::vector<double> corrected_average;  // averaged over the marked item
    std::vector<double> envelope;           // 1/2^n + max_a D_k(omega, omega xor a)
    double two_marked_distance = 0.0;       // (1/2^n) Tr|O_f - O_g|
};

// Exact success curves for k = 0..kmax plus the trace-distance envelope that
// any oracle-independent readout's average success must respect.
inline GroverCurve grover_halfbqp_experiment(int n, u64 omega, int kmax) {
    if (n > 8) throw std::invalid_argument("grover experiment: n exceeds cap 8");
    u64 dim = u64{1} << n;
    int d = static_cast<int>(dim);
    GroverCurve out;
    out.n = n;
    out.omega = omega;
    out.envelope.assign(static_cast<size_t>(kmax) + 1, 0.0);
    out.corrected_average.assign(static_cast<size_t>(kmax) + 1, 0.0);

    // powers of the marked-omega iterate, kept for the fidelity products
    std::vector<CMatrix> omega_pow;
    {
        CMatrix g = circuit_unitary(Circuit{n, grover_iterate_ops(n, omega)}, std::max(n, 10));
        CMatrix acc = CMatrix::identity(d);
        for (int k = 0; k <= kmax; ++k) {
            omega_pow.push_back(acc);
            double raw = 0.0, corr = 0.0;
            for (u64 w = 0; w < dim; ++w) {
                raw += std::norm(acc(static_cast<int>(omega), static_cast<int>(w)));
                corr += std::norm(acc(static_cast<int>(omega ^ w), static_cast<int>(w)));
            }
            out.raw_success.push_back(raw / static_cast<double>(dim));
            out.corrected_success.push_back(corr / static_cast<double>(dim));
            if (k < kmax) acc = g * acc;
        }
    }

    // other marked items: envelope max and the marked-item-averaged corrected
    // success, one incremental power chain each
    for (u64 m = 0; m < dim; ++m) {
        CMatrix g = (m == omega)
                        ? CMatrix()
                        : circuit_unitary(Circuit{n, grover_iterate_ops(n, m)}, std::max(n, 10));
        CMatrix acc = CMatrix::identity(d);
        for (int k = 0; k <= kmax; ++k) {
            const CMatrix& cur = (m == omega) ? omega_pow[static_cast<size_t>(k)] : acc;
            double corr = 0.0;
            for (u64 w = 0; w < dim; ++w)
                corr += std::norm(cur(static_cast<int>(m ^ w), static_cast<int>(w)));
            out.corrected_average[static_cast<size_t>(k)] +=
                corr / static_cast<double>(dim * dim);
            if (m != omega) {
                cplx tr = (omega_pow[static_cast<size_t>(k)].adjoint() * cur).trace();
                double f = std::abs(tr) / static_cast<double>(dim);
                double dist = std::sqrt(std::max(0.0, 1.0 - f * f));
                out.envelope[static_cast<size_t>(k)] =
                    std::max(out.envelope[static_cast<size_t>(k)], dist);
            }
            if (m != omega && k < kmax) acc = g * acc;
        }
    }
    for (double& e : out.envelope) e += 1.0 / static_cast<double>(dim);

    // companion check input: normalized trace distance of two marked oracles
    CMatrix oa = circuit_unitary(Circuit{n, {phase_oracle(grover_marked_table(n, omega))}},
                                 std::max(n, 10));
    CMatrix ob = circuit_unitary(
        Circuit{n, {phase_oracle(grover_marked_table(n, omega ^ (dim - 1)))}}, std::max(n, 10));
    auto sv = singular_values(oa - ob);
    double tr = 0.0;
    for (double v : sv) tr += v;
    out.two_marked_distance = tr / static_cast<double>(dim);
    return out;
}

}  // namespace halfbqp
