#pragma once

#include <functional>

#include "halfbqp/parallel.hpp"
#include "halfbqp/simulate.hpp"

namespace halfbqp {

// Classical post-processing applied to (w, z) after both are known. `value`
// must land in [-1, 1]; `derived` optionally maps the pair to a corrected
// string for sampling-flavoured problems. Post-processing draws from its own
// rng stream, which reproduces the effect of carrying extra random registers
// through the circuit.
struct PostRule {
    std::string name = "custom";
    std::function<double(u64 w, u64 z, Rng&)> value;
    std::function<u64(u64 w, u64 z)> derived;
};

// The (C, f) pair: the circuit is fixed before any input is drawn, which is
// what makes "learn w at the end" structural rather than procedural.
struct HalfBqpProgram {
    Circuit circuit;
    PostRule post;
};

struct RunRecord {
    u64 w = 0;
    u64 z = 0;
    double value = 0.0;
    u64 derived = 0;
    u64 seed = 0;
};

struct JointDistribution {
    int n = 0;
    std::vector<double> p;  // index (w << n) | z

    explicit JointDistribution(int n_) : n(n_), p(u64{1} << (2 * n_), 0.0) {}
    double& at(u64 w, u64 z) { return p[(w << n) | z]; }
    double at(u64 w, u64 z) const { return p[(w << n) | z]; }

    double total() const {
        double s = 0.0;
        for (double v : p) s += v;
        return s;
    }
    std::vector<double> w_marginal() const {
        std::vector<double> m(u64{1} << n, 0.0);
        for (u64 w = 0; w < m.size(); ++w)
            for (u64 z = 0; z < m.size(); ++z) m[w] += at(w, z);
        return m;
    }
};

struct Estimate {
    double value = 0.0;
    double radius = 0.0;  // 99% Hoeffding
    u64 samples = 0;
};

// Hoeffding 99% confidence radius for a mean of [-1,1] samples.
inline double hoeffding_radius(u64 samples, double confidence = 0.99) {
    if (samples == 0) return 2.0;
    return std::sqrt(2.0 * std::log(2.0 / (1.0 - confidence)) / static_cast<double>(samples));
}

// One run of the model: draw w uniformly, run C|w>, measure, reveal w to the
// post-processing. The run and the post-processing consume separate streams
// derived from `seed`.
inline RunRecord sample_run_seeded(const HalfBqpProgram& p, u64 seed) {
    Rng run_rng(derive_seed(seed, 0));
    Rng post_rng(derive_seed(seed, 1));
    RunRecord rec;
    rec.seed = seed;
    rec.w = run_rng.next_bits(p.circuit.n);
    StateVector s = run_circuit(rec.w, p.circuit);
    rec.z = measure_all(s, run_rng);
    if (p.post.value) rec.value = p.post.value(rec.w, rec.z, post_rng);
    rec.derived = p.post.derived ? p.post.derived(rec.w, rec.z) : (rec.z ^ rec.w);
    return rec;
}

inline RunRecord sample_run(const HalfBqpProgram& p, Rng& rng) {
    return sample_run_seeded(p, rng.next_u64());
}

// Entry (w, z) = |<z|C|w>|^2 / 2^n, computed one input column at a time.
inline JointDistribution exact_joint_distribution(const HalfBqpProgram& p, int cap = 12) {
    int n = p.circuit.n;
    if (n > cap) throw std::invalid_argument("exact_joint_distribution: n exceeds cap");
    JointDistribution joint(n);
    double inv = 1.0 / static_cast<double>(u64{1} << n);
    for (u64 w = 0; w < (u64{1} << n); ++w) {
        StateVector s = run_circuit(w, p.circuit);
        for (u64 z = 0; z < s.size(); ++z) joint.at(w, z) = std::norm(s[z]) * inv;
    }
    return joint;
}

// The same law read off the entangled formulation: prepare
// sum_x |x>_L |x>_R / sqrt(2^n) on 2n qubits, apply C to the left half,
// measure everything. Outcome (z, w) has z on the left block.
inline JointDistribution epr_joint_distribution(const HalfBqpProgram& p, int cap = 6) {
    int n = p.circuit.n;
    if (n > cap) throw std::invalid_argument("epr_joint_distribution: n exceeds cap");
    StateVector s(2 * n);
    s[0] = 0.0;
    double amp = 1.0 / std::sqrt(static_cast<double>(u64{1} << n));
    for (u64 x = 0; x < (u64{1} << n); ++x) s[(x << n) | x] = amp;
    for (const GateOp& g : embed_circuit(p.circuit, 2 * n, 0)) apply_gate(s, g);
    JointDistribution joint(n);
    u64 mask = (u64{1} << n) - 1;
    for (u64 outcome = 0; outcome < s.size(); ++outcome) {
        double prob = std::norm(s[outcome]);
        if (prob == 0.0) continue;
        joint.at(outcome & mask, outcome >> n) += prob;
    }
    return joint;
}

// Monte-Carlo estimate of A = 2^-n sum_{w,z} |<z|C|w>|^2 f(w,z).
inline Estimate estimate_acceptance(const HalfBqpProgram& p, u64 samples, u64 master_seed) {
    if (samples == 0) throw std::invalid_argument("estimate_acceptance: samples >= 1 required");
    std::vector<double> vals(samples);
    parallel_for(samples, [&](size_t i) {
        vals[i] = sample_run_seeded(p, derive_seed(master_seed, i)).value;
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(samples);
    return {mean, hoeffding_radius(samples), samples};
}

// Exact A for cross-checks.
inline double exact_acceptance(const HalfBqpProgram& p, int cap = 12) {
    JointDistribution joint = exact_joint_distribution(p, cap);
    Rng dummy(0);
    double a = 0.0;
    u64 size = u64{1} << p.circuit.n;
    for (u64 w = 0; w < size; ++w)
        for (u64 z = 0; z < size; ++z) {
            double pr = joint.at(w, z);
            if (pr > 0.0 && p.post.value) a += pr * p.post.value(w, z, dummy);
        }
    return a;
}

struct Dqc1Result {
    Estimate p0;            // Pr[first qubit measures 0]
    u64 total_runs = 0;
    u64 retained_runs = 0;  // == total for run_dqc1
    bool retention_warning = false;
};

// DQC1 execution: the listed clean qubits are pinned to |0>, every other
// qubit is sampled uniformly, no postselection.
inline Dqc1Result run_dqc1(const Circuit& c, const std::vector<int>& clean_qubits, u64 samples,
                           u64 master_seed) {
    if (samples == 0) throw std::invalid_argument("run_dqc1: samples >= 1 required");
    u64 clean_mask = 0;
    for (int q : clean_qubits) clean_mask |= bit_of_qubit(q, c.n);
    u64 first = bit_of_qubit(0, c.n);
    std::vector<uint8_t> zeros(samples);
    parallel_for(samples, [&](size_t i) {
        Rng rng(derive_seed(master_seed, i));
        u64 w = rng.next_bits(c.n) & ~clean_mask;
        StateVector s = run_circuit(w, c);
        zeros[i] = (measure_all(s, rng) & first) == 0;
    });
    double mean = 0.0;
    for (uint8_t v : zeros) mean += v;
    mean /= static_cast<double>(samples);
    Dqc1Result r;
    r.p0 = {mean, hoeffding_radius(samples) / 2.0, samples};  // indicator range [0,1]
    r.total_runs = samples;
    r.retained_runs = samples;
    return r;
}

// The Fact 3.1 embedding: run the same circuit as a plain half-BQP program
// over a fully random w and keep only the runs whose clean bits came out 0.
// Expected retention is 2^-(#clean); total runs are padded so the expected
// retained count reaches `min_retained`.
inline Dqc1Result dqc1_via_halfbqp(const Circuit& c, const std::vector<int>& clean_qubits,
                                   u64 samples, u64 master_seed, u64 min_retained = 1000,
                                   u64 retention_floor = 50) {
    u64 clean_mask = 0;
    for (int q : clean_qubits) clean_mask |= bit_of_qubit(q, c.n);
    u64 amplification = u64{1} << clean_qubits.size();
    u64 total = std::max(samples, min_retained * amplification);
    u64 first = bit_of_qubit(0, c.n);

    std::vector<int8_t> outcome(total);  // -1 discarded, 0/1 first-bit result
    parallel_for(total, [&](size_t i) {
        Rng rng(derive_seed(master_seed, i));
        u64 w = rng.next_bits(c.n);
        StateVector s = run_circuit(w, c);
        u64 z = measure_all(s, rng);
        outcome[i] = (w & clean_mask) ? int8_t{-1} : int8_t{(z & first) == 0};
    });
    u64 retained = 0, zeros = 0;
    for (int8_t v : outcome)
        if (v >= 0) {
            ++retained;
            zeros += static_cast<u64>(v);
        }
    Dqc1Result r;
    r.total_runs = total;
    r.retained_runs = retained;
    r.retention_warning = retained < retention_floor;
    double mean = retained ? static_cast<double>(zeros) / static_cast<double>(retained) : 0.5;
    r.p0 = {mean, hoeffding_radius(std::max<u64>(retained, 1)) / 2.0, retained};
    return r;
}

// Hadamard-test circuit on 1 + u.n qubits; Pr[control = 0] is
// 1/2 + Re<w|U|w>/2 (imaginary variant inserts S^dag on the control).
inline Circuit hadamard_test(const Circuit& u, bool imaginary = false) {
    Circuit c;
    c.n = u.n + 1;
    c.ops.push_back(Hadamard{0});
    if (imaginary) c.ops.push_back(DiagonalPhase{{0}, {cplx{1.0, 0.0}, cplx{0.0, -1.0}}});
    for (GateOp& g : controlled_circuit(0, u, c.n, 1)) c.ops.push_back(std::move(g));
    c.ops.push_back(Hadamard{0});
    return c;
}

// --- post-processing registry ----------------------------------------------

// Rules available to program files; names are stable external interface.
inline PostRule make_post_rule(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    PostRule r;
    r.name = spec;
    if (name == "const-one") {
        r.value = [](u64, u64, Rng&) { return 1.0; };
    } else if (name == "dot-sign") {
        r.value = [](u64 w, u64 z, Rng&) { return dot2(w, z) ? -1.0 : 1.0; };
    } else if (name == "equals-input") {
        r.value = [](u64 w, u64 z, Rng&) { return w == z ? 1.0 : -1.0; };
    } else if (name == "equals-target") {
        u64 t = arg.empty() ? 0 : parse_bitstring(arg);
        r.value = [t](u64 w, u64 z, Rng&) { return (z ^ w) == t ? 1.0 : -1.0; };
        r.derived = [](u64 w, u64 z) { return z ^ w; };
    } else if (name == "xor-shift") {
        r.value = [](u64, u64, Rng&) { return 1.0; };
        r.derived = [](u64 w, u64 z) { return z ^ w; };
    } else if (name == "simon-collect") {
        // top-half xor for programs on 2n qubits with a (w1, w2) split;
        // the argument is n, the width of the second register
        if (arg.empty()) throw std::invalid_argument("simon-collect needs a width, e.g. simon-collect:4");
        int half = std::stoi(arg);
        r.value = [](u64, u64, Rng&) { return 1.0; };
        r.derived = [half](u64 w, u64 z) { return (w ^ z) >> half; };
    } else {
        throw std::invalid_argument("unknown post rule: " + spec);
    }
    return r;
}

}  // namespace halfbqp
