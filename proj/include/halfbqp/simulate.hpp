#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "halfbqp/gates.hpp"
#include "halfbqp/rng.hpp"
#include "halfbqp/state.hpp"

namespace halfbqp {

namespace detail {

constexpr double inv_sqrt2 = 0.70710678118654752440;

// Every kernel takes a control mask; amplitudes whose index does not satisfy
// (i & ctrl) == ctrl are left untouched. Controlled gates recurse with the
// control bit added to the mask. Validation guarantees ctrl is disjoint from
// the gate's support, so kernels never pair a touched index with an
// untouched one.

inline void kernel_hadamard(StateVector& s, int target, u64 ctrl) {
    u64 b = bit_of_qubit(target, s.n());
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i) {
        if ((i & b) || (i & ctrl) != ctrl) continue;
        cplx a0 = s[i], a1 = s[i | b];
        s[i] = (a0 + a1) * inv_sqrt2;
        s[i | b] = (a0 - a1) * inv_sqrt2;
    }
}

inline void kernel_xmask(StateVector& s, u64 mask, u64 ctrl) {
    if (mask == 0) return;
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i) {
        u64 j = i ^ mask;
        if (j < i || (i & ctrl) != ctrl) continue;
        std::swap(s[i], s[j]);
    }
}

inline void kernel_zmask(StateVector& s, u64 mask, u64 ctrl) {
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i)
        if ((i & ctrl) == ctrl && parity(i & mask)) s[i] = -s[i];
}

inline void kernel_diagonal(StateVector& s, const std::vector<int>& qubits,
                            const std::vector<cplx>& phases, u64 ctrl) {
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i)
        if ((i & ctrl) == ctrl) s[i] *= phases[gather_bits(i, qubits, s.n())];
}

inline void kernel_phase_oracle(StateVector& s, const BooleanFunctionTable& t,
                                const std::vector<int>& reg, u64 ctrl) {
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i)
        if ((i & ctrl) == ctrl && t(gather_bits(i, reg, s.n())) < 0) s[i] = -s[i];
}

inline void kernel_index_oracle(StateVector& s, const VectorFunctionTable& t,
                                const std::vector<int>& in_reg, const std::vector<int>& out_reg,
                                u64 ctrl) {
    u64 size = s.size();
    for (u64 i = 0; i < size; ++i) {
        if ((i & ctrl) != ctrl) continue;
        u64 fx = t(gather_bits(i, in_reg, s.n()));
        if (fx == 0) continue;
        u64 y = gather_bits(i, out_reg, s.n());
        u64 j = scatter_bits(i, out_reg, s.n(), y ^ fx);
        if (j > i) std::swap(s[i], s[j]);
    }
}

// In-place radix-2 transform: buf[y] <- (1/sqrt(Q)) sum_x buf[x] e^{sign 2 pi i x y / Q}
inline void dft_pow2(std::vector<cplx>& buf, int sign) {
    const u64 q = buf.size();
    // bit reversal
    for (u64 i = 1, j = 0; i < q; ++i) {
        u64 bit = q >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(buf[i], buf[j]);
    }
    for (u64 len = 2; len <= q; len <<= 1) {
        double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        cplx wl(std::cos(ang), std::sin(ang));
        for (u64 i = 0; i < q; i += len) {
            cplx w = 1.0;
            for (u64 k = 0; k < len / 2; ++k) {
                cplx u = buf[i + k];
                cplx v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(q));
    for (cplx& a : buf) a *= scale;
}

// Iterate over each assignment of the qubits outside `reg`, gathering the
// 2^k register amplitudes into a buffer for `body` to transform in place.
template <typename Body>
void for_each_register_slice(StateVector& s, const std::vector<int>& reg, u64 ctrl, Body&& body) {
    int n = s.n();
    int k = static_cast<int>(reg.size());
    u64 q = u64{1} << k;
    u64 reg_mask = 0;
    for (int qu : reg) reg_mask |= bit_of_qubit(qu, n);
    std::vector<u64> offset(q);
    for (u64 x = 0; x < q; ++x) offset[x] = scatter_bits(0, reg, n, x);
    std::vector<cplx> buf(q);
    u64 size = s.size();
    for (u64 base = 0; base < size; ++base) {
        if ((base & reg_mask) || (base & ctrl) != ctrl) continue;
        for (u64 x = 0; x < q; ++x) buf[x] = s[base | offset[x]];
        body(buf);
        for (u64 x = 0; x < q; ++x) s[base | offset[x]] = buf[x];
    }
}

inline void kernel_qft(StateVector& s, const std::vector<int>& reg, int sign, u64 ctrl) {
    for_each_register_slice(s, reg, ctrl, [&](std::vector<cplx>& buf) { dft_pow2(buf, sign); });
}

inline void kernel_dense(StateVector& s, const DenseUnitary& g, u64 ctrl) {
    u64 q = u64{1} << g.qubits.size();
    std::vector<cplx> tmp(q);
    for_each_register_slice(s, g.qubits, ctrl, [&](std::vector<cplx>& buf) {
        for (u64 r = 0; r < q; ++r) {
            cplx acc = 0.0;
            const cplx* row = &g.matrix.a[r * q];
            for (u64 c = 0; c < q; ++c) acc += row[c] * buf[c];
            tmp[r] = acc;
        }
        buf = tmp;
    });
}

inline void apply_masked(StateVector& s, const GateOp& g, u64 ctrl) {
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Hadamard>)
                kernel_hadamard(s, op.target, ctrl);
            else if constexpr (std::is_same_v<T, PauliX>)
                kernel_xmask(s, bit_of_qubit(op.target, s.n()), ctrl);
            else if constexpr (std::is_same_v<T, PauliZ>)
                kernel_zmask(s, bit_of_qubit(op.target, s.n()), ctrl);
            else if constexpr (std::is_same_v<T, HadamardAll>) {
                for (int q = 0; q < s.n(); ++q) kernel_hadamard(s, q, ctrl);
            } else if constexpr (std::is_same_v<T, XMask>)
                kernel_xmask(s, op.mask, ctrl);
            else if constexpr (std::is_same_v<T, ZMask>)
                kernel_zmask(s, op.mask, ctrl);
            else if constexpr (std::is_same_v<T, DiagonalPhase>)
                kernel_diagonal(s, op.qubits, op.phases, ctrl);
            else if constexpr (std::is_same_v<T, PhaseOracle>)
                kernel_phase_oracle(s, op.table, phase_oracle_reg(op), ctrl);
            else if constexpr (std::is_same_v<T, IndexOracle>)
                kernel_index_oracle(s, op.table, op.in_reg, op.out_reg, ctrl);
            else if constexpr (std::is_same_v<T, Qft>)
                kernel_qft(s, op.reg, +1, ctrl);
            else if constexpr (std::is_same_v<T, InverseQft>)
                kernel_qft(s, op.reg, -1, ctrl);
            else if constexpr (std::is_same_v<T, DenseUnitary>)
                kernel_dense(s, op, ctrl);
            else  // Controlled
                apply_masked(s, *op.inner, ctrl | bit_of_qubit(op.control, s.n()));
        },
        static_cast<const GateVariant&>(g));
}

}  // namespace detail

inline void apply_gate(StateVector& s, const GateOp& g) {
    validate_gate(g, s.n());
    detail::apply_masked(s, g, 0);
}

inline StateVector run_circuit(u64 input_basis, const Circuit& c) {
    StateVector s = StateVector::basis(c.n, input_basis);
    for (const GateOp& g : c.ops) apply_gate(s, g);
    s.check_normalized(1e-10);
    return s;
}

// Exact outcome law |<z|C|input>|^2 over all 2^n outcomes.
inline std::vector<double> output_distribution(u64 input_basis, const Circuit& c, int cap = -1) {
    if (cap < 0) cap = sim_caps().distribution;
    if (c.n > cap) throw std::invalid_argument("output_distribution: n exceeds exact-mode cap");
    StateVector s = run_circuit(input_basis, c);
    std::vector<double> p(s.size());
    for (u64 i = 0; i < s.size(); ++i) p[i] = std::norm(s[i]);
    return p;
}

// Column x is C|x>.
inline CMatrix circuit_unitary(const Circuit& c, int cap = -1) {
    if (cap < 0) cap = sim_caps().unitary;
    if (c.n > cap) throw std::invalid_argument("circuit_unitary: n exceeds unitary cap");
    u64 dim = u64{1} << c.n;
    CMatrix u(static_cast<int>(dim));
    for (u64 x = 0; x < dim; ++x) {
        StateVector col = run_circuit(x, c);
        for (u64 r = 0; r < dim; ++r) u(static_cast<int>(r), static_cast<int>(x)) = col[r];
    }
    return u;
}

inline u64 measure_all(const StateVector& s, Rng& rng) {
    double u = rng.next_double();
    double acc = 0.0;
    u64 last = 0;
    for (u64 i = 0; i < s.size(); ++i) {
        double p = std::norm(s[i]);
        if (p == 0.0) continue;
        acc += p;
        last = i;
        if (u < acc) return i;
    }
    return last;  // u landed in the tail rounding gap
}

}  // namespace halfbqp
