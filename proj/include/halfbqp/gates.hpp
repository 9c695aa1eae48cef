#pragma once

#include <memory>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "halfbqp/bits.hpp"
#include "halfbqp/matrix.hpp"
#include "halfbqp/tables.hpp"

namespace halfbqp {

struct GateOp;

struct Hadamard {
    int target;
};
struct PauliX {
    int target;
};
struct PauliZ {
    int target;
};
struct HadamardAll {};
// X^w = X^{w_1} x ... x X^{w_n}; mask is index-aligned
struct XMask {
    u64 mask;
};
struct ZMask {
    u64 mask;
};
// 2^k unit-modulus phases on k named qubits (qubits[0] = MSB of the phase index)
struct DiagonalPhase {
    std::vector<int> qubits;
    std::vector<cplx> phases;
};
// |x> -> f(x)|x> with f in {-1,+1}; empty register means qubits 0..table.n-1
struct PhaseOracle {
    BooleanFunctionTable table;
    std::vector<int> qubits;
};
// |x>|y> -> |x>|y xor f(x)> on disjoint registers
struct IndexOracle {
    VectorFunctionTable table;
    std::vector<int> in_reg;
    std::vector<int> out_reg;
};
// QFT over Z_{2^k} on the named register, omega = e^{+2 pi i / 2^k}
struct Qft {
    std::vector<int> reg;
};
struct InverseQft {
    std::vector<int> reg;
};
struct DenseUnitary {
    std::vector<int> qubits;  // k <= 12
    CMatrix matrix;           // 2^k x 2^k
};
struct Controlled {
    int control;
    std::shared_ptr<const GateOp> inner;
};

using GateVariant = std::variant<Hadamard, PauliX, PauliZ, HadamardAll, XMask, ZMask,
                                 DiagonalPhase, PhaseOracle, IndexOracle, Qft, InverseQft,
                                 DenseUnitary, Controlled>;

struct GateOp : GateVariant {
    using GateVariant::GateVariant;
};

inline GateOp controlled(int control, GateOp inner) {
    return Controlled{control, std::make_shared<const GateOp>(std::move(inner))};
}

struct Circuit {
    int n = 0;
    std::vector<GateOp> ops;
};

inline std::vector<int> range_reg(int first, int last) {
    std::vector<int> r;
    for (int q = first; q <= last; ++q) r.push_back(q);
    return r;
}

namespace detail {
inline std::vector<int> phase_oracle_reg(const PhaseOracle& g) {
    if (!g.qubits.empty()) return g.qubits;
    return range_reg(0, g.table.n - 1);
}
}  // namespace detail

// Qubits a gate touches, as an index-aligned mask.
inline u64 gate_support(const GateOp& g, int n) {
    return std::visit(
        [&](const auto& op) -> u64 {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Hadamard> || std::is_same_v<T, PauliX> ||
                          std::is_same_v<T, PauliZ>)
                return bit_of_qubit(op.target, n);
            else if constexpr (std::is_same_v<T, HadamardAll>)
                return (n == 64) ? ~u64{0} : (u64{1} << n) - 1;
            else if constexpr (std::is_same_v<T, XMask> || std::is_same_v<T, ZMask>)
                return op.mask;
            else if constexpr (std::is_same_v<T, DiagonalPhase>) {
                u64 m = 0;
                for (int q : op.qubits) m |= bit_of_qubit(q, n);
                return m;
            } else if constexpr (std::is_same_v<T, PhaseOracle>) {
                u64 m = 0;
                for (int q : detail::phase_oracle_reg(op)) m |= bit_of_qubit(q, n);
                return m;
            } else if constexpr (std::is_same_v<T, IndexOracle>) {
                u64 m = 0;
                for (int q : op.in_reg) m |= bit_of_qubit(q, n);
                for (int q : op.out_reg) m |= bit_of_qubit(q, n);
                return m;
            } else if constexpr (std::is_same_v<T, Qft> || std::is_same_v<T, InverseQft>) {
                u64 m = 0;
                for (int q : op.reg) m |= bit_of_qubit(q, n);
                return m;
            } else if constexpr (std::is_same_v<T, DenseUnitary>) {
                u64 m = 0;
                for (int q : op.qubits) m |= bit_of_qubit(q, n);
                return m;
            } else {  // Controlled
                return bit_of_qubit(op.control, n) | gate_support(*op.inner, n);
            }
        },
        static_cast<const GateVariant&>(g));
}

namespace detail {
inline void check_register(const std::vector<int>& reg, int n, const char* what) {
    u64 seen = 0;
    for (int q : reg) {
        u64 b = bit_of_qubit(q, n);
        if (seen & b) throw std::invalid_argument(std::string(what) + ": repeated qubit");
        seen |= b;
    }
    if (reg.empty()) throw std::invalid_argument(std::string(what) + ": empty register");
}
}  // namespace detail

inline void validate_gate(const GateOp& g, int n) {
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Hadamard> || std::is_same_v<T, PauliX> ||
                          std::is_same_v<T, PauliZ>) {
                bit_of_qubit(op.target, n);
            } else if constexpr (std::is_same_v<T, HadamardAll>) {
                // always valid
            } else if constexpr (std::is_same_v<T, XMask> || std::is_same_v<T, ZMask>) {
                if (n < 64 && (op.mask >> n))
                    throw std::invalid_argument("mask wider than circuit");
            } else if constexpr (std::is_same_v<T, DiagonalPhase>) {
                detail::check_register(op.qubits, n, "DiagonalPhase");
                if (op.phases.size() != (u64{1} << op.qubits.size()))
                    throw std::invalid_argument("DiagonalPhase: 2^k phases required");
                for (const cplx& p : op.phases)
                    if (std::abs(std::abs(p) - 1.0) > 1e-12)
                        throw std::invalid_argument("DiagonalPhase entry is not unit modulus");
            } else if constexpr (std::is_same_v<T, PhaseOracle>) {
                op.table.validate();
                auto reg = detail::phase_oracle_reg(op);
                detail::check_register(reg, n, "PhaseOracle");
                if (static_cast<int>(reg.size()) != op.table.n)
                    throw std::invalid_argument("PhaseOracle register width != table width");
            } else if constexpr (std::is_same_v<T, IndexOracle>) {
                op.table.validate();
                detail::check_register(op.in_reg, n, "IndexOracle input");
                detail::check_register(op.out_reg, n, "IndexOracle output");
                u64 mi = 0, mo = 0;
                for (int q : op.in_reg) mi |= bit_of_qubit(q, n);
                for (int q : op.out_reg) mo |= bit_of_qubit(q, n);
                if (mi & mo) throw std::invalid_argument("IndexOracle registers overlap");
                if (static_cast<int>(op.in_reg.size()) != op.table.n ||
                    static_cast<int>(op.out_reg.size()) != op.table.m)
                    throw std::invalid_argument("IndexOracle register widths mismatch table");
            } else if constexpr (std::is_same_v<T, Qft> || std::is_same_v<T, InverseQft>) {
                detail::check_register(op.reg, n, "QFT");
            } else if constexpr (std::is_same_v<T, DenseUnitary>) {
                detail::check_register(op.qubits, n, "DenseUnitary");
                if (op.qubits.size() > 12)
                    throw std::invalid_argument("DenseUnitary wider than 12 qubits");
                if (op.matrix.dim != (1 << op.qubits.size()))
                    throw std::invalid_argument("DenseUnitary matrix dimension mismatch");
                if (!is_unitary(op.matrix, 1e-10))
                    throw std::invalid_argument("DenseUnitary is not unitary within 1e-10");
            } else {  // Controlled
                bit_of_qubit(op.control, n);
                validate_gate(*op.inner, n);
                if (gate_support(*op.inner, n) & bit_of_qubit(op.control, n))
                    throw std::invalid_argument("control qubit overlaps controlled gate");
            }
        },
        static_cast<const GateVariant&>(g));
}

inline void validate_circuit(const Circuit& c) {
    if (c.n < 1) throw std::invalid_argument("circuit must have at least one qubit");
    for (const GateOp& g : c.ops) validate_gate(g, c.n);
}

inline GateOp inverse_gate(const GateOp& g) {
    return std::visit(
        [&](const auto& op) -> GateOp {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, DiagonalPhase>) {
                DiagonalPhase inv = op;
                for (cplx& p : inv.phases) p = std::conj(p);
                return inv;
            } else if constexpr (std::is_same_v<T, Qft>) {
                return InverseQft{op.reg};
            } else if constexpr (std::is_same_v<T, InverseQft>) {
                return Qft{op.reg};
            } else if constexpr (std::is_same_v<T, DenseUnitary>) {
                return DenseUnitary{op.qubits, op.matrix.adjoint()};
            } else if constexpr (std::is_same_v<T, Controlled>) {
                return controlled(op.control, inverse_gate(*op.inner));
            } else {
                return op;  // H, X, Z, masks, oracles are involutions
            }
        },
        static_cast<const GateVariant&>(g));
}

inline Circuit inverse_circuit(const Circuit& c) {
    Circuit inv;
    inv.n = c.n;
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) inv.ops.push_back(inverse_gate(*it));
    return inv;
}

// Re-target a gate from an inner circuit of width `inner_n` onto qubits
// [offset, offset+inner_n) of a circuit of width `total_n`. HadamardAll
// expands into per-qubit gates so it stays inside the block.
inline void embed_gate(const GateOp& g, int inner_n, int total_n, int offset,
                       std::vector<GateOp>& out) {
    if (offset < 0 || offset + inner_n > total_n) throw std::invalid_argument("embed out of range");
    int shift = total_n - inner_n - offset;  // index-bit shift for masks
    auto map_q = [&](int q) { return q + offset; };
    auto map_reg = [&](std::vector<int> reg) {
        for (int& q : reg) q = map_q(q);
        return reg;
    };
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Hadamard>)
                out.push_back(Hadamard{map_q(op.target)});
            else if constexpr (std::is_same_v<T, PauliX>)
                out.push_back(PauliX{map_q(op.target)});
            else if constexpr (std::is_same_v<T, PauliZ>)
                out.push_back(PauliZ{map_q(op.target)});
            else if constexpr (std::is_same_v<T, HadamardAll>) {
                for (int q = 0; q < inner_n; ++q) out.push_back(Hadamard{map_q(q)});
            } else if constexpr (std::is_same_v<T, XMask>)
                out.push_back(XMask{op.mask << shift});
            else if constexpr (std::is_same_v<T, ZMask>)
                out.push_back(ZMask{op.mask << shift});
            else if constexpr (std::is_same_v<T, DiagonalPhase>)
                out.push_back(DiagonalPhase{map_reg(op.qubits), op.phases});
            else if constexpr (std::is_same_v<T, PhaseOracle>)
                out.push_back(PhaseOracle{op.table, map_reg(detail::phase_oracle_reg(op))});
            else if constexpr (std::is_same_v<T, IndexOracle>)
                out.push_back(IndexOracle{op.table, map_reg(op.in_reg), map_reg(op.out_reg)});
            else if constexpr (std::is_same_v<T, Qft>)
                out.push_back(Qft{map_reg(op.reg)});
            else if constexpr (std::is_same_v<T, InverseQft>)
                out.push_back(InverseQft{map_reg(op.reg)});
            else if constexpr (std::is_same_v<T, DenseUnitary>)
                out.push_back(DenseUnitary{map_reg(op.qubits), op.matrix});
            else {  // Controlled
                std::vector<GateOp> inner;
                embed_gate(*op.inner, inner_n, total_n, offset, inner);
                for (GateOp& ig : inner) out.push_back(controlled(map_q(op.control), std::move(ig)));
            }
        },
        static_cast<const GateVariant&>(g));
}

inline std::vector<GateOp> embed_circuit(const Circuit& c, int total_n, int offset) {
    std::vector<GateOp> out;
    for (const GateOp& g : c.ops) embed_gate(g, c.n, total_n, offset, out);
    return out;
}

// Controlled application of a whole circuit (used by Hadamard tests).
inline std::vector<GateOp> controlled_circuit(int control, const Circuit& c, int total_n,
                                              int offset) {
    std::vector<GateOp> embedded = embed_circuit(c, total_n, offset);
    std::vector<GateOp> out;
    out.reserve(embedded.size());
    for (GateOp& g : embedded) out.push_back(controlled(control, std::move(g)));
    return out;
}

}  // namespace halfbqp
