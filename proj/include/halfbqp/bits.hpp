#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Bit conventions used across the library:
//   * qubit 0 is the MOST significant bit of a basis-state index, so the
//     basis state |q0 q1 ... q(n-1)> has index (q0 << (n-1)) | ... | q(n-1).
//   * masks (XMASK/ZMASK arguments, hidden strings, measured outcomes) are
//     index-aligned integers under the same convention.

namespace halfbqp {

using u64 = std::uint64_t;

inline int parity(u64 x) { return std::popcount(x) & 1; }

// F2 inner product x.y = sum_i x_i y_i mod 2
inline int dot2(u64 x, u64 y) { return parity(x & y); }

inline u64 bit_of_qubit(int qubit, int n) {
    if (qubit < 0 || qubit >= n) throw std::out_of_range("qubit index out of range");
    return u64{1} << (n - 1 - qubit);
}

// Extract the bits of `index` at the named qubits; qubits[0] becomes the MSB
// of the returned value.
inline u64 gather_bits(u64 index, const std::vector<int>& qubits, int n) {
    u64 v = 0;
    for (int q : qubits) v = (v << 1) | ((index >> (n - 1 - q)) & 1u);
    return v;
}

// Replace the bits of `index` at the named qubits with the bits of `value`
// (value's MSB goes to qubits[0]).
inline u64 scatter_bits(u64 index, const std::vector<int>& qubits, int n, u64 value) {
    int k = static_cast<int>(qubits.size());
    for (int i = 0; i < k; ++i) {
        u64 b = bit_of_qubit(qubits[i], n);
        if ((value >> (k - 1 - i)) & 1u)
            index |= b;
        else
            index &= ~b;
    }
    return index;
}

inline std::string to_bitstring(u64 x, int n) {
    std::string s(static_cast<size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((x >> (n - 1 - i)) & 1u) s[static_cast<size_t>(i)] = '1';
    return s;
}

inline u64 parse_bitstring(const std::string& s) {
    u64 x = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring: " + s);
        x = (x << 1) | static_cast<u64>(c - '0');
    }
    return x;
}

// lcm/gcd on u64 with overflow clamp (used by period voting)
inline u64 gcd_u64(u64 a, u64 b) {
    while (b) { u64 t = a % b; a = b; b = t; }
    return a;
}

inline u64 lcm_clamped(u64 a, u64 b, u64 clamp) {
    if (a == 0 || b == 0) return a | b;
    u64 g = gcd_u64(a, b);
    u64 q = a / g;
    if (b > clamp / q) return clamp;
    return q * b;
}

}  // namespace halfbqp
