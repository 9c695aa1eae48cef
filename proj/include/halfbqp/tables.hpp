#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfbqp/bits.hpp"
#include "halfbqp/rng.hpp"

namespace halfbqp {

// Exhaustive truth table of f: {0,1}^n -> {-1,+1}.
struct BooleanFunctionTable {
    int n = 0;
    std::vector<int8_t> values;  // each entry -1 or +1

    BooleanFunctionTable() = default;
    BooleanFunctionTable(int n_, std::vector<int8_t> v) : n(n_), values(std::move(v)) { validate(); }

    static BooleanFunctionTable constant(int n, int8_t value) {
        return {n, std::vector<int8_t>(u64{1} << n, value)};
    }

    // character chi_s(x) = (-1)^{s.x}
    static BooleanFunctionTable character(int n, u64 s) {
        std::vector<int8_t> v(u64{1} << n);
        for (u64 x = 0; x < v.size(); ++x) v[x] = dot2(s, x) ? -1 : 1;
        return {n, std::move(v)};
    }

    static BooleanFunctionTable random(int n, Rng& rng) {
        std::vector<int8_t> v(u64{1} << n);
        for (auto& e : v) e = rng.next_bool() ? 1 : -1;
        return {n, std::move(v)};
    }

    int8_t operator()(u64 x) const { return values[x]; }

    void validate() const {
        if (n < 1 || values.size() != (u64{1} << n))
            throw std::invalid_argument("truth table length is not 2^n");
        for (int8_t v : values)
            if (v != 1 && v != -1) throw std::invalid_argument("truth table entry not in {-1,+1}");
    }
};

// Exhaustive table of f: {0,1}^n -> {0,1}^m.
struct VectorFunctionTable {
    int n = 0;  // input bits
    int m = 0;  // output bits
    std::vector<u64> values;

    VectorFunctionTable() = default;
    VectorFunctionTable(int n_, int m_, std::vector<u64> v)
        : n(n_), m(m_), values(std::move(v)) {
        validate();
    }

    u64 operator()(u64 x) const { return values[x]; }

    void validate() const {
        if (n < 1 || m < 1 || m > 63 || values.size() != (u64{1} << n))
            throw std::invalid_argument("vector table shape invalid");
        for (u64 v : values)
            if (v >> m) throw std::invalid_argument("vector table entry wider than m bits");
    }
};

// Truth-table file format:
//   header line  n=<k> range=<pm1|bits:<m>>
//   then 2^k lines of output values in index order
// pm1 entries are written +1/-1; bits entries are m-character binary strings.

inline void save_table(std::ostream& out, const BooleanFunctionTable& t) {
    out << "n=" << t.n << " range=pm1\n";
    for (int8_t v : t.values) out << (v > 0 ? "+1" : "-1") << "\n";
}

inline void save_table(std::ostream& out, const VectorFunctionTable& t) {
    out << "n=" << t.n << " range=bits:" << t.m << "\n";
    for (u64 v : t.values) out << to_bitstring(v, t.m) << "\n";
}

template <typename Table>
void save_table_file(const std::string& path, const Table& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_table(out, t);
}

namespace detail {
inline void parse_table_header(std::istream& in, int& n, std::string& range) {
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty truth-table file");
    std::istringstream hs(header);
    std::string ntok, rtok;
    hs >> ntok >> rtok;
    if (ntok.rfind("n=", 0) != 0 || rtok.rfind("range=", 0) != 0)
        throw std::runtime_error("malformed truth-table header: " + header);
    n = std::stoi(ntok.substr(2));
    range = rtok.substr(6);
}
}  // namespace detail

inline BooleanFunctionTable load_boolean_table(std::istream& in) {
    int n;
    std::string range;
    detail::parse_table_header(in, n, range);
    if (range != "pm1") throw std::runtime_error("expected range=pm1, got " + range);
    if (n < 1 || n > 26) throw std::runtime_error("truth-table n out of range");
    std::vector<int8_t> v(u64{1} << n);
    std::string line;
    for (auto& e : v) {
        if (!std::getline(in, line)) throw std::runtime_error("truth-table file truncated");
        if (line == "+1" || line == "1")
            e = 1;
        else if (line == "-1")
            e = -1;
        else
            throw std::runtime_error("bad pm1 entry: " + line);
    }
    return {n, std::move(v)};
}

inline VectorFunctionTable load_vector_table(std::istream& in) {
    int n;
    std::string range;
    detail::parse_table_header(in, n, range);
    if (range.rfind("bits:", 0) != 0) throw std::runtime_error("expected range=bits:<m>");
    int m = std::stoi(range.substr(5));
    if (n < 1 || n > 26) throw std::runtime_error("truth-table n out of range");
    std::vector<u64> v(u64{1} << n);
    std::string line;
    for (auto& e : v) {
        if (!std::getline(in, line)) throw std::runtime_error("truth-table file truncated");
        if (static_cast<int>(line.size()) != m) throw std::runtime_error("bad bits entry: " + line);
        e = parse_bitstring(line);
    }
    return {n, m, std::move(v)};
}

inline BooleanFunctionTable load_boolean_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth table " + path);
    return load_boolean_table(in);
}

inline VectorFunctionTable load_vector_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth table " + path);
    return load_vector_table(in);
}

}  // namespace halfbqp
