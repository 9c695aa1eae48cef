#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfbqp/gates.hpp"

// Line-oriented circuit format, one GateOp per line after an `n=<k>` header:
//   H 3 | X 1 | Z 0 | HALL
//   XMASK 0b1011 | ZMASK 0b0110       (decimal also accepted)
//   CTRL <q> <gate...>                (nests)
//   DIAG <q0,q1,...> <re:im> ...      (2^k phases)
//   PHASE_ORACLE <file.tt> [reg]
//   INDEX_ORACLE <file.tt> <in-reg> <out-reg>
//   QFT <a>..<b> | IQFT <a>..<b>
//   UNITARY <reg> <file.mat>
// Registers are written a..b or comma lists. Oracle/unitary payloads live in
// sibling files referenced by path relative to the circuit file.

namespace halfbqp {

namespace io_detail {

inline std::vector<int> parse_reg(const std::string& tok) {
    std::vector<int> reg;
    auto dots = tok.find("..");
    if (dots != std::string::npos) {
        int a = std::stoi(tok.substr(0, dots));
        int b = std::stoi(tok.substr(dots + 2));
        if (b < a) throw std::runtime_error("bad register range: " + tok);
        return range_reg(a, b);
    }
    std::stringstream ss(tok);
    std::string piece;
    while (std::getline(ss, piece, ',')) reg.push_back(std::stoi(piece));
    if (reg.empty()) throw std::runtime_error("empty register: " + tok);
    return reg;
}

inline std::string format_reg(const std::vector<int>& reg) {
    bool contiguous = true;
    for (size_t i = 1; i < reg.size(); ++i)
        if (reg[i] != reg[i - 1] + 1) contiguous = false;
    if (contiguous && reg.size() > 1)
        return std::to_string(reg.front()) + ".." + std::to_string(reg.back());
    std::string s;
    for (size_t i = 0; i < reg.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(reg[i]);
    }
    return s;
}

inline u64 parse_mask(const std::string& tok) {
    if (tok.rfind("0b", 0) == 0) return parse_bitstring(tok.substr(2));
    return std::stoull(tok);
}

inline CMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file " + path);
    std::string header;
    std::getline(in, header);
    if (header.rfind("dim=", 0) != 0) throw std::runtime_error("bad matrix header: " + header);
    int dim = std::stoi(header.substr(4));
    CMatrix m(dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            double re, im;
            if (!(in >> re >> im)) throw std::runtime_error("matrix file truncated: " + path);
            m(r, c) = {re, im};
        }
    return m;
}

inline void save_matrix(const std::string& path, const CMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "dim=" << m.dim << "\n";
    out.precision(17);
    for (int r = 0; r < m.dim; ++r)
        for (int c = 0; c < m.dim; ++c)
            out << m(r, c).real() << " " << m(r, c).imag() << "\n";
}

inline GateOp parse_gate(std::istringstream& ss, const std::filesystem::path& dir) {
    std::string kind;
    if (!(ss >> kind)) throw std::runtime_error("empty gate line");
    auto rel = [&](const std::string& f) { return (dir / f).string(); };
    if (kind == "H") {
        int q;
        ss >> q;
        return Hadamard{q};
    } else if (kind == "X") {
        int q;
        ss >> q;
        return PauliX{q};
    } else if (kind == "Z") {
        int q;
        ss >> q;
        return PauliZ{q};
    } else if (kind == "HALL") {
        return HadamardAll{};
    } else if (kind == "XMASK" || kind == "ZMASK") {
        std::string tok;
        ss >> tok;
        u64 m = parse_mask(tok);
        if (kind == "XMASK") return XMask{m};
        return ZMask{m};
    } else if (kind == "CTRL") {
        int q;
        ss >> q;
        return controlled(q, parse_gate(ss, dir));
    } else if (kind == "DIAG") {
        std::string regtok;
        ss >> regtok;
        auto reg = parse_reg(regtok);
        std::vector<cplx> phases;
        std::string ptok;
        while (ss >> ptok) {
            auto colon = ptok.find(':');
            if (colon == std::string::npos) throw std::runtime_error("bad phase " + ptok);
            phases.emplace_back(std::stod(ptok.substr(0, colon)), std::stod(ptok.substr(colon + 1)));
        }
        return DiagonalPhase{std::move(reg), std::move(phases)};
    } else if (kind == "PHASE_ORACLE") {
        std::string file, regtok;
        ss >> file;
        std::vector<int> reg;
        if (ss >> regtok) reg = parse_reg(regtok);
        return PhaseOracle{load_boolean_table_file(rel(file)), std::move(reg)};
    } else if (kind == "INDEX_ORACLE") {
        std::string file, in_tok, out_tok;
        ss >> file >> in_tok >> out_tok;
        return IndexOracle{load_vector_table_file(rel(file)), parse_reg(in_tok), parse_reg(out_tok)};
    } else if (kind == "QFT" || kind == "IQFT") {
        std::string regtok;
        ss >> regtok;
        if (kind == "QFT") return Qft{parse_reg(regtok)};
        return InverseQft{parse_reg(regtok)};
    } else if (kind == "UNITARY") {
        std::string regtok, file;
        ss >> regtok >> file;
        return DenseUnitary{parse_reg(regtok), load_matrix(rel(file))};
    }
    throw std::runtime_error("unknown gate kind: " + kind);
}

struct GateWriter {
    std::ostream& out;
    std::filesystem::path dir;
    std::string stem;
    int aux_count = 0;

    std::string next_aux(const std::string& ext) {
        return stem + ".t" + std::to_string(aux_count++) + ext;
    }

    void write(const GateOp& g) {
        line(g);
        out << "\n";
    }

    void line(const GateOp& g) {
        std::visit(
            [&](const auto& op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, Hadamard>)
                    out << "H " << op.target;
                else if constexpr (std::is_same_v<T, PauliX>)
                    out << "X " << op.target;
                else if constexpr (std::is_same_v<T, PauliZ>)
                    out << "Z " << op.target;
                else if constexpr (std::is_same_v<T, HadamardAll>)
                    out << "HALL";
                else if constexpr (std::is_same_v<T, XMask>)
                    out << "XMASK 0b" << to_bitstring(op.mask, op.mask ? 64 - std::countl_zero(op.mask) : 1);
                else if constexpr (std::is_same_v<T, ZMask>)
                    out << "ZMASK 0b" << to_bitstring(op.mask, op.mask ? 64 - std::countl_zero(op.mask) : 1);
                else if constexpr (std::is_same_v<T, DiagonalPhase>) {
                    out << "DIAG " << format_reg(op.qubits);
                    out.precision(17);
                    for (const cplx& p : op.phases) out << " " << p.real() << ":" << p.imag();
                } else if constexpr (std::is_same_v<T, PhaseOracle>) {
                    std::string f = next_aux(".tt");
                    save_table_file((dir / f).string(), op.table);
                    out << "PHASE_ORACLE " << f;
                    if (!op.qubits.empty()) out << " " << format_reg(op.qubits);
                } else if constexpr (std::is_same_v<T, IndexOracle>) {
                    std::string f = next_aux(".tt");
                    save_table_file((dir / f).string(), op.table);
                    out << "INDEX_ORACLE " << f << " " << format_reg(op.in_reg) << " "
                        << format_reg(op.out_reg);
                } else if constexpr (std::is_same_v<T, Qft>)
                    out << "QFT " << format_reg(op.reg);
                else if constexpr (std::is_same_v<T, InverseQft>)
                    out << "IQFT " << format_reg(op.reg);
                else if constexpr (std::is_same_v<T, DenseUnitary>) {
                    std::string f = next_aux(".mat");
                    save_matrix((dir / f).string(), op.matrix);
                    out << "UNITARY " << format_reg(op.qubits) << " " << f;
                } else {  // Controlled
                    out << "CTRL " << op.control << " ";
                    line(*op.inner);
                }
            },
            static_cast<const GateVariant&>(g));
    }
};

}  // namespace io_detail

inline Circuit load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open circuit " + path);
    auto dir = std::filesystem::path(path).parent_path();
    std::string line;
    Circuit c;
    bool have_n = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!have_n) {
            if (line.rfind("n=", 0) != 0)
                throw std::runtime_error("circuit file must start with n=<k>");
            c.n = std::stoi(line.substr(2));
            have_n = true;
            continue;
        }
        std::istringstream ss(line);
        c.ops.push_back(io_detail::parse_gate(ss, dir));
    }
    if (!have_n) throw std::runtime_error("circuit file missing n= header");
    validate_circuit(c);
    return c;
}

inline void save_circuit_file(const std::string& path, const Circuit& c) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    auto p = std::filesystem::path(path);
    io_detail::GateWriter w{out, p.parent_path(), p.filename().string()};
    out << "n=" << c.n << "\n";
    for (const GateOp& g : c.ops) w.write(g);
}

}  // namespace halfbqp
