#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfbqp/bits.hpp"

namespace halfbqp {

using cplx = std::complex<double>;

// Simulation size caps. The statevector cap bounds every allocation; the
// other two bound the exact-mode outputs (2^20 doubles per distribution,
// 4^10 complex entries per dense unitary). HALFBQP_CAP_N overrides the
// statevector cap at process start.
struct SimCaps {
    int statevector = 26;
    int distribution = 20;
    int unitary = 10;
};

inline SimCaps& sim_caps() {
    static SimCaps caps = [] {
        SimCaps c;
        if (const char* env = std::getenv("HALFBQP_CAP_N")) {
            int v = std::atoi(env);
            if (v >= 1 && v <= 30) {
                c.statevector = v;
                c.distribution = std::min(v, 26);
                c.unitary = std::min(v, 13);
            }
        }
        return c;
    }();
    return caps;
}

class StateVector {
public:
    explicit StateVector(int n) : n_(n) {
        if (n < 1 || n > sim_caps().statevector)
            throw std::invalid_argument("qubit count " + std::to_string(n) + " outside [1, cap]");
        amps_.assign(u64{1} << n, cplx{});
        amps_[0] = 1.0;
    }

    static StateVector basis(int n, u64 index) {
        StateVector s(n);
        if (index >= s.size()) throw std::out_of_range("basis index out of range");
        s.amps_[0] = 0.0;
        s.amps_[index] = 1.0;
        return s;
    }

    int n() const { return n_; }
    u64 size() const { return amps_.size(); }
    cplx& operator[](u64 i) { return amps_[i]; }
    const cplx& operator[](u64 i) const { return amps_[i]; }
    std::vector<cplx>& amps() { return amps_; }
    const std::vector<cplx>& amps() const { return amps_; }

    double norm_squared() const {
        double s = 0.0;
        for (const cplx& a : amps_) s += std::norm(a);
        return s;
    }

    cplx inner(const StateVector& other) const {
        if (other.n_ != n_) throw std::invalid_argument("state size mismatch");
        cplx r = 0.0;
        for (u64 i = 0; i < size(); ++i) r += std::conj(amps_[i]) * other.amps_[i];
        return r;
    }

    void check_normalized(double tol = 1e-10) const {
        double s = norm_squared();
        if (s < 1.0 - tol || s > 1.0 + tol)
            throw std::runtime_error("statevector not normalized: |psi|^2 = " + std::to_string(s));
    }

private:
    int n_;
    std::vector<cplx> amps_;
};

}  // namespace halfbqp
