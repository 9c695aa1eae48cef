#pragma once

#include "halfbqp/matrix.hpp"

namespace halfbqp {

// (1/2^n) Tr|U - U'| through the self-contained singular-value routine.
inline double normalized_trace_distance(const CMatrix& u, const CMatrix& uprime,
                                        double unitarity_tol = 1e-9) {
    if (u.dim != uprime.dim) throw std::invalid_argument("trace distance: dimension mismatch");
    if (u.dim > (1 << 10)) throw std::invalid_argument("trace distance: dimension exceeds 2^10");
    if (!is_unitary(u, unitarity_tol) || !is_unitary(uprime, unitarity_tol))
        throw std::invalid_argument("trace distance: non-unitary input");
    auto sv = singular_values(u - uprime);
    double acc = 0.0;
    for (double s : sv) acc += s;
    return acc / static_cast<double>(u.dim);
}

// Shortcut for diagonal operators: singular values are the entry moduli.
inline double normalized_trace_distance_diagonal(const CMatrix& u, const CMatrix& uprime) {
    double acc = 0.0;
    for (int i = 0; i < u.dim; ++i) acc += std::abs(u(i, i) - uprime(i, i));
    return acc / static_cast<double>(u.dim);
}

struct UnitaryPair {
    CMatrix u, uprime;
    double eps = 0.0;  // normalized Schatten-1 distance, fixed at construction

    UnitaryPair(CMatrix a, CMatrix b) : u(std::move(a)), uprime(std::move(b)) {
        eps = normalized_trace_distance(u, uprime);
    }
};

struct LemmaReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // lhs - rhs
    bool holds = false;
    bool applicable = true;  // false when the hypotheses fail
};

// Holder step: (1/2^n) Tr|A - B| <= eps forces (1/2^n) Re Tr(A^dag B) >= 1 - eps.
inline LemmaReport check_holder_lemma(const CMatrix& a, const CMatrix& b) {
    double eps = normalized_trace_distance(a, b);
    LemmaReport r;
    r.lhs = (a.adjoint() * b).trace().real() / static_cast<double>(a.dim);
    r.rhs = 1.0 - eps;
    r.slack = r.lhs - r.rhs;
    r.holds = r.slack >= -1e-9;
    return r;
}

// Product step: |Tr A|/2^n >= 1 - eps1 and Re Tr B / 2^n >= 1 - eps2 give
// |Tr(AB)|/2^n >= 1 - eps1 - sqrt(2 eps2); diagonal +-1 B sharpens the loss
// to 2 eps2. Hypothesis failures are reported, not treated as violations.
inline LemmaReport check_trace_lemma(const CMatrix& a, const CMatrix& b, double eps1, double eps2,
                                     bool diagonal_pm1 = false) {
    double dim = static_cast<double>(a.dim);
    LemmaReport r;
    if (std::abs(a.trace()) / dim < 1.0 - eps1 - 1e-12 ||
        b.trace().real() / dim < 1.0 - eps2 - 1e-12 || eps1 < 0.0 || eps2 < 0.0 || eps1 >= 1.0 ||
        eps2 >= 1.0) {
        r.applicable = false;
        return r;
    }
    r.lhs = std::abs((a * b).trace()) / dim;
    r.rhs = diagonal_pm1 ? 1.0 - eps1 - 2.0 * eps2 : 1.0 - eps1 - std::sqrt(2.0 * eps2);
    r.slack = r.lhs - r.rhs;
    r.holds = r.slack >= -1e-9;
    return r;
}

struct FidelityPoint {
    int queries = 0;
    double fidelity = 0.0;        // F_r, computed exactly
    double bound = 0.0;           // 1 - r (eps + sqrt(2 eps))
    double trace_distance = 0.0;  // D_r = sqrt(1 - F_r^2)
    bool holds = false;
};

// F_r = (1/2^n) |Tr(A_U^dag A_U')| for the interleaved products
// A_O = V_0 O V_1 O ... V_{r-1} O V_r, reported for every prefix r together
// with the explicit bound the induction yields.
inline std::vector<FidelityPoint> fidelity_after_queries(const UnitaryPair& pair,
                                                         const std::vector<CMatrix>& interleaving) {
    if (interleaving.empty()) throw std::invalid_argument("fidelity: need V_0 ... V_r");
    int r_max = static_cast<int>(interleaving.size()) - 1;
    if (r_max > 32) throw std::invalid_argument("fidelity: more than 32 queries");
    int dim = pair.u.dim;
    double dimd = static_cast<double>(dim);

    std::vector<FidelityPoint> out;
    // prefix products: start from V_0, extend with O V_{j}
    CMatrix au = interleaving[0];
    CMatrix av = interleaving[0];
    for (int r = 1; r <= r_max; ++r) {
        au = au * pair.u;
        av = av * pair.uprime;
        au = au * interleaving[static_cast<size_t>(r)];
        av = av * interleaving[static_cast<size_t>(r)];
        FidelityPoint p;
        p.queries = r;
        p.fidelity = std::abs((au.adjoint() * av).trace()) / dimd;
        p.bound = 1.0 - r * (pair.eps + std::sqrt(2.0 * pair.eps));
        p.trace_distance = std::sqrt(std::max(0.0, 1.0 - p.fidelity * p.fidelity));
        p.holds = p.fidelity >= p.bound - 1e-9;
        out.push_back(p);
    }
    return out;
}

enum class BoundFlavor { general, diagonal };

// Minimum queries before a half-BQP distinguisher can reach advantage delta
// against a pair at normalized trace distance eps. The count comes from the
// verified per-query fidelity loss (eps + sqrt(2 eps) in general, 2 eps for
// diagonal +-1 oracles): advantage delta forces D_r >= delta, and
// D_r^2 <= 2 r loss, so r >= delta^2 / (2 loss). An envelope, not a tight
// count; with eps = c/2^n it scales as delta^2 / sqrt(eps) in the general
// flavor and 2^n delta^2 in the diagonal flavor.
inline double query_lower_bound(double delta, double eps, BoundFlavor flavor) {
    if (delta <= 0.0 || delta > 1.0 || eps <= 0.0)
        throw std::invalid_argument("query_lower_bound: need 0 < delta <= 1, eps > 0");
    double loss = flavor == BoundFlavor::diagonal ? 2.0 * eps : eps + std::sqrt(2.0 * eps);
    return delta * delta / (2.0 * loss);
}

}  // namespace halfbqp
