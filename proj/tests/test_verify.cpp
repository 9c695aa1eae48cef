#include <catch2/catch_amalgamated.hpp>

#include "halfbqp/runtime.hpp"
#include "halfbqp/verify.hpp"
#include "test_util.hpp"

using namespace halfbqp;

namespace {

// identity rotated by small random diagonal phases plus a few Givens
// rotations; stays unitary and close to I for small scale
CMatrix near_identity_unitary(int dim, double scale, Rng& rng) {
    CMatrix m = CMatrix::identity(dim);
    for (int i = 0; i < dim; ++i) {
        double a = scale * (2.0 * rng.next_double() - 1.0);
        m(i, i) = {std::cos(a), std::sin(a)};
    }
    for (int rot = 0; rot < dim / 2; ++rot) {
        int p = static_cast<int>(rng.next_below(static_cast<u64>(dim)));
        int q = static_cast<int>(rng.next_below(static_cast<u64>(dim)));
        if (p == q) continue;
        double th = scale * (2.0 * rng.next_double() - 1.0);
        double c = std::cos(th), s = std::sin(th);
        for (int r = 0; r < dim; ++r) {
            cplx a = m(r, p), b = m(r, q);
            m(r, p) = c * a - s * b;
            m(r, q) = s * a + c * b;
        }
    }
    return m;
}

CMatrix random_pm1_diagonal(int dim, int flips, Rng& rng) {
    CMatrix m = CMatrix::identity(dim);
    std::vector<int> idx(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) idx[static_cast<size_t>(i)] = i;
    rng.shuffle(idx);
    for (int i = 0; i < flips && i < dim; ++i)
        m(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(i)]) = -1.0;
    return m;
}

}  // namespace

TEST_CASE("normalized trace distance: closed forms") {
    CMatrix id = CMatrix::identity(8);
    CHECK(normalized_trace_distance(id, id) == Catch::Approx(0.0).margin(1e-12));

    // phase oracles differing at one point: 2/2^n
    CMatrix flip = id;
    flip(3, 3) = -1.0;
    CHECK(normalized_trace_distance(id, flip) == Catch::Approx(2.0 / 8).margin(1e-10));

    // random diagonal pair vs the entry-modulus shortcut
    Rng rng(91);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix a = CMatrix::identity(16), b = CMatrix::identity(16);
        for (int i = 0; i < 16; ++i) {
            double t1 = rng.next_double() * 6.2831853, t2 = rng.next_double() * 6.2831853;
            a(i, i) = {std::cos(t1), std::sin(t1)};
            b(i, i) = {std::cos(t2), std::sin(t2)};
        }
        CHECK(normalized_trace_distance(a, b) ==
              Catch::Approx(normalized_trace_distance_diagonal(a, b)).margin(1e-8));
    }

    CHECK_THROWS_AS(normalized_trace_distance(id, CMatrix::identity(4)), std::invalid_argument);
    CMatrix notu(4);
    notu(0, 0) = 2.0;
    CHECK_THROWS_AS(normalized_trace_distance(notu, CMatrix::identity(4)), std::invalid_argument);
}

TEST_CASE("holder lemma: fixed points and random near-identity pairs") {
    CMatrix id = CMatrix::identity(4);
    auto same = check_holder_lemma(id, id);
    CHECK(same.lhs == Catch::Approx(1.0).margin(1e-12));
    CHECK(same.holds);

    // n = 1, A = I, B = diag(1, -1): eps = 1, Re side = 0 >= 0
    CMatrix z2 = CMatrix::identity(2);
    z2(1, 1) = -1.0;
    auto zcase = check_holder_lemma(CMatrix::identity(2), z2);
    CHECK(zcase.lhs == Catch::Approx(0.0).margin(1e-12));
    CHECK(zcase.rhs == Catch::Approx(0.0).margin(1e-10));
    CHECK(zcase.holds);

    Rng rng(92);
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        int n = 1 + static_cast<int>(rng.next_below(5));
        int dim = 1 << n;
        CMatrix a = near_identity_unitary(dim, 0.4 * rng.next_double(), rng);
        CMatrix b = near_identity_unitary(dim, 0.4 * rng.next_double(), rng);
        if (!check_holder_lemma(a, b).holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("trace lemma: spec example and random admissible pairs") {
    CMatrix id8 = CMatrix::identity(8);
    auto idcase = check_trace_lemma(id8, id8, 0.0, 0.0);
    CHECK(idcase.applicable);
    CHECK(idcase.lhs == Catch::Approx(1.0).margin(1e-12));
    CHECK(idcase.holds);

    // B diagonal +-1 with one -1 entry at n=3: eps2 = 1/4, bound 1/2, actual 3/4
    CMatrix b = CMatrix::identity(8);
    b(5, 5) = -1.0;
    auto diag = check_trace_lemma(id8, b, 0.0, 0.25, true);
    CHECK(diag.applicable);
    CHECK(diag.lhs == Catch::Approx(0.75).margin(1e-12));
    CHECK(diag.rhs == Catch::Approx(0.5).margin(1e-12));
    CHECK(diag.holds);

    // inapplicable hypotheses are reported, not failed
    CMatrix far = CMatrix::identity(8);
    for (int i = 0; i < 8; ++i) far(i, i) = (i % 2) ? -1.0 : 1.0;
    CHECK_FALSE(check_trace_lemma(far, id8, 0.0, 0.1).applicable);

    Rng rng(93);
    int violations = 0;
    for (int t = 0; t < 200; ++t) {
        int n = 1 + static_cast<int>(rng.next_below(5));
        int dim = 1 << n;
        CMatrix a = near_identity_unitary(dim, 0.3 * rng.next_double(), rng);
        CMatrix bb = near_identity_unitary(dim, 0.3 * rng.next_double(), rng);
        double eps1 = 1.0 - std::abs(a.trace()) / dim;
        double eps2 = 1.0 - bb.trace().real() / dim;
        if (eps1 < 0.0 || eps1 >= 1.0 || eps2 < 0.0 || eps2 >= 1.0) continue;
        auto rep = check_trace_lemma(a, bb, eps1 + 1e-12, eps2 + 1e-12);
        if (rep.applicable && !rep.holds) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("fidelity recursion: trivial pair, single query, grover-style pairs") {
    Rng rng(94);
    int dim = 16;
    CMatrix u = testutil::random_unitary(dim, rng);
    UnitaryPair same(u, u);
    CHECK(same.eps == Catch::Approx(0.0).margin(1e-9));
    std::vector<CMatrix> vs;
    for (int i = 0; i < 5; ++i) vs.push_back(testutil::random_unitary(dim, rng));
    for (const auto& p : fidelity_after_queries(same, vs))
        CHECK(p.fidelity == Catch::Approx(1.0).margin(1e-9));

    // r = 1: F_1 = |Tr(U^dag U')| / 2^n >= 1 - eps regardless of interleaving
    CMatrix uprime = random_pm1_diagonal(dim, 1, rng) * u;
    UnitaryPair pair(u, uprime);
    auto one = fidelity_after_queries(pair, {testutil::random_unitary(dim, rng),
                                             testutil::random_unitary(dim, rng)});
    CHECK(one[0].fidelity >= 1.0 - pair.eps - 1e-9);

    // grover-style oracle pairs: the explicit bound holds at every prefix
    int checked = 0, held = 0;
    for (int t = 0; t < 60; ++t) {
        int n = 2 + static_cast<int>(rng.next_below(5));  // up to n = 6
        int d = 1 << n;
        CMatrix oa = random_pm1_diagonal(d, 1 + static_cast<int>(rng.next_below(2)), rng);
        CMatrix ob = random_pm1_diagonal(d, 1 + static_cast<int>(rng.next_below(2)), rng);
        UnitaryPair p(oa, ob);
        std::vector<CMatrix> ivs;
        int r = 2 + static_cast<int>(rng.next_below(15));
        for (int i = 0; i <= r; ++i) ivs.push_back(testutil::random_unitary(d, rng));
        for (const auto& pt : fidelity_after_queries(p, ivs)) {
            ++checked;
            if (pt.holds) ++held;
        }
    }
    CHECK(checked == held);
}

TEST_CASE("query lower bound: formula shape and grid consistency") {
    // delta -> 0 collapses the bound
    CHECK(query_lower_bound(1e-6, 0.1, BoundFlavor::general) < 1e-9);

    // two-marked-point grover oracles: eps = 4/2^n
    for (int n : {4, 8, 12}) {
        double eps = 4.0 / std::pow(2.0, n);
        double general = query_lower_bound(1.0 / 3, eps, BoundFlavor::general);
        double diagonal = query_lower_bound(1.0 / 3, eps, BoundFlavor::diagonal);
        // general grows like 2^{n/2} (delta^2/(4 sqrt(2 eps))), diagonal like
        // 2^n (delta^2/(8 eps) = 2^n/288 at delta = 1/3)
        CHECK(general >= 0.014 * std::pow(2.0, n / 2.0));
        CHECK(diagonal >= 0.003 * std::pow(2.0, n));
        CHECK(diagonal > general);
    }

    // grid sweep: no interleaving reaches advantage delta below the bound
    Rng rng(95);
    for (double delta : {0.2, 0.5, 0.9}) {
        for (int flips : {1, 2}) {
            int n = 5;
            int d = 1 << n;
            CMatrix oa = random_pm1_diagonal(d, flips, rng);
            CMatrix ob = random_pm1_diagonal(d, flips, rng);
            UnitaryPair p(oa, ob);
            double rmin = query_lower_bound(delta, p.eps, BoundFlavor::diagonal);
            int rmax = static_cast<int>(std::min(12.0, std::ceil(rmin) - 1.0));
            if (rmax < 1) continue;
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<CMatrix> ivs;
                for (int i = 0; i <= rmax; ++i) ivs.push_back(testutil::random_unitary(d, rng));
                for (const auto& pt : fidelity_after_queries(p, ivs))
                    CHECK(pt.trace_distance < delta);
            }
        }
    }
}

TEST_CASE("advantage-distance link: TV of exact output laws is below D_r") {
    Rng rng(96);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(3));  // up to 4
        int d = 1 << n;
        CMatrix oa = random_pm1_diagonal(d, 1, rng);
        CMatrix ob = random_pm1_diagonal(d, 1, rng);
        UnitaryPair pair(oa, ob);
        int r = 1 + static_cast<int>(rng.next_below(3));
        std::vector<Circuit> stages;
        std::vector<CMatrix> ivs;
        for (int i = 0; i <= r; ++i) {
            Circuit v = testutil::random_circuit(n, 5, rng, false);
            ivs.push_back(circuit_unitary(v));
            stages.push_back(v);
        }
        // the two half-BQP circuits V_0 O V_1 ... O V_r applied to |w>
        auto build = [&](const CMatrix& oracle) {
            Circuit c{n, {}};
            for (int i = r; i >= 0; --i) {
                for (const GateOp& g : stages[static_cast<size_t>(i)].ops) c.ops.push_back(g);
                if (i > 0) c.ops.push_back(DenseUnitary{range_reg(0, n - 1), oracle});
            }
            return c;
        };
        auto ja = exact_joint_distribution(HalfBqpProgram{build(oa), {}});
        auto jb = exact_joint_distribution(HalfBqpProgram{build(ob), {}});
        double tv = 0.0;
        for (size_t i = 0; i < ja.p.size(); ++i) tv += std::abs(ja.p[i] - jb.p[i]);
        tv *= 0.5;
        double dr = fidelity_after_queries(pair, ivs).back().trace_distance;
        CHECK(tv <= dr + 1e-8);
    }
}
