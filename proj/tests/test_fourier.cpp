#include <catch2/catch_amalgamated.hpp>

#include "halfbqp/fourier.hpp"
#include "test_util.hpp"

using namespace halfbqp;

TEST_CASE("walsh_transform: point masses and the naive-sum oracle") {
    auto flat = walsh_transform(BooleanFunctionTable::constant(4, 1));
    CHECK(flat.coef[0] == Catch::Approx(1.0).margin(1e-15));
    for (u64 s = 1; s < 16; ++s) CHECK(flat.coef[s] == Catch::Approx(0.0).margin(1e-15));

    Rng rng(61);
    u64 target = 0b101;
    auto chi = walsh_transform(BooleanFunctionTable::character(3, target));
    for (u64 s = 0; s < 8; ++s)
        CHECK(chi.coef[s] == Catch::Approx(s == target ? 1.0 : 0.0).margin(1e-15));

    for (int trial = 0; trial < 5; ++trial) {
        auto f = BooleanFunctionTable::random(3, rng);
        auto fast = walsh_transform(f);
        auto slow = testutil::naive_walsh(testutil::to_real(f));
        for (u64 s = 0; s < 8; ++s) CHECK(fast.coef[s] == Catch::Approx(slow[s]).margin(1e-12));
    }
}

TEST_CASE("parseval and transform inversion") {
    Rng rng(62);
    for (int n = 2; n <= 8; n += 2) {
        auto f = BooleanFunctionTable::random(n, rng);
        auto sp = walsh_transform(f);
        CHECK(std::abs(sp.parseval_sum() - 1.0) < 1e-9);
        auto back = inverse_walsh(sp);
        for (u64 x = 0; x < back.size(); ++x)
            CHECK(back[x] == Catch::Approx(static_cast<double>(f(x))).margin(1e-10));
    }
}

TEST_CASE("spectrum serialization round-trips in ranked order") {
    Rng rng(699);
    auto f = BooleanFunctionTable::random(5, rng);
    auto sp = walsh_transform(f);
    std::stringstream ss;
    save_spectrum(ss, sp);
    // first line carries the largest |coefficient|
    std::string bits;
    double value;
    std::stringstream probe(ss.str());
    probe >> bits >> value;
    CHECK(std::abs(value) == Catch::Approx(std::abs(sp.ranked().front().second)).margin(1e-15));
    auto back = load_spectrum(ss, 5);
    for (u64 s = 0; s < 32; ++s) CHECK(back.coef[s] == Catch::Approx(sp.coef[s]).margin(1e-15));
}

TEST_CASE("estimate_coefficient: exact cases and coverage") {
    Rng rng(63);
    auto ones = BooleanFunctionTable::constant(4, 1);
    CHECK(estimate_coefficient(table_query(ones), 4, 0, 500, rng).value == 1.0);

    u64 s = 0b1010;
    auto chi = BooleanFunctionTable::character(4, s);
    CHECK(estimate_coefficient(table_query(chi), 4, s, 500, rng).value == 1.0);

    // random f at n = 8: estimate covers the exact coefficient in >= 99/100 runs
    auto f = BooleanFunctionTable::random(8, rng);
    auto sp = walsh_transform(f);
    int covered = 0;
    for (int rep = 0; rep < 100; ++rep) {
        u64 t = rng.next_bits(8);
        Estimate e = estimate_coefficient(table_query(f), 8, t, 4000, rng);
        if (std::abs(e.value - sp.coef[t]) <= e.radius) ++covered;
    }
    CHECK(covered >= 99);
}

TEST_CASE("goldreich_levin finds heavy coefficients") {
    Rng rng(64);
    // single character
    u64 s = 0b01101;
    auto chi = BooleanFunctionTable::character(5, s);
    auto list = goldreich_levin(table_query(chi), 5, 0.9, rng);
    REQUIRE(std::find(list.begin(), list.end(), s) != list.end());
    CHECK(list.size() <= static_cast<size_t>(4.0 / (0.9 * 0.9)));

    // f = (chi_a + chi_b)/2, range {-1, 0, 1}: both coefficients are 1/2
    u64 a = 0b00110, b = 0b11001;
    QueryFn f = [&](u64 x) {
        return 0.5 * ((dot2(a, x) ? -1.0 : 1.0) + (dot2(b, x) ? -1.0 : 1.0));
    };
    auto list2 = goldreich_levin(f, 5, 0.4, rng);
    CHECK(std::find(list2.begin(), list2.end(), a) != list2.end());
    CHECK(std::find(list2.begin(), list2.end(), b) != list2.end());
    CHECK(list2.size() <= static_cast<size_t>(4.0 / (0.4 * 0.4)));

    // Maj3: singles at +1/2, the triple at -1/2
    QueryFn maj = [](u64 x) {
        int bits = static_cast<int>((x & 1) + ((x >> 1) & 1) + ((x >> 2) & 1));
        return bits >= 2 ? 1.0 : -1.0;
    };
    auto list3 = goldreich_levin(maj, 3, 0.4, rng);
    for (u64 want : {u64{0b001}, u64{0b010}, u64{0b100}, u64{0b111}})
        CHECK(std::find(list3.begin(), list3.end(), want) != list3.end());
}

TEST_CASE("fourier_repr_A single-character fixed points") {
    Rng rng(65);
    int n = 3;
    u64 dim = 8;
    Circuit c = testutil::random_circuit(n, 8, rng);
    CMatrix u = circuit_unitary(c);

    // f(w,z) = (-1)^{s.w + s'.z} has one Fourier coefficient; A collapses to
    // the single trace term
    u64 s = 0b101, sp = 0b011;
    std::vector<double> f(dim * dim);
    for (u64 w = 0; w < dim; ++w)
        for (u64 z = 0; z < dim; ++z)
            f[(w << n) | z] = (dot2(s, w) ^ dot2(sp, z)) ? -1.0 : 1.0;
    double a = fourier_repr_A(c, f);
    CHECK(a == Catch::Approx(exact_trace_term(u, s, sp)).margin(1e-10));

    // identity circuit with s = s': Tr(Z^s Z^s)/2^n = 1
    Circuit ident{n, {}};
    std::vector<double> fss(dim * dim);
    for (u64 w = 0; w < dim; ++w)
        for (u64 z = 0; z < dim; ++z) fss[(w << n) | z] = (dot2(s, w) ^ dot2(s, z)) ? -1.0 : 1.0;
    CHECK(fourier_repr_A(ident, fss) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("fourier representation equals the direct acceptance value") {
    Rng rng(66);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(3));  // 2..4
        u64 dim = u64{1} << n;
        Circuit c = testutil::random_circuit(n, 8, rng);

        // random bounded post-processing table
        std::vector<double> f(dim * dim);
        for (double& v : f) v = 2.0 * rng.next_double() - 1.0;

        HalfBqpProgram p{c, PostRule{"table", [&](u64 w, u64 z, Rng&) { return f[(w << n) | z]; }, {}}};
        double direct = exact_acceptance(p);
        double repr = fourier_repr_A(c, f);
        CHECK(repr == Catch::Approx(direct).margin(1e-8));
    }
}

TEST_CASE("dqc1_sim_sparse: trivial and single-character instances") {
    Rng rng(67);
    // f = 1: single coefficient (0,0); C = identity gives A = 1
    int n = 3;
    Circuit ident{n, {}};
    QueryFn one = [](u64) { return 1.0; };
    auto r = dqc1_sim_sparse(ident, one, {0}, 0.0, 4000, 7001);
    CHECK(std::abs(r.estimate.value - 1.0) <= r.estimate.radius);

    // single character pair against a random circuit, checked against the
    // exact trace term
    Circuit c = testutil::random_circuit(3, 6, rng);
    u64 s = 0b110, sp = 0b010;
    u64 pair = (s << 3) | sp;
    QueryFn chi = [&](u64 wz) { return dot2(pair, wz) ? -1.0 : 1.0; };
    CMatrix u = circuit_unitary(c);
    double want = exact_trace_term(u, s, sp);
    auto r2 = dqc1_sim_sparse(c, chi, {pair}, 0.0, 20000, 7002);
    CHECK(std::abs(r2.estimate.value - want) <= r2.estimate.radius);
}

TEST_CASE("dqc1_sim_sparse discovers the support with goldreich-levin") {
    Rng rng(68);
    int n = 2;
    Circuit c = testutil::random_circuit(n, 5, rng);
    // four coefficients of weight 1/4 over (w,z) pairs, tail zero
    std::vector<u64> support = {0b0000, 0b0110, 0b1001, 0b1111};
    std::vector<double> weights = {0.25, -0.25, 0.25, 0.25};
    QueryFn f = [&](u64 wz) {
        double acc = 0.0;
        for (size_t i = 0; i < support.size(); ++i)
            acc += weights[i] * (dot2(support[i], wz) ? -1.0 : 1.0);
        return acc;
    };
    std::vector<double> table(1u << (2 * n));
    for (u64 wz = 0; wz < table.size(); ++wz) table[wz] = f(wz);
    double want = fourier_repr_A(c, table);

    auto r = dqc1_sim_sparse(c, f, {}, 0.0, 20000, 7003, /*discovery_tau=*/0.2);
    CHECK(r.support.size() >= 4);
    CHECK(std::abs(r.estimate.value - want) <= r.estimate.radius);
}
