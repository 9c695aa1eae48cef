#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "halfbqp/oracles.hpp"
#include "halfbqp/simulate.hpp"
#include "test_util.hpp"

using namespace halfbqp;
using testutil::max_entry_diff;

TEST_CASE("phase_oracle special cases") {
    CMatrix id = circuit_unitary(Circuit{3, {phase_oracle(BooleanFunctionTable::constant(3, 1))}});
    CHECK(max_entry_diff(id, CMatrix::identity(8)) < 1e-15);

    // chi_s phase oracle is exactly ZMask(s)
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        u64 s = rng.next_bits(3);
        CMatrix a = circuit_unitary(Circuit{3, {phase_oracle(BooleanFunctionTable::character(3, s))}});
        CMatrix b = circuit_unitary(Circuit{3, {ZMask{s}}});
        CHECK(max_entry_diff(a, b) < 1e-15);
    }

    auto f = BooleanFunctionTable::random(3, rng);
    CMatrix d = circuit_unitary(Circuit{3, {phase_oracle(f)}});
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) {
            cplx want = (r == c) ? cplx{static_cast<double>(f(static_cast<u64>(r)))} : cplx{};
            CHECK(std::abs(d(r, c) - want) < 1e-15);
        }
}

TEST_CASE("index_oracle: identity, involution, and table permutation") {
    std::vector<u64> zeros(4, 0);
    CMatrix id = circuit_unitary(
        Circuit{4, {index_oracle(VectorFunctionTable(2, 2, zeros), {0, 1}, {2, 3})}});
    CHECK(max_entry_diff(id, CMatrix::identity(16)) < 1e-15);

    Rng rng(52);
    SimonInstance inst = gen_simon(2, 0b11, rng);
    GateOp oracle = index_oracle(inst.table, {0, 1}, {2, 3});
    CMatrix once = circuit_unitary(Circuit{4, {oracle}});
    CMatrix twice = circuit_unitary(Circuit{4, {oracle, oracle}});
    CHECK(max_entry_diff(twice, CMatrix::identity(16)) < 1e-15);

    // permutation matrix that matches the table: |x,y> -> |x, y ^ f(x)>
    for (u64 x = 0; x < 4; ++x)
        for (u64 y = 0; y < 4; ++y) {
            u64 in = (x << 2) | y;
            u64 out = (x << 2) | (y ^ inst.table(x));
            CHECK(std::abs(once(static_cast<int>(out), static_cast<int>(in)) - cplx{1.0}) < 1e-15);
        }
}

TEST_CASE("gen_simon structure and exhaustive collision scan") {
    Rng rng(53);
    SimonInstance small = gen_simon(2, 0b11, rng);
    CHECK(small.table(0b00) == small.table(0b11));
    CHECK(small.table(0b01) == small.table(0b10));
    CHECK(small.table(0b00) != small.table(0b01));

    // brute-force pair scan at n = 4: collision differences are exactly {0, s}
    u64 s = 0;
    while (s == 0) s = rng.next_bits(4);
    SimonInstance inst = gen_simon(4, s, rng);
    std::set<u64> diffs;
    for (u64 x = 0; x < 16; ++x)
        for (u64 y = 0; y < 16; ++y)
            if (inst.table(x) == inst.table(y)) diffs.insert(x ^ y);
    CHECK(diffs == std::set<u64>{0, s});

    CHECK_THROWS_AS(gen_simon(3, 0, rng), std::invalid_argument);
    SimonInstance inj = gen_simon(3, 0, rng, true);
    std::set<u64> outputs(inj.table.values.begin(), inj.table.values.end());
    CHECK(outputs.size() == 8);
}

TEST_CASE("lift_simon embeds the table and zeroes nonzero suffixes") {
    Rng rng(54);
    SimonInstance inst = gen_simon(3, 5, rng);
    auto lifted = lift_simon(inst);
    CHECK(lifted.n == 6);
    CHECK(lifted.m == 3);
    for (u64 x = 0; x < 64; ++x) {
        if (x & 0b111)
            CHECK(lifted(x) == 0);
        else
            CHECK(lifted(x) == inst.table(x >> 3));
    }
}

TEST_CASE("lifted Simon oracles are close in normalized trace distance") {
    Rng rng(55);
    int n = 2;
    SimonInstance a = gen_simon(n, 0b11, rng);
    SimonInstance b = gen_simon(n, 0b01, rng);
    // oracle acts on 2n input + n output qubits
    int total = 3 * n;
    Circuit ca{total, {index_oracle(lift_simon(a), range_reg(0, 2 * n - 1), range_reg(2 * n, 3 * n - 1))}};
    Circuit cb{total, {index_oracle(lift_simon(b), range_reg(0, 2 * n - 1), range_reg(2 * n, 3 * n - 1))}};
    CMatrix ua = circuit_unitary(ca, total);
    CMatrix ub = circuit_unitary(cb, total);
    auto sv = singular_values(ua - ub);
    double trace_norm = 0.0;
    for (double v : sv) trace_norm += v;
    double normalized = trace_norm / static_cast<double>(u64{1} << (2 * n));  // 2^{2n} prefactor
    CHECK(normalized <= 8.0 / (1 << n) + 1e-9);
}

TEST_CASE("gen_periodic: promise, constant case, and brute-force minimal period") {
    Rng rng(56);
    PeriodicInstance constant = gen_periodic(4, 1, rng);
    for (u64 x = 1; x < 16; ++x) CHECK(constant.table(x) == constant.table(0));

    PeriodicInstance four = gen_periodic(4, 4, rng);
    for (u64 x = 0; x + 4 < 16; ++x) CHECK(four.table(x) == four.table(x + 4));

    for (int trial = 0; trial < 10; ++trial) {
        u64 r = 1 + rng.next_below(8);  // r <= sqrt(2^6) = 8
        PeriodicInstance inst = gen_periodic(6, r, rng);
        u64 minimal = 0;
        for (u64 cand = 1; cand <= 64; ++cand) {
            bool ok = true;
            for (u64 x = 0; x + cand < 64 && ok; ++x) ok = inst.table(x) == inst.table(x + cand);
            if (ok) { minimal = cand; break; }
        }
        CHECK(minimal == r);
    }
    CHECK_THROWS_AS(gen_periodic(4, 5, rng), std::invalid_argument);  // r > sqrt(Q)
}

TEST_CASE("modexp_oracle values and period structure") {
    auto t = modexp_oracle(2, 15);
    CHECK(t(3) == 8);   // 2^3 = 8
    CHECK(t(4) == 1);   // 2^4 = 16 = 1 mod 15
    auto t7 = modexp_oracle(7, 15);
    CHECK(t7(4) == 1);  // 7^4 = 2401 = 1 mod 15

    auto t21 = modexp_oracle(2, 21);
    u64 order = multiplicative_order(2, 21);
    CHECK(order == 6);
    bool periodic = true;
    for (u64 x = 0; x + order < t21.values.size(); ++x)
        if (t21(x) != t21(x + order)) periodic = false;
    CHECK(periodic);

    CHECK_THROWS_AS(modexp_oracle(3, 15), std::invalid_argument);  // gcd != 1
}

TEST_CASE("modexp table period equals the multiplicative order for all N <= 64") {
    for (u64 N = 3; N <= 64; ++N) {
        for (u64 a = 2; a < N; ++a) {
            if (gcd_u64(a, N) != 1) continue;
            auto t = modexp_oracle(a, N);
            u64 order = multiplicative_order(a, N);
            u64 minimal = 0;
            for (u64 cand = 1; cand <= t.values.size(); ++cand) {
                bool ok = true;
                for (u64 x = 0; x + cand < t.values.size() && ok; ++x)
                    ok = t(x) == t(x + cand);
                if (ok) { minimal = cand; break; }
            }
            REQUIRE(minimal == order);
            // injective on exponents below the order
            std::set<u64> seen;
            for (u64 x = 0; x < order; ++x) seen.insert(t(x));
            REQUIRE(seen.size() == order);
        }
    }
}

TEST_CASE("forrelation_value: closed forms and route cross-check") {
    for (int n = 1; n <= 6; ++n) {
        auto ones = BooleanFunctionTable::constant(n, 1);
        CHECK(forrelation_value(ones, ones) ==
              Catch::Approx(std::pow(2.0, -n / 2.0)).margin(1e-12));
    }

    // construct the exact bent partner by hand: Phi = 1
    auto f = bent_inner_product(4);
    std::vector<double> fh(16);
    for (u64 x = 0; x < 16; ++x) fh[x] = f(x);
    halfbqp::detail::fwht_inplace(fh);
    std::vector<int8_t> gv(16);
    for (u64 y = 0; y < 16; ++y) gv[y] = fh[y] >= 0 ? 1 : -1;
    BooleanFunctionTable g{4, std::move(gv)};
    CHECK(forrelation_value(f, g) == Catch::Approx(1.0).margin(1e-12));
    CHECK(forrelation_value_naive(f, g) == Catch::Approx(1.0).margin(1e-12));

    Rng rng(57);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(5));
        auto a = BooleanFunctionTable::random(n, rng);
        auto b = BooleanFunctionTable::random(n, rng);
        CHECK(forrelation_value(a, b) ==
              Catch::Approx(forrelation_value_naive(a, b)).margin(1e-10));
        // symmetric in the two functions
        CHECK(forrelation_value(a, b) == Catch::Approx(forrelation_value(b, a)).margin(1e-12));
    }
}

TEST_CASE("gen_forrelation respects the promise labels") {
    Rng rng(58);
    for (int trial = 0; trial < 8; ++trial) {
        auto large = gen_forrelation(4, ForrelationLabel::large, rng);
        CHECK(forrelation_value(large) >= 0.6 - 1e-12);
    }
    for (int trial = 0; trial < 4; ++trial) {
        auto small = gen_forrelation(8, ForrelationLabel::small, rng);
        CHECK(std::abs(forrelation_value(small)) <= 0.01);
    }
}

TEST_CASE("raz-tal samples serialize as sign strings") {
    Rng rng(595);
    auto s = sample_raz_tal(4, RazTalSource::D, rng);
    std::string str = raz_tal_to_string(s);
    CHECK(str.size() == 32);  // 2 * 2^4
    auto back = raz_tal_from_string(4, str, RazTalSource::D);
    CHECK(back.x == s.x);
    CHECK(back.y == s.y);
    CHECK_THROWS_AS(raz_tal_from_string(5, str), std::invalid_argument);
}

TEST_CASE("raz-tal sampler: transform identity and moment checks") {
    // orthonormal Hadamard transform is an involution
    std::vector<double> x = {0.25, -0.5, 0.125, 0.75};
    std::vector<double> y = x;
    halfbqp::detail::fwht_inplace(y);
    for (double& v : y) v *= 0.5;  // orthonormal scale 1/sqrt(4)
    std::vector<double> back = y;
    halfbqp::detail::fwht_inplace(back);
    for (double& v : back) v *= 0.5;
    for (size_t i = 0; i < 4; ++i) CHECK(back[i] == Catch::Approx(x[i]).margin(1e-10));

    int n = 6;
    u64 samples = 30000;
    Rng rng(59);
    // E_U[Phi^2] = 1/2^n within 3 standard errors
    double sum = 0.0, sumsq = 0.0;
    for (u64 i = 0; i < samples; ++i) {
        auto s = sample_raz_tal(n, RazTalSource::U, rng);
        double p2 = raz_tal_phi(s) * raz_tal_phi(s);
        sum += p2;
        sumsq += p2 * p2;
    }
    double mean = sum / static_cast<double>(samples);
    double se = std::sqrt((sumsq / static_cast<double>(samples) - mean * mean) /
                          static_cast<double>(samples));
    CHECK(std::abs(mean - 1.0 / 64) <= 3.0 * se);

    // E_D[Phi] clearly positive, above eps/4 (asymptotic constant relaxed)
    double dsum = 0.0;
    for (u64 i = 0; i < samples; ++i)
        dsum += raz_tal_phi(sample_raz_tal(n, RazTalSource::D, rng));
    CHECK(dsum / static_cast<double>(samples) >= raz_tal_epsilon(n) / 4.0);
}
