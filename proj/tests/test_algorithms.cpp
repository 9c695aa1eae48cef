#include <catch2/catch_amalgamated.hpp>

#include "halfbqp/algorithms.hpp"
#include "test_util.hpp"

using namespace halfbqp;

TEST_CASE("fourier_sample: point-mass cases and exact law") {
    Rng rng(71);
    // f = 1 always lands on 0^n
    auto ones = BooleanFunctionTable::constant(4, 1);
    for (int i = 0; i < 30; ++i) CHECK(fourier_sample(ones, rng) == 0);

    // chi_s always lands on s
    u64 s = 0b0110;
    auto chi = BooleanFunctionTable::character(4, s);
    for (int i = 0; i < 30; ++i) CHECK(fourier_sample(chi, rng) == s);

    // corrected exact law from the joint distribution equals fhat^2
    int n = 3;
    auto f = BooleanFunctionTable::random(n, rng);
    auto sp = walsh_transform(f);
    auto joint = exact_joint_distribution(fourier_sampling_program(f));
    std::vector<double> corrected(8, 0.0);
    for (u64 w = 0; w < 8; ++w)
        for (u64 z = 0; z < 8; ++z) corrected[z ^ w] += joint.at(w, z);
    for (u64 y = 0; y < 8; ++y)
        CHECK(corrected[y] == Catch::Approx(sp.coef[y] * sp.coef[y]).margin(1e-10));
}

TEST_CASE("deutsch_jozsa decides constant vs balanced in one query") {
    Rng rng(72);
    CHECK(deutsch_jozsa(BooleanFunctionTable::constant(4, 1), rng) == DjVerdict::constant);
    CHECK(deutsch_jozsa(BooleanFunctionTable::constant(4, -1), rng) == DjVerdict::constant);
    CHECK(deutsch_jozsa(BooleanFunctionTable::character(4, 0b1001), rng) == DjVerdict::balanced);

    // random balanced f: the corrected-0 amplitude is exactly zero
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(5));
        u64 size = u64{1} << n;
        std::vector<int8_t> v(size, 1);
        std::vector<u64> idx(size);
        for (u64 i = 0; i < size; ++i) idx[i] = i;
        rng.shuffle(idx);
        for (u64 i = 0; i < size / 2; ++i) v[idx[i]] = -1;
        BooleanFunctionTable f{n, std::move(v)};
        CHECK(deutsch_jozsa(f, rng) == DjVerdict::balanced);
    }
}

TEST_CASE("bernstein_vazirani recovers s deterministically") {
    Rng rng(73);
    auto zero = bernstein_vazirani(BooleanFunctionTable::character(3, 0), rng);
    CHECK(zero.s == 0);
    CHECK(zero.verified);

    auto five = bernstein_vazirani(BooleanFunctionTable::character(3, 0b101), rng);
    CHECK(five.s == 0b101);

    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(8));
        u64 s = rng.next_bits(n);
        if (bernstein_vazirani(BooleanFunctionTable::character(n, s), rng).s == s) ++hits;
    }
    CHECK(hits == 100);

    // non-character input trips the verification flag
    Rng det(5);
    auto notchi = bernstein_vazirani(bent_inner_product(4), det);
    CHECK_FALSE(notchi.verified);
}

TEST_CASE("f2 basis solves every rank-(n-1) system exhaustively") {
    for (int n = 2; n <= 4; ++n) {
        for (u64 s = 1; s < (u64{1} << n); ++s) {
            F2Basis basis(n);
            for (u64 u = 0; u < (u64{1} << n); ++u)
                if (dot2(u, s) == 0) basis.add(u);
            REQUIRE(basis.rank() == n - 1);
            CHECK(f2_unique_kernel_vector(basis) == s);
        }
    }
}

TEST_CASE("simon queries always satisfy the orthogonality constraint") {
    Rng rng(74);
    int n = 4;
    u64 s = 0b1010;
    SimonInstance inst = gen_simon(n, s, rng);
    auto joint = exact_joint_distribution(simon_program(inst.table));
    double violating = 0.0;
    u64 size = u64{1} << (2 * n);
    for (u64 w = 0; w < size; ++w)
        for (u64 z = 0; z < size; ++z) {
            double pr = joint.at(w, z);
            if (pr == 0.0) continue;
            u64 u = (w >> n) ^ (z >> n);
            if (dot2(u, s)) violating += pr;
        }
    CHECK(violating < 1e-12);
}

TEST_CASE("simon_solve recovers hidden strings") {
    Rng rng(75);
    SimonInstance tiny = gen_simon(2, 0b11, rng);
    CHECK(simon_solve(tiny.table, rng).s == 0b11);

    int recovered = 0;
    u64 total_queries = 0;
    const int trials = 60;
    int n = 5;
    for (int t = 0; t < trials; ++t) {
        u64 s = 0;
        while (s == 0) s = rng.next_bits(n);
        SimonInstance inst = gen_simon(n, s, rng);
        SimonResult r = simon_solve(inst.table, rng);
        if (r.s == s) ++recovered;
        total_queries += r.queries;
    }
    CHECK(recovered == trials);
    CHECK(total_queries <= static_cast<u64>(trials) * 3 * n);

    // opt-in injective instance reports s = 0
    SimonInstance inj = gen_simon(3, 0, rng, true);
    SimonResult r = simon_solve(inj.table, rng);
    CHECK(r.s == 0);
    CHECK(r.injective);
}

TEST_CASE("continued fraction denominators match brute force") {
    CHECK(continued_fraction_denominator(4, 16, 4) == 4);
    CHECK(continued_fraction_denominator(0, 16, 4) == 1);
    CHECK(continued_fraction_denominator(5, 16, 4) == 3);

    // convergents are the best approximations of the second kind: the
    // returned denominator minimizes |den * c/q - nearest integer| among all
    // denominators <= bound (brute force over Q = 2^n <= 256, bound <= 16)
    for (u64 q : {u64{16}, u64{64}, u64{256}}) {
        for (u64 bound : {u64{3}, u64{7}, u64{16}}) {
            for (u64 c = 0; c < q; ++c) {
                u64 got = continued_fraction_denominator(c, q, bound);
                REQUIRE(got >= 1);
                REQUIRE(got <= bound);
                auto err2 = [&](u64 den) {
                    double v = static_cast<double>(den * c) / static_cast<double>(q);
                    return std::abs(v - std::round(v));
                };
                double got_err = err2(got);
                for (u64 den = 1; den <= bound; ++den)
                    CHECK(got_err <= err2(den) + 1e-12);
            }
        }
    }
}

TEST_CASE("period finding: exact outcome law for r | Q") {
    Rng rng(76);
    int n = 4;
    u64 q = 16, r = 4;
    PeriodicInstance inst = gen_periodic(n, r, rng);
    HalfBqpProgram p = period_program(inst.table);
    // for random (w1, w2): law of c = (w1 + y) mod Q is uniform on multiples of Q/r
    for (int rep = 0; rep < 3; ++rep) {
        u64 w = rng.next_bits(2 * n);
        StateVector s = run_circuit(w, p.circuit);
        u64 w1 = w >> n;
        std::vector<double> claw(q, 0.0);
        for (u64 z = 0; z < s.size(); ++z) {
            double pr = std::norm(s[z]);
            if (pr == 0.0) continue;
            u64 y = z >> n;
            claw[(w1 + y) & (q - 1)] += pr;
        }
        double on_multiples = 0.0;
        for (u64 j = 0; j < r; ++j) {
            on_multiples += claw[j * (q / r)];
            // per-point mass 1/r clears the (4/pi^2)/r floor
            CHECK(claw[j * (q / r)] >= 4.0 / (9.8696044010893586 * static_cast<double>(r)));
        }
        CHECK(on_multiples == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("period finding recovers r, including r not dividing Q") {
    Rng rng(77);
    PeriodicInstance c1 = gen_periodic(5, 1, rng);
    CHECK(period_find(c1, rng).r == 1);

    int hits = 0;
    const int trials = 40;
    for (int t = 0; t < trials; ++t) {
        PeriodicInstance inst = gen_periodic(6, 5, rng);  // 5 does not divide 64
        PeriodResult res = period_find(inst, rng, 50);
        if (res.r == 5) ++hits;
    }
    CHECK(hits >= static_cast<int>(trials * 0.95));

    for (u64 r : {u64{2}, u64{4}, u64{8}}) {
        PeriodicInstance inst = gen_periodic(6, r, rng);
        CHECK(period_find(inst, rng).r == r);
    }
}

TEST_CASE("order finding matches brute force") {
    Rng rng(78);
    CHECK(order_find(7, 15, rng).order == 4);
    CHECK(order_find(2, 15, rng).order == 4);
    for (u64 N : {u64{15}, u64{21}, u64{33}}) {
        for (u64 a = 2; a < N; ++a) {
            if (gcd_u64(a, N) != 1) continue;
            CHECK(order_find(a, N, rng).order == multiplicative_order(a, N));
        }
    }
}

TEST_CASE("factor splits semiprimes and rejects bad inputs") {
    Rng rng(79);
    auto r15 = factor(15, rng);
    REQUIRE(r15.ok);
    CHECK(r15.p * r15.q == 15);

    CHECK(factor(9, rng).status == "prime-power");
    CHECK(factor(13, rng).status == "prime");
    CHECK(factor(16, rng).status == "even");

    int good = 0;
    for (int t = 0; t < 20; ++t) {
        auto r = factor(21, rng);
        if (r.ok && r.p * r.q == 21 && r.p != 1 && r.p != 21) ++good;
    }
    CHECK(good == 20);
}

TEST_CASE("iqp sampling: fixed points and exact corrected law") {
    Rng rng(80);
    Circuit empty{3, {}};
    for (int i = 0; i < 20; ++i) CHECK(iqp_sample(empty, rng) == 0);

    u64 s = 0b101;
    Circuit zmask{3, {ZMask{s}}};
    for (int i = 0; i < 20; ++i) CHECK(iqp_sample(zmask, rng) == s);

    // random diagonal D: corrected law equals the direct IQP law within 1e-10 TV
    int n = 3;
    Circuit diag{n, {testutil::random_diagonal_phase({0, 1}, rng),
                     testutil::random_diagonal_phase({1, 2}, rng), ZMask{rng.next_bits(n)},
                     phase_oracle(BooleanFunctionTable::random(n, rng))}};
    auto direct = output_distribution(0, iqp_program(diag).circuit);
    auto joint = exact_joint_distribution(iqp_program(diag));
    std::vector<double> corrected(8, 0.0);
    for (u64 w = 0; w < 8; ++w)
        for (u64 z = 0; z < 8; ++z) corrected[z ^ w] += joint.at(w, z);
    CHECK(testutil::total_variation(corrected, direct) < 1e-10);

    Circuit bad{2, {Hadamard{0}}};
    CHECK_THROWS_AS(iqp_program(bad), std::invalid_argument);
}

TEST_CASE("weighted trace estimation against the exact oracle") {
    Rng rng(81);
    // C = identity, f = 1: W = 1
    Circuit ident{2, {}};
    auto one = [](u64) { return 1.0; };
    auto est = weighted_trace_estimate(ident, one, 6000, 811);
    CHECK(std::abs(est.real_part.value - 1.0) <= est.real_part.radius);
    CHECK(std::abs(est.imag_part.value) <= est.imag_part.radius);

    // C = X on one qubit: Tr(X) = 0
    Circuit x{1, {PauliX{0}}};
    auto estx = weighted_trace_estimate(x, one, 6000, 812);
    CHECK(std::abs(estx.real_part.value) <= estx.real_part.radius);

    // random diagonal circuit, parity weight, checked against the exact value
    int n = 4;
    Circuit diag{n, {testutil::random_diagonal_phase(range_reg(0, n - 1), rng)}};
    auto weight = [n](u64 x) { return (x >> (n - 1)) & 1 ? -1.0 : 1.0; };  // (-1)^{x_1}
    cplx exact = exact_weighted_trace(diag, weight);
    auto estd = weighted_trace_estimate(diag, weight, 60000, 813);
    CHECK(std::abs(estd.real_part.value - exact.real()) <= estd.real_part.radius);
    CHECK(std::abs(estd.imag_part.value - exact.imag()) <= estd.imag_part.radius);
}

TEST_CASE("forrelation: exact E[R] equals Phi^2") {
    Rng rng(82);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(4));  // 2..5
        auto f = BooleanFunctionTable::random(n, rng);
        auto g = BooleanFunctionTable::random(n, rng);
        double phi = forrelation_value(f, g);
        CHECK(forrelation2_exact_er(f, g) == Catch::Approx(phi * phi).margin(1e-10));
    }
}

TEST_CASE("forrelation decider error stays below 1/3 on both sides") {
    Rng rng(83);
    int n = 6;
    // unperturbed bent pair (Phi = 1): accept rate is 1
    auto f = bent_inner_product(n);
    auto sp = walsh_transform(f);
    std::vector<int8_t> gv(1u << n);
    for (u64 y = 0; y < gv.size(); ++y) gv[y] = sp.coef[y] >= 0 ? 1 : -1;
    BooleanFunctionTable gstar{n, std::move(gv)};
    int accept_bent = 0;
    for (int t = 0; t < 200; ++t)
        if (forrelation2_decide(f, gstar, rng).accept) ++accept_bent;
    CHECK(accept_bent >= 190);  // >= 0.95

    int accept_large = 0, accept_small = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        auto large = gen_forrelation(n, ForrelationLabel::large, rng);
        if (forrelation2_decide(large.f, large.g, rng).accept) ++accept_large;
        auto small = gen_forrelation(n, ForrelationLabel::small, rng);
        if (forrelation2_decide(small.f, small.g, rng).accept) ++accept_small;
    }
    CHECK(accept_large >= 2 * trials / 3);
    CHECK(accept_small <= trials / 3);
}

TEST_CASE("k-forrelation value generator agrees with the k = 2 evaluator") {
    Rng rng(84);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 3;
        auto f = BooleanFunctionTable::random(n, rng);
        auto g = BooleanFunctionTable::random(n, rng);
        CHECK(k_forrelation_value({f, g}) ==
              Catch::Approx(forrelation_value(f, g)).margin(1e-12));
    }
    // 3-forrelation of all-ones: both character sums collapse at x2 = 0 and
    // the value is exactly 1 (hand derivation: 2^{-2n} * 2^{2n})
    auto ones = BooleanFunctionTable::constant(3, 1);
    CHECK(k_forrelation_value({ones, ones, ones}) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("raz-tal decider separates D from U batches") {
    int n = 10;
    u64 m = 60000;
    Rng rng(85);
    std::vector<RazTalSample> dbatch, ubatch;
    for (u64 i = 0; i < m; ++i) dbatch.push_back(sample_raz_tal(n, RazTalSource::D, rng));
    for (u64 i = 0; i < m; ++i) ubatch.push_back(sample_raz_tal(n, RazTalSource::U, rng));
    auto dd = raz_tal_decide(dbatch, 851);
    auto du = raz_tal_decide(ubatch, 852);
    CHECK(dd.verdict == RazTalSource::D);
    CHECK(du.verdict == RazTalSource::U);
    // U mean within 3 SE of 1/2^n
    CHECK(std::abs(du.mean - std::pow(2.0, -n)) <= 3.0 * du.std_error);
}

TEST_CASE("raz-tal decider in sampled mode is unbiased on U") {
    int n = 4;
    Rng rng(86);
    std::vector<RazTalSample> batch;
    for (int i = 0; i < 400; ++i) batch.push_back(sample_raz_tal(n, RazTalSource::U, rng));
    auto d = raz_tal_decide(batch, 861, /*runs_per_sample=*/8);
    // mean of +-1 outcomes estimating E[Phi^2] = 1/16: loose sanity interval
    CHECK(std::abs(d.mean - 1.0 / 16) < 0.07);
}

TEST_CASE("grover experiment: flat raw curve under the envelope") {
    GroverCurve c = grover_halfbqp_experiment(3, 5, 10);
    CHECK(c.raw_success[0] == Catch::Approx(0.125).margin(1e-12));
    for (int k = 0; k <= 10; ++k) {
        // uniform random input keeps the uncorrected success pinned at 1/2^n
        CHECK(c.raw_success[static_cast<size_t>(k)] == Catch::Approx(0.125).margin(1e-10));
        CHECK(c.raw_success[static_cast<size_t>(k)] <=
              c.envelope[static_cast<size_t>(k)] + 1e-12);
        CHECK(c.raw_success[static_cast<size_t>(k)] <= 0.125 + 0.36 * k + 1e-12);
        // the corrected readout gains nothing on average over the marked item
        CHECK(c.corrected_average[static_cast<size_t>(k)] == Catch::Approx(0.125).margin(1e-10));
    }
    CHECK(c.two_marked_distance == Catch::Approx(4.0 / 8).margin(1e-10));
}
