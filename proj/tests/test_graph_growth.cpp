#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "carving/graph_growth.hpp"
#include "oracle.hpp"

using namespace carving;

namespace {

CavityParams make(double k1, double k2, double ksc, double C) {
    CavityParams p;
    p.kappa1_frac = k1;
    p.kappa2_frac = k2;
    p.kappa_sc_frac = ksc;
    p.cooperativity = C;
    return p;
}

std::vector<oracle::cplx> to_vec(const Mat4 &m) { return {m.begin(), m.end()}; }
std::vector<oracle::cplx> to_vec(const Mat2 &m) { return {m.begin(), m.end()}; }

std::vector<oracle::cplx> dense_identity(std::size_t d) {
    std::vector<oracle::cplx> m(d * d);
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
    return m;
}

QubitRegister random_register(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> a(std::size_t{1} << n);
    double s = 0;
    for (auto &x : a) {
        x = {g(rng), g(rng)};
        s += std::norm(x);
    }
    for (auto &x : a) x /= std::sqrt(s);
    return QubitRegister(n, std::move(a));
}

// diag(sqrt(loss(ab))) on the pair: the part of the input that never reaches a detector
Mat4 loss_operator(const CoeffSet &coeffs, Protocol proto = Protocol::efficient) {
    Mat4 m{};
    for (int ab = 0; ab < 4; ++ab) {
        double kept = 0;
        for (const auto &k : detector_kraus(proto, coeffs)) kept += std::norm(k.diag[ab]);
        m[ab * 4 + ab] = std::sqrt(std::max(0.0, 1.0 - kept));
    }
    return m;
}

double max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// <psi| P |psi> for a Pauli string given as one Pauli per qubit
double pauli_expectation(const QubitRegister &reg, const std::vector<Pauli> &ops) {
    QubitRegister tmp = reg;
    for (int q = 0; q < reg.size(); ++q)
        if (ops[q] != Pauli::I) tmp.apply_1q(q, pauli_matrix(ops[q]));
    return reg.inner(tmp).real();
}

} // namespace

TEST_CASE("register basics") {
    CHECK_THROWS(QubitRegister(1));
    CHECK_THROWS(QubitRegister(QubitRegister::kMaxQubits + 1));
    CHECK_THROWS(QubitRegister(2, std::vector<cplx>(3)));
    CHECK_THROWS(QubitRegister(2, std::vector<cplx>{1.0, 1.0, 0.0, 0.0}));
    const QubitRegister p = QubitRegister::plus_state(3);
    CHECK(p.norm2() == doctest::Approx(1.0));
    for (auto a : p.amplitudes()) CHECK(a.real() == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK(QubitRegister(4).amplitudes()[0] == cplx(1.0));
}

TEST_CASE("pair operators match dense Kronecker products") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    Mat4 m;
    for (auto &x : m) x = {g(rng), g(rng)};
    Mat2 u;
    for (auto &x : u) x = {g(rng), g(rng)};
    const auto I2 = dense_identity(2);
    const QubitRegister psi = random_register(3, rng);
    const std::vector<cplx> v(psi.amplitudes().begin(), psi.amplitudes().end());

    // qubit 2 is the most significant bit
    QubitRegister a = psi;
    a.apply_2q(2, 1, m);
    CHECK(max_diff(a.amplitudes(), oracle::matvec(oracle::kron(to_vec(m), 4, I2, 2), v)) < 1e-13);

    QubitRegister b = psi;
    b.apply_2q(1, 0, m);
    CHECK(max_diff(b.amplitudes(), oracle::matvec(oracle::kron(I2, 2, to_vec(m), 4), v)) < 1e-13);

    // reversed pair order = SWAP m SWAP
    Mat4 swapped{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const int si = ((i & 1) << 1) | (i >> 1), sj = ((j & 1) << 1) | (j >> 1);
            swapped[si * 4 + sj] = m[i * 4 + j];
        }
    QubitRegister c = psi;
    c.apply_2q(1, 2, m);
    CHECK(max_diff(c.amplitudes(), oracle::matvec(oracle::kron(to_vec(swapped), 4, I2, 2), v)) < 1e-13);

    QubitRegister d = psi;
    d.apply_1q(1, u);
    CHECK(max_diff(d.amplitudes(), oracle::matvec(oracle::kron(oracle::kron(I2, 2, to_vec(u), 2), 4, I2, 2), v)) <
          1e-13);
}

TEST_CASE("carve map on |++> at ideal parameters") {
    const CoeffSet ideal = ideal_coefficients();
    const QubitRegister pp = QubitRegister::plus_state(2);
    const QubitRegister out = apply_carve_map(pp, {1, 0}, Detector::D1, ideal);
    const double s = std::sqrt(0.5) / std::sqrt(2.0);
    const std::vector<cplx> expect{0.0, s, s, 0.0};
    CHECK(max_diff(out.amplitudes(), expect) < 1e-15);

    double total = 0;
    for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
        const QubitRegister o = apply_carve_map(pp, {1, 0}, d, ideal);
        total += o.norm2();
        // every corrected outcome is the same Bell state up to a global sign
        const std::vector<cplx> bell{0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0};
        const double overlap = std::abs(bell[1] * o.amplitudes()[1] + bell[2] * o.amplitudes()[2]);
        CHECK(overlap * overlap == doctest::Approx(o.norm2()).epsilon(1e-15));
        CHECK(o.norm2() == doctest::Approx(d == Detector::D1 ? 0.5 : 0.25).epsilon(1e-15));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("carve map agrees with the direct protocol amplitudes") {
    const CavityParams p = make(0.46, 0.37, 0.17, 9);
    const CoeffSet coeffs = coefficient_set(p);
    const CarveResult r = carve_efficient(p);
    const QubitRegister pp = QubitRegister::plus_state(2);
    for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
        // without the correction the map returns the raw outcome amplitudes
        const PauliFrame undo = correction_for(d);
        LocalFrame f;
        f.post_first = pauli_matrix(undo.first);
        f.post_second = pauli_matrix(undo.second);
        const QubitRegister o = apply_carve_map(pp, {1, 0}, d, coeffs, Protocol::efficient, f);
        CHECK(max_diff(o.amplitudes(), r.outcome(d).amplitudes) < 1e-15);
        CHECK(o.norm2() == doctest::Approx(r.outcome(d).probability).epsilon(1e-14));
    }
}

TEST_CASE("carve map errors") {
    const QubitRegister reg = QubitRegister::plus_state(3);
    const CoeffSet c = ideal_coefficients();
    CHECK_THROWS_AS(apply_carve_map(reg, {1, 1}, Detector::D1, c), std::invalid_argument);
    CHECK_THROWS_AS(apply_carve_map(reg, {0, 3}, Detector::D1, c), std::out_of_range);
    CHECK_THROWS_AS(apply_carve_map(reg, {-1, 0}, Detector::D1, c), std::out_of_range);
    CHECK_THROWS_AS(apply_carve_map(reg, {0, 1}, Detector::D2, c, Protocol::standard), std::invalid_argument);
}

TEST_CASE("completeness: outcomes plus loss account for the register norm") {
    std::mt19937_64 rng(23);
    const CavityParams p = make(0.42, 0.4, 0.18, 6);
    const CoeffSet coeffs = coefficient_set(p);
    for (Protocol proto : {Protocol::efficient, Protocol::standard})
        for (int trial = 0; trial < 20; ++trial) {
            QubitRegister reg = random_register(4, rng);
            for (auto &a : reg.amplitudes()) a *= 0.8; // subnormalized input
            double total = 0;
            for (Detector d : detectors_of(proto))
                total += apply_carve_map(reg, {3, 1}, d, coeffs, proto, LocalFrame::chain_default()).norm2();
            QubitRegister lost = reg;
            lost.apply_2q(3, 1, loss_operator(coeffs, proto));
            CHECK(total + lost.norm2() == doctest::Approx(reg.norm2()).epsilon(1e-12));
        }
}

TEST_CASE("locality: spectators are untouched on average") {
    std::mt19937_64 rng(31);
    const CoeffSet coeffs = coefficient_set(make(0.5, 0.3, 0.2, 4));
    const std::vector<int> spectators{0, 2};
    for (int trial = 0; trial < 20; ++trial) {
        const QubitRegister reg = random_register(4, rng);
        const auto before = reg.reduced_density(spectators);
        std::vector<cplx> after(before.size());
        for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
            const auto rho = apply_carve_map(reg, {1, 3}, d, coeffs, Protocol::efficient, LocalFrame::chain_default())
                                 .reduced_density(spectators);
            for (std::size_t i = 0; i < rho.size(); ++i) after[i] += rho[i];
        }
        QubitRegister lost = reg;
        lost.apply_2q(1, 3, loss_operator(coeffs));
        const auto rho = lost.reduced_density(spectators);
        for (std::size_t i = 0; i < rho.size(); ++i) after[i] += rho[i];
        CHECK(max_diff(after, before) < 1e-13);
    }

    // product input: the conditional spectator state itself is unchanged
    const QubitRegister plus3 = QubitRegister::plus_state(3);
    const std::vector<int> q0{0};
    const auto before = plus3.reduced_density(q0);
    for (Detector d : {Detector::D1, Detector::D2, Detector::D3}) {
        const QubitRegister o = apply_carve_map(plus3, {1, 2}, d, coeffs);
        auto rho = o.reduced_density(q0);
        for (auto &x : rho) x /= o.norm2();
        CHECK(max_diff(rho, before) < 1e-14);
    }
}

TEST_CASE("ideal chain is a linear cluster state up to local Paulis") {
    for (Protocol proto : {Protocol::efficient, Protocol::standard})
        for (int n : {2, 3, 5, 7}) {
            const QubitRegister chain = ideal_chain(n, proto);
            CHECK(chain.norm2() == doctest::Approx(1.0).epsilon(1e-14));
            for (int i = 0; i < n; ++i) {
                std::vector<Pauli> k(n, Pauli::I);
                k[i] = Pauli::X;
                if (i > 0) k[i - 1] = Pauli::Z;
                if (i + 1 < n) k[i + 1] = Pauli::Z;
                CHECK(std::abs(pauli_expectation(chain, k)) == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
}

TEST_CASE("ideal parameters grow the chain with certainty") {
    const CavityParams ideal = make(0.5, 0.5, 0.0, 1e12);
    for (int n : {2, 4, 6}) {
        const GraphResult g = grow_chain(n, ideal, Protocol::efficient, GrowthMethod::exact_register);
        CHECK(g.p_total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(g.f_estimate == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("product model") {
    const CarveResult one = carve_efficient(make(0.5, 0.5, 0.0, 50));
    const MetricsReport m = aggregate(one);
    const GraphResult g2 = product_model(2, m, Protocol::efficient);
    CHECK(g2.p_total == m.p_total);
    CHECK(g2.f_estimate == m.f_avg);

    const GraphResult std_ideal = grow_chain(11, make(0.5, 0.0, 0.5, 1e12), Protocol::standard, GrowthMethod::product_model);
    CHECK(std_ideal.p_total == doctest::Approx(std::pow(2.0, -10)).epsilon(1e-9));
    CHECK(std_ideal.p_total == doctest::Approx(9.77e-4).epsilon(1e-3));

    const GraphResult eff = grow_chain(11, make(0.5, 0.5, 0.0, 50), Protocol::efficient, GrowthMethod::product_model);
    CHECK(eff.p_total >= 100 * std::pow(2.0, -10));

    CHECK_THROWS_AS(product_model(1, m, Protocol::efficient), std::invalid_argument);
    CHECK_THROWS_AS(grow_chain(21, make(0.5, 0.5, 0.0, 50), Protocol::efficient, GrowthMethod::exact_register),
                    std::invalid_argument);
    CHECK(parse_growth_method("exact") == GrowthMethod::exact_register);
    CHECK(to_string(GrowthMethod::product_model) == "product-model");
    CHECK_THROWS_AS(parse_growth_method("guess"), std::invalid_argument);
}

TEST_CASE("two-node chains: exact and product coincide") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double k1 = 0.05 + 0.9 * u(rng), k2 = (1 - k1) * u(rng), C = std::exp(6 * u(rng));
        const CavityParams p = make(k1, k2, 1 - k1 - k2, C);
        for (Protocol proto : {Protocol::efficient, Protocol::standard}) {
            const GraphResult e = grow_chain(2, p, proto, GrowthMethod::exact_register);
            const GraphResult q = grow_chain(2, p, proto, GrowthMethod::product_model);
            CHECK(std::abs(e.p_total - q.p_total) < 1e-12);
            CHECK(std::abs(e.f_estimate - q.f_estimate) < 1e-12);
        }
    }
}

TEST_CASE("probability decays with chain length and efficient beats standard") {
    for (const CavityParams &p : {make(0.5, 0.5, 0.0, 20), make(0.49, 0.49, 0.02, 50), make(0.5, 0.48, 0.02, 50)}) {
        for (GrowthMethod method : {GrowthMethod::product_model, GrowthMethod::exact_register}) {
            double last_eff = 2, last_std = 2;
            for (int n = 2; n <= 6; ++n) {
                const GraphResult e = grow_chain(n, p, Protocol::efficient, method);
                const GraphResult s = grow_chain(n, p, Protocol::standard, method);
                CHECK(e.p_total < last_eff);
                CHECK(s.p_total < last_std);
                if (n >= 3) CHECK(e.p_total >= s.p_total);
                CHECK(e.f_estimate >= 0.0);
                CHECK(e.f_estimate <= 1.0);
                last_eff = e.p_total;
                last_std = s.p_total;
            }
        }
    }
}

TEST_CASE("asymmetric cavity chains are at least as faithful as symmetric ones") {
    for (double C : {20.0, 50.0}) {
        const CavityParams asym = make(0.5, 0.48, 0.02, C), sym = make(0.49, 0.49, 0.02, C);
        const auto fa = grow_chain(11, asym, Protocol::efficient, GrowthMethod::product_model).f_estimate;
        const auto fs = grow_chain(11, sym, Protocol::efficient, GrowthMethod::product_model).f_estimate;
        CHECK(fa >= fs);
        const auto ea = grow_chain(6, asym, Protocol::efficient, GrowthMethod::exact_register).f_estimate;
        const auto es = grow_chain(6, sym, Protocol::efficient, GrowthMethod::exact_register).f_estimate;
        CHECK(ea >= es);
    }
}
