#include <doctest.h>

#include "oracles.hpp"
#include "sdet/rng.hpp"
#include "sdet/snn.hpp"

using namespace sdet;

namespace {
const NeuronParams kDefaults{};  // tau_syn 2, tau_mem 4, v_th 1, v_leak 0, v_reset 0
}

TEST_SUITE("snn") {

TEST_CASE("rest equilibrium: zero input leaves state unchanged") {
    NeuronParams p = kDefaults;
    p.v_leak = 0.25;
    p.v_reset = 0.1;
    LifState s = LifState::rest(4, p);
    for (int t = 0; t < 50; ++t) {
        auto spikes = lif_step(s, std::vector<double>(4, 0.0), p);
        for (double z : spikes) CHECK(z == 0.0);
        for (double v : s.v) CHECK(v == p.v_leak);
        for (double i : s.i) CHECK(i == 0.0);
    }
}

TEST_CASE("first spike time matches the scalar reference") {
    // scalar oracle for c=0.3 under default params: spikes at steps 2,4,6,...
    auto ref = oracle::lif_spike_times(0.3, 50, kDefaults);
    REQUIRE(ref.size() >= 3);
    CHECK(ref[0] == 2);
    CHECK(ref[1] == 4);

    LifState s = LifState::rest(1, kDefaults);
    std::vector<int> got;
    for (int t = 0; t < 50; ++t) {
        auto spikes = lif_step(s, {0.3}, kDefaults);
        if (spikes[0] != 0.0) got.push_back(t);
    }
    CHECK(got == ref);
}

TEST_CASE("sub-rheobase input never spikes; voltage settles at the fixed point") {
    // fixed point of the discrete update: v* = tau_mem * tau_syn * c = 0.8 < v_th
    const double c = 0.1;
    LifState s = LifState::rest(1, kDefaults);
    for (int t = 0; t < 1000; ++t) {
        auto spikes = lif_step(s, {c}, kDefaults);
        CHECK(spikes[0] == 0.0);
    }
    CHECK(s.v[0] == doctest::Approx(0.8).epsilon(1e-12));
    auto ref = oracle::lif_spike_times(c, 1000, kDefaults);
    CHECK(ref.empty());
}

TEST_CASE("spikes are binary and reset is exact") {
    Rng rng(11);
    NeuronParams p = kDefaults;
    p.v_reset = 0.05;
    p.v_leak = 0.1;
    LifState s = LifState::rest(8, p);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> x(8);
        for (auto& v : x) v = rng.uniform(0.0, 0.6);
        auto spikes = lif_step(s, x, p);
        for (std::size_t n = 0; n < 8; ++n) {
            CHECK((spikes[n] == 0.0 || spikes[n] == 1.0));
            if (spikes[n] == 1.0) CHECK(s.v[n] == p.v_reset);
        }
    }
}

TEST_CASE("lif_step rejects bad input") {
    LifState s = LifState::rest(3, kDefaults);
    CHECK_THROWS_AS(lif_step(s, {0.0, 0.0}, kDefaults), ContractError);
    CHECK_THROWS_AS(lif_step(s, {0.0, 0.0, std::nan("")}, kDefaults), NumericError);
    NeuronParams bad = kDefaults;
    bad.tau_mem = 0.0;
    CHECK_THROWS_AS(lif_step(s, {0.0, 0.0, 0.0}, bad), ContractError);
}

TEST_CASE("li: zero input from rest stays at zero") {
    LiState s = LiState::rest(3, kDefaults);
    for (int t = 0; t < 64; ++t) {
        li_step(s, {0.0, 0.0, 0.0}, kDefaults);
        for (double v : s.v) CHECK(v == 0.0);
    }
}

TEST_CASE("li linearity with v_leak = 0") {
    Rng rng(5);
    const int T = 24;
    std::vector<double> xs(T), ys(T), zs(T);
    for (int t = 0; t < T; ++t) {
        xs[t] = rng.normal();
        ys[t] = rng.normal();
    }
    const double a = 1.7, b = -0.4;
    for (int t = 0; t < T; ++t) zs[t] = a * xs[t] + b * ys[t];

    auto run = [&](const std::vector<double>& seq) {
        LiState s = LiState::rest(1, kDefaults);
        for (int t = 0; t < T; ++t) li_step(s, {seq[t]}, kDefaults);
        return s.v[0];
    };
    CHECK(std::abs(run(zs) - (a * run(xs) + b * run(ys))) <= 1e-9);
}

TEST_CASE("li impulse response matches the scalar reference") {
    LiState s = LiState::rest(1, kDefaults);
    li_step(s, {1.0}, kDefaults);
    for (int t = 1; t < 8; ++t) li_step(s, {0.0}, kDefaults);
    // frozen from the scalar simulation
    CHECK(s.v[0] == doctest::Approx(0.38482666015625).epsilon(1e-12));
    CHECK(s.v[0] == doctest::Approx(oracle::li_final_voltage({1.0}, 8, kDefaults)).epsilon(1e-12));
}

TEST_CASE("li never spikes above threshold") {
    LiState s = LiState::rest(1, kDefaults);
    for (int t = 0; t < 32; ++t) li_step(s, {2.0}, kDefaults);
    CHECK(s.v[0] > kDefaults.v_th);  // voltage is unconstrained
}

TEST_CASE("encode_direct: all-zero features give an all-zero train") {
    auto train = encode_direct(std::vector<double>(5, 0.0), kDefaults, 12);
    CHECK(train.t_steps == 12);
    CHECK(train.width == 5);
    for (double e : train.events) CHECK(e == 0.0);
}

TEST_CASE("encode_direct: negative features inject no current") {
    auto train = encode_direct({-3.0, -0.1}, kDefaults, 16);
    for (double e : train.events) CHECK(e == 0.0);
}

TEST_CASE("encode_direct: value 0.15 spikes exactly at steps 7 and 14 over T=16") {
    // frozen from the scalar simulation
    auto train = encode_direct({0.15}, kDefaults, 16);
    CHECK(train.count(0) == 2);
    CHECK(train.at(7, 0) == 1.0);
    CHECK(train.at(14, 0) == 1.0);
    auto ref = oracle::lif_spike_times(0.15, 16, kDefaults);
    REQUIRE(ref.size() == 2);
    CHECK(ref[0] == 7);
    CHECK(ref[1] == 14);
}

TEST_CASE("encode_direct: spike count is nondecreasing in the input value") {
    int prev_vec = 0, prev_ref = 0;
    for (int step = 0; step <= 60; ++step) {
        const double c = 0.025 * step;
        auto train = encode_direct({c}, kDefaults, 32);
        const int n_vec = train.count(0);
        const int n_ref = static_cast<int>(oracle::lif_spike_times(c, 32, kDefaults).size());
        CHECK(n_vec == n_ref);
        CHECK(n_vec >= prev_vec);
        CHECK(n_ref >= prev_ref);
        prev_vec = n_vec;
        prev_ref = n_ref;
    }
}

TEST_CASE("encode_direct rejects non-finite features") {
    CHECK_THROWS_AS(encode_direct({std::nan("")}, kDefaults, 4), NumericError);
    CHECK_THROWS_AS(encode_direct({1.0}, kDefaults, 0), ContractError);
}

}  // TEST_SUITE
