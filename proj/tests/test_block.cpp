#include <doctest.h>

#include "oracles.hpp"
#include "sdet/block.hpp"
#include "sdet/rng.hpp"

using namespace sdet;

namespace {

// Independent straight-line simulator: plain per-neuron loops, spec-literal
// updates, naive transforms. Used as the second implementation that run_block
// must match bit-for-bit in spike times.
struct RefResult {
    std::vector<std::vector<double>> enc_spikes;               // [t][n]
    std::vector<std::vector<std::vector<double>>> lif_spikes;  // [stage][t][n]
    std::vector<double> readout;
};

RefResult block_ref(const SpikingBlock& blk, const std::vector<double>& features, int T) {
    RefResult out;
    const std::size_t S = blk.stages.size();
    out.lif_spikes.resize(S - 1);

    std::vector<double> enc_i(blk.in_size(), 0.0), enc_v(blk.in_size(), blk.encoder.v_leak);
    std::vector<std::vector<double>> li(S), lv(S);
    for (std::size_t l = 0; l < S; ++l) {
        li[l].assign(blk.stages[l].out_size(), 0.0);
        lv[l].assign(blk.stages[l].out_size(), blk.stages[l].np.v_leak);
    }

    auto transform = [&](const BlockStage& st, const std::vector<double>& x, int in_c, int in_h,
                         int in_w) {
        if (!st.is_conv) {
            std::vector<double> y(st.fc.out);
            for (int o = 0; o < st.fc.out; ++o) {
                double acc = st.fc.b[o];
                for (int i = 0; i < st.fc.in; ++i)
                    acc += st.fc.w[static_cast<std::size_t>(i) * st.fc.out + o] * x[i];
                y[o] = acc;
            }
            return y;
        }
        Tensor t(in_c, in_h, in_w);
        t.v = x;
        return oracle::conv_naive(st.conv, t).v;
    };

    for (int t = 0; t < T; ++t) {
        std::vector<double> cur;
        if (blk.encode_input) {
            cur.assign(blk.in_size(), 0.0);
            for (std::size_t n = 0; n < blk.in_size(); ++n) {
                const double x = features[n] > 0.0 ? features[n] : 0.0;
                enc_i[n] = enc_i[n] + (1.0 / blk.encoder.tau_syn) * (-enc_i[n]) + x;
                double vp = enc_v[n] + (1.0 / blk.encoder.tau_mem) * (blk.encoder.v_leak - enc_v[n]) +
                            enc_i[n];
                if (vp >= blk.encoder.v_th) {
                    enc_v[n] = blk.encoder.v_reset;
                    cur[n] = 1.0;
                } else {
                    enc_v[n] = vp;
                }
            }
            out.enc_spikes.push_back(cur);
        } else {
            cur = features;
        }

        int in_c = blk.in_c, in_h = blk.in_h, in_w = blk.in_w;
        for (std::size_t l = 0; l < S; ++l) {
            const BlockStage& st = blk.stages[l];
            std::vector<double> z = transform(st, cur, in_c, in_h, in_w);
            const NeuronParams& p = st.np;
            if (l + 1 == S) {  // LI readout
                for (std::size_t n = 0; n < z.size(); ++n) {
                    li[l][n] = li[l][n] + (1.0 / p.tau_syn) * (-li[l][n]) + z[n];
                    lv[l][n] = lv[l][n] + (1.0 / p.tau_mem) * (p.v_leak - lv[l][n]) + li[l][n];
                }
            } else {
                std::vector<double> spikes(z.size(), 0.0);
                for (std::size_t n = 0; n < z.size(); ++n) {
                    li[l][n] = li[l][n] + (1.0 / p.tau_syn) * (-li[l][n]) + z[n];
                    double vp = lv[l][n] + (1.0 / p.tau_mem) * (p.v_leak - lv[l][n]) + li[l][n];
                    if (vp >= p.v_th) {
                        lv[l][n] = p.v_reset;
                        spikes[n] = 1.0;
                    } else {
                        lv[l][n] = vp;
                    }
                }
                out.lif_spikes[l].push_back(spikes);
                cur = spikes;
            }
            in_c = st.out_c;
            in_h = st.out_h;
            in_w = st.out_w;
        }
    }
    out.readout = lv[S - 1];
    return out;
}

SpikingBlock random_dense_block(Rng& rng, int* total_neurons) {
    SpikingBlock blk;
    blk.in_c = rng.range(2, 4);
    const int n_hidden = rng.range(1, 2);
    int cur = blk.in_c;
    *total_neurons = blk.in_c;
    for (int l = 0; l < n_hidden; ++l) {
        const int width = rng.range(2, 5);
        NeuronParams np;
        np.tau_syn = rng.uniform(1.5, 4.0);
        np.tau_mem = rng.uniform(2.0, 8.0);
        auto st = SpikingBlock::dense_stage(cur, width, np);
        const double g = 2.5 / std::sqrt(static_cast<double>(cur));
        for (auto& w : st.fc.w) w = rng.normal(0.0, g);
        for (auto& b : st.fc.b) b = rng.normal(0.0, 0.1);
        blk.stages.push_back(std::move(st));
        cur = width;
        *total_neurons += width;
    }
    const int readout = rng.range(1, 3);
    auto st = SpikingBlock::dense_stage(cur, readout, NeuronParams{});
    for (auto& w : st.fc.w) w = rng.normal(0.0, 1.0);
    blk.stages.push_back(std::move(st));
    *total_neurons += readout;
    blk.validate();
    return blk;
}

}  // namespace

TEST_SUITE("block") {

TEST_CASE("all-zero input with zero leak and bias gives zero output") {
    SpikingBlock blk;
    blk.in_c = 3;
    blk.stages.push_back(SpikingBlock::dense_stage(3, 4, NeuronParams{}));
    blk.stages.push_back(SpikingBlock::dense_stage(4, 2, NeuronParams{}));
    Rng rng(2);
    for (auto& w : blk.stages[0].fc.w) w = rng.normal();
    for (auto& w : blk.stages[1].fc.w) w = rng.normal();
    blk.validate();
    auto y = run_block(blk, {0.0, 0.0, 0.0}, 12, BlockMode::spiking);
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("T=1 with unreachable thresholds yields exactly zero readout") {
    SpikingBlock blk;
    blk.in_c = 4;
    NeuronParams high;
    high.v_th = 100.0;
    blk.stages.push_back(SpikingBlock::dense_stage(4, 3, high));
    blk.stages.push_back(SpikingBlock::dense_stage(3, 2, NeuronParams{}));
    Rng rng(7);
    for (auto& w : blk.stages[0].fc.w) w = rng.normal();
    for (auto& w : blk.stages[1].fc.w) w = rng.normal();
    blk.validate();
    auto y = run_block(blk, {5.0, 5.0, 5.0, 5.0}, 1, BlockMode::spiking);
    for (double v : y) CHECK(v == 0.0);
}

TEST_CASE("run_block matches the straight-line reference on 100 random nets") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        int total = 0;
        SpikingBlock blk = random_dense_block(rng, &total);
        REQUIRE(total <= 16);
        const int T = rng.range(1, 32);
        std::vector<double> feat(blk.in_size());
        for (auto& f : feat) f = rng.uniform(-0.2, 1.6);

        BlockTrace trace;
        auto y = run_block(blk, feat, T, BlockMode::spiking, &trace);
        RefResult ref = block_ref(blk, feat, T);

        // spike trains bit-for-bit
        for (int t = 0; t < T; ++t) {
            CHECK(trace.enc_s[t] == ref.enc_spikes[t]);
            for (std::size_t l = 0; l + 1 < blk.stages.size(); ++l)
                CHECK(trace.s[l][t] == ref.lif_spikes[l][t]);
        }
        // readout voltages to 1e-9
        REQUIRE(y.size() == ref.readout.size());
        for (std::size_t k = 0; k < y.size(); ++k)
            CHECK(std::abs(y[k] - ref.readout[k]) <= 1e-9);
    }
}

TEST_CASE("run_block matches the reference on small conv blocks") {
    Rng rng(321);
    for (int trial = 0; trial < 10; ++trial) {
        SpikingBlock blk;
        blk.in_c = 2;
        blk.in_h = 3;
        blk.in_w = 3;
        auto st1 = SpikingBlock::conv_stage(2, 2, 3, 1, NeuronParams{});
        for (auto& w : st1.conv.w) w = rng.normal(0.0, 0.9);
        blk.stages.push_back(std::move(st1));
        auto st2 = SpikingBlock::dense_stage(2 * 3 * 3, 2, NeuronParams{});
        for (auto& w : st2.fc.w) w = rng.normal();
        blk.stages.push_back(std::move(st2));
        blk.validate();

        std::vector<double> feat(blk.in_size());
        for (auto& f : feat) f = rng.uniform(0.0, 1.4);
        const int T = 16;
        BlockTrace trace;
        auto y = run_block(blk, feat, T, BlockMode::spiking, &trace);
        RefResult ref = block_ref(blk, feat, T);
        for (int t = 0; t < T; ++t) CHECK(trace.s[0][t] == ref.lif_spikes[0][t]);
        for (std::size_t k = 0; k < y.size(); ++k)
            CHECK(std::abs(y[k] - ref.readout[k]) <= 1e-9);
    }
}

TEST_CASE("spike activity: boundary values and a direct count") {
    SpikingBlock blk;
    blk.in_c = 3;
    blk.stages.push_back(SpikingBlock::dense_stage(3, 3, NeuronParams{}));
    blk.stages.push_back(SpikingBlock::dense_stage(3, 1, NeuronParams{}));
    blk.validate();

    BlockTrace trace;
    trace.recorded = true;
    trace.mode = BlockMode::spiking;
    trace.t_steps = 4;
    trace.enc_s.assign(4, std::vector<double>(3, 0.0));
    trace.enc_u = trace.enc_s;
    trace.s.assign(2, {});
    trace.u.assign(2, {});
    // 6 spikes over 3 neurons x 4 steps -> S_A = 0.5
    trace.s[0] = {{1, 0, 0}, {0, 1, 1}, {1, 0, 1}, {0, 1, 0}};

    auto rates = spike_activity(blk, trace);
    REQUIRE(rates.size() == 2);
    CHECK(rates[0].first == "enc");
    CHECK(rates[0].second == 0.0);
    CHECK(rates[1].first == "lif1");
    CHECK(rates[1].second == doctest::Approx(0.5).epsilon(1e-12));

    // every neuron spiking every step -> 1
    trace.s[0].assign(4, std::vector<double>(3, 1.0));
    CHECK(spike_activity(blk, trace)[1].second == 1.0);

    BlockTrace empty;
    CHECK_THROWS_AS(spike_activity(blk, empty), StateError);
}

TEST_CASE("activity recorder averages per-instance rates") {
    ActivityRecorder rec;
    rec.add("b/lif1", 6.0, 12.0);  // rate 0.5
    rec.add("b/lif1", 0.0, 12.0);  // rate 0.0
    CHECK(rec.rate("b/lif1") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(rec.rate("missing"), StateError);
}

TEST_CASE("incompatible stage shapes are a configuration error") {
    SpikingBlock blk;
    blk.in_c = 3;
    blk.stages.push_back(SpikingBlock::dense_stage(4, 2, NeuronParams{}));  // wrong input
    CHECK_THROWS_AS(blk.validate(), ConfigError);
}

TEST_CASE("block determinism: same input, same result") {
    Rng rng(55);
    int total = 0;
    SpikingBlock blk = random_dense_block(rng, &total);
    std::vector<double> feat(blk.in_size(), 0.7);
    auto a = run_block(blk, feat, 20, BlockMode::spiking);
    auto b = run_block(blk, feat, 20, BlockMode::spiking);
    CHECK(a == b);
}

}  // TEST_SUITE
