#include "sdet/block.hpp"

#include <algorithm>

namespace sdet {

BlockStage SpikingBlock::dense_stage(int in, int out, const NeuronParams& np) {
    BlockStage st;
    st.is_conv = false;
    st.fc = Dense(in, out);
    st.np = np;
    return st;
}

BlockStage SpikingBlock::conv_stage(int cin, int cout, int k, int pad, const NeuronParams& np) {
    BlockStage st;
    st.is_conv = true;
    st.conv = Conv2d(cin, cout, k, /*stride=*/1, pad);
    st.np = np;
    return st;
}

void SpikingBlock::validate() {
    require_config(!stages.empty(), "block: needs at least one stage");
    require_config(in_c >= 1 && in_h >= 1 && in_w >= 1, "block: bad input shape");
    encoder.validate();
    int c = in_c, h = in_h, w = in_w;
    for (auto& st : stages) {
        st.np.validate();
        if (st.is_conv) {
            require_config(st.conv.cin == c, "block: conv stage channel mismatch");
            const int oh = st.conv.out_side(h);
            const int ow = st.conv.out_side(w);
            require_config(oh >= 1 && ow >= 1, "block: conv stage collapses spatially");
            st.out_c = st.conv.cout;
            st.out_h = oh;
            st.out_w = ow;
        } else {
            require_config(st.fc.in == c * h * w, "block: dense stage input size mismatch");
            st.out_c = st.fc.out;
            st.out_h = 1;
            st.out_w = 1;
        }
        c = st.out_c;
        h = st.out_h;
        w = st.out_w;
    }
}

void ActivityRecorder::add(const std::string& key, double spikes, double neuron_steps) {
    require(neuron_steps > 0.0, "ActivityRecorder: empty instance");
    auto& e = acc_[key];
    e.first += spikes / neuron_steps;
    e.second += 1.0;
}

double ActivityRecorder::rate(const std::string& key) const {
    auto it = acc_.find(key);
    require_state(it != acc_.end(), "ActivityRecorder: no record for " + key);
    return it->second.first / it->second.second;
}

void ActivityRecorder::merge(const ActivityRecorder& other) {
    for (const auto& [k, v] : other.acc_) {
        auto& e = acc_[k];
        e.first += v.first;
        e.second += v.second;
    }
}

namespace {

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// Applies the stage transform to the (spike or activation) tensor below.
Tensor apply_transform(const BlockStage& st, const Tensor& x, bool events) {
    if (st.is_conv) return events ? conv_forward_events(st.conv, x) : conv_forward(st.conv, x);
    Tensor y(st.out_c, 1, 1);
    dense_forward(st.fc, x.v.data(), y.v.data());
    return y;
}

std::vector<double> run_ann(const SpikingBlock& blk, const std::vector<double>& features,
                            BlockTrace* trace) {
    Tensor cur(blk.in_c, blk.in_h, blk.in_w);
    cur.v = features;
    if (trace) {
        trace->recorded = true;
        trace->t_steps = 1;
        trace->mode = BlockMode::ann;
        trace->input = features;
        trace->u.assign(blk.stages.size(), {});
        trace->s.assign(blk.stages.size(), {});
    }
    for (std::size_t l = 0; l < blk.stages.size(); ++l) {
        Tensor z = apply_transform(blk.stages[l], cur, /*events=*/false);
        if (trace) trace->u[l].push_back(z.v);
        if (l + 1 == blk.stages.size()) {
            if (trace) trace->readout = z.v;
            return z.v;
        }
        relu_inplace(z);
        if (trace) trace->s[l].push_back(z.v);
        cur = std::move(z);
    }
    return {};  // unreachable
}

}  // namespace

std::vector<double> run_block(const SpikingBlock& blk, const std::vector<double>& features,
                              int t_steps, BlockMode mode, BlockTrace* trace,
                              ActivityRecorder* act, const std::string& key) {
    require(features.size() == blk.in_size(), "run_block: feature size mismatch");
    for (double f : features) require_finite(f, "run_block features");

    if (mode == BlockMode::ann) return run_ann(blk, features, trace);
    require(t_steps >= 1, "run_block: t_steps must be >= 1");

    const std::size_t n_stages = blk.stages.size();
    const bool soft = mode == BlockMode::soft;

    if (trace) {
        trace->recorded = true;
        trace->t_steps = t_steps;
        trace->mode = mode;
        trace->input = features;
        trace->enc_u.clear();
        trace->enc_s.clear();
        trace->u.assign(n_stages, {});
        trace->s.assign(n_stages, {});
    }

    // encoder state and clamped input currents
    std::vector<double> enc_cur;
    LifState enc_state;
    if (blk.encode_input) {
        enc_cur.resize(blk.in_size());
        for (std::size_t k = 0; k < enc_cur.size(); ++k)
            enc_cur[k] = features[k] > 0.0 ? features[k] : 0.0;
        enc_state = LifState::rest(blk.in_size(), blk.encoder);
    }

    std::vector<LifState> lif(n_stages);  // last entry reused as LI (no threshold applied)
    for (std::size_t l = 0; l < n_stages; ++l)
        lif[l] = LifState::rest(blk.stages[l].out_size(), blk.stages[l].np);

    Tensor spikes_in(blk.in_c, blk.in_h, blk.in_w);
    std::vector<double> enc_u(blk.encode_input ? blk.in_size() : 0);
    double enc_spike_total = 0.0;
    std::vector<double> stage_spike_total(n_stages, 0.0);

    for (int t = 0; t < t_steps; ++t) {
        if (blk.encode_input) {
            if (soft)
                detail::lif_step_soft_raw(enc_state.i.data(), enc_state.v.data(), enc_u.data(),
                                          spikes_in.v.data(), enc_cur.data(), enc_cur.size(),
                                          blk.encoder);
            else
                detail::lif_step_raw(enc_state.i.data(), enc_state.v.data(), enc_u.data(),
                                     spikes_in.v.data(), enc_cur.data(), enc_cur.size(),
                                     blk.encoder);
            if (trace) {
                trace->enc_u.push_back(enc_u);
                trace->enc_s.push_back(spikes_in.v);
            }
            enc_spike_total += sum(spikes_in.v);
        } else {
            spikes_in.v = features;
        }

        const Tensor* below = &spikes_in;
        Tensor z;
        for (std::size_t l = 0; l < n_stages; ++l) {
            const BlockStage& st = blk.stages[l];
            // event-driven path only pays off on actual spike planes
            const bool events = !soft && st.is_conv;
            z = apply_transform(st, *below, events);
            if (l + 1 == n_stages) {
                detail::li_step_raw(lif[l].i.data(), lif[l].v.data(), z.v.data(), z.size(),
                                    st.np);
            } else {
                std::vector<double> u(z.size());
                Tensor s(st.out_c, st.out_h, st.out_w);
                if (soft)
                    detail::lif_step_soft_raw(lif[l].i.data(), lif[l].v.data(), u.data(),
                                              s.v.data(), z.v.data(), z.size(), st.np);
                else
                    detail::lif_step_raw(lif[l].i.data(), lif[l].v.data(), u.data(), s.v.data(),
                                         z.v.data(), z.size(), st.np);
                if (trace) {
                    trace->u[l].push_back(u);
                    trace->s[l].push_back(s.v);
                }
                stage_spike_total[l] += sum(s.v);
                z = std::move(s);
            }
            below = &z;
        }
    }

    if (act && mode == BlockMode::spiking) {
        const double steps = static_cast<double>(t_steps);
        if (blk.encode_input)
            act->add(key + "/enc", enc_spike_total, steps * static_cast<double>(blk.in_size()));
        for (std::size_t l = 0; l + 1 < n_stages; ++l)
            act->add(key + "/lif" + std::to_string(l + 1), stage_spike_total[l],
                     steps * static_cast<double>(blk.stages[l].out_size()));
    }

    if (trace) trace->readout = lif.back().v;
    return lif.back().v;
}

std::vector<std::pair<std::string, double>> spike_activity(const SpikingBlock& blk,
                                                           const BlockTrace& trace) {
    require_state(trace.recorded, "spike_activity: run was not recorded");
    require_state(trace.mode == BlockMode::spiking, "spike_activity: needs a spiking run");

    std::vector<std::pair<std::string, double>> out;
    const double steps = static_cast<double>(trace.t_steps);
    if (blk.encode_input) {
        double total = 0.0;
        for (const auto& s : trace.enc_s) total += sum(s);
        out.emplace_back("enc", total / (steps * static_cast<double>(blk.in_size())));
    }
    for (std::size_t l = 0; l + 1 < blk.stages.size(); ++l) {
        double total = 0.0;
        for (const auto& s : trace.s[l]) total += sum(s);
        out.emplace_back("lif" + std::to_string(l + 1),
                         total / (steps * static_cast<double>(blk.stages[l].out_size())));
    }
    return out;
}

void BlockGrads::init(const SpikingBlock& blk) {
    dw.clear();
    db.clear();
    for (const auto& st : blk.stages) {
        if (st.is_conv) {
            dw.emplace_back(st.conv.w.size(), 0.0);
            db.emplace_back(st.conv.b.size(), 0.0);
        } else {
            dw.emplace_back(st.fc.w.size(), 0.0);
            db.emplace_back(st.fc.b.size(), 0.0);
        }
    }
    dinput.assign(blk.in_size(), 0.0);
}

void BlockGrads::add(const BlockGrads& other) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        for (std::size_t j = 0; j < dw[l].size(); ++j) dw[l][j] += other.dw[l][j];
        for (std::size_t j = 0; j < db[l].size(); ++j) db[l][j] += other.db[l][j];
    }
    for (std::size_t j = 0; j < dinput.size(); ++j) dinput[j] += other.dinput[j];
}

void BlockGrads::scale(double f) {
    for (auto& v : dw)
        for (auto& x : v) x *= f;
    for (auto& v : db)
        for (auto& x : v) x *= f;
    for (auto& x : dinput) x *= f;
}

}  // namespace sdet
