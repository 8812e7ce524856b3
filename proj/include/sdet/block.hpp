#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdet/nn.hpp"
#include "sdet/snn.hpp"

namespace sdet {

// A simulation block: optional direct-encoding LIF front end, then alternating
// transforms (dense/conv) and LIF populations, terminated by an LI readout.
// The same weights can be run as a conventional head (relu between transforms,
// raw affine readout) for the non-spiking comparison model.

enum class BlockMode {
    spiking,  // Heaviside spikes, hard reset
    soft,     // smooth spike function, no reset; gradient-check mode
    ann       // non-spiking twin: relu activations, single pass
};

struct BlockStage {
    bool is_conv = false;
    Dense fc;
    Conv2d conv;
    NeuronParams np;  // params of the population this transform feeds

    int out_c = 0, out_h = 0, out_w = 0;  // filled by SpikingBlock::validate
    std::size_t out_size() const { return static_cast<std::size_t>(out_c) * out_h * out_w; }
};

struct SpikingBlock {
    NeuronParams encoder;      // fixed, untrained
    bool encode_input = true;  // false: features enter as direct currents
    int in_c = 0, in_h = 1, in_w = 1;
    std::vector<BlockStage> stages;  // last stage's population acts as LI readout

    std::size_t in_size() const { return static_cast<std::size_t>(in_c) * in_h * in_w; }
    std::size_t out_size() const { return stages.back().out_size(); }
    // Checks shape compatibility through the stack; throws ConfigError.
    void validate();

    static BlockStage dense_stage(int in, int out, const NeuronParams& np);
    static BlockStage conv_stage(int cin, int cout, int k, int pad, const NeuronParams& np);
};

// Everything the backward pass needs from a forward run.
struct BlockTrace {
    bool recorded = false;
    int t_steps = 0;
    BlockMode mode = BlockMode::spiking;
    std::vector<double> input;                       // raw features
    std::vector<std::vector<double>> enc_u, enc_s;   // per step (spiking/soft only)
    std::vector<std::vector<std::vector<double>>> u; // [stage][step]
    std::vector<std::vector<std::vector<double>>> s; // [stage][step]; readout: unused
    std::vector<double> readout;
};

// Mean spike rate per population across recorded instances (arithmetic mean
// of per-instance rates).
class ActivityRecorder {
public:
    void add(const std::string& key, double spikes, double neuron_steps);
    double rate(const std::string& key) const;  // S_A in [0,1]
    bool has(const std::string& key) const { return acc_.count(key) != 0; }
    const std::map<std::string, std::pair<double, double>>& raw() const { return acc_; }
    void merge(const ActivityRecorder& other);

private:
    std::map<std::string, std::pair<double, double>> acc_;  // key -> (sum of rates, n)
};

// Runs the block for t_steps and returns the readout (LI voltages at the last
// step; for ann mode the plain affine output of the last stage). When `act`
// is given, per-population spike rates are recorded under
// "<key>/enc", "<key>/lif1", ... One call is one instance.
std::vector<double> run_block(const SpikingBlock& blk, const std::vector<double>& features,
                              int t_steps, BlockMode mode, BlockTrace* trace = nullptr,
                              ActivityRecorder* act = nullptr, const std::string& key = "");

// Per-population spike rates of a single recorded run: {("enc", S_A), ("lif1", ...)}.
// Throws StateError if the trace was not recorded.
std::vector<std::pair<std::string, double>> spike_activity(const SpikingBlock& blk,
                                                           const BlockTrace& trace);

// Parameter gradients, one dw/db pair per stage, plus the input gradient.
struct BlockGrads {
    std::vector<std::vector<double>> dw, db;
    std::vector<double> dinput;

    void init(const SpikingBlock& blk);
    void add(const BlockGrads& other);
    void scale(double f);
};

// Reverse-mode pass over a recorded run: BPTT with the SuperSpike surrogate
// for spiking/soft traces, plain backprop for ann traces. The hard reset is
// excluded from the backward graph. Accumulates into `grads`.
void block_backward(const SpikingBlock& blk, const BlockTrace& trace,
                    const std::vector<double>& upstream, BlockGrads& grads,
                    bool want_input_grad = false);

}  // namespace sdet
