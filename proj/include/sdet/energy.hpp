#pragma once

#include <string>
#include <vector>

#include "sdet/common.hpp"

namespace sdet {

// Per-operation energy on a 45nm process, in pJ: multiply-accumulate for
// conventional layers, accumulate-only for spike-driven ones.
inline constexpr double kEnergyMacPj = 4.6;
inline constexpr double kEnergyAcPj = 0.9;

enum class LayerKind { conv, linear };

struct LayerSpec {
    LayerKind kind = LayerKind::linear;
    int O = 0;  // output feature-map side (conv only)
    int k = 0;  // kernel side (conv only)
    int c_in = 0, c_out = 0;

    void validate() const {
        require(c_in >= 1 && c_out >= 1, "LayerSpec: channel counts must be >= 1");
        if (kind == LayerKind::conv)
            require(O >= 1 && k >= 1, "LayerSpec: conv needs O and k");
        else
            require(O == 0 && k == 0, "LayerSpec: O/k are conv-only fields");
    }
};

double flops_ann(const LayerSpec& layer);
double flops_snn(const LayerSpec& layer, int t_steps, double s_a);

// One accounted layer application. Non-spiking rows (the shared backbone)
// cost MACs in both totals; spiking rows cost ACs scaled by T and S_A.
struct EnergyItem {
    std::string name;
    LayerSpec spec;
    bool spiking = false;
    double count = 1.0;          // applications per inference (e.g. RoIs)
    int t_steps = 1;             // spiking only
    double s_a = -1.0;           // spiking only; must be set for spiking rows
};

struct EnergyReport {
    struct Row {
        EnergyItem item;
        double flops_ann = 0.0;  // per application
        double flops_snn = 0.0;  // per application; == flops_ann for shared rows
        double e_ann_pj = 0.0;   // count * flops * energy-per-op
        double e_snn_pj = 0.0;
        double delta_e = 0.0;    // e_snn / e_ann for this row
    };
    double e_mac = kEnergyMacPj;
    double e_ac = kEnergyAcPj;
    std::vector<Row> rows;
    double e_ann_total = 0.0, e_snn_total = 0.0;
    double delta_e = 0.0;  // whole model
    double e_ann_spiking = 0.0, e_snn_spiking = 0.0;
    double delta_e_spiking = 0.0;  // spiking-modules-only

    std::string to_text() const;   // schema-versioned report
    std::string to_table() const;  // one row per layer, tab-separated
};

EnergyReport energy_totals(const std::vector<EnergyItem>& items, double e_mac = kEnergyMacPj,
                           double e_ac = kEnergyAcPj);

EnergyReport energy_report_from_text(const std::string& text);

}  // namespace sdet
