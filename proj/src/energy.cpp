#include "sdet/energy.hpp"

#include <cmath>
#include <sstream>

namespace sdet {

double flops_ann(const LayerSpec& layer) {
    layer.validate();
    if (layer.kind == LayerKind::conv) {
        return static_cast<double>(layer.O) * layer.O * layer.c_in * layer.k * layer.k *
               layer.c_out;
    }
    return static_cast<double>(layer.c_in) * layer.c_out;
}

double flops_snn(const LayerSpec& layer, int t_steps, double s_a) {
    require(t_steps >= 1, "flops_snn: t_steps must be >= 1");
    require(s_a >= 0.0, "flops_snn: spike activity must be >= 0");
    return flops_ann(layer) * static_cast<double>(t_steps) * s_a;
}

EnergyReport energy_totals(const std::vector<EnergyItem>& items, double e_mac, double e_ac) {
    EnergyReport rep;
    rep.e_mac = e_mac;
    rep.e_ac = e_ac;
    for (const auto& it : items) {
        EnergyReport::Row row;
        row.item = it;
        row.flops_ann = flops_ann(it.spec);
        if (it.spiking) {
            require_state(it.s_a >= 0.0 && std::isfinite(it.s_a),
                          "energy_totals: missing spike activity for " + it.name);
            row.flops_snn = flops_snn(it.spec, it.t_steps, it.s_a);
            row.e_snn_pj = it.count * row.flops_snn * e_ac;
        } else {
            row.flops_snn = row.flops_ann;
            row.e_snn_pj = it.count * row.flops_ann * e_mac;
        }
        row.e_ann_pj = it.count * row.flops_ann * e_mac;
        row.delta_e = row.e_ann_pj > 0.0 ? row.e_snn_pj / row.e_ann_pj : 0.0;
        rep.rows.push_back(row);

        rep.e_ann_total += row.e_ann_pj;
        rep.e_snn_total += row.e_snn_pj;
        if (it.spiking) {
            rep.e_ann_spiking += row.e_ann_pj;
            rep.e_snn_spiking += row.e_snn_pj;
        }
    }
    rep.delta_e = rep.e_ann_total > 0.0 ? rep.e_snn_total / rep.e_ann_total : 0.0;
    rep.delta_e_spiking =
        rep.e_ann_spiking > 0.0 ? rep.e_snn_spiking / rep.e_ann_spiking : 0.0;
    return rep;
}

namespace {

const char* kind_name(LayerKind k) { return k == LayerKind::conv ? "conv" : "linear"; }

void put(std::ostringstream& os, double v) {
    os.precision(17);
    os << v;
}

}  // namespace

std::string EnergyReport::to_text() const {
    std::ostringstream os;
    os << "sdet-energy v1\n";
    os << "e_mac_pj = ";
    put(os, e_mac);
    os << "\ne_ac_pj = ";
    put(os, e_ac);
    os << "\nlayers = " << rows.size() << "\n";
    for (const auto& r : rows) {
        os << "layer " << r.item.name << " kind=" << kind_name(r.item.spec.kind)
           << " O=" << r.item.spec.O << " k=" << r.item.spec.k << " cin=" << r.item.spec.c_in
           << " cout=" << r.item.spec.c_out << " spiking=" << (r.item.spiking ? 1 : 0)
           << " count=";
        put(os, r.item.count);
        os << " T=" << r.item.t_steps << " s_a=";
        put(os, r.item.spiking ? r.item.s_a : 0.0);
        os << " flops_ann=";
        put(os, r.flops_ann);
        os << " flops_snn=";
        put(os, r.flops_snn);
        os << " e_ann_pj=";
        put(os, r.e_ann_pj);
        os << " e_snn_pj=";
        put(os, r.e_snn_pj);
        os << " delta_e=";
        put(os, r.delta_e);
        os << "\n";
    }
    os << "e_ann_total_pj = ";
    put(os, e_ann_total);
    os << "\ne_snn_total_pj = ";
    put(os, e_snn_total);
    os << "\ndelta_e = ";
    put(os, delta_e);
    os << "\ne_ann_spiking_pj = ";
    put(os, e_ann_spiking);
    os << "\ne_snn_spiking_pj = ";
    put(os, e_snn_spiking);
    os << "\ndelta_e_spiking = ";
    put(os, delta_e_spiking);
    os << "\n";
    return os.str();
}

std::string EnergyReport::to_table() const {
    std::ostringstream os;
    os << "# sdet-energy-table v1\n";
    os << "name\tkind\tO\tk\tcin\tcout\tspiking\tcount\tT\ts_a\tflops_ann\tflops_snn\t"
          "e_ann_pj\te_snn_pj\tdelta_e\n";
    os.precision(17);
    for (const auto& r : rows) {
        os << r.item.name << '\t' << kind_name(r.item.spec.kind) << '\t' << r.item.spec.O
           << '\t' << r.item.spec.k << '\t' << r.item.spec.c_in << '\t' << r.item.spec.c_out
           << '\t' << (r.item.spiking ? 1 : 0) << '\t' << r.item.count << '\t'
           << r.item.t_steps << '\t' << (r.item.spiking ? r.item.s_a : 0.0) << '\t'
           << r.flops_ann << '\t' << r.flops_snn << '\t' << r.e_ann_pj << '\t' << r.e_snn_pj
           << '\t' << r.delta_e << '\n';
    }
    return os.str();
}

EnergyReport energy_report_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    require(line == "sdet-energy v1", "energy report: unknown format header");

    double e_mac = kEnergyMacPj, e_ac = kEnergyAcPj;
    std::vector<EnergyItem> items;
    auto parse_kv = [](const std::string& l) {
        const auto eq = l.find('=');
        require(eq != std::string::npos, "energy report: bad line: " + l);
        return std::stod(l.substr(eq + 1));
    };
    while (std::getline(is, line)) {
        if (line.rfind("e_mac_pj", 0) == 0) {
            e_mac = parse_kv(line);
        } else if (line.rfind("e_ac_pj", 0) == 0) {
            e_ac = parse_kv(line);
        } else if (line.rfind("layer ", 0) == 0) {
            std::istringstream ls(line.substr(6));
            EnergyItem it;
            std::string tok;
            ls >> it.name;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                require(eq != std::string::npos, "energy report: bad token: " + tok);
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "kind")
                    it.spec.kind = val == "conv" ? LayerKind::conv : LayerKind::linear;
                else if (key == "O")
                    it.spec.O = std::stoi(val);
                else if (key == "k")
                    it.spec.k = std::stoi(val);
                else if (key == "cin")
                    it.spec.c_in = std::stoi(val);
                else if (key == "cout")
                    it.spec.c_out = std::stoi(val);
                else if (key == "spiking")
                    it.spiking = val == "1";
                else if (key == "count")
                    it.count = std::stod(val);
                else if (key == "T")
                    it.t_steps = std::stoi(val);
                else if (key == "s_a")
                    it.s_a = std::stod(val);
            }
            if (!it.spiking) it.s_a = -1.0;
            items.push_back(std::move(it));
        }
    }
    return energy_totals(items, e_mac, e_ac);
}

}  // namespace sdet
