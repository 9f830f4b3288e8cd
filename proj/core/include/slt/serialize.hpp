#pragma once

#include <string>

#include "slt/backprop.hpp"
#include "slt/edge_popup.hpp"
#include "slt/ga.hpp"
#include "slt/landscape.hpp"
#include "slt/network.hpp"

namespace slt {

// JSON codecs. Layouts are stable: object keys keep the order written here
// and doubles are printed with up to 17 significant digits, so re-serializing
// the same value is byte-identical. Parsers throw FormatError on malformed
// documents and ConfigError on out-of-range values.

std::string param_vector_to_json(const ParamVector& p);
ParamVector param_vector_from_json(const std::string& text);

// {"bits": "<hex, little-endian bit order within bytes>", "len": n}
std::string bitmask_to_json(const BitMask& m);
BitMask bitmask_from_json(const std::string& text);

std::string bits_to_hex(const BitMask& m);
BitMask bits_from_hex(const std::string& hex, int len);

std::string ga_config_to_json(const ga::GaConfig& cfg);
ga::GaConfig ga_config_from_json(const std::string& text);

std::string backprop_config_to_json(const BackpropConfig& cfg);
BackpropConfig backprop_config_from_json(const std::string& text);

std::string edge_popup_config_to_json(const EdgePopupConfig& cfg);
EdgePopupConfig edge_popup_config_from_json(const std::string& text);

// "generation,best_perf,best_sparsity,pop_max_sparsity,ever_best_sparsity"
std::string history_to_csv(const std::vector<ga::GenerationRecord>& history);

// "epoch,train_loss,learning_rate"
std::string epochs_to_csv(const std::vector<EpochRecord>& epochs);
// "epoch,train_loss,learning_rate,retained_l0,retained_l1,..."
std::string epochs_to_csv(const std::vector<EpEpochRecord>& epochs);

// Long-form CSV "delta,eta,value", rows in delta-major order.
std::string landscape_to_csv(const LandscapeGrid& grid);
// Header document: metric, range, resolution, seeds.
std::string landscape_header_to_json(const LandscapeGrid& grid);

std::string eigen_probe_to_json(const EigenProbe& probe);

}  // namespace slt
