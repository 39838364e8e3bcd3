#pragma once

#include <string>

#include "hmk/domain.hpp"

namespace hmk {

// {"n":int,"delta":float|null,"segments":[{"j","t0","t1","samples":[[t,x0,..],..]}]}
std::string arc_to_json(const HybridArc& arc);
HybridArc arc_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

HybridArc load_arc(const std::string& path);
void save_arc(const std::string& path, const HybridArc& arc);

std::string arc_to_csv(const HybridArc& arc);

}  // namespace hmk
