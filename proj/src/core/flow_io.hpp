#pragma once

#include <string>

#include "flow.hpp"

namespace uwvo {

// Middlebury .flo: 4-byte magic "PIEH", 32-bit LE width and height, then
// row-major interleaved (u, v) 32-bit LE floats.
FlowField load_flo(const std::string& path);
void save_flo(const FlowField& flow, const std::string& path);

// Middlebury color-wheel visualization. max_magnitude <= 0 normalizes by the
// field's own maximum; pass a fixed value to compare fields on one scale.
Image colorize_flow(const FlowField& flow, double max_magnitude = 0.0);

}  // namespace uwvo
