#pragma once

// Success-rate curves as a standalone SVG 1.1 document: one polyline
// per K over the grid's M values, labeled axes, legend. Byte-identical
// output for identical input.

#include <string>

#include "omplab/experiments.hpp"

namespace omplab {

std::string render_svg_curves(const GridResult& result);

void emit_svg_curves(const GridResult& result, const std::string& path);

}  // namespace omplab
