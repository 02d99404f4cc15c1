#pragma once

#include <string>

#include "camo/image.hpp"

namespace camo {

// Render text with the built-in 5x7 bitmap font: one pixel of spacing
// between glyphs, one pixel of margin, foreground/background intensities as
// given. Lowercase letters map to uppercase; unsupported characters render
// as blanks. Useful for generating instruction-style payload stencils.
Image render_text(const std::string& text, double foreground = 255.0,
                  double background = 0.0);

}  // namespace camo
