#pragma once

#include <cstdint>

#include "glitchkit/image.hpp"

namespace glitchkit::scenegen {

/// Renders one clean synthetic gameplay-style frame. `source` selects a
/// stable visual identity (palette, texture frequencies, layout habits);
/// `frame` varies the content within that identity. Deterministic.
Image render_frame(int source, int frame, int width, int height, std::uint64_t seed);

}  // namespace glitchkit::scenegen
