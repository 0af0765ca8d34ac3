#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "json.hpp"

#include "glitchkit/image.hpp"
#include "glitchkit/rng.hpp"

namespace glitchkit {

/// The ten corruption classes, with dotted lines split into its two
/// generation modes (random placement vs rays from a common origin).
enum class ArtifactKind {
    Shader,
    Shapes,
    Discoloration,
    MorseCode,
    DottedLinesRandom,
    DottedLinesRadial,
    ParallelLines,
    Triangulation,
    LinePixelation,
    Stuttering,
    Tearing,
};

inline constexpr ArtifactKind kAllArtifactKinds[] = {
    ArtifactKind::Shader,        ArtifactKind::Shapes,
    ArtifactKind::Discoloration, ArtifactKind::MorseCode,
    ArtifactKind::DottedLinesRandom, ArtifactKind::DottedLinesRadial,
    ArtifactKind::ParallelLines, ArtifactKind::Triangulation,
    ArtifactKind::LinePixelation, ArtifactKind::Stuttering,
    ArtifactKind::Tearing,
};

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(const std::string& name);

/// Full provenance of one corruption: the kind, the seed that drives the
/// generator, and every sampled parameter. (input image, seed) fully
/// determine the output, so replaying a spec reproduces it byte-for-byte.
struct GlitchSpec {
    ArtifactKind kind = ArtifactKind::Shader;
    std::uint64_t seed = 0;
    nlohmann::json params;

    nlohmann::json to_json() const;
    static GlitchSpec from_json(const nlohmann::json& j);
};

using GlitchResult = std::pair<Image, GlitchSpec>;

// Each generator consumes one 64-bit draw from the caller's stream as its
// seed; everything else derives from that seed.
GlitchResult glitch_shader(const Image& img, Rng& rng);
GlitchResult glitch_shapes(const Image& img, Rng& rng);
GlitchResult glitch_discoloration(const Image& img, Rng& rng);
GlitchResult glitch_morse(const Image& img, Rng& rng);
GlitchResult glitch_dotted_random(const Image& img, Rng& rng);
GlitchResult glitch_dotted_radial(const Image& img, Rng& rng);
GlitchResult glitch_parallel_lines(const Image& img, Rng& rng);
GlitchResult glitch_triangulation(const Image& img, Rng& rng);
GlitchResult glitch_line_pixelation(const Image& img, Rng& rng);
GlitchResult glitch_stuttering(const Image& img, Rng& rng);

/// Screen tearing blends spans of frame_b into frame_a. Frames must share
/// dimensions.
GlitchResult glitch_tearing(const Image& frame_a, const Image& frame_b, Rng& rng);

/// Uniform dispatch. aux is only consulted for Tearing; when absent there,
/// a stand-in second frame is synthesized (seeded brightness shift plus a
/// small translation) and flagged in the spec, unless allow_fallback is
/// false, in which case the call fails.
GlitchResult apply(ArtifactKind kind, const Image& img, const Image* aux, Rng& rng,
                   bool allow_fallback = true);

/// Re-runs the generator recorded in spec. Byte-identical to the original
/// output for the same input frame(s).
Image replay(const GlitchSpec& spec, const Image& img, const Image* aux = nullptr);

}  // namespace glitchkit
