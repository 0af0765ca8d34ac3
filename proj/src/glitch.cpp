#include "glitchkit/glitch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace glitchkit {

namespace {

constexpr double kPi = std::numbers::pi;

int iround(double v) { return static_cast<int>(std::lround(v)); }

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

// Offsets a channel by +/-mag, reflecting at the range ends so the result
// always lands in [0,255] and always differs from the input.
std::uint8_t reflect_offset(std::uint8_t c, int mag, bool positive) {
    int v = positive ? c + mag : c - mag;
    if (v > 255 || v < 0) v = positive ? c - mag : c + mag;
    return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

Rgb sample_color(Rng& rng) {
    return Rgb{static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255)),
               static_cast<std::uint8_t>(rng.uniform_int(0, 255))};
}

// Guarantees the artifact color differs from a reference pixel so the
// corruption is never a no-op.
Rgb ensure_differs(Rgb color, const Rgb& reference) {
    if (color == reference) color.r ^= 0x80;
    return color;
}

nlohmann::json rgb_json(const Rgb& c) { return nlohmann::json{c.r, c.g, c.b}; }

struct Vec2 {
    double x;
    double y;
};

// Point-in-polygon, even-odd rule.
bool inside_polygon(const std::vector<Vec2>& poly, double px, double py) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const bool crosses = (poly[i].y > py) != (poly[j].y > py);
        if (crosses) {
            const double xint = poly[j].x + (py - poly[j].y) / (poly[i].y - poly[j].y) *
                                                (poly[i].x - poly[j].x);
            if (px < xint) in = !in;
        }
    }
    return in;
}

void fill_rect(Image& img, int x0, int y0, int w, int h, const Rgb& color) {
    const int xa = std::max(x0, 0);
    const int ya = std::max(y0, 0);
    const int xb = std::min(x0 + w, img.width());
    const int yb = std::min(y0 + h, img.height());
    for (int y = ya; y < yb; ++y) {
        for (int x = xa; x < xb; ++x) img.at(x, y) = color;
    }
}

// Square dot of the given side, roughly centered on (px, py).
void stamp_dot(Image& img, double px, double py, int side, const Rgb& color) {
    const int x0 = iround(px - (side - 1) / 2.0);
    const int y0 = iround(py - (side - 1) / 2.0);
    fill_rect(img, x0, y0, side, side, color);
}

// Hard-edged segment by fixed-step walking; no anti-aliasing.
void draw_segment(Image& img, double x0, double y0, double angle, double length,
                  const Rgb& color) {
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const int steps = std::max(1, static_cast<int>(std::ceil(length / 0.5)));
    for (int s = 0; s <= steps; ++s) {
        const double t = length * s / steps;
        const int x = iround(x0 + t * dx);
        const int y = iround(y0 + t * dy);
        if (img.contains(x, y)) img.at(x, y) = color;
    }
}

// ---------------------------------------------------------------------------
// Seeded generator bodies. The public wrappers pull one seed from the
// caller's stream; replay() calls these directly with the recorded seed.
// ---------------------------------------------------------------------------

GlitchResult shader_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();
    const double scale = std::min(w, h);

    nlohmann::json polys = nlohmann::json::array();
    const int count = static_cast<int>(rng.uniform_int(1, 4));
    for (int p = 0; p < count; ++p) {
        const int ax = static_cast<int>(rng.uniform_int(0, w - 1));
        const int ay = static_cast<int>(rng.uniform_int(0, h - 1));
        const int verts = static_cast<int>(rng.uniform_int(3, 8));
        const double radius = std::max(2.0, rng.uniform(0.05, 0.15) * scale);

        std::vector<double> angles(verts);
        for (double& a : angles) a = rng.uniform(0.0, 2.0 * kPi);
        std::sort(angles.begin(), angles.end());
        std::vector<Vec2> poly(verts);
        for (int i = 0; i < verts; ++i) {
            const double r = radius * rng.uniform(0.6, 1.0);
            poly[i] = {ax + r * std::cos(angles[i]), ay + r * std::sin(angles[i])};
        }

        // color near the anchor pixel, guaranteed distinct per channel
        const Rgb anchor = img.at(ax, ay);
        Rgb base;
        base.r = reflect_offset(anchor.r, static_cast<int>(rng.uniform_int(16, 64)), rng.coin_flip());
        base.g = reflect_offset(anchor.g, static_cast<int>(rng.uniform_int(16, 64)), rng.coin_flip());
        base.b = reflect_offset(anchor.b, static_cast<int>(rng.uniform_int(16, 64)), rng.coin_flip());
        const double fade_dir = rng.uniform(0.0, 2.0 * kPi);

        double min_x = poly[0].x, max_x = poly[0].x, min_y = poly[0].y, max_y = poly[0].y;
        for (const Vec2& v : poly) {
            min_x = std::min(min_x, v.x);
            max_x = std::max(max_x, v.x);
            min_y = std::min(min_y, v.y);
            max_y = std::max(max_y, v.y);
        }
        const int xa = std::max(iround(min_x), 0);
        const int xb = std::min(iround(max_x), w - 1);
        const int ya = std::max(iround(min_y), 0);
        const int yb = std::min(iround(max_y), h - 1);
        const double cfd = std::cos(fade_dir);
        const double sfd = std::sin(fade_dir);
        for (int y = ya; y <= yb; ++y) {
            for (int x = xa; x <= xb; ++x) {
                if (!inside_polygon(poly, x, y)) continue;
                const double t = ((x - ax) * cfd + (y - ay) * sfd) / radius;  // in ~[-1,1]
                const double fade = std::clamp(1.0 - 0.35 * (t + 1.0), 0.3, 1.0);
                out.at(x, y) = Rgb{clamp_u8(base.r * fade), clamp_u8(base.g * fade),
                                   clamp_u8(base.b * fade)};
            }
        }

        nlohmann::json vj = nlohmann::json::array();
        for (const Vec2& v : poly) vj.push_back({v.x, v.y});
        polys.push_back({{"anchor", {ax, ay}},
                         {"vertices", vj},
                         {"base_color", rgb_json(base)},
                         {"fade_dir", fade_dir}});
    }

    if (out.data() == img.data()) {
        // degenerate fade/color coincidence: force one visible pixel
        const int ax = polys[0]["anchor"][0].get<int>();
        const int ay = polys[0]["anchor"][1].get<int>();
        Rgb forced = img.at(ax, ay);
        forced.r ^= 0x80;
        out.at(ax, ay) = forced;
    }

    GlitchSpec spec{ArtifactKind::Shader, seed,
                    nlohmann::json{{"polygons", polys}, {"count", count}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult shapes_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    const int rect_w = std::max(2, iround(rng.uniform(0.10, 0.30) * w));
    const int rect_h = std::max(2, iround(rng.uniform(0.10, 0.30) * h));

    // integral image of luma for the darkest-rectangle grid search
    std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        for (int x = 0; x < w; ++x) {
            row += luma(img.at(x, y));
            integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
        }
    }
    auto rect_sum = [&](int x, int y, int rw, int rh) {
        return integral[static_cast<std::size_t>(y + rh) * (w + 1) + x + rw] -
               integral[static_cast<std::size_t>(y) * (w + 1) + x + rw] -
               integral[static_cast<std::size_t>(y + rh) * (w + 1) + x] +
               integral[static_cast<std::size_t>(y) * (w + 1) + x];
    };

    const int grid = 16;
    const int max_x = w - rect_w;
    const int max_y = h - rect_h;
    int best_x = 0, best_y = 0;
    double best_sum = rect_sum(0, 0, rect_w, rect_h);
    for (int gy = 0; gy <= grid; ++gy) {
        const int y = max_y * gy / grid;
        for (int gx = 0; gx <= grid; ++gx) {
            const int x = max_x * gx / grid;
            const double s = rect_sum(x, y, rect_w, rect_h);
            if (s < best_sum) {
                best_sum = s;
                best_x = x;
                best_y = y;
            }
        }
    }

    const int ax = best_x + static_cast<int>(rng.uniform_int(0, rect_w - 1));
    const int ay = best_y + static_cast<int>(rng.uniform_int(0, rect_h - 1));
    const int count = static_cast<int>(rng.uniform_int(3, 8));
    const double scale = std::min(w, h);

    nlohmann::json fans = nlohmann::json::array();
    for (int i = 0; i < count; ++i) {
        const double dir = rng.uniform(0.0, 2.0 * kPi);
        const double spread = rng.uniform(2.0, 8.0) * kPi / 180.0;
        const double len = rng.uniform(0.10, 0.40) * scale;
        // dark color: every channel <= 63 keeps luma at or below 0.25
        const Rgb color{static_cast<std::uint8_t>(rng.uniform_int(0, 63)),
                        static_cast<std::uint8_t>(rng.uniform_int(0, 63)),
                        static_cast<std::uint8_t>(rng.uniform_int(0, 63))};
        const std::vector<Vec2> tri = {
            {static_cast<double>(ax), static_cast<double>(ay)},
            {ax + len * std::cos(dir - spread / 2), ay + len * std::sin(dir - spread / 2)},
            {ax + len * std::cos(dir + spread / 2), ay + len * std::sin(dir + spread / 2)}};
        double min_x = tri[0].x, max_xv = tri[0].x, min_y = tri[0].y, max_yv = tri[0].y;
        for (const Vec2& v : tri) {
            min_x = std::min(min_x, v.x);
            max_xv = std::max(max_xv, v.x);
            min_y = std::min(min_y, v.y);
            max_yv = std::max(max_yv, v.y);
        }
        for (int y = std::max(iround(min_y), 0); y <= std::min(iround(max_yv), h - 1); ++y) {
            for (int x = std::max(iround(min_x), 0); x <= std::min(iround(max_xv), w - 1); ++x) {
                if (inside_polygon(tri, x, y)) out.at(x, y) = color;
            }
        }
        // thin fans can miss every pixel center; the spine keeps them visible
        draw_segment(out, ax, ay, dir, len, color);
        fans.push_back({{"dir", dir}, {"spread", spread}, {"len", len}, {"color", rgb_json(color)}});
    }

    if (out.data() == img.data()) {
        const Rgb orig = img.at(ax, ay);
        out.at(ax, ay) = (orig == Rgb{63, 63, 63}) ? Rgb{0, 0, 0} : Rgb{63, 63, 63};
    }

    GlitchSpec spec{ArtifactKind::Shapes, seed,
                    nlohmann::json{{"dark_rect", {best_x, best_y, rect_w, rect_h}},
                                   {"anchor", {ax, ay}},
                                   {"fans", fans}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult discoloration_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    const int channel = static_cast<int>(rng.uniform_int(0, 2));
    const bool above = rng.coin_flip();
    const int tau = static_cast<int>(rng.uniform_int(100, 200));
    int value = static_cast<int>(above ? rng.uniform_int(tau, 255) : rng.uniform_int(0, tau));

    struct Blob {
        int cx, cy, a, b;
    };
    const int count = static_cast<int>(rng.uniform_int(1, 5));
    std::vector<Blob> blobs(count);
    for (Blob& blob : blobs) {
        blob.cx = static_cast<int>(rng.uniform_int(0, w - 1));
        blob.cy = static_cast<int>(rng.uniform_int(0, h - 1));
        blob.a = std::max(2, iround(rng.uniform(0.03, 0.12) * w));
        blob.b = std::max(2, iround(rng.uniform(0.03, 0.12) * h));
    }

    // keep the forced value distinct from the first blob center's channel
    {
        const Rgb& first = img.at(blobs[0].cx, blobs[0].cy);
        const int cur = channel == 0 ? first.r : (channel == 1 ? first.g : first.b);
        if (cur == value) {
            if (above) {
                value = value < 255 ? value + 1 : value - 1;
            } else {
                value = value > 0 ? value - 1 : value + 1;
            }
        }
    }

    nlohmann::json blobs_json = nlohmann::json::array();
    for (const Blob& blob : blobs) {
        const int xa = std::max(blob.cx - blob.a, 0);
        const int xb = std::min(blob.cx + blob.a, w - 1);
        const int ya = std::max(blob.cy - blob.b, 0);
        const int yb = std::min(blob.cy + blob.b, h - 1);
        for (int y = ya; y <= yb; ++y) {
            for (int x = xa; x <= xb; ++x) {
                const double dx = static_cast<double>(x - blob.cx) / blob.a;
                const double dy = static_cast<double>(y - blob.cy) / blob.b;
                if (dx * dx + dy * dy > 1.0) continue;
                Rgb& p = out.at(x, y);
                (channel == 0 ? p.r : (channel == 1 ? p.g : p.b)) =
                    static_cast<std::uint8_t>(value);
            }
        }
        blobs_json.push_back({blob.cx, blob.cy, blob.a, blob.b});
    }

    GlitchSpec spec{ArtifactKind::Discoloration, seed,
                    nlohmann::json{{"channel", channel},
                                   {"rule", above ? "force_above" : "force_below"},
                                   {"tau", tau},
                                   {"value", value},
                                   {"blobs", blobs_json}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult morse_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    const int runs = static_cast<int>(rng.uniform_int(8, 30));
    Rgb color = sample_color(rng);

    struct Run {
        int x, y, height, dot_w, dash_w, gap, symbols;
    };
    std::vector<Run> layout(runs);
    for (Run& run : layout) {
        run.dot_w = static_cast<int>(rng.uniform_int(2, 4));
        run.dash_w = static_cast<int>(rng.uniform_int(6, 12));
        run.gap = static_cast<int>(rng.uniform_int(2, 4));
        run.height = static_cast<int>(rng.uniform_int(1, run.dot_w / 2));  // width >= 2x height
        run.symbols = static_cast<int>(rng.uniform_int(4, 12));
        run.x = static_cast<int>(rng.uniform_int(0, std::max(0, w - 1 - run.dash_w)));
        run.y = static_cast<int>(rng.uniform_int(0, h - 1 - run.height));
    }
    color = ensure_differs(color, img.at(layout[0].x, layout[0].y));

    nlohmann::json runs_json = nlohmann::json::array();
    for (const Run& run : layout) {
        int x = run.x;
        for (int s = 0; s < run.symbols && x < w; ++s) {
            const int seg_w = (s % 2 == 0) ? run.dot_w : run.dash_w;
            fill_rect(out, x, run.y, seg_w, run.height, color);
            x += seg_w + run.gap;
        }
        runs_json.push_back({{"x", run.x},
                             {"y", run.y},
                             {"height", run.height},
                             {"dot_w", run.dot_w},
                             {"dash_w", run.dash_w},
                             {"gap", run.gap},
                             {"symbols", run.symbols}});
    }

    GlitchSpec spec{ArtifactKind::MorseCode, seed,
                    nlohmann::json{{"color", rgb_json(color)}, {"runs", runs_json}}};
    return {std::move(out), std::move(spec)};
}

void draw_dotted_segment(Image& out, double x0, double y0, double angle, double length,
                         int dot, int gap, const Rgb& color) {
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const double step = dot + gap;
    for (double t = 0.0; t <= length; t += step) {
        stamp_dot(out, x0 + t * dx, y0 + t * dy, dot, color);
    }
}

GlitchResult dotted_random_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();
    const double scale = std::min(w, h);
    const int margin_x = std::max(1, iround(0.1 * w));
    const int margin_y = std::max(1, iround(0.1 * h));

    Rgb color = sample_color(rng);
    const int count = static_cast<int>(rng.uniform_int(5, 25));

    struct Seg {
        int x0, y0, dot, gap;
        double angle, length;
    };
    std::vector<Seg> segs(count);
    for (Seg& seg : segs) {
        seg.x0 = static_cast<int>(rng.uniform_int(margin_x, w - 1 - margin_x));
        seg.y0 = static_cast<int>(rng.uniform_int(margin_y, h - 1 - margin_y));
        seg.angle = rng.uniform(0.0, 2.0 * kPi);
        seg.length = rng.uniform(0.15, 0.45) * scale;
        seg.dot = static_cast<int>(rng.uniform_int(1, 2));
        seg.gap = static_cast<int>(rng.uniform_int(3, 6));
    }
    color = ensure_differs(color, img.at(segs[0].x0, segs[0].y0));

    nlohmann::json segs_json = nlohmann::json::array();
    for (const Seg& seg : segs) {
        draw_dotted_segment(out, seg.x0, seg.y0, seg.angle, seg.length, seg.dot, seg.gap, color);
        segs_json.push_back({{"start", {seg.x0, seg.y0}},
                             {"angle", seg.angle},
                             {"length", seg.length},
                             {"dot", seg.dot},
                             {"gap", seg.gap}});
    }

    GlitchSpec spec{ArtifactKind::DottedLinesRandom, seed,
                    nlohmann::json{{"color", rgb_json(color)}, {"segments", segs_json}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult dotted_radial_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();
    const double scale = std::min(w, h);
    const int margin_x = std::max(1, iround(0.1 * w));
    const int margin_y = std::max(1, iround(0.1 * h));

    Rgb color = sample_color(rng);
    const int ox = static_cast<int>(rng.uniform_int(margin_x, w - 1 - margin_x));
    const int oy = static_cast<int>(rng.uniform_int(margin_y, h - 1 - margin_y));
    color = ensure_differs(color, img.at(ox, oy));
    const int count = static_cast<int>(rng.uniform_int(5, 25));

    nlohmann::json rays_json = nlohmann::json::array();
    for (int i = 0; i < count; ++i) {
        const double angle = rng.uniform(0.0, 2.0 * kPi);
        const double length = rng.uniform(0.2, 0.6) * scale;
        const int dot = static_cast<int>(rng.uniform_int(1, 2));
        const int gap = static_cast<int>(rng.uniform_int(3, 6));
        draw_dotted_segment(out, ox, oy, angle, length, dot, gap, color);
        rays_json.push_back(
            {{"angle", angle}, {"length", length}, {"dot", dot}, {"gap", gap}});
    }

    GlitchSpec spec{ArtifactKind::DottedLinesRadial, seed,
                    nlohmann::json{{"color", rgb_json(color)},
                                   {"origin", {ox, oy}},
                                   {"rays", rays_json}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult parallel_lines_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    const int count = static_cast<int>(rng.uniform_int(60, 100));
    const double theta_deg = rng.uniform(10.0, 35.0);  // shared: the lines are parallel
    const double theta = theta_deg * kPi / 180.0;
    const double nx = -std::sin(theta);
    const double ny = std::cos(theta);

    nlohmann::json lines_json = nlohmann::json::array();
    for (int i = 0; i < count; ++i) {
        const double x0 = rng.uniform(0.3 * w, 0.6 * w);
        const double y0 = rng.uniform(0.2 * h, 0.8 * h);
        const int thickness = static_cast<int>(rng.uniform_int(1, 3));
        const double length = rng.uniform(0.1, 0.3) * w;
        const Rgb color = img.at(std::clamp(iround(x0), 0, w - 1), std::clamp(iround(y0), 0, h - 1));
        for (int k = 0; k < thickness; ++k) {
            const double off = k - (thickness - 1) / 2.0;
            draw_segment(out, x0 + off * nx, y0 + off * ny, theta, length, color);
        }
        lines_json.push_back(
            {{"start", {x0, y0}}, {"thickness", thickness}, {"length", length}});
    }

    GlitchSpec spec{ArtifactKind::ParallelLines, seed,
                    nlohmann::json{{"n", count}, {"theta_deg", theta_deg}, {"lines", lines_json}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult triangulation_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    int rx = 0, ry = 0, rw = w, rh = h;
    const bool full = rng.coin_flip();
    if (!full) {
        rw = std::max(8, iround(rng.uniform(0.5, 1.0) * w));
        rh = std::max(8, iround(rng.uniform(0.5, 1.0) * h));
        rx = static_cast<int>(rng.uniform_int(0, w - rw));
        ry = static_cast<int>(rng.uniform_int(0, h - rh));
    }
    const int cell = static_cast<int>(rng.uniform_int(20, 60));
    const bool main_diagonal = rng.coin_flip();

    const int cells_x = (rw + cell - 1) / cell;
    const int cells_y = (rh + cell - 1) / cell;

    // two triangles per cell; accumulate then write means
    std::vector<double> sum_r(static_cast<std::size_t>(cells_x) * cells_y * 2, 0.0);
    std::vector<double> sum_g(sum_r.size(), 0.0);
    std::vector<double> sum_b(sum_r.size(), 0.0);
    std::vector<int> cnt(sum_r.size(), 0);

    auto tri_index = [&](int x, int y) {
        const int u = (x - rx) % cell;
        const int v = (y - ry) % cell;
        const int cx = (x - rx) / cell;
        const int cy = (y - ry) / cell;
        const bool first = main_diagonal ? (u + v < cell) : (u >= v);
        return (static_cast<std::size_t>(cy) * cells_x + cx) * 2 + (first ? 0 : 1);
    };

    for (int y = ry; y < ry + rh; ++y) {
        for (int x = rx; x < rx + rw; ++x) {
            const std::size_t t = tri_index(x, y);
            const Rgb& p = img.at(x, y);
            sum_r[t] += p.r;
            sum_g[t] += p.g;
            sum_b[t] += p.b;
            ++cnt[t];
        }
    }
    for (int y = ry; y < ry + rh; ++y) {
        for (int x = rx; x < rx + rw; ++x) {
            const std::size_t t = tri_index(x, y);
            out.at(x, y) = Rgb{clamp_u8(sum_r[t] / cnt[t]), clamp_u8(sum_g[t] / cnt[t]),
                               clamp_u8(sum_b[t] / cnt[t])};
        }
    }

    GlitchSpec spec{ArtifactKind::Triangulation, seed,
                    nlohmann::json{{"region", {rx, ry, rw, rh}},
                                   {"cell", cell},
                                   {"main_diagonal", main_diagonal}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult line_pixelation_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();
    const std::size_t total = static_cast<std::size_t>(w) * h;

    const int stripes = static_cast<int>(rng.uniform_int(1, 4));
    std::vector<bool> covered(total, false);
    std::size_t covered_count = 0;

    nlohmann::json stripes_json = nlohmann::json::array();
    bool first_pixel_set = false;
    int first_x = 0, first_y = 0;
    for (int s = 0; s < stripes; ++s) {
        const double angle = rng.uniform(0.0, kPi);
        const int cx = static_cast<int>(rng.uniform_int(0, w - 1));
        const int cy = static_cast<int>(rng.uniform_int(0, h - 1));
        const int width = static_cast<int>(rng.uniform_int(4, 20));

        // band through (cx, cy): |(p - c) . normal| <= width/2
        const double nx = -std::sin(angle);
        const double ny = std::cos(angle);
        std::vector<std::size_t> members;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double dist = (x - cx) * nx + (y - cy) * ny;
                if (std::abs(dist) <= width / 2.0) {
                    members.push_back(static_cast<std::size_t>(y) * w + x);
                }
            }
        }
        // cap the union so the corruption stays local on small frames
        std::size_t fresh = 0;
        for (std::size_t i : members) fresh += covered[i] ? 0 : 1;
        if (covered_count + fresh > total * 45 / 100) break;

        for (std::size_t i : members) {
            if (!covered[i]) {
                covered[i] = true;
                ++covered_count;
            }
            out.data()[i] = sample_color(rng);
            if (!first_pixel_set) {
                first_pixel_set = true;
                first_x = static_cast<int>(i % w);
                first_y = static_cast<int>(i / w);
            }
        }
        stripes_json.push_back(
            {{"center", {cx, cy}}, {"angle", angle}, {"width", width}});
    }

    const int halos = static_cast<int>(rng.uniform_int(0, 50));
    nlohmann::json halos_json = nlohmann::json::array();
    static constexpr int kOffsets[3][2] = {{0, 0}, {1, 0}, {0, 1}};
    for (int i = 0; i < halos; ++i) {
        const int hx = static_cast<int>(rng.uniform_int(0, w - 1));
        const int hy = static_cast<int>(rng.uniform_int(0, h - 1));
        const int size = static_cast<int>(rng.uniform_int(1, 3));
        const int delta = static_cast<int>(rng.uniform_int(64, 128));
        if (covered_count + static_cast<std::size_t>(size) > total * 45 / 100) continue;
        for (int k = 0; k < size; ++k) {
            const int x = hx + kOffsets[k][0];
            const int y = hy + kOffsets[k][1];
            if (!out.contains(x, y)) continue;
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!covered[idx]) {
                covered[idx] = true;
                ++covered_count;
            }
            Rgb& p = out.at(x, y);
            p = Rgb{static_cast<std::uint8_t>(std::min(255, p.r + delta)),
                    static_cast<std::uint8_t>(std::min(255, p.g + delta)),
                    static_cast<std::uint8_t>(std::min(255, p.b + delta))};
        }
        halos_json.push_back({{"at", {hx, hy}}, {"size", size}, {"delta", delta}});
    }

    if (out.data() == img.data() && first_pixel_set) {
        Rgb forced = img.at(first_x, first_y);
        forced.g ^= 0x80;
        out.at(first_x, first_y) = forced;
    }

    GlitchSpec spec{ArtifactKind::LinePixelation, seed,
                    nlohmann::json{{"stripes", stripes_json}, {"halos", halos_json}}};
    return {std::move(out), std::move(spec)};
}

GlitchResult stuttering_seeded(const Image& img, std::uint64_t seed) {
    Rng rng(seed);
    Image out = img;
    const int w = img.width();
    const int h = img.height();

    struct Band {
        int x, y, w, h;
    };
    auto sample_band = [&]() {
        Band band;
        band.w = std::max(4, iround(rng.uniform(0.3, 0.8) * w));
        band.h = std::max(4, iround(rng.uniform(0.3, 0.8) * h));
        band.x = static_cast<int>(rng.uniform_int(0, w - band.w));
        band.y = static_cast<int>(rng.uniform_int(0, h - band.h));
        return band;
    };

    const bool full_frame = rng.coin_flip();
    const Band band_a = full_frame ? Band{0, 0, w, h} : sample_band();
    const Band band_b = sample_band();

    // offset 0: pairs (0,1),(2,3)... relative to the band; offset 1 pairs
    // (1,2),(3,4)... which is the mirrored sweep in the other direction
    auto swap_columns = [&](const Band& band, int offset) {
        for (int c = offset; c + 1 < band.w; c += 2) {
            for (int y = band.y; y < band.y + band.h; ++y) {
                std::swap(out.at(band.x + c, y), out.at(band.x + c + 1, y));
            }
        }
    };
    auto swap_rows = [&](const Band& band, int offset) {
        for (int r = offset; r + 1 < band.h; r += 2) {
            for (int x = band.x; x < band.x + band.w; ++x) {
                std::swap(out.at(x, band.y + r), out.at(x, band.y + r + 1));
            }
        }
    };

    swap_columns(band_a, 0);
    swap_rows(band_a, 0);
    swap_rows(band_b, 1);
    swap_columns(band_b, 1);

    GlitchSpec spec{ArtifactKind::Stuttering, seed,
                    nlohmann::json{{"full_frame", full_frame},
                                   {"band_a", {band_a.x, band_a.y, band_a.w, band_a.h}},
                                   {"band_b", {band_b.x, band_b.y, band_b.w, band_b.h}}}};
    return {std::move(out), std::move(spec)};
}

Image synthesize_tearing_partner(const Image& img, Rng& rng) {
    // stand-in "later frame": 5% brightness shift plus an 8 px translation
    const bool brighter = rng.coin_flip();
    const double gain = brighter ? 1.05 : 0.95;
    const int shift_x = rng.coin_flip() ? 8 : -8;
    const int shift_y = rng.coin_flip() ? 8 : -8;
    Image out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        const int sy = std::clamp(y - shift_y, 0, img.height() - 1);
        for (int x = 0; x < img.width(); ++x) {
            const int sx = std::clamp(x - shift_x, 0, img.width() - 1);
            const Rgb& p = img.at(sx, sy);
            out.at(x, y) = Rgb{clamp_u8(p.r * gain), clamp_u8(p.g * gain), clamp_u8(p.b * gain)};
        }
    }
    return out;
}

GlitchResult tearing_seeded(const Image& frame_a, const Image* frame_b, std::uint64_t seed) {
    Rng rng(seed);
    const bool synthesized = frame_b == nullptr;
    const Image partner = synthesized ? synthesize_tearing_partner(frame_a, rng) : *frame_b;
    if (partner.width() != frame_a.width() || partner.height() != frame_a.height()) {
        throw std::invalid_argument("glitch_tearing: frame dimensions differ");
    }

    const bool rows_mode = rng.coin_flip();
    const int extent = rows_mode ? frame_a.height() : frame_a.width();
    const int spans = static_cast<int>(rng.uniform_int(1, 3));
    const double frac = rng.uniform(0.2, 0.6);
    int total = std::clamp(iround(frac * extent), spans, extent);

    // split the replaced extent into span lengths >= 1
    std::vector<int> lengths(spans, 1);
    {
        std::vector<double> parts(spans);
        double sum = 0.0;
        for (double& p : parts) {
            p = rng.uniform(0.2, 1.0);
            sum += p;
        }
        int assigned = 0;
        for (int i = 0; i < spans; ++i) {
            lengths[i] = std::max(1, iround(parts[i] / sum * total));
            assigned += lengths[i];
        }
        lengths.back() = std::max(1, lengths.back() + (total - assigned));
    }
    int used = 0;
    for (int len : lengths) used += len;
    used = std::min(used, extent);

    // place spans without overlap: distribute the free space as sorted gaps
    const int free_space = extent - used;
    std::vector<int> cuts(spans);
    for (int& c : cuts) c = static_cast<int>(rng.uniform_int(0, free_space));
    std::sort(cuts.begin(), cuts.end());

    std::vector<std::pair<int, int>> placed;  // (start, len)
    int consumed = 0;
    for (int i = 0; i < spans; ++i) {
        int start = cuts[i] + consumed;
        int len = lengths[i];
        if (start >= extent) break;
        len = std::min(len, extent - start);
        placed.emplace_back(start, len);
        consumed += len;
    }

    Image out = frame_a;
    for (const auto& [start, len] : placed) {
        if (rows_mode) {
            for (int y = start; y < start + len; ++y) {
                for (int x = 0; x < out.width(); ++x) out.at(x, y) = partner.at(x, y);
            }
        } else {
            for (int x = start; x < start + len; ++x) {
                for (int y = 0; y < out.height(); ++y) out.at(x, y) = partner.at(x, y);
            }
        }
    }

    nlohmann::json spans_json = nlohmann::json::array();
    for (const auto& [start, len] : placed) spans_json.push_back({start, len});
    GlitchSpec spec{ArtifactKind::Tearing, seed,
                    nlohmann::json{{"orientation", rows_mode ? "rows" : "columns"},
                                   {"spans", spans_json},
                                   {"aux_synthesized", synthesized}}};
    return {std::move(out), std::move(spec)};
}

}  // namespace

std::string to_string(ArtifactKind kind) {
    switch (kind) {
        case ArtifactKind::Shader: return "shader";
        case ArtifactKind::Shapes: return "shapes";
        case ArtifactKind::Discoloration: return "discoloration";
        case ArtifactKind::MorseCode: return "morse_code";
        case ArtifactKind::DottedLinesRandom: return "dotted_lines_random";
        case ArtifactKind::DottedLinesRadial: return "dotted_lines_radial";
        case ArtifactKind::ParallelLines: return "parallel_lines";
        case ArtifactKind::Triangulation: return "triangulation";
        case ArtifactKind::LinePixelation: return "line_pixelation";
        case ArtifactKind::Stuttering: return "stuttering";
        case ArtifactKind::Tearing: return "tearing";
    }
    throw std::logic_error("unknown artifact kind");
}

ArtifactKind artifact_kind_from_string(const std::string& name) {
    for (ArtifactKind kind : kAllArtifactKinds) {
        if (to_string(kind) == name) return kind;
    }
    throw std::invalid_argument("unknown artifact kind: " + name);
}

nlohmann::json GlitchSpec::to_json() const {
    return nlohmann::json{{"kind", glitchkit::to_string(kind)}, {"seed", seed}, {"params", params}};
}

GlitchSpec GlitchSpec::from_json(const nlohmann::json& j) {
    GlitchSpec spec;
    spec.kind = artifact_kind_from_string(j.at("kind").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.params = j.at("params");
    return spec;
}

GlitchResult glitch_shader(const Image& img, Rng& rng) { return shader_seeded(img, rng.next_u64()); }
GlitchResult glitch_shapes(const Image& img, Rng& rng) { return shapes_seeded(img, rng.next_u64()); }
GlitchResult glitch_discoloration(const Image& img, Rng& rng) {
    return discoloration_seeded(img, rng.next_u64());
}
GlitchResult glitch_morse(const Image& img, Rng& rng) { return morse_seeded(img, rng.next_u64()); }
GlitchResult glitch_dotted_random(const Image& img, Rng& rng) {
    return dotted_random_seeded(img, rng.next_u64());
}
GlitchResult glitch_dotted_radial(const Image& img, Rng& rng) {
    return dotted_radial_seeded(img, rng.next_u64());
}
GlitchResult glitch_parallel_lines(const Image& img, Rng& rng) {
    return parallel_lines_seeded(img, rng.next_u64());
}
GlitchResult glitch_triangulation(const Image& img, Rng& rng) {
    return triangulation_seeded(img, rng.next_u64());
}
GlitchResult glitch_line_pixelation(const Image& img, Rng& rng) {
    return line_pixelation_seeded(img, rng.next_u64());
}
GlitchResult glitch_stuttering(const Image& img, Rng& rng) {
    return stuttering_seeded(img, rng.next_u64());
}
GlitchResult glitch_tearing(const Image& frame_a, const Image& frame_b, Rng& rng) {
    return tearing_seeded(frame_a, &frame_b, rng.next_u64());
}

namespace {

GlitchResult dispatch_seeded(ArtifactKind kind, const Image& img, const Image* aux,
                             std::uint64_t seed, bool allow_fallback) {
    switch (kind) {
        case ArtifactKind::Shader: return shader_seeded(img, seed);
        case ArtifactKind::Shapes: return shapes_seeded(img, seed);
        case ArtifactKind::Discoloration: return discoloration_seeded(img, seed);
        case ArtifactKind::MorseCode: return morse_seeded(img, seed);
        case ArtifactKind::DottedLinesRandom: return dotted_random_seeded(img, seed);
        case ArtifactKind::DottedLinesRadial: return dotted_radial_seeded(img, seed);
        case ArtifactKind::ParallelLines: return parallel_lines_seeded(img, seed);
        case ArtifactKind::Triangulation: return triangulation_seeded(img, seed);
        case ArtifactKind::LinePixelation: return line_pixelation_seeded(img, seed);
        case ArtifactKind::Stuttering: return stuttering_seeded(img, seed);
        case ArtifactKind::Tearing:
            if (aux == nullptr && !allow_fallback) {
                throw std::invalid_argument("apply: tearing requires an aux frame");
            }
            return tearing_seeded(img, aux, seed);
    }
    throw std::invalid_argument("apply: unknown artifact kind");
}

}  // namespace

GlitchResult apply(ArtifactKind kind, const Image& img, const Image* aux, Rng& rng,
                   bool allow_fallback) {
    return dispatch_seeded(kind, img, aux, rng.next_u64(), allow_fallback);
}

Image replay(const GlitchSpec& spec, const Image& img, const Image* aux) {
    if (spec.kind == ArtifactKind::Tearing) {
        const bool synthesized = spec.params.value("aux_synthesized", false);
        if (synthesized) {
            return tearing_seeded(img, nullptr, spec.seed).first;
        }
        if (aux == nullptr) {
            throw std::invalid_argument("replay: tearing spec needs the original aux frame");
        }
        return tearing_seeded(img, aux, spec.seed).first;
    }
    return dispatch_seeded(spec.kind, img, nullptr, spec.seed, false).first;
}

}  // namespace glitchkit
