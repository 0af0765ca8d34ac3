#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "glitchkit/glitch.hpp"
#include "test_util.hpp"

using namespace glitchkit;

namespace {

std::vector<std::uint32_t> pixel_multiset(const Image& img) {
    std::vector<std::uint32_t> keys;
    keys.reserve(img.data().size());
    for (const Rgb& p : img.data()) {
        keys.push_back((std::uint32_t(p.r) << 16) | (std::uint32_t(p.g) << 8) | p.b);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

struct Pt {
    double x, y;
};

bool point_in_polygon(const std::vector<Pt>& poly, double px, double py) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y > py) != (poly[j].y > py)) {
            const double xint = poly[j].x + (py - poly[j].y) / (poly[i].y - poly[j].y) *
                                                (poly[i].x - poly[j].x);
            if (px < xint) in = !in;
        }
    }
    return in;
}

}  // namespace

TEST_CASE("every kind is deterministic and replayable") {
    const Image img = testutil::gradient_image(192, 108, 1);
    const Image aux = testutil::gradient_image(192, 108, 2);
    for (ArtifactKind kind : kAllArtifactKinds) {
        CAPTURE(to_string(kind));
        Rng r1(555), r2(555);
        const Image* aux_ptr = kind == ArtifactKind::Tearing ? &aux : nullptr;
        const GlitchResult a = apply(kind, img, aux_ptr, r1);
        const GlitchResult b = apply(kind, img, aux_ptr, r2);
        CHECK(a.first.data() == b.first.data());
        CHECK(a.second.to_json() == b.second.to_json());
        CHECK(a.second.kind == kind);

        const Image replayed = replay(a.second, img, aux_ptr);
        CHECK(replayed.data() == a.first.data());
    }
}

TEST_CASE("locality: local kinds change something but less than half the frame") {
    const Image img = testutil::gradient_image(192, 108, 3);
    const ArtifactKind local_kinds[] = {
        ArtifactKind::Shader,          ArtifactKind::Shapes,
        ArtifactKind::Discoloration,   ArtifactKind::MorseCode,
        ArtifactKind::DottedLinesRandom, ArtifactKind::DottedLinesRadial,
        ArtifactKind::ParallelLines,   ArtifactKind::LinePixelation,
    };
    for (ArtifactKind kind : local_kinds) {
        CAPTURE(to_string(kind));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            const GlitchResult result = apply(kind, img, nullptr, rng);
            const std::size_t diff = testutil::count_diff(img, result.first);
            CHECK(diff >= 1);
            CHECK(diff < img.data().size() / 2);
        }
    }
}

TEST_CASE("all generators preserve frame dimensions") {
    const Image img = testutil::random_image(160, 96, 9);
    for (ArtifactKind kind : kAllArtifactKinds) {
        Rng rng(7);
        const GlitchResult result = apply(kind, img, nullptr, rng);
        CHECK(result.first.width() == 160);
        CHECK(result.first.height() == 96);
    }
}

TEST_CASE("shader changes stay inside the sampled polygons and under 40 percent") {
    const Image img = testutil::gradient_image(192, 108, 4);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_shader(img, rng);
        const std::size_t diff = testutil::count_diff(img, out);
        CHECK(diff >= 1);
        CHECK(diff <= img.data().size() * 40 / 100);

        std::vector<std::vector<Pt>> polys;
        for (const auto& pj : spec.params.at("polygons")) {
            std::vector<Pt> poly;
            for (const auto& vj : pj.at("vertices")) {
                poly.push_back({vj[0].get<double>(), vj[1].get<double>()});
            }
            polys.push_back(std::move(poly));
        }
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) == out.at(x, y)) continue;
                bool inside = false;
                for (const auto& poly : polys) {
                    if (point_in_polygon(poly, x, y)) inside = true;
                }
                const bool is_anchor =
                    x == spec.params["polygons"][0]["anchor"][0].get<int>() &&
                    y == spec.params["polygons"][0]["anchor"][1].get<int>();
                CHECK((inside || is_anchor));
            }
        }
    }
}

TEST_CASE("shapes draws dark pixels only") {
    const Image img = testutil::gradient_image(192, 108, 5);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_shapes(img, rng);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) == out.at(x, y)) continue;
                CHECK(luma(out.at(x, y)) <= 0.25);
            }
        }
    }
}

TEST_CASE("shapes tolerates an all-black frame") {
    const Image img(64, 64, Rgb{0, 0, 0});
    Rng r1(2), r2(2);
    const auto a = glitch_shapes(img, r1);
    const auto b = glitch_shapes(img, r2);
    CHECK(a.first.data() == b.first.data());
}

TEST_CASE("discoloration forces exactly the recorded channel value") {
    const Image img = testutil::gradient_image(160, 120, 6);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_discoloration(img, rng);
        const int channel = spec.params.at("channel").get<int>();
        const int value = spec.params.at("value").get<int>();
        const int tau = spec.params.at("tau").get<int>();
        const bool above = spec.params.at("rule").get<std::string>() == "force_above";
        CHECK(tau >= 100);
        CHECK(tau <= 200);
        if (above) {
            CHECK(value >= tau - 1);  // collision nudge may step one off
        } else {
            CHECK(value <= tau + 1);
        }
        std::size_t diff = 0;
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                const Rgb& before = img.at(x, y);
                const Rgb& after = out.at(x, y);
                if (before == after) continue;
                ++diff;
                const int got = channel == 0 ? after.r : (channel == 1 ? after.g : after.b);
                CHECK(got == value);
                // the other two channels are untouched
                for (int c = 0; c < 3; ++c) {
                    if (c == channel) continue;
                    const int bv = c == 0 ? before.r : (c == 1 ? before.g : before.b);
                    const int av = c == 0 ? after.r : (c == 1 ? after.g : after.b);
                    CHECK(bv == av);
                }
            }
        }
        CHECK(diff >= 1);
    }
}

TEST_CASE("morse overlays one color in wide flat rectangles") {
    const Image img = testutil::gradient_image(192, 108, 7);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_morse(img, rng);
        const auto cj = spec.params.at("color");
        const Rgb color{cj[0].get<std::uint8_t>(), cj[1].get<std::uint8_t>(),
                        cj[2].get<std::uint8_t>()};
        std::size_t diff = 0;
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            if (img.data()[i] == out.data()[i]) continue;
            ++diff;
            CHECK(out.data()[i] == color);
        }
        CHECK(diff >= 1);
        for (const auto& run : spec.params.at("runs")) {
            const int height = run.at("height").get<int>();
            CHECK(run.at("dot_w").get<int>() >= 2 * height);
            CHECK(run.at("dash_w").get<int>() >= 2 * height);
        }
    }
}

TEST_CASE("dotted random: one color, starts away from the edges") {
    const Image img = testutil::gradient_image(200, 150, 8);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_dotted_random(img, rng);
        const auto cj = spec.params.at("color");
        const Rgb color{cj[0].get<std::uint8_t>(), cj[1].get<std::uint8_t>(),
                        cj[2].get<std::uint8_t>()};
        for (std::size_t i = 0; i < img.data().size(); ++i) {
            if (!(img.data()[i] == out.data()[i])) CHECK(out.data()[i] == color);
        }
        for (const auto& seg : spec.params.at("segments")) {
            const int x0 = seg.at("start")[0].get<int>();
            const int y0 = seg.at("start")[1].get<int>();
            CHECK(x0 >= 0.1 * img.width());
            CHECK(x0 <= 0.9 * img.width());
            CHECK(y0 >= 0.1 * img.height());
            CHECK(y0 <= 0.9 * img.height());
        }
    }
}

TEST_CASE("dotted radial rays pass near the common origin") {
    const Image img = testutil::gradient_image(200, 150, 9);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_dotted_radial(img, rng);
        const double ox = spec.params.at("origin")[0].get<double>();
        const double oy = spec.params.at("origin")[1].get<double>();
        std::vector<double> angles;
        for (const auto& ray : spec.params.at("rays")) {
            angles.push_back(ray.at("angle").get<double>());
        }
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) == out.at(x, y)) continue;
                // backward extension: distance from the changed pixel to the
                // nearest infinite ray line through the origin
                double best = 1e9;
                for (double a : angles) {
                    const double dx = x - ox, dy = y - oy;
                    const double d = std::abs(dx * std::sin(a) - dy * std::cos(a));
                    best = std::min(best, d);
                }
                CHECK(best <= 2.0);
            }
        }
    }
}

TEST_CASE("parallel lines honor the sampled parameter boxes") {
    const Image img = testutil::random_image(192, 108, 10);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_parallel_lines(img, rng);
        const int n = spec.params.at("n").get<int>();
        const double theta = spec.params.at("theta_deg").get<double>();
        CHECK(n >= 60);
        CHECK(n <= 100);
        CHECK(theta >= 10.0);
        CHECK(theta <= 35.0);
        CHECK(spec.params.at("lines").size() == static_cast<std::size_t>(n));
        for (const auto& line : spec.params.at("lines")) {
            const double x0 = line.at("start")[0].get<double>();
            const double y0 = line.at("start")[1].get<double>();
            const int t = line.at("thickness").get<int>();
            CHECK(x0 >= 0.3 * img.width());
            CHECK(x0 <= 0.6 * img.width());
            CHECK(y0 >= 0.2 * img.height());
            CHECK(y0 <= 0.8 * img.height());
            CHECK(t >= 1);
            CHECK(t <= 3);
        }
    }
}

TEST_CASE("triangulation is the identity on constant frames") {
    const Image img(128, 96, Rgb{77, 120, 33});
    Rng rng(13);
    const auto [out, spec] = glitch_triangulation(img, rng);
    CHECK(out.data() == img.data());
}

TEST_CASE("triangulation paints constant triangles with the input means") {
    const Image img = testutil::random_image(160, 120, 11);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_triangulation(img, rng);
        const auto region = spec.params.at("region");
        const int rx = region[0].get<int>(), ry = region[1].get<int>();
        const int rw = region[2].get<int>(), rh = region[3].get<int>();
        const int cell = spec.params.at("cell").get<int>();
        const bool main_diag = spec.params.at("main_diagonal").get<bool>();

        const int cells_x = (rw + cell - 1) / cell;
        auto tri_of = [&](int x, int y) {
            const int u = (x - rx) % cell, v = (y - ry) % cell;
            const bool first = main_diag ? (u + v < cell) : (u >= v);
            return (((y - ry) / cell) * cells_x + (x - rx) / cell) * 2 + (first ? 0 : 1);
        };

        // group output pixels and input sums by triangle
        std::map<int, Rgb> tri_color;
        std::map<int, std::array<double, 4>> tri_sums;  // r,g,b,count
        for (int y = ry; y < ry + rh; ++y) {
            for (int x = rx; x < rx + rw; ++x) {
                const int t = tri_of(x, y);
                const auto [it, fresh] = tri_color.try_emplace(t, out.at(x, y));
                if (!fresh) CHECK(out.at(x, y) == it->second);  // constant per triangle
                auto& s = tri_sums[t];
                s[0] += img.at(x, y).r;
                s[1] += img.at(x, y).g;
                s[2] += img.at(x, y).b;
                s[3] += 1;
            }
        }
        for (const auto& [t, color] : tri_color) {
            const auto& s = tri_sums[t];
            CHECK(std::abs(color.r - s[0] / s[3]) <= 1.0);
            CHECK(std::abs(color.g - s[1] / s[3]) <= 1.0);
            CHECK(std::abs(color.b - s[2] / s[3]) <= 1.0);
        }
        // pixels outside the region untouched
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                const bool in_region = x >= rx && x < rx + rw && y >= ry && y < ry + rh;
                if (!in_region) CHECK(img.at(x, y) == out.at(x, y));
            }
        }
    }
}

TEST_CASE("line pixelation stripes carry high-variance noise") {
    const Image img = testutil::gradient_image(256, 144, 12);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_line_pixelation(img, rng);
        for (const auto& stripe : spec.params.at("stripes")) {
            const double cx = stripe.at("center")[0].get<double>();
            const double cy = stripe.at("center")[1].get<double>();
            const double angle = stripe.at("angle").get<double>();
            const int width = stripe.at("width").get<int>();
            const double nx = -std::sin(angle), ny = std::cos(angle);
            double sum[3] = {0, 0, 0}, sum_sq[3] = {0, 0, 0};
            int n = 0;
            for (int y = 0; y < img.height(); ++y) {
                for (int x = 0; x < img.width(); ++x) {
                    if (std::abs((x - cx) * nx + (y - cy) * ny) > width / 2.0) continue;
                    const Rgb& p = out.at(x, y);
                    const double v[3] = {double(p.r), double(p.g), double(p.b)};
                    for (int c = 0; c < 3; ++c) {
                        sum[c] += v[c];
                        sum_sq[c] += v[c] * v[c];
                    }
                    ++n;
                }
            }
            REQUIRE(n > 30);
            for (int c = 0; c < 3; ++c) {
                const double var = (sum_sq[c] - sum[c] * sum[c] / n) / (n - 1);
                CHECK(var > 500.0);
            }
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("line pixelation leaves pixels outside stripes and halos unchanged") {
    const Image img = testutil::gradient_image(192, 108, 13);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_line_pixelation(img, rng);
        auto in_any_stripe = [&](int x, int y) {
            for (const auto& stripe : spec.params.at("stripes")) {
                const double cx = stripe.at("center")[0].get<double>();
                const double cy = stripe.at("center")[1].get<double>();
                const double angle = stripe.at("angle").get<double>();
                const int width = stripe.at("width").get<int>();
                if (std::abs((x - cx) * -std::sin(angle) + (y - cy) * std::cos(angle)) <=
                    width / 2.0) {
                    return true;
                }
            }
            return false;
        };
        auto in_any_halo = [&](int x, int y) {
            for (const auto& halo : spec.params.at("halos")) {
                const int hx = halo.at("at")[0].get<int>();
                const int hy = halo.at("at")[1].get<int>();
                if ((x == hx && y == hy) || (x == hx + 1 && y == hy) || (x == hx && y == hy + 1)) {
                    return true;
                }
            }
            return false;
        };
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) == out.at(x, y)) continue;
                CHECK((in_any_stripe(x, y) || in_any_halo(x, y)));
            }
        }
    }
}

TEST_CASE("stuttering permutes the pixel multiset") {
    const Image img = testutil::random_image(160, 120, 14);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_stuttering(img, rng);
        CHECK(pixel_multiset(out) == pixel_multiset(img));
    }
    const Image constant(64, 64, Rgb{5, 6, 7});
    Rng rng(3);
    CHECK(glitch_stuttering(constant, rng).first.data() == constant.data());
}

TEST_CASE("tearing rows come from exactly one parent") {
    const Image a = testutil::gradient_image(128, 96, 15);
    const Image b = testutil::random_image(128, 96, 16);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const auto [out, spec] = glitch_tearing(a, b, rng);
        const bool rows = spec.params.at("orientation").get<std::string>() == "rows";
        int from_b = 0;
        const int extent = rows ? a.height() : a.width();
        for (int i = 0; i < extent; ++i) {
            bool eq_a = true, eq_b = true;
            const int other = rows ? a.width() : a.height();
            for (int j = 0; j < other; ++j) {
                const int x = rows ? j : i;
                const int y = rows ? i : j;
                if (!(out.at(x, y) == a.at(x, y))) eq_a = false;
                if (!(out.at(x, y) == b.at(x, y))) eq_b = false;
            }
            CHECK((eq_a || eq_b));
            if (eq_b && !eq_a) ++from_b;
        }
        // spans replace 20..60% of the frame
        CHECK(from_b >= 1);
    }
}

TEST_CASE("tearing with identical frames is the identity") {
    const Image a = testutil::gradient_image(96, 64, 17);
    Rng rng(5);
    CHECK(glitch_tearing(a, a, rng).first.data() == a.data());
}

TEST_CASE("tearing rejects mismatched dimensions") {
    const Image a = testutil::gradient_image(96, 64, 18);
    const Image b = testutil::gradient_image(64, 96, 19);
    Rng rng(6);
    CHECK_THROWS(glitch_tearing(a, b, rng));
}

TEST_CASE("tearing fallback synthesizes and flags the partner frame") {
    const Image a = testutil::gradient_image(96, 64, 20);
    Rng rng(7);
    const auto [out, spec] = apply(ArtifactKind::Tearing, a, nullptr, rng);
    CHECK(spec.params.at("aux_synthesized").get<bool>());
    const Image replayed = replay(spec, a);
    CHECK(replayed.data() == out.data());

    Rng rng2(7);
    CHECK_THROWS(apply(ArtifactKind::Tearing, a, nullptr, rng2, /*allow_fallback=*/false));
}

TEST_CASE("apply dispatches and records the kind") {
    const Image img = testutil::gradient_image(128, 96, 21);
    Rng rng(9);
    const auto [out, spec] = apply(ArtifactKind::ParallelLines, img, nullptr, rng);
    CHECK(spec.kind == ArtifactKind::ParallelLines);
    const int n = spec.params.at("n").get<int>();
    CHECK(n >= 60);
    CHECK(n <= 100);
}

TEST_CASE("glitch spec json round trip") {
    const Image img = testutil::gradient_image(128, 96, 22);
    Rng rng(10);
    const auto [out, spec] = apply(ArtifactKind::MorseCode, img, nullptr, rng);
    const GlitchSpec back = GlitchSpec::from_json(spec.to_json());
    CHECK(back.kind == spec.kind);
    CHECK(back.seed == spec.seed);
    CHECK(back.params == spec.params);
    CHECK(replay(back, img).data() == out.data());
}

TEST_CASE("artifact kind names round trip") {
    for (ArtifactKind kind : kAllArtifactKinds) {
        CHECK(artifact_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS(artifact_kind_from_string("nonsense"));
}
