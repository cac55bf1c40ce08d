#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridforge/instance.hpp"
#include "gridforge/serialize.hpp"

namespace gridforge {

struct RenderTheme {
    int cell_size = 48;
    std::string background = "#ffffff";
    std::string grid_line = "#9a9a9a";
    std::string region_border = "#000000";
    std::string cage_line = "#444444";
    std::string cage_dash = "4,3";
    std::string cage_target = "#d0021b";
    std::string parity_fill = "#d9d9d9";
    std::string text = "#111111";
    std::string clue_text = "#1f3a93";
    std::string font_family = "DejaVu Sans, Arial, sans-serif";
    std::string thermometer = "#b0b0b0";
    std::string bulb = "#f5c518";
    std::string wall = "#222222";
    std::string wall_text = "#ffffff";
    std::string tree = "#2e7d32";
    std::string tent = "#c77c02";
    std::string ship = "#37474f";
    std::string star = "#e6a100";
    std::string shaded = "#333333";
    std::string marker = "#777777";  // deliberately empty cells
    std::string mark_dot = "#000000";
    // Fill colours of colored-sudoku groups, cycled.
    std::vector<std::string> group_colors = {"#f4cccc", "#fce5cd", "#fff2cc", "#d9ead3", "#d0e0e3",
                                             "#cfe2f3", "#d9d2e9", "#ead1dc", "#e6e6e6"};
};

RenderTheme default_theme();

// Fields absent from the object keep their defaults. Throws Schema on unknown
// fields, invalid colours or a cell size below 24.
RenderTheme theme_from_json(const ojson& j);
ojson theme_to_json(const RenderTheme& theme);
void validate_theme(const RenderTheme& theme);

bool is_css_color(std::string_view text);

// SVG 1.1 document. Every glyph carries data-role, and cell glyphs also carry
// data-row, data-col and data-value. Unknown cells are left blank.
std::string render_svg(const PuzzleInstance& instance, const RenderTheme& theme = default_theme());

struct AffineParams {
    double rotation = 0;  // degrees, within [-15, 15]
    double scale_x = 1;
    double scale_y = 1;
    double shear = 0;  // x += shear * y
    double translate_x = 0;
    double translate_y = 0;
    std::uint64_t seed = 0;

    bool is_identity() const;
    // Throws InvalidArgument outside the bounds.
    void validate() const;
    // Matrix (a, b, c, d) of the linear part, SVG order.
    std::array<double, 4> linear() const;

    // Random draw within the bounds, deterministic in seed.
    static AffineParams random(std::uint64_t seed);
};

struct SvgSize {
    double width = 0;
    double height = 0;
};

// Canvas size of an augmented document: bounding box of the transformed page
// grown by the translation.
SvgSize augmented_size(SvgSize page, const AffineParams& params);

// Reads width/height from the root element.
SvgSize svg_size(std::string_view svg);

// Wraps the document content in one transform group and resizes the canvas so
// nothing is clipped. Identity parameters return the input unchanged.
std::string augment(const std::string& svg, const AffineParams& params);

} // namespace gridforge
