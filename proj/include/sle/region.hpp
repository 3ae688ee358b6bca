#pragma once

#include <string>
#include <vector>

#include "sle/types.hpp"

namespace sle {

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
    double xmin = 0.0;
    double xmax = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;

    bool contains(Complex z) const {
        return z.real() >= xmin && z.real() <= xmax && z.imag() >= ymin && z.imag() <= ymax;
    }
    double area() const { return (xmax - xmin) * (ymax - ymin); }
    bool operator==(const Rect&) const = default;
};

/// Finite union of rectangles in the closed upper half-plane.
struct Region {
    std::vector<Rect> rects;

    bool contains(Complex z) const;
    bool empty() const { return rects.empty(); }
    /// Bounding box of all rectangles.
    Rect bounds() const;
    /// Largest |z| over the region.
    double radius() const;
    void validate() const;
    bool operator==(const Region&) const = default;
};

/// Parses "x0,x1,y0,y1" quadruples separated by ';'.
Region parse_region(const std::string& text);
std::string format_region(const Region& r);

/// Parses "a+bi", "a-bi", "bi", "a" (also accepts "i", "-i", "1+1i").
Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

/// Strict decimal parse (leading + allowed); `context` names the field in errors.
double parse_number(const std::string& s, const std::string& context);
/// Comma-separated numbers; empty text gives an empty list.
std::vector<double> parse_number_list(const std::string& text, const std::string& context);
std::string format_number_list(const std::vector<double>& v);

/// Round-trip decimal formatting of a double.
std::string format_double(double v);

}  // namespace sle
