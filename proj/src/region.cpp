#include "sle/region.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sle {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_number(const std::string& s, const std::string& context) {
    std::string t = trim(s);
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument("cannot parse number '" + s + "' in " + context);
    return v;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& context) {
    std::vector<double> v;
    if (trim(text).empty()) return v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) v.push_back(parse_number(part, context));
    return v;
}

std::string format_number_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_double(v[i]);
    }
    return out;
}

bool Region::contains(Complex z) const {
    return std::any_of(rects.begin(), rects.end(), [&](const Rect& r) { return r.contains(z); });
}

Rect Region::bounds() const {
    if (rects.empty()) throw std::invalid_argument("empty region");
    Rect b = rects.front();
    for (const Rect& r : rects) {
        b.xmin = std::min(b.xmin, r.xmin);
        b.xmax = std::max(b.xmax, r.xmax);
        b.ymin = std::min(b.ymin, r.ymin);
        b.ymax = std::max(b.ymax, r.ymax);
    }
    return b;
}

double Region::radius() const {
    double r = 0.0;
    for (const Rect& q : rects)
        for (double x : {q.xmin, q.xmax})
            for (double y : {q.ymin, q.ymax}) r = std::max(r, std::hypot(x, y));
    return r;
}

void Region::validate() const {
    if (rects.empty()) throw std::invalid_argument("region list is empty");
    for (const Rect& r : rects) {
        if (!(r.xmin < r.xmax) || !(r.ymin <= r.ymax))
            throw std::invalid_argument("degenerate rectangle " + format_region(Region{{r}}));
        if (r.ymin < 0.0) throw std::invalid_argument("rectangle extends below the real axis");
        if (!std::isfinite(r.xmin + r.xmax + r.ymin + r.ymax))
            throw std::invalid_argument("rectangle must be bounded");
    }
}

Region parse_region(const std::string& text) {
    Region reg;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::string t = trim(item);
        if (t.empty()) continue;
        if (t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
        std::vector<double> v;
        std::stringstream parts(t);
        std::string part;
        while (std::getline(parts, part, ',')) v.push_back(parse_number(part, "region"));
        if (v.size() != 4) throw std::invalid_argument("region rectangle needs 4 numbers: '" + item + "'");
        reg.rects.push_back({v[0], v[1], v[2], v[3]});
    }
    reg.validate();
    return reg;
}

std::string format_region(const Region& r) {
    std::string out;
    for (std::size_t i = 0; i < r.rects.size(); ++i) {
        const Rect& q = r.rects[i];
        if (i) out += ";";
        out += format_double(q.xmin) + "," + format_double(q.xmax) + "," + format_double(q.ymin) + "," +
               format_double(q.ymax);
    }
    return out;
}

Complex parse_complex(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw std::invalid_argument("empty complex number");
    if (t.back() != 'i' && t.back() != 'j') return {parse_number(t, "complex number"), 0.0};
    t.pop_back();
    // Split at the last sign that is not part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    std::string re_part = split == std::string::npos ? "" : t.substr(0, split);
    std::string im_part = split == std::string::npos ? t : t.substr(split);
    if (im_part.empty() || im_part == "+") im_part = "1";
    else if (im_part == "-") im_part = "-1";
    if (im_part.front() == '+') im_part = im_part.substr(1);
    const double re = re_part.empty() ? 0.0 : parse_number(re_part, "complex number");
    return {re, parse_number(im_part, "complex number")};
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

std::string format_complex(Complex z) {
    std::string im = format_double(z.imag());
    if (im.front() != '-') im = "+" + im;
    return format_double(z.real()) + im + "i";
}

}  // namespace sle
