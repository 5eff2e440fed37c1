#include "svg.hpp"

#include <cmath>
#include <cstdio>

namespace divprof::detail {

std::string svg_num(double v) {
    if (!std::isfinite(v)) v = 0.0;
    if (v == 0.0) v = 0.0; // collapse negative zero
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

SvgDoc::SvgDoc(double width, double height) : width_(width), height_(height) {}

void SvgDoc::rect(double x, double y, double w, double h, const std::string& fill,
                  double opacity) {
    body_ += "<rect x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" width=\"" + svg_num(w) +
             "\" height=\"" + svg_num(h) + "\" fill=\"" + fill + "\"";
    if (opacity != 1.0) body_ += " fill-opacity=\"" + svg_num(opacity) + "\"";
    body_ += "/>\n";
}

void SvgDoc::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double stroke_width) {
    body_ += "<line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" + svg_num(x2) +
             "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             svg_num(stroke_width) + "\"/>\n";
}

void SvgDoc::polyline(const std::vector<std::pair<double, double>>& points,
                      const std::string& stroke, double stroke_width) {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             svg_num(stroke_width) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_.push_back(' ');
        body_ += svg_num(points[i].first) + "," + svg_num(points[i].second);
    }
    body_ += "\"/>\n";
}

void SvgDoc::polygon(const std::vector<std::pair<double, double>>& points, const std::string& fill,
                     double opacity) {
    body_ += "<polygon fill=\"" + fill + "\"";
    if (opacity != 1.0) body_ += " fill-opacity=\"" + svg_num(opacity) + "\"";
    body_ += " points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_.push_back(' ');
        body_ += svg_num(points[i].first) + "," + svg_num(points[i].second);
    }
    body_ += "\"/>\n";
}

void SvgDoc::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + svg_num(cx) + "\" cy=\"" + svg_num(cy) + "\" r=\"" + svg_num(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgDoc::text(double x, double y, const std::string& content, double font_size,
                  const std::string& anchor, const std::string& fill) {
    body_ += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" font-size=\"" +
             svg_num(font_size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
             "\" fill=\"" + fill + "\">" + xml_escape(content) + "</text>\n";
}

std::string SvgDoc::str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_num(width_) +
           "\" height=\"" + svg_num(height_) + "\" viewBox=\"0 0 " + svg_num(width_) + " " +
           svg_num(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + svg_num(width_) + "\" height=\"" + svg_num(height_) +
           "\" fill=\"#ffffff\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
}

} // namespace divprof::detail
