#pragma once

#include <string>
#include <vector>

namespace divprof::detail {

// Minimal SVG builder. All numbers are written with fixed two-decimal
// formatting so identical inputs produce byte-identical documents.
class SvgDoc {
public:
    SvgDoc(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              double opacity = 1.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double stroke_width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                  double stroke_width = 1.0);
    // closed filled polygon
    void polygon(const std::vector<std::pair<double, double>>& points, const std::string& fill,
                 double opacity = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void text(double x, double y, const std::string& content, double font_size,
              const std::string& anchor = "start", const std::string& fill = "#333333");

    std::string str() const;

private:
    double width_;
    double height_;
    std::string body_;
};

std::string svg_num(double v);
std::string xml_escape(const std::string& s);

} // namespace divprof::detail
