#include "kakeyakit/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "kakeyakit/errors.hpp"

namespace kakeyakit {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);
    return buf;
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string fx(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x == 0.0 ? 0.0 : x);
    return buf;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw InvalidInput("csv table needs at least one column");
}

CsvTable& CsvTable::row(std::vector<std::string> fields) {
    if (fields.size() != header_.size()) throw InvalidInput("csv row width does not match the header");
    rows_.push_back(std::move(fields));
    return *this;
}

void CsvTable::write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << quote(fields[i]);
        os << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
}

std::string CsvTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

std::string figure_panel_svg(const FigurePanel& panel) {
    // Fixed view box so every panel shares one scale: [-3, 3]^2, y pointing up.
    const double view = 3.0;
    const double px = 100.0;
    auto X = [&](double x) { return fx((x + view) * px); };
    auto Y = [&](double y) { return fx((view - y) * px); };
    const double side = panel.square_side.value();
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
       << "<title>level " << panel.level << ", square side " << panel.square_side.num << '/'
       << panel.square_side.den << "</title>\n"
       << "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n"
       << "<rect x=\"" << X(-side / 2) << "\" y=\"" << Y(side / 2) << "\" width=\"" << fx(side * px)
       << "\" height=\"" << fx(side * px) << "\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1\"/>\n"
       << "<g stroke=\"black\" stroke-width=\"0.8\">\n";
    for (const auto& s : panel.segments) {
        const Vec a = s.endpoint_lo(), b = s.endpoint_hi();
        os << "<line x1=\"" << X(a[0]) << "\" y1=\"" << Y(a[1]) << "\" x2=\"" << X(b[0]) << "\" y2=\"" << Y(b[1])
           << "\"/>\n";
    }
    os << "</g>\n<g fill=\"#2060c0\">\n";
    for (const auto& m : panel.midpoints)
        os << "<circle cx=\"" << X(m[0]) << "\" cy=\"" << Y(m[1]) << "\" r=\"2\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

std::string raster_svg(const OccupancySet& occ, const std::string& title) {
    if (occ.dim() != 2) throw InvalidInput("raster figures are planar");
    const double view = 1.25;
    const double px = 240.0;
    auto X = [&](double x) { return fx((x + view) * px); };
    auto Y = [&](double y) { return fx((view - y) * px); };
    const double h = occ.mesh().delta;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
       << "<title>" << title << "</title>\n"
       << "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\"/>\n"
       << "<g fill=\"#404040\">\n";
    for (const auto& c : occ.cells()) {
        const Vec lo = occ.mesh().cell_lo(c);
        os << "<rect x=\"" << X(lo[0]) << "\" y=\"" << Y(lo[1] + h) << "\" width=\"" << fx(h * px) << "\" height=\""
           << fx(h * px) << "\"/>\n";
    }
    os << "</g>\n<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"" << fx(px)
       << "\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"1.5\"/>\n</svg>\n";
    return os.str();
}

}  // namespace kakeyakit
