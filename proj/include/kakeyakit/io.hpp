#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/cutmove.hpp"

namespace kakeyakit {

/// %.12g, with `inf`, `-inf` and `nan` spelled out.
std::string format_number(double x);

/// RFC 4180 table with LF line endings. Fields holding a comma, quote or
/// newline are quoted.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(std::vector<std::string> fields);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    void write(std::ostream& os) const;
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// SVG 1.1 panel: segments, midpoint dots and the bounding square of the panel.
/// Coordinates are printed with six decimals.
std::string figure_panel_svg(const FigurePanel& panel);

/// SVG 1.1 of a planar raster against the unit circle.
std::string raster_svg(const OccupancySet& occ, const std::string& title);

}  // namespace kakeyakit
