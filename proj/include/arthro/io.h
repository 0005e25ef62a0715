#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arthro/camera.h"
#include "arthro/metrics.h"
#include "arthro/trajectory.h"

namespace arthro {

/// TUM trajectory text: "timestamp tx ty tz qx qy qz qw" per line, '#'
/// comments. "# unit: mm|m" and "# frame: <id>" comments set the unit and frame
/// (otherwise `default_unit` and "world"). Quaternions are normalized on read;
/// a norm off by more than 1e-3 also appends a warning.
/// Throws Error(kParse) naming the line, Error(kOrder) on non-increasing time.
Trajectory parse_tum(std::string_view text, LengthUnit default_unit = LengthUnit::kMillimetre,
                     std::vector<std::string>* warnings = nullptr);

/// Canonical TUM text with unit and frame header; numbers use the shortest
/// representation that reads back to the same double.
std::string write_tum(const Trajectory& traj);

/// ASCII PLY with float/double x, y, z vertex properties (others ignored).
/// Coordinates are returned in millimetres; a "comment unit m" header line
/// marks metre files, otherwise `default_unit` applies.
/// Throws Error(kFormat) on a bad header, Error(kTruncation) when the body
/// holds fewer vertices than declared.
PointCloud parse_ply(std::string_view bytes, LengthUnit default_unit = LengthUnit::kMillimetre);

std::string write_ply(const PointCloud& cloud, LengthUnit unit = LengthUnit::kMillimetre);

/// Binary PGM (P5) or PPM (P6) with maxval 255. Throws Error(kFormat) for
/// anything else and Error(kTruncation) for short pixel data.
Image parse_image(std::string_view bytes);

std::string write_image(const Image& img);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace arthro
