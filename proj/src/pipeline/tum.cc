#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "arthro/error.h"
#include "arthro/io.h"
#include "text.h"

namespace arthro {

Trajectory parse_tum(std::string_view text, LengthUnit default_unit, std::vector<std::string>* warnings) {
  LengthUnit unit = default_unit;
  std::string frame = "world";
  std::vector<TimedPose> samples;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = detail::trim(line.substr(1));
      if (body.starts_with("unit:")) {
        try {
          unit = parse_unit(detail::trim(body.substr(5)));
        } catch (const Error&) {
          throw Error(ErrorCategory::kParse, "unknown unit in header", {{"line", std::to_string(line_no)}});
        }
      } else if (body.starts_with("frame:")) {
        frame = std::string(detail::trim(body.substr(6)));
      }
      continue;
    }
    const auto tok = detail::split_ws(line);
    double v[8];
    bool ok = tok.size() == 8;
    for (std::size_t i = 0; ok && i < 8; ++i) ok = detail::parse_double(tok[i], v[i]);
    if (!ok) {
      throw Error(ErrorCategory::kParse, "expected 'timestamp tx ty tz qx qy qz qw'",
                  {{"line", std::to_string(line_no)}});
    }
    const double norm = std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
    if (norm < 1e-12) {
      throw Error(ErrorCategory::kParse, "zero quaternion", {{"line", std::to_string(line_no)}});
    }
    if (std::abs(norm - 1.0) > 1e-3 && warnings) {
      warnings->push_back("line " + std::to_string(line_no) + ": quaternion norm " + detail::format_double(norm) +
                          " normalized");
    }
    if (!samples.empty() && v[0] <= samples.back().timestamp) {
      throw Error(ErrorCategory::kOrder, "timestamps must be strictly increasing",
                  {{"line", std::to_string(line_no)}});
    }
    samples.push_back({v[0], {Rotation::from_wxyz(v[7], v[4], v[5], v[6]), Vec3(v[1], v[2], v[3])}});
  }
  return Trajectory(std::move(samples), frame, unit);
}

std::string write_tum(const Trajectory& traj) {
  std::string out = "# unit: " + std::string(unit_name(traj.unit())) + "\n# frame: " + traj.frame_id() +
                    "\n# timestamp tx ty tz qx qy qz qw\n";
  for (const auto& s : traj.samples()) {
    const auto& q = s.pose.rotation.quaternion();
    const Vec3& t = s.pose.translation;
    for (const double v : {s.timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z()}) {
      out += detail::format_double(v);
      out += ' ';
    }
    out += detail::format_double(q.w());
    out += '\n';
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open file for reading", {{"path", path}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot open file for writing", {{"path", path}});
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCategory::kIo, "write failed", {{"path", path}});
}

}  // namespace arthro
