#include <string>

#include "arthro/error.h"
#include "arthro/io.h"
#include "text.h"

namespace arthro {
namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = detail::trim(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

bool is_float_type(std::string_view t) {
  return t == "float" || t == "double" || t == "float32" || t == "float64";
}

bool is_scalar_type(std::string_view t) {
  return is_float_type(t) || t == "char" || t == "uchar" || t == "short" || t == "ushort" || t == "int" ||
         t == "uint" || t == "int8" || t == "uint8" || t == "int16" || t == "uint16" || t == "int32" ||
         t == "uint32";
}

Error format_error(const std::string& msg, std::size_t line) {
  return Error(ErrorCategory::kFormat, msg, {{"line", std::to_string(line)}});
}

}  // namespace

PointCloud parse_ply(std::string_view bytes, LengthUnit default_unit) {
  LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || line != "ply") throw format_error("missing 'ply' magic", 1);

  LengthUnit unit = default_unit;
  PointCloud cloud;
  bool ascii = false;
  bool in_vertex = false;
  bool vertex_seen = false;
  bool vertex_last = false;
  std::size_t count = 0;
  std::size_t n_props = 0;
  int ix = -1, iy = -1, iz = -1;
  bool ended = false;
  while (reader.next(line)) {
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") {
      ended = true;
      break;
    }
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii") throw format_error("only ASCII PLY is supported", reader.line_no());
      ascii = true;
    } else if (tok[0] == "comment") {
      if (tok.size() >= 3 && tok[1] == "unit") {
        try {
          unit = parse_unit(tok[2]);
        } catch (const Error&) {
          throw format_error("unknown unit comment", reader.line_no());
        }
      } else if (tok.size() >= 3 && tok[1] == "frame") {
        cloud.frame_id = std::string(tok[2]);
      }
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw format_error("malformed element line", reader.line_no());
      in_vertex = tok[1] == "vertex";
      vertex_last = in_vertex;
      if (in_vertex) {
        if (vertex_seen) throw format_error("duplicate vertex element", reader.line_no());
        if (!detail::parse_size(tok[2], count)) throw format_error("bad vertex count", reader.line_no());
        vertex_seen = true;
      } else if (!vertex_seen) {
        throw format_error("vertex element must come first", reader.line_no());
      }
    } else if (tok[0] == "property") {
      if (!in_vertex) continue;
      if (tok.size() == 5 && tok[1] == "list") throw format_error("list properties on vertices", reader.line_no());
      if (tok.size() != 3 || !is_scalar_type(tok[1])) throw format_error("malformed property", reader.line_no());
      const int idx = static_cast<int>(n_props++);
      if (tok[2] == "x" || tok[2] == "y" || tok[2] == "z") {
        if (!is_float_type(tok[1])) throw format_error("coordinates must be float or double", reader.line_no());
        (tok[2] == "x" ? ix : tok[2] == "y" ? iy : iz) = idx;
      }
    } else if (tok[0] != "obj_info") {
      throw format_error("unknown header keyword '" + std::string(tok[0]) + "'", reader.line_no());
    }
  }
  if (!ended) throw format_error("missing end_header", reader.line_no());
  if (!ascii) throw format_error("missing format line", reader.line_no());
  if (!vertex_seen || ix < 0 || iy < 0 || iz < 0) throw format_error("vertex x/y/z properties missing", reader.line_no());

  const double k = to_millimetres(unit);
  cloud.points.reserve(count);
  while (cloud.points.size() < count) {
    if (!reader.next(line)) {
      throw Error(ErrorCategory::kTruncation, "fewer vertices than the header declares",
                  {{"declared", std::to_string(count)}, {"found", std::to_string(cloud.points.size())}});
    }
    if (line.empty()) continue;
    const auto tok = detail::split_ws(line);
    double v[3];
    bool ok = tok.size() == n_props;
    const int idx[3] = {ix, iy, iz};
    for (int a = 0; ok && a < 3; ++a) ok = detail::parse_double(tok[idx[a]], v[a]);
    if (!ok) throw Error(ErrorCategory::kParse, "malformed vertex row", {{"line", std::to_string(reader.line_no())}});
    cloud.points.emplace_back(k * v[0], k * v[1], k * v[2]);
  }
  if (vertex_last) {
    while (reader.next(line)) {
      if (!line.empty()) {
        throw Error(ErrorCategory::kTruncation, "more vertex rows than the header declares",
                    {{"declared", std::to_string(count)}, {"line", std::to_string(reader.line_no())}});
      }
    }
  }
  return cloud;
}

std::string write_ply(const PointCloud& cloud, LengthUnit unit) {
  std::string out = "ply\nformat ascii 1.0\ncomment unit " + std::string(unit_name(unit)) + "\n";
  if (!cloud.frame_id.empty()) out += "comment frame " + cloud.frame_id + "\n";
  out += "element vertex " + std::to_string(cloud.points.size()) +
         "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  const double k = 1.0 / to_millimetres(unit);
  for (const auto& p : cloud.points) {
    out += detail::format_double(unit == LengthUnit::kMillimetre ? p.x() : k * p.x());
    out += ' ';
    out += detail::format_double(unit == LengthUnit::kMillimetre ? p.y() : k * p.y());
    out += ' ';
    out += detail::format_double(unit == LengthUnit::kMillimetre ? p.z() : k * p.z());
    out += '\n';
  }
  return out;
}

}  // namespace arthro
