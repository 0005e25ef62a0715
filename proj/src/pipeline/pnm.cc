#include <cctype>
#include <string>

#include "arthro/error.h"
#include "arthro/io.h"
#include "text.h"

namespace arthro {
namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string_view header_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#') ++pos;
  return bytes.substr(start, pos - start);
}

int header_int(std::string_view bytes, std::size_t& pos, const char* what) {
  const auto tok = header_token(bytes, pos);
  std::size_t v = 0;
  if (tok.empty() || !detail::parse_size(tok, v) || v == 0 || v > (1u << 20)) {
    throw Error(ErrorCategory::kFormat, std::string("bad image ") + what, {{"token", std::string(tok)}});
  }
  return static_cast<int>(v);
}

}  // namespace

Image parse_image(std::string_view bytes) {
  std::size_t pos = 0;
  const auto magic = header_token(bytes, pos);
  Image img;
  if (magic == "P5") {
    img.channels = 1;
  } else if (magic == "P6") {
    img.channels = 3;
  } else {
    throw Error(ErrorCategory::kFormat, "unsupported image magic (expected P5 or P6)", {{"magic", std::string(magic)}});
  }
  img.width = header_int(bytes, pos, "width");
  img.height = header_int(bytes, pos, "height");
  const int maxval = header_int(bytes, pos, "maxval");
  if (maxval != 255) {
    throw Error(ErrorCategory::kFormat, "only maxval 255 is supported", {{"maxval", std::to_string(maxval)}});
  }
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw Error(ErrorCategory::kFormat, "missing whitespace after image header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
  if (bytes.size() - pos < n) {
    throw Error(ErrorCategory::kTruncation, "pixel data shorter than the header declares",
                {{"declared", std::to_string(n)}, {"found", std::to_string(bytes.size() - pos)}});
  }
  img.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

std::string write_image(const Image& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCategory::kInput, "images must have 1 or 3 channels");
  }
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw Error(ErrorCategory::kInput, "image data size does not match its dimensions");
  }
  std::string out = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                    std::to_string(img.height) + "\n255\n";
  out.append(img.data.begin(), img.data.end());
  return out;
}

}  // namespace arthro
