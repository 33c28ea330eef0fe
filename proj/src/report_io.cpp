#include "dflab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "dflab/error.hpp"

namespace dflab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string write_text(const std::filesystem::path& dir, const std::string& name,
                       const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  out << text;
  return name;
}

std::string write_json(const std::filesystem::path& dir, const std::string& name,
                       const nlohmann::json& j) {
  return write_text(dir, name, j.dump(2) + "\n");
}

}  // namespace dflab
