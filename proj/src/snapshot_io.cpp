#include "rvm/snapshot_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rvm {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  std::filesystem::path p = stem;
  p += ext;
  return p;
}

void put_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("read_field_snapshot: truncated data file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

}  // namespace

void write_field_snapshot(const FieldState& f, const std::filesystem::path& stem) {
  const Grid3& g = f.grid();
  {
    std::ofstream os(with_ext(stem, ".bin"), std::ios::binary);
    if (!os) throw std::runtime_error("write_field_snapshot: cannot open " + stem.string());
    for (int c = 0; c < 6; ++c)
      for (double v : f[static_cast<Component>(c)]) put_le(os, v);
  }
  nlohmann::ordered_json meta;
  meta["format"] = "rvm-field-snapshot";
  meta["dtype"] = "float64";
  meta["endianness"] = "little";
  meta["shape"] = {6, g.n(), g.n(), g.n()};
  meta["order"] = "component, i, j, k (k fastest)";
  meta["components"] = kComponentNames;
  meta["L"] = g.L();
  meta["n"] = g.n();
  meta["spacing"] = g.h();
  meta["origin"] = {g.lo(), g.lo(), g.lo()};
  meta["time"] = f.t;
  nlohmann::ordered_json off;
  for (int c = 0; c < 6; ++c) {
    const Vec3 o = stagger_offset(static_cast<Component>(c));
    off[kComponentNames[c]] = {o.x(), o.y(), o.z()};
  }
  meta["stagger_offsets_in_h"] = off;
  std::ofstream js(with_ext(stem, ".json"));
  js << meta.dump(2) << "\n";
}

FieldState read_field_snapshot(const std::filesystem::path& stem) {
  std::ifstream js(with_ext(stem, ".json"));
  if (!js) throw std::runtime_error("read_field_snapshot: missing sidecar for " + stem.string());
  const nlohmann::json meta = nlohmann::json::parse(js);
  if (meta.value("dtype", "") != "float64" || meta.value("endianness", "") != "little")
    throw std::runtime_error("read_field_snapshot: unsupported dtype or endianness");
  const Grid3 g(meta.at("L").get<double>(), meta.at("n").get<int>());
  FieldState f(g);
  f.t = meta.at("time").get<double>();
  std::ifstream is(with_ext(stem, ".bin"), std::ios::binary);
  if (!is) throw std::runtime_error("read_field_snapshot: missing data file for " + stem.string());
  for (int c = 0; c < 6; ++c)
    for (double& v : f[static_cast<Component>(c)]) v = get_le(is);
  return f;
}

}  // namespace rvm
