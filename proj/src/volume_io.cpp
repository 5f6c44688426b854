#include "minkvox/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "minkvox/error.hpp"

namespace minkvox {

namespace {

using nlohmann::json;

double max_code(SampleType type) {
  switch (type) {
    case SampleType::U8: return 255.0;
    case SampleType::U16: return 65535.0;
    case SampleType::F32: break;
  }
  return 1.0;
}

double snap_tolerance(SampleType type) {
  return type == SampleType::F32 ? 1e-6 : 0.5 / max_code(type);
}

// Nearest value of the depth-p palette or sub-voxel fraction lattice.
double snap_to_depth(double v, int p) {
  const double levels = static_cast<double>(color_levels(p));
  const double cube = static_cast<double>(p) * p * p;
  const double a = std::round(v * levels) / levels;
  const double b = std::round(v * cube) / cube;
  return std::abs(v - a) <= std::abs(v - b) ? a : b;
}

double decode(SampleType type, const unsigned char* bytes) {
  switch (type) {
    case SampleType::U8: return static_cast<double>(bytes[0]) / 255.0;
    case SampleType::U16: {
      const auto s = static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
      return static_cast<double>(s) / 65535.0;
    }
    case SampleType::F32: {
      std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
                           (static_cast<std::uint32_t>(bytes[2]) << 16) |
                           (static_cast<std::uint32_t>(bytes[3]) << 24);
      return static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return 0.0;
}

void encode(SampleType type, double v, unsigned char* bytes) {
  switch (type) {
    case SampleType::U8: bytes[0] = static_cast<unsigned char>(std::lround(v * 255.0)); return;
    case SampleType::U16: {
      const auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      bytes[0] = static_cast<unsigned char>(s & 0xff);
      bytes[1] = static_cast<unsigned char>(s >> 8);
      return;
    }
    case SampleType::F32: {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int k = 0; k < 4; ++k) bytes[k] = static_cast<unsigned char>((bits >> (8 * k)) & 0xff);
      return;
    }
  }
}

double round_trip(SampleType type, double v, const Depth& depth) {
  unsigned char buf[4];
  encode(type, v, buf);
  const double back = decode(type, buf);
  return depth.is_continuous() ? back : snap_to_depth(back, depth.p());
}

template <class T>
T required(const json& doc, const char* key, const std::filesystem::path& where) {
  if (!doc.contains(key)) throw FormatError(fmt::format("{}: missing key '{}'", where.string(), key));
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(fmt::format("{}: key '{}' has the wrong type", where.string(), key));
  }
}

}  // namespace

std::string to_string(SampleType type) {
  switch (type) {
    case SampleType::U8: return "u8";
    case SampleType::U16: return "u16";
    case SampleType::F32: break;
  }
  return "f32";
}

SampleType sample_type_from_name(const std::string& name) {
  if (name == "u8") return SampleType::U8;
  if (name == "u16") return SampleType::U16;
  if (name == "f32") return SampleType::F32;
  throw FormatError(fmt::format("unknown dtype '{}' (expected u8, u16 or f32)", name));
}

std::size_t sample_bytes(SampleType type) {
  switch (type) {
    case SampleType::U8: return 1;
    case SampleType::U16: return 2;
    case SampleType::F32: break;
  }
  return 4;
}

VolumePaths volume_paths(const std::filesystem::path& path) {
  std::filesystem::path stem = path;
  if (path.extension() == ".json" || path.extension() == ".raw") stem.replace_extension();
  std::filesystem::path sidecar = stem, payload = stem;
  sidecar += ".json";
  payload += ".raw";
  return {sidecar, payload};
}

SampleType lossless_sample_type(const VoxelGrid& grid) {
  for (SampleType type : {SampleType::U8, SampleType::U16}) {
    bool exact = true;
    for (double v : grid.values())
      if (round_trip(type, v, grid.depth()) != v) {
        exact = false;
        break;
      }
    if (exact) return type;
  }
  return SampleType::F32;
}

void store_volume(const VoxelGrid& grid, const std::filesystem::path& path, std::optional<SampleType> type) {
  const SampleType dtype = type.value_or(lossless_sample_type(grid));
  const VolumePaths paths = volume_paths(path);
  const Dims& d = grid.dims();

  json sidecar;
  sidecar["dims"] = {d.nx, d.ny, d.nz};
  sidecar["spacing_um"] = grid.spacing();
  if (grid.depth().is_continuous())
    sidecar["depth"] = "continuous";
  else
    sidecar["depth"] = grid.depth().p();
  sidecar["dtype"] = to_string(dtype);
  sidecar["order"] = "x-fastest";

  std::ofstream meta(paths.sidecar);
  if (!meta) throw FormatError(fmt::format("cannot write {}", paths.sidecar.string()));
  meta << sidecar.dump(2) << '\n';

  const std::size_t bytes = sample_bytes(dtype);
  std::vector<unsigned char> payload(grid.count() * bytes);
  const auto values = grid.values();
  for (std::size_t i = 0; i < values.size(); ++i) encode(dtype, values[i], payload.data() + i * bytes);
  std::ofstream raw(paths.payload, std::ios::binary);
  if (!raw) throw FormatError(fmt::format("cannot write {}", paths.payload.string()));
  raw.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!raw) throw FormatError(fmt::format("failed writing {}", paths.payload.string()));
}

VoxelGrid load_volume(const std::filesystem::path& path) {
  const VolumePaths paths = volume_paths(path);
  std::ifstream meta(paths.sidecar);
  if (!meta) throw FormatError(fmt::format("cannot open sidecar {}", paths.sidecar.string()));
  json doc;
  try {
    doc = json::parse(meta);
  } catch (const json::parse_error& e) {
    throw FormatError(fmt::format("{}: malformed JSON at byte {}", paths.sidecar.string(), e.byte));
  }
  if (!doc.is_object()) throw FormatError(fmt::format("{}: sidecar must be a JSON object", paths.sidecar.string()));

  const auto dims = required<std::vector<long long>>(doc, "dims", paths.sidecar);
  if (dims.size() != 3 || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
    throw FormatError(fmt::format("{}: key 'dims' must hold three positive integers", paths.sidecar.string()));
  const auto spacing = required<double>(doc, "spacing_um", paths.sidecar);
  if (!(spacing > 0.0))
    throw FormatError(fmt::format("{}: key 'spacing_um' must be positive", paths.sidecar.string()));
  const auto dtype_name = required<std::string>(doc, "dtype", paths.sidecar);
  SampleType dtype;
  try {
    dtype = sample_type_from_name(dtype_name);
  } catch (const FormatError&) {
    throw FormatError(fmt::format("{}: key 'dtype' has unknown value '{}'", paths.sidecar.string(), dtype_name));
  }
  if (doc.contains("order") && doc["order"] != "x-fastest")
    throw FormatError(fmt::format("{}: key 'order' must be \"x-fastest\"", paths.sidecar.string()));

  Depth depth = Depth::continuous();
  if (!doc.contains("depth")) throw FormatError(fmt::format("{}: missing key 'depth'", paths.sidecar.string()));
  const json& dj = doc["depth"];
  if (dj.is_number_integer() && dj.get<long long>() >= 1)
    depth = Depth::levels(static_cast<int>(dj.get<long long>()));
  else if (!(dj.is_string() && dj.get<std::string>() == "continuous"))
    throw FormatError(fmt::format("{}: key 'depth' must be a positive integer or \"continuous\"",
                                  paths.sidecar.string()));

  const Dims grid_dims{static_cast<std::size_t>(dims[0]), static_cast<std::size_t>(dims[1]),
                       static_cast<std::size_t>(dims[2])};
  const std::size_t bytes = sample_bytes(dtype);
  const std::size_t expected = grid_dims.count() * bytes;

  std::ifstream raw(paths.payload, std::ios::binary | std::ios::ate);
  if (!raw) throw FormatError(fmt::format("cannot open payload {}", paths.payload.string()));
  const auto actual = static_cast<std::size_t>(raw.tellg());
  if (actual != expected)
    throw FormatError(fmt::format("{}: payload has {} bytes, expected {} ({}x{}x{} {} samples)",
                                  paths.payload.string(), actual, expected, grid_dims.nx, grid_dims.ny,
                                  grid_dims.nz, dtype_name));
  raw.seekg(0);
  std::vector<unsigned char> payload(expected);
  raw.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(expected));
  if (!raw) throw FormatError(fmt::format("failed reading {}", paths.payload.string()));

  std::vector<double> values(grid_dims.count());
  const double tol = snap_tolerance(dtype);
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = decode(dtype, payload.data() + i * bytes);
    if (!(v >= -tol && v <= 1.0 + tol))
      throw FormatError(fmt::format("{}: sample {} at byte offset {} is outside [0, 1]", paths.payload.string(),
                                    v, i * bytes));
    if (!depth.is_continuous()) {
      const double snapped = snap_to_depth(v, depth.p());
      if (std::abs(snapped - v) > tol)
        throw FormatError(fmt::format("{}: sample {} at byte offset {} is not a depth-{} gray value",
                                      paths.payload.string(), v, i * bytes, depth.p()));
      v = snapped;
    }
    values[i] = std::clamp(v, 0.0, 1.0);
  }
  try {
    return VoxelGrid(Geometry(grid_dims, spacing), std::move(values), depth);
  } catch (const InvalidArgument& e) {
    throw FormatError(fmt::format("{}: {}", paths.sidecar.string(), e.what()));
  }
}

}  // namespace minkvox
