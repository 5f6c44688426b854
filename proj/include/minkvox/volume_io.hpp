#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "minkvox/voxelgrid.hpp"

namespace minkvox {

/// On-disk volume: a JSON sidecar `<stem>.json`
///   {"dims": [nx, ny, nz], "spacing_um": h, "depth": p | "continuous",
///    "dtype": "u8" | "u16" | "f32", "order": "x-fastest"}
/// next to a raw little-endian payload `<stem>.raw` of nx*ny*nz samples.
/// Integer samples s map to s / (2^bits - 1).
enum class SampleType { U8, U16, F32 };

std::string to_string(SampleType type);
SampleType sample_type_from_name(const std::string& name);
std::size_t sample_bytes(SampleType type);

struct VolumePaths {
  std::filesystem::path sidecar;
  std::filesystem::path payload;
};

/// Accepts the stem or either file of the pair.
VolumePaths volume_paths(const std::filesystem::path& path);

/// Smallest sample type that stores every value of `grid` without loss
/// (after snapping back to the depth palette for finite depths).
SampleType lossless_sample_type(const VoxelGrid& grid);

void store_volume(const VoxelGrid& grid, const std::filesystem::path& path,
                  std::optional<SampleType> type = std::nullopt);

/// Loads a volume. For a finite depth p every sample is snapped to the
/// nearest depth-p gray value; a sample farther away than the storage
/// resolution is a FormatError.
VoxelGrid load_volume(const std::filesystem::path& path);

}  // namespace minkvox
