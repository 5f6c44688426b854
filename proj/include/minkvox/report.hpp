#pragma once

#include <string>

#include <json.hpp>

#include "minkvox/fiberorient.hpp"
#include "minkvox/minkowski.hpp"

namespace minkvox {

/// Fixed 17-significant-digit rendering used by every CSV writer.
std::string format_number(double value);

nlohmann::json to_json(const SymTensor3& t);

/// Analysis report:
///   {"volume", "surface", "W": 3x3, "qnt": 3x3 | null, "beta": number | null,
///    "degenerate": bool, "warning": string (only when degenerate),
///    "metadata": {"dims", "spacing_um", "depth", "kernel", "sigma", "scheme", "eps_rel"}}
nlohmann::json to_json(const MinkowskiSummary& summary);

/// Column order of the CSV analysis report.
std::string summary_csv_header();
std::string summary_csv_row(const MinkowskiSummary& summary);

/// {"A": 3x3, "eigenvalues": [...], "masked_voxels", "E_A" (when a reference is given),
///  "metadata": {"kernel", "sigma", "second_kernel", "mu", "scheme", "mask_rel"}}
nlohmann::json to_json(const OrientationResult& result, const SymTensor3* reference = nullptr);

}  // namespace minkvox
