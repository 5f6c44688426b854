#include "minkvox/report.hpp"

#include <fmt/format.h>

namespace minkvox {

using nlohmann::json;

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

json to_json(const SymTensor3& t) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({t(i, 0), t(i, 1), t(i, 2)});
  return rows;
}

json to_json(const MinkowskiSummary& s) {
  json out;
  out["volume"] = s.volume;
  out["surface"] = s.surface;
  out["W"] = to_json(s.w);
  out["qnt"] = s.qnt ? to_json(*s.qnt) : json(nullptr);
  out["beta"] = s.beta ? json(*s.beta) : json(nullptr);
  out["degenerate"] = s.degenerate;
  if (s.degenerate) out["warning"] = "image has no interface; QNT and beta are undefined";
  json meta;
  meta["dims"] = {s.dims.nx, s.dims.ny, s.dims.nz};
  meta["spacing_um"] = s.spacing;
  meta["depth"] = s.depth.is_continuous() ? json("continuous") : json(s.depth.p());
  meta["kernel"] = s.settings.kernel.name();
  meta["sigma"] = s.settings.kernel.sigma();
  meta["scheme"] = to_string(s.settings.scheme);
  meta["eps_rel"] = s.settings.eps_rel;
  out["metadata"] = meta;
  return out;
}

std::string summary_csv_header() {
  return "nx,ny,nz,spacing_um,depth,kernel,sigma,scheme,eps_rel,volume,surface,"
         "W_xx,W_yy,W_zz,W_xy,W_xz,W_yz,QNT_xx,QNT_yy,QNT_zz,QNT_xy,QNT_xz,QNT_yz,beta,degenerate";
}

std::string summary_csv_row(const MinkowskiSummary& s) {
  std::string row = fmt::format("{},{},{},{},{},{},{},{},{},{},{}", s.dims.nx, s.dims.ny, s.dims.nz,
                                format_number(s.spacing), s.depth.to_string(), s.settings.kernel.name(),
                                format_number(s.settings.kernel.sigma()), to_string(s.settings.scheme),
                                format_number(s.settings.eps_rel), format_number(s.volume),
                                format_number(s.surface));
  for (double c : s.w.components()) row += "," + format_number(c);
  for (int i = 0; i < 6; ++i) row += "," + (s.qnt ? format_number(s.qnt->components()[i]) : std::string());
  row += "," + (s.beta ? format_number(*s.beta) : std::string());
  row += s.degenerate ? ",true" : ",false";
  return row;
}

json to_json(const OrientationResult& r, const SymTensor3* reference) {
  json out;
  out["A"] = to_json(r.a);
  const Eigensystem es = eigen(r.a);
  out["eigenvalues"] = {es.values[0], es.values[1], es.values[2]};
  out["masked_voxels"] = r.masked_voxels;
  if (reference) out["E_A"] = orientation_error(r.a, *reference);
  json meta;
  meta["kernel"] = r.settings.first.name();
  meta["sigma"] = r.settings.first.sigma();
  meta["second_kernel"] = r.settings.second.name();
  meta["mu"] = r.settings.second.sigma();
  meta["scheme"] = to_string(r.settings.scheme);
  meta["mask_rel"] = r.settings.mask_rel;
  out["metadata"] = meta;
  return out;
}

}  // namespace minkvox
