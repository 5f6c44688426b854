#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "minkvox/analytic.hpp"
#include "minkvox/convergence.hpp"
#include "minkvox/error.hpp"
#include "minkvox/fiberorient.hpp"
#include "minkvox/minkowski.hpp"
#include "minkvox/report.hpp"
#include "minkvox/volume_io.hpp"

namespace minkvox::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InvalidArgument(fmt::format("'{}' is not a number", s));
  return v;
}

std::vector<double> number_list(const std::string& text, const char* what) {
  std::vector<double> values;
  for (const std::string& part : split(text, ',')) values.push_back(to_double(part));
  if (values.empty()) throw InvalidArgument(fmt::format("{} list is empty", what));
  return values;
}

Vec3 parse_vec3(const std::string& text, const char* what) {
  const std::vector<double> v = number_list(text, what);
  if (v.size() != 3) throw InvalidArgument(fmt::format("{} needs three comma-separated numbers", what));
  return {v[0], v[1], v[2]};
}

Dims parse_dims(const std::string& text) {
  const std::vector<double> v = number_list(text, "dims");
  if (v.size() != 1 && v.size() != 3) throw InvalidArgument("--dims takes n or nx,ny,nz");
  std::size_t n[3];
  for (int a = 0; a < 3; ++a) {
    const double x = v.size() == 1 ? v[0] : v[a];
    if (!(x >= 1.0) || x != std::floor(x)) throw InvalidArgument(fmt::format("invalid grid size {}", x));
    n[a] = static_cast<std::size_t>(x);
  }
  return {n[0], n[1], n[2]};
}

// "none", "ball:1.2", "gaussian:2"
Kernel parse_kernel_token(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) {
    if (token != "none") throw InvalidArgument(fmt::format("kernel '{}' needs a width, e.g. {}:1.2", token, token));
    return Kernel::none();
  }
  return Kernel::from_name(token.substr(0, colon), to_double(token.substr(colon + 1)));
}

SymTensor3 parse_reference(const std::string& text) {
  const std::vector<double> v = number_list(text, "reference");
  if (v.size() == 6) return {v[0], v[1], v[2], v[3], v[4], v[5]};
  if (v.size() == 9) {
    for (auto [i, j] : {std::pair{1, 3}, std::pair{2, 6}, std::pair{5, 7}})
      if (std::abs(v[i] - v[j]) > 1e-12 * std::max(1.0, std::abs(v[i])))
        throw InvalidArgument("reference tensor must be symmetric");
    return {v[0], v[4], v[8], v[1], v[2], v[5]};
  }
  throw InvalidArgument("reference takes 6 (xx,yy,zz,xy,xz,yz) or 9 (row-major) numbers");
}

int resolve_depth(std::optional<int> depth) {
  const int p = depth.value_or(1);
  if (p < 1) throw InvalidArgument(fmt::format("depth must be >= 1, got {}", p));
  return p;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError(fmt::format("cannot open '{}' for writing", path));
  file << text;
  if (!file) throw FormatError(fmt::format("write to '{}' failed", path));
}

json tensor_reference(double volume, double surface, const SymTensor3& w, const SymTensor3& q) {
  return {{"volume", volume}, {"surface", surface}, {"W", to_json(w)}, {"qnt", to_json(q)}};
}

// Interface area of periodic slabs: planes shared by two slabs cancel.
double laminate_area(const Laminate& lam, const Geometry& geo) {
  const Vec3 ext = geo.extent();
  const double period = ext[lam.axis];
  std::multiset<double> planes;
  auto wrap = [&](double x) {
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    return std::abs(r - period) < 1e-12 * period ? 0.0 : r;
  };
  for (const auto& s : lam.slabs) {
    planes.insert(wrap(s[0]));
    planes.insert(wrap(s[1]));
  }
  double count = 0;
  for (auto it = planes.begin(); it != planes.end(); it = planes.upper_bound(*it))
    if (planes.count(*it) % 2 == 1) count += 1;
  const int u = (lam.axis + 1) % 3, v = (lam.axis + 2) % 3;
  return count * ext[u] * ext[v];
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string shape;
  std::string out;
  std::string dims = "24";
  double spacing = 1.0;
  int depth = 1;
  std::string dtype;
  double diameter = 16.0;
  double length = 0.0;
  std::string center;
  std::string axis = "1,0,0";
  int axis_index = 0;
  std::string slabs;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::vector<std::string> fiber_axes;
  double gap = 2.0;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const int p = resolve_depth(a.depth);
  Dims dims = parse_dims(a.dims);
  Shape shape;
  json reference;
  const double pi = std::numbers::pi;

  auto center_or_default = [&](const Geometry& geo) {
    return a.center.empty() ? Vec3(0.5 * geo.extent()) : parse_vec3(a.center, "--center");
  };

  if (a.shape == "ball") {
    const Geometry geo(dims, a.spacing);
    const double r = 0.5 * a.diameter;
    shape = Shape{Ball{center_or_default(geo), r}};
    const BallQuantities q = ball_quantities(r);
    reference = tensor_reference(q.volume, q.surface, q.w, q.qnt);
  } else if (a.shape == "cylinder") {
    const Geometry geo(dims, a.spacing);
    const FiberSpec f{parse_vec3(a.axis, "--axis").normalized(), a.length, a.diameter};
    validate(f);
    shape = Shape{Cylinder{center_or_default(geo), f.axis, f.length, f.diameter}};
    const double r = 0.5 * f.diameter;
    reference = tensor_reference(pi * r * r * f.length, 2 * pi * r * r + 2 * pi * r * f.length, cylinder_w(f),
                                 fiber_qnt(f));
  } else if (a.shape == "laminate") {
    const Geometry geo(dims, a.spacing);
    Laminate lam{a.axis_index, {}};
    for (const std::string& s : split(a.slabs, ',')) {
      const auto colon = s.find(':');
      if (colon == std::string::npos) throw InvalidArgument(fmt::format("slab '{}' must be lo:hi", s));
      lam.slabs.push_back({to_double(s.substr(0, colon)), to_double(s.substr(colon + 1))});
    }
    shape = Shape{lam};
    validate(shape);
    const double area = laminate_area(lam, geo);
    const SymTensor3 n = SymTensor3::outer(Vec3::Unit(lam.axis));
    reference = {{"surface", area}, {"W", to_json(n * (area / 3.0))}, {"qnt", to_json(n)}};
  } else if (a.shape == "parallel-fibers" || a.shape == "fiber-array") {
    std::vector<Cylinder> fibers;
    if (a.shape == "parallel-fibers") {
      fibers = parallel_fiber_array(Geometry(dims, a.spacing), a.axis_index, a.length, a.diameter, a.rows, a.cols);
    } else {
      if (a.fiber_axes.empty()) throw InvalidArgument("fiber-array needs at least one --fiber-axis");
      std::vector<Vec3> axes;
      for (const std::string& s : a.fiber_axes) axes.push_back(parse_vec3(s, "--fiber-axis"));
      for (const Vec3& v : axes)
        if (!(v.norm() > 0.0)) throw InvalidArgument("fiber axis must be nonzero");
      CellPlacement placement = cell_fiber_placement(axes, a.length, a.diameter, a.spacing, a.gap);
      fibers = std::move(placement.fibers);
      dims = placement.dims;
    }
    std::vector<FiberSpec> specs;
    for (const Cylinder& c : fibers) specs.push_back(fiber_spec(c));
    const FiberSystemTensors t = fiber_system_tensors(specs);
    const double r = 0.5 * a.diameter;
    const double n = static_cast<double>(specs.size());
    reference = tensor_reference(n * pi * r * r * a.length, n * (2 * pi * r * r + 2 * pi * r * a.length), t.w, t.qnt);
    reference["A"] = to_json(t.a);
    reference["fibers"] = specs.size();
    shape = make_union(fibers);
  } else {
    throw InvalidArgument(fmt::format(
        "unknown shape '{}' (expected ball, cylinder, laminate, parallel-fibers or fiber-array)", a.shape));
  }

  const VoxelGrid grid = voxelize(shape, dims, a.spacing, p);
  std::optional<SampleType> dtype;
  if (!a.dtype.empty()) dtype = sample_type_from_name(a.dtype);
  store_volume(grid, a.out, dtype);
  const VolumePaths paths = volume_paths(a.out);

  json report;
  report["sidecar"] = paths.sidecar.string();
  report["payload"] = paths.payload.string();
  report["dims"] = {dims.nx, dims.ny, dims.nz};
  report["spacing_um"] = a.spacing;
  report["depth"] = p;
  report["dtype"] = to_string(dtype.value_or(lossless_sample_type(grid)));
  report["volume_fraction"] = grid.mean();
  report["reference"] = reference;
  out << report.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string in;
  std::string kernel = "ball";
  double sigma = 1.2;
  std::string scheme = "central";
  double eps_rel = kDefaultEpsRel;
  std::optional<int> depth;
  std::string format = "json";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "json" && a.format != "csv")
    throw InvalidArgument(fmt::format("unknown format '{}' (expected json or csv)", a.format));
  const AnalysisSettings settings{Kernel::from_name(a.kernel, a.sigma), scheme_from_name(a.scheme), a.eps_rel};
  VoxelGrid image = load_volume(a.in);
  if (a.depth) image = quantize(image, resolve_depth(a.depth));
  const MinkowskiSummary summary = analyze(image, settings);
  if (summary.degenerate) err << "warning: " << a.in << ": image has no interface; QNT and beta are undefined\n";
  if (a.format == "csv")
    emit(summary_csv_header() + "\n" + summary_csv_row(summary) + "\n", a.out, out);
  else
    emit(to_json(summary).dump(2) + "\n", a.out, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct ConvergenceArgs {
  std::string shape = "ball";
  double diameter = 16.0;
  double box = 24.0;
  double aspect = 10.0;
  std::string resolutions = "4,6,8,12,16";
  std::string depths = "1,2,3,4";
  std::string kernels = "none";
  std::string scheme = "central";
  double eps_rel = kDefaultEpsRel;
  std::string displacement = "0.3,0.1,0.2";
  std::string out;
  bool no_timing = false;
};

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out, std::ostream& err) {
  ConvergenceStudy study;
  if (a.shape == "ball")
    study.shape = StudyShape::Ball;
  else if (a.shape == "cylinder")
    study.shape = StudyShape::Cylinder;
  else
    throw InvalidArgument(fmt::format("unknown study shape '{}' (expected ball or cylinder)", a.shape));
  study.diameter = a.diameter;
  study.box = a.box;
  study.aspect_ratio = a.aspect;
  study.displacement = parse_vec3(a.displacement, "--displacement");
  study.resolutions = number_list(a.resolutions, "resolutions");
  study.depths.clear();
  for (double p : number_list(a.depths, "depths")) {
    if (p != std::floor(p) || p < 1) throw InvalidArgument(fmt::format("invalid depth {}", p));
    study.depths.push_back(static_cast<int>(p));
  }
  study.kernels.clear();
  for (const std::string& k : split(a.kernels, ',')) study.kernels.push_back(parse_kernel_token(k));
  study.scheme = scheme_from_name(a.scheme);
  study.eps_rel = a.eps_rel;

  const ConvergenceResult result = run_convergence(study);
  for (const std::string& s : result.skipped) err << "skipped " << s << '\n';
  std::ostringstream csv;
  write_convergence_csv(csv, result.rows, !a.no_timing);
  emit(csv.str(), a.out, out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct FiberOrientArgs {
  std::string in;
  std::string kernel = "ball";
  double sigma = 1.2;
  std::string second_kernel = "gaussian";
  double mu = 0.0;
  std::string scheme = "central";
  double mask = 1e-3;
  std::string reference;
  std::string out;
};

int cmd_fiber_orient(const FiberOrientArgs& a, std::ostream& out, std::ostream& err) {
  if (a.second_kernel == "none") throw InvalidArgument("the structure tensor needs a second kernel");
  OrientationSettings settings{Kernel::from_name(a.kernel, a.sigma), Kernel::from_name(a.second_kernel, a.mu),
                               scheme_from_name(a.scheme), a.mask};
  std::optional<SymTensor3> reference;
  if (!a.reference.empty()) reference = parse_reference(a.reference);
  const VoxelGrid image = load_volume(a.in);
  json report;
  try {
    const OrientationResult r = structure_tensor_orientation(image, settings);
    report = to_json(r, reference ? &*reference : nullptr);
    report["degenerate"] = false;
  } catch (const DegenerateImage& e) {
    err << "warning: " << a.in << ": " << e.what() << '\n';
    report = {{"A", nullptr}, {"degenerate", true}, {"warning", e.what()}};
  }
  emit(report.dump(2) + "\n", a.out, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minkowski tensors and fiber orientation of voxel images", "minkvox"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "voxelize a synthetic structure and write a volume file");
  g->add_option("--shape", gen.shape, "ball | cylinder | laminate | parallel-fibers | fiber-array")->required();
  g->add_option("--out", gen.out, "output stem (<stem>.json + <stem>.raw)")->required();
  g->add_option("--dims", gen.dims, "n or nx,ny,nz (ignored for fiber-array)")->capture_default_str();
  g->add_option("--spacing", gen.spacing, "voxel edge length in um")->capture_default_str();
  g->add_option("--depth", gen.depth, "gray-value depth p (p^3 sub-samples per voxel)")->capture_default_str();
  g->add_option("--dtype", gen.dtype, "u8 | u16 | f32 (default: smallest lossless)");
  g->add_option("--diameter", gen.diameter, "ball, cylinder or fiber diameter in um")->capture_default_str();
  g->add_option("--length", gen.length, "cylinder or fiber length in um");
  g->add_option("--center", gen.center, "x,y,z in um (default: box center)");
  g->add_option("--axis", gen.axis, "cylinder axis x,y,z")->capture_default_str();
  g->add_option("--axis-index", gen.axis_index, "laminate normal / parallel fiber axis: 0, 1 or 2")
      ->capture_default_str();
  g->add_option("--slabs", gen.slabs, "laminate slabs lo:hi,lo:hi in um");
  g->add_option("--rows", gen.rows, "parallel fibers per row")->capture_default_str();
  g->add_option("--cols", gen.cols, "parallel fibers per column")->capture_default_str();
  g->add_option("--fiber-axis", gen.fiber_axes, "fiber-array axis x,y,z (repeat per fiber)");
  g->add_option("--gap", gen.gap, "clearance around each fiber cell in um")->capture_default_str();

  AnalyzeArgs an;
  auto* s = app.add_subcommand("analyze", "Minkowski functionals, W tensor, QNT and anisotropy of a volume");
  s->add_option("input", an.in, "volume file or stem")->required();
  s->add_option("--kernel", an.kernel, "none | ball | gaussian")->capture_default_str();
  s->add_option("--sigma", an.sigma, "kernel width in voxels")->capture_default_str();
  s->add_option("--scheme", an.scheme, "forward | backward | central")->capture_default_str();
  s->add_option("--eps-rel", an.eps_rel, "regularization relative to max |grad|")->capture_default_str();
  s->add_option("--depth", an.depth, "requantize to depth p before analysis");
  s->add_option("--format", an.format, "json | csv")->capture_default_str();
  s->add_option("--out", an.out, "report file (default: stdout)");

  ConvergenceArgs cv;
  auto* c = app.add_subcommand("convergence", "multigrid convergence sweep against closed-form references");
  c->add_option("--shape", cv.shape, "ball | cylinder (axis e_x)")->capture_default_str();
  c->add_option("--diameter", cv.diameter, "diameter D in um")->capture_default_str();
  c->add_option("--box", cv.box, "box edge in um (transverse edge for cylinders)")->capture_default_str();
  c->add_option("--aspect", cv.aspect, "cylinder L/D")->capture_default_str();
  c->add_option("--resolutions", cv.resolutions, "D/h values")->capture_default_str();
  c->add_option("--depths", cv.depths, "depths p")->capture_default_str();
  c->add_option("--kernels", cv.kernels, "e.g. none,ball:1.2,gaussian:2")->capture_default_str();
  c->add_option("--scheme", cv.scheme, "forward | backward | central")->capture_default_str();
  c->add_option("--eps-rel", cv.eps_rel, "regularization relative to max |grad|")->capture_default_str();
  c->add_option("--displacement", cv.displacement, "center offset from the box center in voxels")
      ->capture_default_str();
  c->add_option("--out", cv.out, "CSV file (default: stdout)");
  c->add_flag("--no-timing", cv.no_timing, "write 0 for wall time so output is reproducible");

  FiberOrientArgs fo;
  auto* f = app.add_subcommand("fiber-orient", "structure-tensor fiber-orientation tensor");
  f->add_option("input", fo.in, "volume file or stem")->required();
  f->add_option("--kernel", fo.kernel, "first kernel: none | ball | gaussian")->capture_default_str();
  f->add_option("--sigma", fo.sigma, "first kernel width in voxels")->capture_default_str();
  f->add_option("--second-kernel", fo.second_kernel, "ball | gaussian")->capture_default_str();
  f->add_option("--mu", fo.mu, "second kernel width in voxels")->required();
  f->add_option("--scheme", fo.scheme, "forward | backward | central")->capture_default_str();
  f->add_option("--mask", fo.mask, "ignore voxels with tr below mask * max tr")->capture_default_str();
  f->add_option("--reference", fo.reference, "reference A: xx,yy,zz,xy,xz,yz or 9 row-major numbers");
  f->add_option("--out", fo.out, "report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, out);
    if (s->parsed()) return cmd_analyze(an, out, err);
    if (c->parsed()) return cmd_convergence(cv, out, err);
    return cmd_fiber_orient(fo, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DegenerateImage& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace minkvox::cli
