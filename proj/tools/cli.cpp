#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "voxproj/errors.hpp"
#include "voxproj/geometry.hpp"
#include "voxproj/io.hpp"
#include "voxproj/oracle.hpp"
#include "voxproj/projector.hpp"
#include "voxproj/recon.hpp"
#include "voxproj/volume.hpp"

namespace voxproj::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kGradcheckMaxDim = 8;
constexpr double kGradcheckTolerance = 1e-3;

Dims3 parse_dims(const std::string& text) {
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, 'x')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("bad --dims '" + text + "' (expected N or HxWxD)");
    }
    parts.push_back(std::stoul(tok));
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], parts[0]};
  if (parts.size() != 3 || parts[0] == 0 || parts[1] == 0 || parts[2] == 0) {
    throw UsageError("bad --dims '" + text + "' (expected N or HxWxD)");
  }
  return {parts[0], parts[1], parts[2]};
}

std::string dims_text(const Dims3& d) {
  return std::to_string(d.h) + "x" + std::to_string(d.w) + "x" + std::to_string(d.d);
}

std::size_t parse_index(const std::string& tok, const std::string& all) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("bad --views '" + all + "'");
  }
  return std::stoul(tok);
}

// "0-7", "0,3,6" or mixtures such as "0-2,9".
std::vector<std::size_t> parse_views(const std::string& text, std::size_t count) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_index(item, text));
    } else {
      const std::size_t a = parse_index(item.substr(0, dash), text);
      const std::size_t b = parse_index(item.substr(dash + 1), text);
      if (b < a) throw UsageError("bad --views range '" + item + "'");
      for (std::size_t i = a; i <= b; ++i) out.push_back(i);
    }
  }
  if (out.empty()) throw UsageError("--views selects no views");
  for (std::size_t i : out) {
    if (i >= count) {
      throw UsageError("--views index " + std::to_string(i) + " out of range (rig has " +
                       std::to_string(count) + " views)");
    }
  }
  return out;
}

std::vector<Viewpoint> resolve_rig(const std::string& rig) {
  if (rig == "default24") return default_rig();
  return load_rig(rig);
}

double round_degrees(double deg) { return std::round(deg * 1e6) / 1e6; }

std::string view_file_name(std::size_t index, const Viewpoint& v) {
  return "view_" + std::to_string(index) + "_" +
         format_double(round_degrees(azimuth_degrees(v))) + ".pgm";
}

// Loads view_<i>_*.pgm for i in [0, count); the directory must hold exactly
// `count` view files.
std::vector<Silhouette> load_silhouettes(const std::string& dir, std::size_t count) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::map<std::size_t, fs::path> found;
  std::size_t total = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("view_", 0) != 0 || entry.path().extension() != ".pgm") continue;
    ++total;
    const auto sep = name.find('_', 5);
    if (sep == std::string::npos) continue;
    const std::string idx = name.substr(5, sep - 5);
    if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) continue;
    found[std::stoul(idx)] = entry.path();
  }
  if (total != count) {
    throw ShapeError("silhouette count (" + std::to_string(total) +
                     ") does not match rig view count (" + std::to_string(count) + ")");
  }
  std::vector<Silhouette> sils;
  for (std::size_t i = 0; i < count; ++i) {
    const auto it = found.find(i);
    if (it == found.end()) throw IoError("missing silhouette for view " + std::to_string(i));
    sils.push_back(read_pgm(it->second.string()));
    if (!sils.back().same_shape(sils.front())) {
      throw ShapeError("silhouettes have differing sizes");
    }
  }
  return sils;
}

CameraIntrinsics intrinsics_for(std::size_t w, std::size_t h, double focal) {
  return build_intrinsics(focal > 0.0 ? focal : default_focal(w), w, h);
}

std::vector<CameraView> make_views(const std::vector<Viewpoint>& rig,
                                   const CameraIntrinsics& k) {
  std::vector<CameraView> views;
  views.reserve(rig.size());
  for (const Viewpoint& v : rig) views.push_back(make_camera_view(v, k));
  return views;
}

std::string manifest_path_for(const std::string& out) { return out + ".manifest.json"; }

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  json inputs = json::object();
  json outputs = json::object();
  std::uint64_t seed = 0;
};

void write_manifest(const std::string& path, const Manifest& m) {
  json j;
  j["tool"] = "voxproj";
  j["tool_version"] = kToolVersion;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["argv"] = m.argv;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

std::ofstream open_text(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

double silhouette_iou(const Silhouette& a, const Silhouette& b, double threshold) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const bool x = a.values[i] >= threshold;
    const bool y = b.values[i] >= threshold;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---- option bundles -------------------------------------------------------

struct SynthOpts {
  std::string kind;
  std::string dims;
  std::string out;
  std::string manifest;
};

struct RenderOpts {
  std::string vol;
  std::string rig;
  std::size_t image_size = 32;
  double focal = 0.0;
  std::size_t depth = kDefaultDepthSlices;
  std::string out_dir;
  std::string manifest;
};

struct ReconOpts {
  std::string sil_dir;
  std::string rig;
  std::string dims;
  int iters = 500;
  double lambda_proj = 1.0;
  double lambda_vol = 0.0;
  std::string gt;
  std::string views;
  double lr = 0.1;
  double init_logit = 0.0;
  std::uint64_t seed = 0;
  double focal = 0.0;
  std::size_t depth = kDefaultDepthSlices;
  std::string out;
  std::string loss_csv;
  std::string manifest;
};

struct CarveOpts {
  std::string sil_dir;
  std::string rig;
  std::string dims;
  double focal = 0.0;
  std::string out;
  std::string manifest;
};

struct EvalOpts {
  std::string pred;
  std::string gt;
  double threshold = 0.5;
  std::string rig;
  std::size_t image_size = 32;
  double focal = 0.0;
  std::size_t depth = kDefaultDepthSlices;
  std::string report;
  std::string manifest;
};

struct GradcheckOpts {
  std::string dims = "5";
  std::size_t views = 3;
  double h = 1e-3;
  double tie_eps = 1e-6;
  std::size_t image_size = 4;
  std::size_t depth = 4;
  std::uint64_t seed = 0;
  std::string manifest;
};

// ---- commands -------------------------------------------------------------

int cmd_synth(const SynthOpts& o, std::ostream&) {
  const ShapeKind kind = parse_shape_kind(o.kind);
  const Dims3 dims = parse_dims(o.dims);
  const VoxelGrid v = synth_shape(kind, dims);
  write_voxg(o.out, v);

  Manifest m;
  m.command = "synth";
  m.config = {{"kind", o.kind}, {"dims", dims_text(dims)}};
  m.outputs = {{"volume", o.out}};
  const std::string mpath = o.manifest.empty() ? manifest_path_for(o.out) : o.manifest;
  m.argv = {"synth", "--kind", o.kind, "--dims", dims_text(dims), "--out", o.out,
            "--manifest", mpath};
  write_manifest(mpath, m);
  return kExitOk;
}

int cmd_render(const RenderOpts& o, std::ostream&) {
  if (o.image_size < 1) throw UsageError("--image-size must be >= 1");
  if (o.depth < 1) throw UsageError("--depth must be >= 1");
  const std::vector<Viewpoint> rig = resolve_rig(o.rig);
  const VoxelGrid vol = read_voxg(o.vol);
  const CameraIntrinsics k = intrinsics_for(o.image_size, o.image_size, o.focal);
  const std::vector<CameraView> views = make_views(rig, k);

  fs::create_directories(o.out_dir);
  json files = json::array();
  for (std::size_t i = 0; i < views.size(); ++i) {
    const SamplingGrid grid = build_sampling_grid(views[i], o.depth, vol.dims);
    const Projection p = project(vol, grid);
    const fs::path path = fs::path(o.out_dir) / view_file_name(i, rig[i]);
    write_pgm(path.string(), p.silhouette);
    files.push_back(path.string());
  }
  const fs::path rig_path = fs::path(o.out_dir) / "rig.txt";
  {
    auto out = open_text(rig_path.string());
    out << format_rig(rig);
  }

  Manifest m;
  m.command = "render";
  m.config = {{"rig", o.rig},
              {"image_size", o.image_size},
              {"focal", k.focal},
              {"depth", o.depth},
              {"views", rig.size()}};
  m.inputs = {{"volume", o.vol}};
  m.outputs = {{"silhouettes", files}, {"rig", rig_path.string()}};
  const std::string mpath =
      o.manifest.empty() ? (fs::path(o.out_dir) / "manifest.json").string() : o.manifest;
  m.argv = {"render", "--vol", o.vol, "--rig", o.rig,
            "--image-size", std::to_string(o.image_size), "--focal", format_double(k.focal),
            "--depth", std::to_string(o.depth), "--out-dir", o.out_dir, "--manifest", mpath};
  write_manifest(mpath, m);
  return kExitOk;
}

int cmd_reconstruct(const ReconOpts& o, std::ostream& out) {
  if (o.lambda_vol > 0.0 && o.gt.empty()) {
    throw MissingSupervision("--lambda-vol > 0 requires --gt");
  }
  if (o.iters < 1) throw UsageError("--iters must be >= 1");
  if (o.depth < 1) throw UsageError("--depth must be >= 1");
  const Dims3 dims = parse_dims(o.dims);
  const std::vector<Viewpoint> rig = resolve_rig(o.rig);
  const std::vector<std::size_t> subset =
      o.views.empty() ? std::vector<std::size_t>{} : parse_views(o.views, rig.size());
  const std::vector<Silhouette> sils = load_silhouettes(o.sil_dir, rig.size());
  std::optional<VoxelGrid> gt;
  if (!o.gt.empty()) gt = read_voxg(o.gt);

  const CameraIntrinsics k = intrinsics_for(sils.front().w, sils.front().h, o.focal);
  const std::vector<CameraView> views = make_views(rig, k);
  const std::vector<SamplingGrid> grids = build_view_grids(views, o.depth, dims);

  ReconConfig cfg;
  cfg.iterations = o.iters;
  cfg.loss = {o.lambda_proj, o.lambda_vol};
  cfg.adam.lr = o.lr;
  cfg.init_logit = o.init_logit;
  cfg.view_subset = subset;
  cfg.seed = o.seed;
  const ReconResult r = reconstruct(sils, grids, dims, cfg, gt ? &*gt : nullptr);

  write_voxg(o.out, r.volume);
  const std::string csv = o.loss_csv.empty() ? o.out + ".loss.csv" : o.loss_csv;
  {
    auto f = open_text(csv);
    write_loss_csv(f, r.history);
  }
  out << "final_loss=" << format_double(r.history.back().total)
      << " iterations=" << r.history.size();
  if (gt) out << " iou=" << format_double(iou(binarize(r.volume), binarize(*gt)));
  out << '\n';

  std::vector<std::size_t> used = subset;
  if (used.empty()) {
    for (std::size_t i = 0; i < rig.size(); ++i) used.push_back(i);
  }
  Manifest m;
  m.command = "reconstruct";
  m.seed = o.seed;
  m.config = {{"dims", dims_text(dims)},
              {"iterations", o.iters},
              {"lambda_proj", o.lambda_proj},
              {"lambda_vol", o.lambda_vol},
              {"adam", {{"lr", cfg.adam.lr}, {"beta1", cfg.adam.beta1},
                        {"beta2", cfg.adam.beta2}, {"eps", cfg.adam.eps}}},
              {"init_logit", o.init_logit},
              {"views", used},
              {"image_w", k.image_w},
              {"image_h", k.image_h},
              {"focal", k.focal},
              {"depth", o.depth},
              {"rig", o.rig}};
  m.inputs = {{"silhouettes", o.sil_dir}, {"ground_truth", o.gt}};
  m.outputs = {{"volume", o.out}, {"loss_csv", csv}};
  const std::string mpath = o.manifest.empty() ? manifest_path_for(o.out) : o.manifest;
  m.argv = {"reconstruct", "--sil-dir", o.sil_dir, "--rig", o.rig,
            "--dims", dims_text(dims), "--iters", std::to_string(o.iters),
            "--lambda-proj", format_double(o.lambda_proj),
            "--lambda-vol", format_double(o.lambda_vol),
            "--lr", format_double(o.lr), "--init-logit", format_double(o.init_logit),
            "--seed", std::to_string(o.seed), "--focal", format_double(k.focal),
            "--depth", std::to_string(o.depth), "--out", o.out, "--loss-csv", csv,
            "--manifest", mpath};
  if (!o.gt.empty()) {
    m.argv.push_back("--gt");
    m.argv.push_back(o.gt);
  }
  if (!o.views.empty()) {
    m.argv.push_back("--views");
    m.argv.push_back(o.views);
  }
  write_manifest(mpath, m);
  return kExitOk;
}

int cmd_carve(const CarveOpts& o, std::ostream& out) {
  const Dims3 dims = parse_dims(o.dims);
  const std::vector<Viewpoint> rig = resolve_rig(o.rig);
  const std::vector<Silhouette> sils = load_silhouettes(o.sil_dir, rig.size());
  const CameraIntrinsics k = intrinsics_for(sils.front().w, sils.front().h, o.focal);
  const std::vector<CameraView> views = make_views(rig, k);
  const BinaryVolume hull = visual_hull(sils, views, dims);
  write_voxg(o.out, hull);
  out << "occupied=" << hull.occupied() << '\n';

  Manifest m;
  m.command = "carve";
  m.config = {{"dims", dims_text(dims)}, {"focal", k.focal}, {"rig", o.rig},
              {"image_w", k.image_w}, {"image_h", k.image_h}};
  m.inputs = {{"silhouettes", o.sil_dir}};
  m.outputs = {{"volume", o.out}};
  const std::string mpath = o.manifest.empty() ? manifest_path_for(o.out) : o.manifest;
  m.argv = {"carve", "--sil-dir", o.sil_dir, "--rig", o.rig, "--dims", dims_text(dims),
            "--focal", format_double(k.focal), "--out", o.out, "--manifest", mpath};
  write_manifest(mpath, m);
  return kExitOk;
}

int cmd_eval(const EvalOpts& o, std::ostream& out) {
  if (!(o.threshold > 0.0 && o.threshold < 1.0)) {
    throw UsageError("--threshold must lie in (0, 1)");
  }
  const VoxelGrid pred = read_voxg(o.pred);
  const VoxelGrid gt = read_voxg(o.gt);
  if (pred.dims != gt.dims) throw ShapeError("eval: --pred and --gt dimensions differ");
  const double score = iou(binarize(pred, o.threshold), binarize(gt, o.threshold));
  out << "iou=" << format_double(score) << '\n';

  std::vector<double> per_view;
  std::vector<Viewpoint> rig;
  CameraIntrinsics k;
  if (!o.rig.empty()) {
    rig = resolve_rig(o.rig);
    k = intrinsics_for(o.image_size, o.image_size, o.focal);
    for (const CameraView& view : make_views(rig, k)) {
      const SamplingGrid grid = build_sampling_grid(view, o.depth, gt.dims);
      per_view.push_back(silhouette_iou(project(pred, grid).silhouette,
                                        project(gt, grid).silhouette, o.threshold));
    }
    double mean = 0.0;
    for (double x : per_view) mean += x;
    out << "mean_view_iou=" << format_double(mean / static_cast<double>(per_view.size()))
        << '\n';
  }
  if (!o.report.empty()) {
    auto f = open_text(o.report);
    f << "scope,view,azimuth_deg,iou\n";
    f << "volume,,," << format_double(score) << '\n';
    for (std::size_t i = 0; i < per_view.size(); ++i) {
      f << "view," << i << ',' << format_double(round_degrees(azimuth_degrees(rig[i])))
        << ',' << format_double(per_view[i]) << '\n';
    }
  }
  if (!o.manifest.empty()) {
    Manifest m;
    m.command = "eval";
    m.config = {{"threshold", o.threshold}, {"rig", o.rig}, {"image_size", o.image_size},
                {"focal", o.rig.empty() ? 0.0 : k.focal}, {"depth", o.depth}};
    m.inputs = {{"pred", o.pred}, {"gt", o.gt}};
    m.outputs = {{"report", o.report}, {"iou", score}};
    m.argv = {"eval", "--pred", o.pred, "--gt", o.gt,
              "--threshold", format_double(o.threshold), "--manifest", o.manifest};
    if (!o.rig.empty()) {
      for (const std::string& s : {std::string("--rig"), o.rig,
                                   std::string("--image-size"), std::to_string(o.image_size),
                                   std::string("--focal"), format_double(k.focal),
                                   std::string("--depth"), std::to_string(o.depth)}) {
        m.argv.push_back(s);
      }
    }
    if (!o.report.empty()) {
      m.argv.push_back("--report");
      m.argv.push_back(o.report);
    }
    write_manifest(o.manifest, m);
  }
  return kExitOk;
}

int cmd_gradcheck(const GradcheckOpts& o, std::ostream& out) {
  const Dims3 dims = parse_dims(o.dims);
  if (dims.h > kGradcheckMaxDim || dims.w > kGradcheckMaxDim || dims.d > kGradcheckMaxDim) {
    throw UsageError("gradcheck: --dims must be <= 8 per axis");
  }
  if (o.views < 1) throw UsageError("gradcheck: --views must be >= 1");
  if (!(o.h > 0.0)) throw UsageError("gradcheck: --h must be > 0");
  if (o.image_size < 1 || o.depth < 1) throw UsageError("gradcheck: sizes must be >= 1");

  std::mt19937_64 rng(o.seed);
  VoxelGrid v(dims);
  // Keep occupancies away from 0 and 1 so the +-h probes stay near [0, 1].
  for (double& x : v.values) x = 0.05 + 0.9 * unit_uniform(rng);

  const CameraIntrinsics k = build_intrinsics(default_focal(o.image_size), o.image_size,
                                              o.image_size);
  std::vector<SamplingGrid> grids;
  std::vector<Silhouette> targets;
  for (std::size_t i = 0; i < o.views; ++i) {
    const double az = 360.0 * static_cast<double>(i) / static_cast<double>(o.views);
    const CameraView view = make_camera_view(
        viewpoint_from_degrees(az, kDefaultElevationDeg, kDefaultDistance), k);
    grids.push_back(build_sampling_grid(view, o.depth, dims));
    Silhouette t(o.image_size, o.image_size);
    for (double& x : t.values) x = unit_uniform(rng);
    targets.push_back(std::move(t));
  }
  const DifferentiableLoss loss = [&](const VoxelGrid& g) {
    return projection_loss(g, targets, grids);
  };
  const GradCheckReport report = grad_check(v, grids, loss, {o.h, 0, o.seed}, o.tie_eps);
  out << format_report(report) << '\n';

  if (!o.manifest.empty()) {
    Manifest m;
    m.command = "gradcheck";
    m.seed = o.seed;
    m.config = {{"dims", dims_text(dims)}, {"views", o.views}, {"h", o.h},
                {"tie_eps", o.tie_eps}, {"image_size", o.image_size}, {"depth", o.depth}};
    m.outputs = {{"max_abs", report.max_abs_err}, {"max_rel", report.max_rel_err},
                 {"compared", report.num_compared}, {"skipped", report.num_skipped_ties}};
    m.argv = {"gradcheck", "--dims", dims_text(dims), "--views", std::to_string(o.views),
              "--h", format_double(o.h), "--tie-eps", format_double(o.tie_eps),
              "--image-size", std::to_string(o.image_size), "--depth", std::to_string(o.depth),
              "--seed", std::to_string(o.seed), "--manifest", o.manifest};
    write_manifest(o.manifest, m);
  }
  return report.max_rel_err < kGradcheckTolerance ? kExitOk : kExitFailure;
}

std::vector<std::string> replay_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("manifest is not valid JSON: " + path);
  }
  if (!j.contains("argv") || !j["argv"].is_array() || j["argv"].empty()) {
    throw IoError("manifest has no argv: " + path);
  }
  std::vector<std::string> args = j["argv"].get<std::vector<std::string>>();
  if (args.front() == "replay") throw IoError("manifest replays itself: " + path);
  return args;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perspective projection of voxel volumes to silhouettes and "
               "silhouette-supervised voxel reconstruction", "voxproj"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = machine default)")
      ->check(CLI::NonNegativeNumber);

  SynthOpts synth;
  auto* sc = app.add_subcommand("synth", "Write a synthetic test shape as VOXG");
  sc->add_option("--kind", synth.kind, "cube|sphere|cross|chair|hollow_box")->required();
  sc->add_option("--dims", synth.dims, "N or HxWxD")->required();
  sc->add_option("--out", synth.out, "Output VOXG path")->required();
  sc->add_option("--manifest", synth.manifest, "Manifest path (default <out>.manifest.json)");

  RenderOpts render;
  auto* rc = app.add_subcommand("render", "Render silhouettes of a volume");
  rc->add_option("--vol", render.vol, "Input VOXG")->required();
  rc->add_option("--rig", render.rig, "Rig file or 'default24'")->required();
  rc->add_option("--image-size", render.image_size, "Square image size in pixels");
  rc->add_option("--focal", render.focal, "Focal length in pixels (default 0.86*W*2)");
  rc->add_option("--depth", render.depth, "Disparity slices of the camera volume");
  rc->add_option("--out-dir", render.out_dir, "Output directory")->required();
  rc->add_option("--manifest", render.manifest, "Manifest path (default <out-dir>/manifest.json)");

  ReconOpts recon;
  auto* xc = app.add_subcommand("reconstruct", "Recover a volume from silhouettes");
  xc->add_option("--sil-dir", recon.sil_dir, "Directory of view_<i>_<az>.pgm")->required();
  xc->add_option("--rig", recon.rig, "Rig file or 'default24'")->required();
  xc->add_option("--dims", recon.dims, "Output volume dims, N or HxWxD")->required();
  xc->add_option("--iters", recon.iters, "Adam iterations");
  xc->add_option("--lambda-proj", recon.lambda_proj, "Projection loss weight");
  xc->add_option("--lambda-vol", recon.lambda_vol, "Volume loss weight (needs --gt)");
  xc->add_option("--gt", recon.gt, "Ground-truth VOXG");
  xc->add_option("--views", recon.views, "View subset, e.g. 0-7 or 0,3,6");
  xc->add_option("--lr", recon.lr, "Adam learning rate");
  xc->add_option("--init-logit", recon.init_logit, "Initial occupancy logit");
  xc->add_option("--seed", recon.seed, "Seed recorded in the manifest");
  xc->add_option("--focal", recon.focal, "Focal length (default 0.86*W*2)");
  xc->add_option("--depth", recon.depth, "Disparity slices of the camera volume");
  xc->add_option("--out", recon.out, "Output VOXG")->required();
  xc->add_option("--loss-csv", recon.loss_csv, "Loss history CSV (default <out>.loss.csv)");
  xc->add_option("--manifest", recon.manifest, "Manifest path (default <out>.manifest.json)");

  CarveOpts carve;
  auto* cc = app.add_subcommand("carve", "Visual hull by space carving");
  cc->add_option("--sil-dir", carve.sil_dir, "Directory of view_<i>_<az>.pgm")->required();
  cc->add_option("--rig", carve.rig, "Rig file or 'default24'")->required();
  cc->add_option("--dims", carve.dims, "Output volume dims")->required();
  cc->add_option("--focal", carve.focal, "Focal length (default 0.86*W*2)");
  cc->add_option("--out", carve.out, "Output VOXG")->required();
  cc->add_option("--manifest", carve.manifest, "Manifest path (default <out>.manifest.json)");

  EvalOpts eval;
  auto* ec = app.add_subcommand("eval", "3D IoU and optional per-view silhouette IoU");
  ec->add_option("--pred", eval.pred, "Predicted VOXG")->required();
  ec->add_option("--gt", eval.gt, "Ground-truth VOXG")->required();
  ec->add_option("--threshold", eval.threshold, "Binarization threshold");
  ec->add_option("--rig", eval.rig, "Rig for per-view silhouette IoU");
  ec->add_option("--image-size", eval.image_size, "Image size for per-view IoU");
  ec->add_option("--focal", eval.focal, "Focal length (default 0.86*W*2)");
  ec->add_option("--depth", eval.depth, "Disparity slices");
  ec->add_option("--report", eval.report, "CSV report path");
  ec->add_option("--manifest", eval.manifest, "Manifest path");

  GradcheckOpts gc;
  auto* gcc = app.add_subcommand("gradcheck", "Finite-difference check of the projection gradient");
  gcc->add_option("--dims", gc.dims, "Volume dims (<= 8 per axis)");
  gcc->add_option("--views", gc.views, "Number of views");
  gcc->set_help_flag("--help", "Print this help message and exit");
  gcc->add_option("--h", gc.h, "Finite-difference step");
  gcc->add_option("--tie-eps", gc.tie_eps, "Max-tie exclusion threshold");
  gcc->add_option("--image-size", gc.image_size, "Silhouette size");
  gcc->add_option("--depth", gc.depth, "Disparity slices");
  gcc->add_option("--seed", gc.seed, "Random seed");
  gcc->add_option("--manifest", gc.manifest, "Manifest path");

  std::string replay_manifest;
  auto* pc = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  pc->add_option("--manifest", replay_manifest, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*sc) return cmd_synth(synth, out);
    if (*rc) return cmd_render(render, out);
    if (*xc) return cmd_reconstruct(recon, out);
    if (*cc) return cmd_carve(carve, out);
    if (*ec) return cmd_eval(eval, out);
    if (*gcc) return cmd_gradcheck(gc, out);
    if (*pc) return run(replay_args(replay_manifest), out, err);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const MissingSupervision& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace voxproj::cli
