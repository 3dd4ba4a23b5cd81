// Copyright 2026 The ggev Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bench_report.h"
#include "ggev/config.h"
#include "ggev/ddca.h"
#include "ggev/errors.h"
#include "ggev/eval.h"
#include "ggev/features.h"
#include "ggev/io.h"
#include "ggev/parallel.h"
#include "ggev/pipeline.h"
#include "json.hpp"

namespace ggev {
namespace {

namespace fs = std::filesystem;

// Flags shared by every command that builds a model. Each flag overrides the
// same key from --config when given.
struct ModelFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  int iters = 0;
  int d_max4 = 0;
  int pool_size = 0;
  int k_small = 0;
  int k_large = 0;
  std::string texture;
  std::string weights;
  std::string depth_features;
  std::map<std::string, CLI::Option*> opts;

  void Register(CLI::App* app, bool model_flags) {
    opts["config"] = app->add_option("--config", config_path, "JSON run configuration");
    opts["seed"] = app->add_option("--seed", seed, "Seed for weights and scenes (default 42)");
    opts["threads"] = app->add_option("--threads", threads,
                                      "Worker threads (default: GGEV_THREADS or all cores)");
    if (!model_flags) return;
    opts["iters"] = app->add_option("--iters", iters, "Refinement iterations (default 8)");
    opts["d-max4"] = app->add_option("--d-max4", d_max4,
                                     "Quarter-resolution disparity hypotheses (default 48)");
    opts["pool-size"] = app->add_option("--pool-size", pool_size, "Pooled centre grid side S");
    opts["k-small"] = app->add_option("--k-small", k_small, "Small dynamic kernel size");
    opts["k-large"] = app->add_option("--k-large", k_large, "Large dynamic kernel size");
    opts["texture"] = app->add_option("--texture", texture, "Texture features: builtin|census");
    opts["weights"] = app->add_option("--weights", weights, "Weight preset: seeded|matching-core");
    opts["depth-features"] = app->add_option("--depth-features", depth_features,
                                             "Depth pyramid manifest (replaces built-in depth)");
  }

  bool Given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  RunConfig Resolve() const {
    RunConfig cfg = Given("config") ? LoadRunConfig(config_path) : RunConfig{};
    if (Given("seed")) cfg.seed = seed;
    if (Given("threads")) cfg.threads = threads;
    if (Given("iters")) cfg.iters = iters;
    if (Given("d-max4")) cfg.model.d_max4 = d_max4;
    if (Given("pool-size")) cfg.model.pool_size = pool_size;
    if (Given("k-small")) cfg.model.k_small = k_small;
    if (Given("k-large")) cfg.model.k_large = k_large;
    if (Given("texture")) cfg.texture = ParseTextureSource(texture);
    if (Given("weights")) cfg.weights = ParseWeightPreset(weights);
    if (Given("depth-features")) {
      cfg.depth = DepthSource::kFiles;
      cfg.depth_manifest = depth_features;
    }
    cfg.Validate();
    SetThreadCount(cfg.threads);
    return cfg;
  }
};

std::vector<double> ParseThresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !(v > 0.0)) {
      throw ConfigError("bad threshold list '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty threshold list");
  std::sort(out.begin(), out.end());
  return out;
}

void WriteText(const std::string& text, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError(FormatErrorKind::kIo, "cannot write " + path);
  f << text << '\n';
}

StereoPair LoadPair(const std::string& left, const std::string& right) {
  StereoPair pair{ReadPnm(left, true), ReadPnm(right, true)};
  if (pair.left.shape() != pair.right.shape()) {
    throw DimensionError("left and right images differ in size");
  }
  return pair;
}

std::optional<FeaturePyramid> LoadDepth(const RunConfig& cfg, const Tensor& left) {
  if (cfg.depth != DepthSource::kFiles) return std::nullopt;
  const Tensor padded = PadToMultiple(left, 16);
  return LoadFeaturePyramid(
      cfg.depth_manifest,
      PyramidShape::For(Cue::kDepth, padded.dim(1), padded.dim(2), cfg.model));
}

struct Commands {
  Commands(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;

  // gen-scene
  int scene_h = 128, scene_w = 256;
  int scene_disp = 8;
  std::vector<std::string> scene_planes;
  std::string out_dir = ".";

  // shared paths
  std::string left, right, output, image, cue = "depth";
  std::string iterates_prefix, volume_out, colormap;
  std::string pred, gt, mask, region = "all", thresholds;
  bool aggregated = false;
  int slice = -1;
  int disparity = 0;
  int grid_stride = 4;

  // bench
  std::string bench_op = "dynamic-conv", bench_size = "64x64";
  int bench_slices = 16, bench_groups = 8, bench_kernel = 7, bench_runs = 5;
  int bench_cpg = 3;

  int GenScene(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    std::vector<PlaneSpec> planes;
    for (const auto& p : scene_planes) planes.push_back(ParsePlaneSpec(p));
    if (planes.empty()) {
      planes.push_back(PlaneSpec{0, 0, scene_w, scene_h, static_cast<double>(scene_disp), 0.0});
    }
    const SyntheticScene scene = GenerateStereogram(scene_h, scene_w, planes, cfg.seed,
                                                    4 * cfg.model.d_max4 - 1);
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    WritePnm(scene.pair.left, (dir / "left.pnm").string());
    WritePnm(scene.pair.right, (dir / "right.pnm").string());
    WritePfm(scene.gt, (dir / "gt.pfm").string());
    std::vector<std::uint8_t> noc(scene.occlusion.size());
    for (std::size_t i = 0; i < noc.size(); ++i) noc[i] = scene.occlusion[i] ? 0 : 1;
    WriteMask(noc, scene_h, scene_w, (dir / "noc.pgm").string());
    nlohmann::ordered_json desc;
    desc["seed"] = cfg.seed;
    desc["height"] = scene_h;
    desc["width"] = scene_w;
    desc["planes"] = nlohmann::json::array();
    for (const PlaneSpec& p : planes) {
      desc["planes"].push_back({p.x0, p.y0, p.x1, p.y1, p.disparity, p.slope_x});
    }
    WriteText(desc.dump(2), (dir / "scene.json").string());
    return kExitOk;
  }

  int ExtractFeatures(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    const Pipeline pipe(cfg);
    const Tensor img = PadToMultiple(ReadPnm(image, true), 16);
    const Cue c = ParseCue(cue);
    FeaturePyramid pyr;
    if (c == Cue::kDepth) {
      pyr = pipe.Depth(img);
    } else if (c == Cue::kDepthAware) {
      pyr = ScfFuse(pipe.Texture(img, Cue::kTextureLeft), pipe.Depth(img), pipe.weights());
    } else {
      pyr = pipe.Texture(img, c);
    }
    WriteFeaturePyramid(pyr, output);
    return kExitOk;
  }

  int Infer(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    const Pipeline pipe(cfg);
    const StereoPair pair = LoadPair(left, right);
    const InferenceResult res = pipe.Run(pair, LoadDepth(cfg, pair.left));
    WritePfm(res.disparity, output);
    if (!iterates_prefix.empty()) {
      for (std::size_t i = 0; i < res.iterates.size(); ++i) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "_%02zu.pfm", i + 1);
        WritePfm(res.iterates[i], iterates_prefix + suffix);
      }
    }
    if (!volume_out.empty()) WriteTensor(res.aggregated.data, volume_out);
    if (!colormap.empty()) WriteColormap(res.disparity, colormap);
    return kExitOk;
  }

  int Eval(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    const DisparityMap p = ReadPfm(pred);
    const DisparityMap g = ReadPfm(gt);
    RegionMask region_mask;
    if (!mask.empty()) {
      int mh = 0, mw = 0;
      region_mask = ReadMask(mask, &mh, &mw);
      if (mh != g.height() || mw != g.width()) {
        throw DimensionError("mask size does not match the ground truth");
      }
    }
    const std::vector<double> ts = thresholds.empty() ? cfg.thresholds : ParseThresholds(thresholds);
    const std::string name = (!mask.empty() && region == "all") ? "noc" : region;
    const std::string json = MetricReportToJson(Evaluate(p, g, ts, region_mask, name));
    out << json << '\n';
    if (!output.empty()) WriteText(json, output);
    return kExitOk;
  }

  int DumpVolume(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    const Pipeline pipe(cfg);
    const StereoPair pair = LoadPair(left, right);
    const Tensor l = PadToMultiple(pair.left, 16);
    const Tensor r = PadToMultiple(pair.right, 16);
    const FeaturePyramid tl = pipe.Texture(l, Cue::kTextureLeft);
    const FeaturePyramid tr = pipe.Texture(r, Cue::kTextureRight);
    CostVolume vol = BuildGwcVolume(tl.at(4), tr.at(4), cfg.model.d_max4, cfg.model.groups);
    if (aggregated) {
      const auto depth = LoadDepth(cfg, pair.left);
      const FeaturePyramid fused = ScfFuse(tl, depth ? *depth : pipe.Depth(l), pipe.weights());
      vol = DdcaAggregate(vol, fused.at(4), pipe.weights(), DdcaConfig::From(cfg.model));
    }
    if (slice >= 0) {
      if (slice >= vol.disparities()) throw ConfigError("--slice outside the hypothesis range");
      WriteTensor(vol.Slice(slice), output);
    } else {
      WriteTensor(vol.data, output);
    }
    return kExitOk;
  }

  int DumpAffinity(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    if (grid_stride < 1) throw ConfigError("--grid-stride must be >= 1");
    const Pipeline pipe(cfg);
    const StereoPair pair = LoadPair(left, right);
    const Tensor l = PadToMultiple(pair.left, 16);
    const Tensor r = PadToMultiple(pair.right, 16);
    const FeaturePyramid tl = pipe.Texture(l, Cue::kTextureLeft);
    const FeaturePyramid tr = pipe.Texture(r, Cue::kTextureRight);
    const auto depth = LoadDepth(cfg, pair.left);
    const FeaturePyramid fused = ScfFuse(tl, depth ? *depth : pipe.Depth(l), pipe.weights());
    const CostVolume vol = BuildGwcVolume(tl.at(4), tr.at(4), cfg.model.d_max4, cfg.model.groups);
    const AffinityBundle a =
        SliceAffinity(vol, fused.at(4), pipe.weights(), DdcaConfig::From(cfg.model), disparity);
    std::vector<int> rows;
    for (int y = 0; y < a.height; y += grid_stride)
      for (int x = 0; x < a.width; x += grid_stride) rows.push_back(y * a.width + x);
    const int s2 = a.pool_size * a.pool_size;
    const int groups = static_cast<int>(a.groups.size());
    Tensor dump({groups, static_cast<int>(rows.size()), s2});
    for (int g = 0; g < groups; ++g)
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < s2; ++j)
          dump[(static_cast<std::size_t>(g) * rows.size() + i) * s2 + j] =
              a.groups[g][static_cast<std::size_t>(rows[i]) * s2 + j];
    WriteTensor(dump, output);
    return kExitOk;
  }

  int Bench(const ModelFlags& flags) {
    const RunConfig cfg = flags.Resolve();
    if (bench_op != "dynamic-conv") throw ConfigError("unknown bench op '" + bench_op + "'");
    DynamicConvBenchConfig bc;
    char sep = 0;
    std::stringstream ss(bench_size);
    if (!(ss >> bc.height >> sep >> bc.width) || sep != 'x' || bc.height < 1 || bc.width < 1) {
      throw ConfigError("--size must look like 64x64");
    }
    bc.slices = bench_slices;
    bc.groups = bench_groups;
    bc.channels_per_group = bench_cpg;
    bc.kernel_size = bench_kernel;
    bc.runs = bench_runs;
    bc.seed = cfg.seed;
    const std::string json = BenchReportToJson(BenchDynamicConv(bc));
    out << json << '\n';
    if (!output.empty()) WriteText(json, output);
    return kExitOk;
  }
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stereo disparity estimation with dynamic cost aggregation", "ggev"};
  app.require_subcommand(1);
  Commands cmd(out, err);
  std::map<std::string, ModelFlags> flags;

  auto* gen = app.add_subcommand("gen-scene", "Write a random-dot stereogram with ground truth");
  flags["gen-scene"].Register(gen, false);
  gen->add_option("--height", cmd.scene_h, "Image height (multiple of 16)");
  gen->add_option("--width", cmd.scene_w, "Image width (multiple of 16)");
  gen->add_option("--disparity", cmd.scene_disp, "Constant disparity when no --plane is given");
  gen->add_option("--plane", cmd.scene_planes, "Plane x0,y0,x1,y1,d[,slope] (repeatable)");
  gen->add_option("--out-dir", cmd.out_dir, "Output directory");

  auto* ext = app.add_subcommand("extract-features", "Write a feature pyramid container");
  flags["extract-features"].Register(ext, true);
  ext->add_option("--image", cmd.image, "Input PNM image")->required();
  ext->add_option("--cue", cmd.cue, "texture-left|texture-right|depth|depth-aware");
  ext->add_option("--out", cmd.output, "Manifest path (tensors are written beside it)")->required();

  auto* inf = app.add_subcommand("infer", "Estimate a disparity map");
  flags["infer"].Register(inf, true);
  inf->add_option("--left", cmd.left, "Left PNM image")->required();
  inf->add_option("--right", cmd.right, "Right PNM image")->required();
  inf->add_option("--out", cmd.output, "Output disparity PFM")->required();
  inf->add_option("--iterates-prefix", cmd.iterates_prefix,
                  "Write quarter-resolution iterates as <prefix>_NN.pfm");
  inf->add_option("--volume-out", cmd.volume_out, "Write the aggregated volume tensor");
  inf->add_option("--colormap", cmd.colormap, "Write a colour-mapped PPM of the disparity");

  auto* ev = app.add_subcommand("eval", "Compare a disparity map with ground truth");
  flags["eval"].Register(ev, false);
  ev->add_option("--pred", cmd.pred, "Predicted disparity PFM")->required();
  ev->add_option("--gt", cmd.gt, "Ground-truth disparity PFM")->required();
  ev->add_option("--thresholds", cmd.thresholds, "Bad-pixel thresholds, e.g. 1,2,3");
  ev->add_option("--mask", cmd.mask, "Region mask (P5, nonzero = evaluate)");
  ev->add_option("--region", cmd.region, "Region name recorded in the report");
  ev->add_option("--out", cmd.output, "Also write the JSON report here");

  auto* dv = app.add_subcommand("dump-volume", "Write the correlation or aggregated volume");
  flags["dump-volume"].Register(dv, true);
  dv->add_option("--left", cmd.left, "Left PNM image")->required();
  dv->add_option("--right", cmd.right, "Right PNM image")->required();
  dv->add_option("--out", cmd.output, "Output tensor")->required();
  dv->add_flag("--aggregated", cmd.aggregated, "Dump the aggregated volume instead of the raw one");
  dv->add_option("--slice", cmd.slice, "Only hypothesis d (G x H x W)");

  auto* da = app.add_subcommand("dump-affinity", "Write affinity rows of one hypothesis");
  flags["dump-affinity"].Register(da, true);
  da->add_option("--left", cmd.left, "Left PNM image")->required();
  da->add_option("--right", cmd.right, "Right PNM image")->required();
  da->add_option("--disparity", cmd.disparity, "Hypothesis index")->required();
  da->add_option("--grid-stride", cmd.grid_stride, "Pixel grid stride at quarter resolution");
  da->add_option("--out", cmd.output, "Output tensor (G x pixels x S^2)")->required();

  auto* bn = app.add_subcommand("bench", "Time a kernel against its serial oracle");
  flags["bench"].Register(bn, false);
  bn->add_option("--op", cmd.bench_op, "Kernel to time (dynamic-conv)");
  bn->add_option("--size", cmd.bench_size, "HxW, e.g. 64x64");
  bn->add_option("--disparities", cmd.bench_slices, "Number of hypothesis slices");
  bn->add_option("--groups", cmd.bench_groups, "Kernel groups");
  bn->add_option("--channels-per-group", cmd.bench_cpg, "Channels sharing each kernel");
  bn->add_option("--kernel", cmd.bench_kernel, "Kernel size (odd)");
  bn->add_option("--runs", cmd.bench_runs, "Timed runs; the median is reported");
  bn->add_option("--out", cmd.output, "Also write the JSON report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd.GenScene(flags["gen-scene"]);
    if (ext->parsed()) return cmd.ExtractFeatures(flags["extract-features"]);
    if (inf->parsed()) return cmd.Infer(flags["infer"]);
    if (ev->parsed()) return cmd.Eval(flags["eval"]);
    if (dv->parsed()) return cmd.DumpVolume(flags["dump-volume"]);
    if (da->parsed()) return cmd.DumpAffinity(flags["dump-affinity"]);
    if (bn->parsed()) return cmd.Bench(flags["bench"]);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SceneError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error (" << FormatErrorKindName(e.kind()) << "): " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace ggev
