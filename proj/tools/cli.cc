// Copyright 2026 The Blurkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blurkit/adapt_numerics.h"
#include "blurkit/blur_apply.h"
#include "blurkit/error.h"
#include "blurkit/evalmap.h"
#include "blurkit/image_io.h"
#include "blurkit/kernel_gen.h"
#include "blurkit/kernel_io.h"
#include "blurkit/labels_coco.h"
#include "blurkit/pipeline.h"
#include "blurkit/squint.h"

namespace blurkit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("failed to open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("failed to write " + path.string());
}

struct GenKernelsArgs {
  std::optional<int> p, e;
  int count = 0;
  uint64_t seed = 0;
  std::string out;
  int jobs = 1;
};

int GenKernels(const GenKernelsArgs& a, std::ostream& out) {
  CorpusSpec spec;
  spec.per_pair_count = a.count;
  spec.seed = a.seed;
  spec.out_dir = a.out;
  spec.jobs = a.jobs;
  if (a.p) spec.p_classes = {PClassFromIndex(*a.p - 1)};
  if (a.e) spec.e_classes = {EClassFromIndex(*a.e - 1)};
  const CorpusManifest m = GenerateCorpus(spec);
  size_t ok = 0;
  for (const CorpusEntry& e : m.entries) ok += e.ok ? 1 : 0;
  out << "wrote " << ok << " of " << m.entries.size() << " kernels to "
      << a.out << "\n";
  return m.complete ? kExitOk : kExitFailure;
}

struct BlurImageArgs {
  std::string in, out, kernel, kernel_out;
  int p = 1, e = 5;
  uint64_t seed = 0;
  double defocus = 0.0;
  int jobs = 1;
};

int BlurImage(const BlurImageArgs& a, std::ostream& out) {
  BlurKernel k = a.kernel.empty()
                     ? GenerateCenteredKernel(PClassFromIndex(a.p - 1),
                                              EClassFromIndex(a.e - 1), a.seed)
                     : ReadBfk1(a.kernel);
  if (a.defocus > 0.0) k = DefocusKernel(k, a.defocus);
  const ImageBuffer img = ReadImage(a.in);
  WriteImage(ConvolveReflect(img, SparsifyKernel(k), a.jobs), a.out);
  if (!a.kernel_out.empty()) WriteBfk1(k, a.kernel_out);
  out << KernelMetaToJson(k.meta).dump() << "\n";
  return kExitOk;
}

struct BlurDatasetArgs {
  std::string gt, images, out, policy = "generalist";
  int specialist_p = 1;
  bool high_exposure = false;
  bool clip = false;
  uint64_t seed = 0;
  int jobs = 1;
};

int BlurDataset(const BlurDatasetArgs& a, std::ostream& out) {
  const Dataset ds = LoadAnnotations(a.gt);
  MixPolicy policy;
  if (a.policy == "generalist") {
    policy = MixPolicy::Generalist();
  } else if (a.policy == "low-exposure") {
    policy = MixPolicy::LowExposure();
  } else {
    policy = MixPolicy::Specialist(PClassFromIndex(a.specialist_p - 1),
                                   a.high_exposure);
  }
  const BlurPlan plan = BuildPlan(ds, policy, a.seed);
  ExecuteOptions opts;
  opts.jobs = a.jobs;
  opts.clip = a.clip;
  const BlurredDatasetManifest m = ExecutePlan(plan, ds, a.images, a.out, opts);
  size_t sharp = 0, blurred = 0, failed = 0;
  for (const ManifestEntry& e : m.entries) {
    if (!e.ok) ++failed;
    else if (e.blur_class.sharp) ++sharp;
    else ++blurred;
  }
  out << "sharp " << sharp << ", blurred " << blurred << ", failed " << failed
      << "\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

struct ExpandLabelsArgs {
  std::string gt, manifest, out;
  bool clip = false;
};

int ExpandLabels(const ExpandLabelsArgs& a, std::ostream& out) {
  const Dataset ds = LoadAnnotations(a.gt);
  const BlurredDatasetManifest m = LoadBlurManifest(a.manifest);
  const Dataset expanded = TransformAnnotations(ds, m.ExtentsByImage(), a.clip);
  SaveAnnotations(expanded, a.out);
  out << "wrote " << expanded.annotations.size() << " annotations to " << a.out
      << "\n";
  return kExitOk;
}

struct EvaluateArgs {
  std::string gt, pred, regime = "standard", manifest, report, csv;
  std::vector<double> iou = {0.5};
  bool coco_range = false;
  bool clip = false;
  double score_threshold = 0.0;
};

int Evaluate(const EvaluateArgs& a, std::ostream& out) {
  const Dataset gt = LoadAnnotations(a.gt);
  const std::vector<Annotation> preds = LoadPredictions(a.pred);
  EvalConfig cfg;
  cfg.iou_thresholds = a.coco_range ? EvalConfig::CocoThresholds() : a.iou;
  cfg.score_threshold = a.score_threshold;
  cfg.clip_expanded = a.clip;
  std::optional<std::map<int64_t, Extents>> extents;
  if (a.regime == "expanded") {
    cfg.regime = LabelRegime::kExpanded;
    if (a.manifest.empty()) {
      throw InvalidArgument("--regime expanded requires --manifest");
    }
    extents = LoadBlurManifest(a.manifest).ExtentsByImage();
  }
  const EvalReport r = EvaluateMap(preds, gt, cfg, extents ? &*extents : nullptr);
  char line[128];
  for (size_t t = 0; t < r.iou_thresholds.size(); ++t) {
    std::snprintf(line, sizeof(line), "mAP@%g: %.4f\n", r.iou_thresholds[t],
                  r.map_at[t]);
    out << line;
  }
  if (r.iou_thresholds.size() > 1) {
    std::snprintf(line, sizeof(line), "mAP@[%g:%g]: %.4f\n", r.iou_thresholds.front(),
                  r.iou_thresholds.back(), r.map_mean);
    out << line;
  }
  if (!a.report.empty()) WriteText(a.report, r.ToJson().dump(2) + "\n");
  if (!a.csv.empty()) WriteText(a.csv, r.ToCsv());
  return kExitOk;
}

struct SweepArgs {
  std::string gt, pred, pred_template, out, regime = "expanded";
  std::vector<double> p_values, e_values;
  double iou = 0.5;
  uint64_t seed = 0;
  int jobs = 1;
};

std::string FillTemplate(std::string tmpl, double p, double e) {
  auto replace = [&](const std::string& key, double v) {
    std::ostringstream s;
    s << v;
    for (size_t pos; (pos = tmpl.find(key)) != std::string::npos;) {
      tmpl.replace(pos, key.size(), s.str());
    }
  };
  replace("{p}", p);
  replace("{e}", e);
  return tmpl;
}

int Sweep(const SweepArgs& a, std::ostream& out) {
  if (a.pred.empty() == a.pred_template.empty()) {
    throw InvalidArgument("give exactly one of --pred or --pred-template");
  }
  const Dataset gt = LoadAnnotations(a.gt);
  std::optional<std::vector<Annotation>> shared;
  if (!a.pred.empty()) shared = LoadPredictions(a.pred);
  const bool expanded = a.regime == "expanded";

  const SweepEvalFn eval = [&](double p, double e) {
    EvalConfig cfg;
    cfg.iou_thresholds = {a.iou};
    std::map<int64_t, Extents> extents;
    if (expanded) {
      cfg.regime = LabelRegime::kExpanded;
      extents = SyntheticExtents(gt, p, e, a.seed, a.jobs);
    }
    const std::vector<Annotation> preds =
        shared ? *shared : LoadPredictions(FillTemplate(a.pred_template, p, e));
    const EvalReport r = EvaluateMap(preds, gt, cfg, expanded ? &extents : nullptr);
    return SweepCellResult{r.map_at[0], gt.images.size()};
  };
  const std::string csv = SweepToCsv(SweepGrid(eval, a.p_values, a.e_values));
  if (a.out.empty()) {
    out << csv;
  } else {
    WriteText(a.out, csv);
  }
  return kExitOk;
}

ChannelStats StatsFromJson(const json& j) {
  try {
    return {j.at("mu").get<std::vector<double>>(),
            j.at("var").get<std::vector<double>>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("channel stats need mu and var arrays: ") +
                     e.what());
  }
}

struct MergeStatsArgs {
  std::string source, target, out;
  double source_weight = 16.0;
  double target_weight = 1.0;
};

int MergeStats(const MergeStatsArgs& a, std::ostream& out) {
  const ChannelStats merged =
      MergeBatchStats(StatsFromJson(ReadJson(a.source)),
                      StatsFromJson(ReadJson(a.target)), a.source_weight,
                      a.target_weight);
  const std::string text = json{{"mu", merged.mu}, {"var", merged.var}}.dump() + "\n";
  if (a.out.empty()) {
    out << text;
  } else {
    WriteText(a.out, text);
  }
  return kExitOk;
}

struct SquintArgs {
  std::string kernel;
  int p = 1, e = 5;
  uint64_t seed = 0;
};

int SquintFactorsCmd(const SquintArgs& a, std::ostream& out) {
  const BlurKernel k = a.kernel.empty()
                           ? GenerateCenteredKernel(PClassFromIndex(a.p - 1),
                                                    EClassFromIndex(a.e - 1), a.seed)
                           : ReadBfk1(a.kernel);
  const AxisSpreads s = KernelSpreads(k);
  const SquintFactors f = ComputeSquintFactors(s);
  const json j{{"s_x", s.s_x},
               {"s_y", s.s_y},
               {"theta", s.theta},
               {"sigma_major", s.sigma_major},
               {"sigma_minor", s.sigma_minor},
               {"f_x", f.f_x},
               {"f_y", f.f_y}};
  out << j.dump() << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"blurkit: egomotion blur kernels, blurred datasets and "
               "blur-aware detection evaluation"};
  app.name(args.empty() ? "blurkit" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", "blurkit 0.1.0");

  const auto p_check = CLI::Range(1, kNumPClasses);
  const auto e_check = CLI::Range(1, kNumEClasses);

  GenKernelsArgs gk;
  auto* gen = app.add_subcommand("gen-kernels", "Generate a centered kernel corpus");
  gen->add_option("--p", gk.p, "Camera-motion class 1..3 (default: all)")->check(p_check);
  gen->add_option("--e", gk.e, "Exposure class 1..5 (default: all)")->check(e_check);
  gen->add_option("--count", gk.count, "Kernels per (P, E) pair")->required()->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gk.seed, "Master seed");
  gen->add_option("--out", gk.out, "Output directory")->required();
  gen->add_option("--jobs", gk.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BlurImageArgs bi;
  auto* blur_img = app.add_subcommand("blur-image", "Blur one image");
  blur_img->add_option("--in", bi.in, "Input PNG/JPEG")->required();
  blur_img->add_option("--out", bi.out, "Output PNG/JPEG")->required();
  blur_img->add_option("--p", bi.p, "Camera-motion class 1..3")->check(p_check);
  blur_img->add_option("--e", bi.e, "Exposure class 1..5")->check(e_check);
  blur_img->add_option("--seed", bi.seed, "Kernel seed");
  blur_img->add_option("--kernel", bi.kernel, "Use this BFK1 kernel instead of generating one");
  blur_img->add_option("--kernel-out", bi.kernel_out, "Also save the kernel as BFK1");
  blur_img->add_option("--defocus", bi.defocus, "Gaussian defocus sigma in pixels")->check(CLI::NonNegativeNumber);
  blur_img->add_option("--jobs", bi.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BlurDatasetArgs bd;
  auto* blur_ds = app.add_subcommand("blur-dataset", "Blur a COCO dataset under a mixing policy");
  blur_ds->add_option("--gt", bd.gt, "COCO annotation JSON")->required();
  blur_ds->add_option("--images", bd.images, "Source image directory")->required();
  blur_ds->add_option("--out", bd.out, "Output directory")->required();
  blur_ds->add_option("--policy", bd.policy, "generalist | low-exposure | specialist")
      ->check(CLI::IsMember({"generalist", "low-exposure", "specialist"}));
  blur_ds->add_option("--specialist-p", bd.specialist_p, "P class for --policy specialist")->check(p_check);
  blur_ds->add_flag("--high-exposure", bd.high_exposure, "Specialist on E4/E5 only, no sharp images");
  blur_ds->add_flag("--clip", bd.clip, "Clip expanded labels to the image");
  blur_ds->add_option("--seed", bd.seed, "Master seed");
  blur_ds->add_option("--jobs", bd.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ExpandLabelsArgs el;
  auto* expand = app.add_subcommand("expand-labels", "Expand boxes with blur manifest extents");
  expand->add_option("--gt", el.gt, "COCO annotation JSON")->required();
  expand->add_option("--manifest", el.manifest, "Blur manifest from blur-dataset")->required();
  expand->add_option("--out", el.out, "Output annotation JSON")->required();
  expand->add_flag("--clip", el.clip, "Clip expanded boxes to the image");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compute mAP of predictions");
  evaluate->add_option("--gt", ev.gt, "COCO annotation JSON")->required();
  evaluate->add_option("--pred", ev.pred, "COCO results JSON")->required();
  evaluate->add_option("--iou", ev.iou, "IoU thresholds");
  evaluate->add_flag("--coco-range", ev.coco_range, "Use IoU 0.50:0.95");
  evaluate->add_option("--regime", ev.regime, "standard | expanded")
      ->check(CLI::IsMember({"standard", "expanded"}));
  evaluate->add_option("--manifest", ev.manifest, "Blur manifest (expanded regime)");
  evaluate->add_flag("--clip", ev.clip, "Clip expanded boxes to the image");
  evaluate->add_option("--score-threshold", ev.score_threshold, "Drop predictions below this score");
  evaluate->add_option("--report", ev.report, "Write the JSON report here");
  evaluate->add_option("--csv", ev.csv, "Write the per-class CSV here");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Evaluate over a grid of (P, E) values");
  sweep->add_option("--gt", sw.gt, "COCO annotation JSON")->required();
  sweep->add_option("--pred", sw.pred, "Predictions used for every cell");
  sweep->add_option("--pred-template", sw.pred_template, "Per-cell predictions, {p} and {e} substituted");
  sweep->add_option("--p-values", sw.p_values, "Anxiety values")->required();
  sweep->add_option("--e-values", sw.e_values, "Exposure fractions in (0, 1]")->required();
  sweep->add_option("--regime", sw.regime, "standard | expanded")
      ->check(CLI::IsMember({"standard", "expanded"}));
  sweep->add_option("--iou", sw.iou, "IoU threshold");
  sweep->add_option("--seed", sw.seed, "Kernel seed");
  sweep->add_option("--out", sw.out, "CSV output (default stdout)");
  sweep->add_option("--jobs", sw.jobs, "Worker threads")->check(CLI::PositiveNumber);

  MergeStatsArgs ms;
  auto* merge = app.add_subcommand("merge-stats", "Blend source and minibatch normalization statistics");
  merge->add_option("--source", ms.source, "JSON {mu, var} of the training statistics")->required();
  merge->add_option("--target", ms.target, "JSON {mu, var} of the minibatch statistics")->required();
  merge->add_option("--N", ms.source_weight, "Source weight")->check(CLI::PositiveNumber);
  merge->add_option("--n", ms.target_weight, "Target weight")->check(CLI::PositiveNumber);
  merge->add_option("--out", ms.out, "Output JSON (default stdout)");

  SquintArgs sq;
  auto* squint = app.add_subcommand("squint-factors", "Kernel spreads and squint factors");
  squint->add_option("--kernel", sq.kernel, "BFK1 kernel (default: generate one)");
  squint->add_option("--p", sq.p, "Camera-motion class 1..3")->check(p_check);
  squint->add_option("--e", sq.e, "Exposure class 1..5")->check(e_check);
  squint->add_option("--seed", sq.seed, "Kernel seed");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) argv.push_back("blurkit");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "blurkit 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return GenKernels(gk, out);
    if (blur_img->parsed()) return BlurImage(bi, out);
    if (blur_ds->parsed()) return BlurDataset(bd, out);
    if (expand->parsed()) return ExpandLabels(el, out);
    if (evaluate->parsed()) return Evaluate(ev, out);
    if (sweep->parsed()) return Sweep(sw, out);
    if (merge->parsed()) return MergeStats(ms, out);
    if (squint->parsed()) return SquintFactorsCmd(sq, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace blurkit::cli
