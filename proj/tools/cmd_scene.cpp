/**********
 *   Copyright 2026 The polarcv authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "polarcv/io.hpp"
#include "polarcv/metrics.hpp"
#include "polarcv/optimize.hpp"
#include "polarcv/plot.hpp"

namespace polarcv::cli {

// ---- render ----

namespace {

struct RenderOpts {
  CommonOpts common;
  std::string scene;
  int frame = -1;  // -1: all frames
  double depth_scale = 20.0;
};

void write_frame_outputs(const std::filesystem::path& out, int f, const RenderResult& r,
                         double depth_scale, ManifestWriter* manifest) {
  const std::string prefix = "frame" + std::to_string(f);
  const auto put = [&](const std::string& name, auto&& writer) {
    const auto path = out / name;
    writer(path);
    if (manifest) manifest->add_output(path);
  };
  put(prefix + "_depth.pfm", [&](const auto& p) { write_pfm(p, r.depth); });
  put(prefix + "_depth16.png", [&](const auto& p) {
    Image<std::uint16_t> img(r.depth.width(), r.depth.height());
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x)
        img(x, y) = enc::depth_to_u16(r.depth(x, y), depth_scale);
    write_png_gray16(p, img);
  });
  put(prefix + "_iota.png",
      [&](const auto& p) { write_png_gray16(p, enc::encode(r.params.iota, enc::iota_to_u16)); });
  put(prefix + "_alpha.png",
      [&](const auto& p) { write_png_gray16(p, enc::encode(r.params.alpha, enc::alpha_to_u16)); });
  put(prefix + "_rho.png",
      [&](const auto& p) { write_png_gray16(p, enc::encode(r.params.rho, enc::rho_to_u16)); });
  put(prefix + "_mosaic.png",
      [&](const auto& p) { write_png_gray16(p, enc::encode(r.mosaic.values, enc::unit_to_u16)); });
  put(prefix + "_specular.png", [&](const auto& p) {
    Image<std::uint8_t> m(r.specular_mask.width(), r.specular_mask.height());
    for (int y = 0; y < m.height(); ++y)
      for (int x = 0; x < m.width(); ++x) m(x, y) = r.specular_mask(x, y) ? 255 : 0;
    write_png_gray8(p, m);
  });
}

void run_render(const RenderOpts& o) {
  const auto out = o.common.out_dir();
  ManifestWriter manifest("render", o.common);
  manifest.add_input("scene", o.scene);
  manifest.config()["depth_scale"] = o.depth_scale;
  manifest.config()["frame"] = o.frame;

  const SceneSpec scene = load_scene_arg(o.scene);
  scene.save_json(out / "scene.json");
  manifest.add_output(out / "scene.json");

  const int n = static_cast<int>(scene.frames.size());
  const int first = o.frame < 0 ? 0 : o.frame;
  const int last = o.frame < 0 ? n - 1 : o.frame;
  if (first < 0 || last >= n) throw InvalidInputError("frame index out of range");
  for (int f = first; f <= last; ++f) {
    const RenderResult r = render(scene, f, o.common.threads);
    write_frame_outputs(out, f, r, o.depth_scale, &manifest);
  }
  manifest.write(out);
}

}  // namespace

void register_render(CLI::App& app) {
  auto o = std::make_shared<RenderOpts>();
  CLI::App* cmd = app.add_subcommand(
      "render", "render a synthetic scene (JSON spec or built-in benchmark name)");
  cmd->add_option("--scene", o->scene, "scene JSON path or benchmark name")->required();
  cmd->add_option("--frame", o->frame, "frame index (default: all frames)");
  cmd->add_option("--depth-scale", o->depth_scale,
                  "full scale for 16-bit depth exports (default 20)");
  o->common.attach(cmd);
  cmd->callback([o] { run_render(*o); });
}

// ---- optimize ----

namespace {

struct OptimizeOpts {
  CommonOpts common;
  std::string scene;
  std::string weights_path;
  std::string variant = "real";
  std::string init = "gt";
  std::string config_path;
  double gamma_override = -1.0;  // >=0 overrides the weights file
  int target_frame = 0;
  double depth_scale = 20.0;
};

EfieldVariant parse_variant(const std::string& v) {
  if (v == "real") return EfieldVariant::kReal;
  if (v == "approx") return EfieldVariant::kApprox;
  throw InvalidInputError("--variant must be real or approx");
}

void run_optimize(const OptimizeOpts& o) {
  const auto out = o.common.out_dir();
  ManifestWriter manifest("optimize", o.common);
  manifest.add_input("scene", o.scene);
  manifest.config()["variant"] = o.variant;
  manifest.config()["init"] = o.init;
  manifest.config()["target_frame"] = o.target_frame;
  manifest.config()["depth_scale"] = o.depth_scale;

  const SceneSpec scene = load_scene_arg(o.scene);
  LossWeights weights;
  if (!o.weights_path.empty()) {
    weights = LossWeights::load_json(o.weights_path);
    manifest.add_input("weights", o.weights_path);
  }
  if (o.gamma_override >= 0.0) weights.gamma_polar = o.gamma_override;
  manifest.config()["weights"] = nlohmann::json::parse(weights.to_json_string());
  OptimizeConfig cfg;
  if (!o.config_path.empty()) {
    cfg = OptimizeConfig::load_json(o.config_path);
    manifest.add_input("optimizer_config", o.config_path);
  }

  const LossProblem problem = build_loss_problem(scene, o.target_frame, o.common.threads);
  const ScalarField init = make_init_depth(o.init, problem.gt_depth, o.common.seed);

  const OptimizeResult result =
      optimize_depth(init, problem.target, problem.sources, problem.params, scene.camera,
                     weights, parse_variant(o.variant), cfg, &problem.gt_depth,
                     o.common.threads);

  write_pfm(out / "final_depth.pfm", result.depth);
  manifest.add_output(out / "final_depth.pfm");
  Image<std::uint16_t> d16(result.depth.width(), result.depth.height());
  for (int y = 0; y < d16.height(); ++y)
    for (int x = 0; x < d16.width(); ++x)
      d16(x, y) = enc::depth_to_u16(result.depth(x, y), o.depth_scale);
  write_png_gray16(out / "final_depth16.png", d16);
  manifest.add_output(out / "final_depth16.png");
  write_pfm(out / "init_depth.pfm", init);
  manifest.add_output(out / "init_depth.pfm");
  write_pfm(out / "gt_depth.pfm", problem.gt_depth);
  manifest.add_output(out / "gt_depth.pfm");

  result.trace.write_csv(out / "trace.csv");
  manifest.add_output(out / "trace.csv");
  {
    std::ofstream os(out / "breakdown.json");
    os << result.final_breakdown.to_json_string() << "\n";
    manifest.add_output(out / "breakdown.json");
  }
  manifest.config()["stop_reason"] = result.trace.stop_reason;
  manifest.write(out);
}

}  // namespace

void register_optimize(CLI::App& app) {
  auto o = std::make_shared<OptimizeOpts>();
  CLI::App* cmd = app.add_subcommand(
      "optimize", "minimize the polarimetric depth loss over a depth map");
  cmd->add_option("--scene", o->scene, "scene JSON path or benchmark name")->required();
  cmd->add_option("--weights", o->weights_path, "loss weights JSON");
  cmd->add_option("--gamma", o->gamma_override, "override the polarimetric weight");
  cmd->add_option("--variant", o->variant, "electric-field estimate: real|approx");
  cmd->add_option("--init", o->init, "gt | tilt:<deg> | noise:<frac> | scale:<c>");
  cmd->add_option("--config", o->config_path, "optimizer config JSON");
  cmd->add_option("--target-frame", o->target_frame, "target frame index (default 0)");
  cmd->add_option("--depth-scale", o->depth_scale,
                  "full scale for 16-bit depth exports (default 20)");
  o->common.attach(cmd);
  cmd->callback([o] { run_optimize(*o); });
}

// ---- eval ----

namespace {

struct EvalOpts {
  CommonOpts common;
  std::string pred;
  std::string gt;
  std::string scene;
  std::string rho_path;
  std::string trace_path;
  std::string sweep_gamma;
  std::string seg_pred, seg_gt, legend;
  std::string variant = "real";
  std::string init = "tilt:10";
  double rho_min = 0.4;
  double crop = 0.15;
  double depth_scale = 20.0;
  int target_frame = 0;
};

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InvalidInputError("unparsable number in list: " + tok);
    }
  }
  if (out.empty()) throw InvalidInputError("empty number list");
  return out;
}

void depth_eval(const EvalOpts& o, const std::filesystem::path& out,
                ManifestWriter& manifest) {
  const ScalarField pred = read_depth_file(o.pred, o.depth_scale);
  ScalarField gt;
  ScalarField rho;
  bool have_rho = false;
  if (!o.gt.empty()) {
    gt = read_depth_file(o.gt, o.depth_scale);
    manifest.add_input("gt", o.gt);
  } else if (!o.scene.empty()) {
    const SceneSpec scene = load_scene_arg(o.scene);
    const RenderResult r = render(scene, o.target_frame, o.common.threads);
    gt = r.depth;
    rho = r.params.rho;
    have_rho = true;
    manifest.add_input("scene", o.scene);
  } else {
    throw InvalidInputError("eval needs --gt or --scene for the reference depth");
  }
  if (!o.rho_path.empty()) {
    const GrayImageFile f = read_gray(o.rho_path);
    rho = enc::decode(f.pixels, enc::u16_to_rho);
    have_rho = true;
    manifest.add_input("rho", o.rho_path);
  }
  if (!pred.same_size(gt)) throw InvalidInputError("pred/gt size mismatch");

  CsvWriter csv({"prediction", "region", "pixels", "abs_rel", "sq_rel", "rmse", "rmse_log",
                 "delta1", "delta2", "delta3"});
  std::vector<RegionKind> kinds{RegionKind::kRaw, RegionKind::kCropped};
  if (have_rho) kinds.push_back(RegionKind::kSpecular);
  for (RegionKind kind : kinds) {
    const MaskImage mask = region_mask(kind, pred.width(), pred.height(),
                                       have_rho ? &rho : nullptr, o.rho_min, o.crop);
    const DepthMetrics m = depth_metrics(pred, gt, mask);
    csv.add_row({o.pred, region_kind_name(kind), std::to_string(m.count),
                 format_double(m.abs_rel), format_double(m.sq_rel), format_double(m.rmse),
                 format_double(m.rmse_log), format_double(m.delta1),
                 format_double(m.delta2), format_double(m.delta3)});
  }
  csv.write(out / "metrics.csv");
  manifest.add_output(out / "metrics.csv");
}

void trace_plot(const EvalOpts& o, const std::filesystem::path& out,
                ManifestWriter& manifest) {
  std::ifstream is(o.trace_path);
  if (!is) throw InvalidInputError("cannot open trace: " + o.trace_path);
  manifest.add_input("trace", o.trace_path);
  std::string line;
  std::getline(is, line);  // header
  PlotSeries series;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string iter, total;
    if (!std::getline(ls, iter, ',') || !std::getline(ls, total, ',')) continue;
    try {
      series.x.push_back(std::stod(iter));
      series.y.push_back(std::stod(total));
    } catch (const std::exception&) {
      throw InvalidInputError("unparsable trace row: " + line);
    }
  }
  PlotOptions popts;
  popts.title = "total loss per iteration";
  popts.log_y = true;
  write_png_rgb8(out / "lambda_trace.png", line_plot({series}, popts));
  manifest.add_output(out / "lambda_trace.png");
}

void sweep_gamma(const EvalOpts& o, const std::filesystem::path& out,
                 ManifestWriter& manifest) {
  if (o.scene.empty()) throw InvalidInputError("--sweep-gamma needs --scene");
  const std::vector<double> gammas = parse_double_list(o.sweep_gamma);
  const SceneSpec scene = load_scene_arg(o.scene);
  const LossProblem problem = build_loss_problem(scene, o.target_frame, o.common.threads);
  const ScalarField init = make_init_depth(o.init, problem.gt_depth, o.common.seed);
  const MaskImage spec_mask =
      region_mask(RegionKind::kSpecular, problem.gt_depth.width(),
                  problem.gt_depth.height(), &problem.rho, o.rho_min, o.crop);

  CsvWriter csv({"gamma", "specular_rmse", "raw_rmse", "final_total", "iterations"});
  PlotSeries series;
  for (double gamma : gammas) {
    LossWeights weights;
    weights.gamma_polar = gamma;
    OptimizeConfig cfg;
    const OptimizeResult res = optimize_depth(
        init, problem.target, problem.sources, problem.params, scene.camera, weights,
        parse_variant(o.variant), cfg, &problem.gt_depth, o.common.threads);
    const MaskImage raw_mask =
        region_mask(RegionKind::kRaw, res.depth.width(), res.depth.height());
    const DepthMetrics spec_m = depth_metrics(res.depth, problem.gt_depth, spec_mask);
    const DepthMetrics raw_m = depth_metrics(res.depth, problem.gt_depth, raw_mask);
    csv.add_row({format_double(gamma), format_double(spec_m.rmse),
                 format_double(raw_m.rmse), format_double(res.final_breakdown.total),
                 std::to_string(res.trace.rows.back().iteration)});
    series.x.push_back(gamma);
    series.y.push_back(spec_m.rmse);
  }
  csv.write(out / "gamma_sweep.csv");
  manifest.add_output(out / "gamma_sweep.csv");
  PlotOptions popts;
  popts.title = "specular rmse vs gamma";
  write_png_rgb8(out / "rmse_vs_gamma.png", line_plot({series}, popts));
  manifest.add_output(out / "rmse_vs_gamma.png");
}

void seg_eval(const EvalOpts& o, const std::filesystem::path& out,
              ManifestWriter& manifest) {
  const GrayImageFile pred_file = read_gray(o.seg_pred);
  const GrayImageFile gt_file = read_gray(o.seg_gt);
  manifest.add_input("seg_pred", o.seg_pred);
  manifest.add_input("seg_gt", o.seg_gt);

  // Optional legend remaps file indices onto the canonical class order.
  std::array<int, 256> remap{};
  for (int i = 0; i < 256; ++i) remap[i] = i;
  if (!o.legend.empty()) {
    std::ifstream is(o.legend);
    if (!is) throw InvalidInputError("cannot open legend: " + o.legend);
    nlohmann::json j;
    is >> j;
    for (auto it = j.begin(); it != j.end(); ++it) {
      const int index = std::stoi(it.key());
      const std::string name = it.value().get<std::string>();
      bool found = false;
      for (int c = 0; c < kNumSegClasses; ++c) {
        if (name == seg_class_name(static_cast<SegClass>(c))) {
          remap[index] = c;
          found = true;
          break;
        }
      }
      if (!found) throw InvalidInputError("unknown class in legend: " + name);
    }
    manifest.add_input("legend", o.legend);
  }

  const auto to_labels = [&](const GrayImageFile& f) {
    Image<std::uint8_t> labels(f.pixels.width(), f.pixels.height());
    for (int y = 0; y < labels.height(); ++y)
      for (int x = 0; x < labels.width(); ++x) {
        const int v = f.pixels(x, y);
        if (v > 255) throw InvalidInputError("segmentation maps must be 8-bit");
        labels(x, y) = static_cast<std::uint8_t>(remap[v]);
      }
    return labels;
  };
  const SegMetrics m = seg_metrics(to_labels(pred_file), to_labels(gt_file));

  CsvWriter csv({"class", "accuracy", "iou", "recall"});
  for (int c = 0; c < kNumSegClasses; ++c) {
    const SegClassMetrics& cm = m.per_class[c];
    if (!cm.present) {
      csv.add_row({seg_class_name(static_cast<SegClass>(c)), "", "", ""});
      continue;
    }
    csv.add_row({seg_class_name(static_cast<SegClass>(c)), format_double(cm.accuracy),
                 format_double(cm.iou), format_double(cm.recall)});
  }
  csv.add_row({"mean", format_double(m.mean_accuracy), format_double(m.mean_iou),
               format_double(m.mean_recall)});
  csv.add_row({"mean_excl_building", format_double(m.mean_accuracy_excl_building),
               format_double(m.mean_iou_excl_building),
               format_double(m.mean_recall_excl_building)});
  csv.write(out / "seg_metrics.csv");
  manifest.add_output(out / "seg_metrics.csv");
}

void run_eval(const EvalOpts& o) {
  const auto out = o.common.out_dir();
  ManifestWriter manifest("eval", o.common);
  manifest.config()["rho_min"] = o.rho_min;
  manifest.config()["crop"] = o.crop;
  manifest.config()["depth_scale"] = o.depth_scale;

  bool did_anything = false;
  if (!o.pred.empty()) {
    manifest.add_input("pred", o.pred);
    depth_eval(o, out, manifest);
    did_anything = true;
  }
  if (!o.trace_path.empty()) {
    trace_plot(o, out, manifest);
    did_anything = true;
  }
  if (!o.sweep_gamma.empty()) {
    manifest.config()["sweep_gamma"] = o.sweep_gamma;
    manifest.config()["variant"] = o.variant;
    manifest.config()["init"] = o.init;
    sweep_gamma(o, out, manifest);
    did_anything = true;
  }
  if (!o.seg_pred.empty() || !o.seg_gt.empty()) {
    if (o.seg_pred.empty() || o.seg_gt.empty())
      throw InvalidInputError("segmentation eval needs both --seg-pred and --seg-gt");
    seg_eval(o, out, manifest);
    did_anything = true;
  }
  if (!did_anything)
    throw InvalidInputError(
        "eval: nothing to do (give --pred, --trace, --sweep-gamma or --seg-pred/--seg-gt)");
  manifest.write(out);
}

}  // namespace

void register_eval(CLI::App& app) {
  auto o = std::make_shared<EvalOpts>();
  CLI::App* cmd = app.add_subcommand(
      "eval", "depth/segmentation metrics, trace plots and gamma sweeps");
  cmd->add_option("--pred", o->pred, "predicted depth (.pfm or 16-bit gray)");
  cmd->add_option("--gt", o->gt, "ground-truth depth file");
  cmd->add_option("--scene", o->scene, "scene (JSON or benchmark name) for gt/rho");
  cmd->add_option("--rho", o->rho_path, "rho channel (16-bit) for the specular region");
  cmd->add_option("--rho-min", o->rho_min, "specular threshold (default 0.4)");
  cmd->add_option("--crop", o->crop, "border crop fraction per side (default 0.15)");
  cmd->add_option("--depth-scale", o->depth_scale, "full scale of 16-bit depth inputs");
  cmd->add_option("--target-frame", o->target_frame, "scene frame for gt (default 0)");
  cmd->add_option("--trace", o->trace_path, "optimizer trace.csv to plot");
  cmd->add_option("--sweep-gamma", o->sweep_gamma,
                  "comma list of gamma values; runs the optimizer per value");
  cmd->add_option("--variant", o->variant, "e-field variant for --sweep-gamma");
  cmd->add_option("--init", o->init, "init spec for --sweep-gamma (default tilt:10)");
  cmd->add_option("--seg-pred", o->seg_pred, "predicted label map (8-bit)");
  cmd->add_option("--seg-gt", o->seg_gt, "ground-truth label map (8-bit)");
  cmd->add_option("--legend", o->legend, "JSON class-index legend");
  o->common.attach(cmd);
  cmd->callback([o] { run_eval(*o); });
}

}  // namespace polarcv::cli
