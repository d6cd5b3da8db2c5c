// Command-line front end: model-gt, separate, infer, eval, synth, match.
//
// Exit codes: 0 success, 1 usage/validation/config error, 2 IO/format error.
// Results go to stdout; diagnostics go to stderr.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixgt/config.hpp"
#include "mixgt/estimation.hpp"
#include "mixgt/gt_modeling.hpp"
#include "mixgt/io_formats.hpp"
#include "mixgt/mode_extraction.hpp"
#include "mixgt/supervision.hpp"
#include "mixgt/synth.hpp"

namespace fs = std::filesystem;
using namespace mixgt;

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

fs::path mask_path_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".mask.pfm");
  return p;
}

const ProbabilityVolume& pick_member(const EnsembleVolumes& ensemble, std::size_t member) {
  if (member >= ensemble.members.size()) {
    throw ConfigError("--member " + std::to_string(member) + " but the file holds " +
                      std::to_string(ensemble.members.size()) + " member(s)");
  }
  return ensemble.members[member];
}

struct ModelGtArgs {
  std::vector<std::string> ensembles;
  std::string labels;
  std::string out;
  std::string config;
  std::string modes_json;
  double eps = 3.0;
  std::size_t min_pts = 2;
  double epsilon = 1e-3;
  double sigma = 1e-3;
  double label_w = 1.0;
  double label_b = 0.8;
  bool keep_noise = false;
  bool model_unlabeled = false;
  unsigned workers = 0;
};

int run_model_gt(const ModelGtArgs& args, const CLI::App& cmd) {
  KeyValueConfig kv;
  if (!args.config.empty()) kv = KeyValueConfig::load(args.config);
  auto override_with = [&](const char* flag, const char* key, const std::string& value) {
    if (cmd.count(flag) > 0) kv.set(key, value);
  };
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  override_with("--eps", "eps", real(args.eps));
  override_with("--min-pts", "min_pts", std::to_string(args.min_pts));
  override_with("--epsilon", "epsilon", real(args.epsilon));
  override_with("--sigma", "sigma", real(args.sigma));
  override_with("--label-w", "label_w", real(args.label_w));
  override_with("--label-b", "label_b", real(args.label_b));
  override_with("--keep-noise", "keep_noise", args.keep_noise ? "true" : "false");
  override_with("--model-unlabeled", "model_unlabeled", args.model_unlabeled ? "true" : "false");
  const ModelingConfig cfg = modeling_config_from(kv);

  EnsembleVolumes ensemble;
  for (const std::string& file : args.ensembles) {
    EnsembleVolumes part = read_volume(file);
    for (ProbabilityVolume& v : part.members) ensemble.members.push_back(std::move(v));
  }
  ensemble.validate();
  const DisparityMap labels = read_pfm(args.labels);

  const VolumeGroundTruth gt = model_ground_truth_volume(ensemble, labels, cfg, args.workers);

  write_volume(args.out, EnsembleVolumes{{gt.volume}});
  DisparityMap mask(gt.volume.height(), gt.volume.width());
  for (std::size_t i = 0; i < gt.mask.size(); ++i) mask.values()[i] = gt.mask[i] ? 1.0f : 0.0f;
  write_pfm(mask_path_for(args.out), mask);

  if (!args.modes_json.empty()) {
    ModesDocument doc{gt.volume.height(), gt.volume.width(), gt.volume.depth(), {}};
    for (std::size_t y = 0; y < doc.height; ++y) {
      for (std::size_t x = 0; x < doc.width; ++x) {
        const std::size_t idx = y * doc.width + x;
        if (gt.mask[idx]) doc.pixels.push_back({y, x, gt.mixtures[idx]});
      }
    }
    write_modes_json(args.modes_json, doc);
  }

  std::size_t valid = 0;
  for (std::uint8_t m : gt.mask) valid += m;
  std::cerr << "model-gt: " << ensemble.members.size() << " member(s), " << valid << "/"
            << gt.mask.size() << " pixels supervised\n";
  return 0;
}

struct SeparateArgs {
  std::string volume;
  std::string out;
  double epsilon = 1e-3;
  double sigma = 1e-3;
  std::size_t member = 0;
};

int run_separate(const SeparateArgs& args) {
  const SeparationConfig cfg{args.epsilon, args.sigma};
  cfg.validate();
  const EnsembleVolumes ensemble = read_volume(args.volume);
  const ProbabilityVolume& volume = pick_member(ensemble, args.member);
  ModesDocument doc{volume.height(), volume.width(), volume.depth(), {}};
  for (std::size_t y = 0; y < volume.height(); ++y) {
    for (std::size_t x = 0; x < volume.width(); ++x) {
      PixelModes px{y, x, {}};
      px.mixture.modes = separate_modes(volume.distribution(y, x), cfg);
      doc.pixels.push_back(std::move(px));
    }
  }
  write_modes_json(args.out, doc);
  return 0;
}

struct InferArgs {
  std::string volume;
  std::string estimator;
  std::string out;
  double epsilon = 1e-3;
  double sigma = 1e-3;
  std::size_t member = 0;
  unsigned workers = 0;
};

int run_infer(const InferArgs& args) {
  const Estimator estimator = parse_estimator(args.estimator);
  const SeparationConfig cfg{args.epsilon, args.sigma};
  cfg.validate();
  const EnsembleVolumes ensemble = read_volume(args.volume);
  write_pfm(args.out, infer_volume(pick_member(ensemble, args.member), estimator, cfg, args.workers));
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string gt;
  double threshold = 3.0;
  bool epe = false;
};

int run_eval(const EvalArgs& args) {
  const DisparityMap pred = read_pfm(args.pred);
  const DisparityMap gt = read_pfm(args.gt);
  const double rate = outlier_rate(pred, gt, MetricThreshold{args.threshold});
  std::printf("outliers_gt_%spx=%.4f\n", format_number(args.threshold).c_str(), rate);
  if (args.epe) std::printf("epe=%.4f\n", end_point_error(pred, gt));
  return 0;
}

struct SynthArgs {
  std::string spec;
  std::string out_truth;
  std::string out_labels;
  std::string out_ensemble;
};

int run_synth(const SynthArgs& args) {
  const SynthConfig cfg = synth_config_from(KeyValueConfig::load(args.spec));
  const synth::Scene scene = synth::gen_scene(cfg.scene);
  const synth::PerturbedEnsemble ensemble = synth::perturb_ensemble(scene, cfg.perturb);
  write_volume(args.out_truth, EnsembleVolumes{{scene.volume}});
  write_pfm(args.out_labels, scene.labels);
  write_volume(args.out_ensemble, ensemble.ensemble);
  return 0;
}

struct MatchArgs {
  std::string left;
  std::string right;
  std::size_t dmax = 64;
  std::size_t window = 5;
  double tau = 0.05;
  std::string out;
  unsigned workers = 0;
};

int run_match(const MatchArgs& args) {
  const GrayImage left = read_pgm(args.left);
  const GrayImage right = read_pgm(args.right);
  const ProbabilityVolume volume =
      synth::block_match(left, right, args.dmax, args.window, args.tau, args.workers);
  write_volume(args.out, EnsembleVolumes{{volume}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-modal ground-truth distribution modeling for stereo matching"};
  app.require_subcommand(1);

  ModelGtArgs gt_args;
  CLI::App* model_gt = app.add_subcommand("model-gt", "Model ground-truth distributions from an ensemble");
  model_gt->add_option("--ensemble", gt_args.ensembles, "Ensemble MPV file(s), concatenated in order")
      ->required()->expected(1, -1);
  model_gt->add_option("--labels", gt_args.labels, "Disparity labels (PFM)")->required();
  model_gt->add_option("--out", gt_args.out, "Output MPV; the mask goes to <out>.mask.pfm")->required();
  model_gt->add_option("--config", gt_args.config, "key=value configuration file");
  model_gt->add_option("--eps", gt_args.eps, "Clustering distance along mu")->capture_default_str();
  model_gt->add_option("--min-pts", gt_args.min_pts, "Clustering density threshold")->capture_default_str();
  model_gt->add_option("--epsilon", gt_args.epsilon, "Mode separation probability threshold")->capture_default_str();
  model_gt->add_option("--sigma", gt_args.sigma, "Mode separation descent threshold")->capture_default_str();
  model_gt->add_option("--label-w", gt_args.label_w, "Label anchor weight")->capture_default_str();
  model_gt->add_option("--label-b", gt_args.label_b, "Label anchor scale")->capture_default_str();
  model_gt->add_flag("--keep-noise", gt_args.keep_noise, "Keep noise points as modes");
  model_gt->add_flag("--model-unlabeled", gt_args.model_unlabeled, "Model unlabeled pixels from the ensemble alone");
  model_gt->add_option("--modes-json", gt_args.modes_json, "Write per-pixel fused modes as JSON");
  model_gt->add_option("--workers", gt_args.workers, "Worker threads (default: all cores)");

  SeparateArgs sep_args;
  CLI::App* separate = app.add_subcommand("separate", "Separate and fit the modes of every pixel");
  separate->add_option("--volume", sep_args.volume, "Input MPV")->required();
  separate->add_option("--out", sep_args.out, "Output JSON")->required();
  separate->add_option("--epsilon", sep_args.epsilon)->capture_default_str();
  separate->add_option("--sigma", sep_args.sigma)->capture_default_str();
  separate->add_option("--member", sep_args.member, "Ensemble member to read")->capture_default_str();

  InferArgs infer_args;
  CLI::App* infer = app.add_subcommand("infer", "Estimate disparities from a probability volume");
  infer->add_option("--volume", infer_args.volume, "Input MPV")->required();
  infer->add_option("--estimator", infer_args.estimator, "dme or softargmin")->required();
  infer->add_option("--out", infer_args.out, "Output PFM")->required();
  infer->add_option("--epsilon", infer_args.epsilon)->capture_default_str();
  infer->add_option("--sigma", infer_args.sigma)->capture_default_str();
  infer->add_option("--member", infer_args.member, "Ensemble member to read")->capture_default_str();
  infer->add_option("--workers", infer_args.workers, "Worker threads (default: all cores)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Outlier rate (and EPE) of a disparity map");
  eval->add_option("--pred", eval_args.pred, "Predicted PFM")->required();
  eval->add_option("--gt", eval_args.gt, "Ground-truth PFM")->required();
  eval->add_option("--threshold", eval_args.threshold, "Error threshold k in pixels")->required();
  eval->add_flag("--epe", eval_args.epe, "Also print the end-point error");

  SynthArgs synth_args;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene and ensemble");
  synth_cmd->add_option("--spec", synth_args.spec, "key=value scene specification")->required();
  synth_cmd->add_option("--out-truth", synth_args.out_truth, "True distributions (MPV)")->required();
  synth_cmd->add_option("--out-labels", synth_args.out_labels, "Labels (PFM)")->required();
  synth_cmd->add_option("--out-ensemble", synth_args.out_ensemble, "Perturbed ensemble (MPV)")->required();

  MatchArgs match_args;
  CLI::App* match = app.add_subcommand("match", "Block-matching probability volume from a PGM pair");
  match->add_option("--left", match_args.left, "Left image (PGM)")->required();
  match->add_option("--right", match_args.right, "Right image (PGM)")->required();
  match->add_option("--dmax", match_args.dmax, "Number of disparity candidates")->required();
  match->add_option("--window", match_args.window, "Odd window size")->required();
  match->add_option("--tau", match_args.tau, "Softmax temperature")->required();
  match->add_option("--out", match_args.out, "Output MPV")->required();
  match->add_option("--workers", match_args.workers, "Worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return 1;
  }

  try {
    if (*model_gt) return run_model_gt(gt_args, *model_gt);
    if (*separate) return run_separate(sep_args);
    if (*infer) return run_infer(infer_args);
    if (*eval) return run_eval(eval_args);
    if (*synth_cmd) return run_synth(synth_args);
    if (*match) return run_match(match_args);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
