// coseg: saliency-fusion object co-segmentation.
//
//   coseg run | cluster | fuse | segment  [--config FILE] [--<key> VALUE ...]
//   coseg evaluate --dataset DIR --preds DIR [--report-dir DIR]
//   coseg gen-synthetic --output-dir DIR [--group-size N ...]
//
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coseg/errors.hpp"
#include "coseg/eval.hpp"
#include "coseg/pipeline.hpp"
#include "coseg/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;

struct PipelineFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
};

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& flags) {
  cmd->add_option("--config", flags.config_file, "key=value configuration file");
  for (const auto& key : coseg::config_keys()) {
    cmd->add_option(flag_name(key), flags.values[key], "overrides config key '" + key + "'");
  }
}

coseg::PipelineConfig resolve(CLI::App* cmd, const PipelineFlags& flags) {
  coseg::PipelineConfig config;
  if (!flags.config_file.empty()) {
    config = coseg::load_config(flags.config_file);
  }
  for (const auto& key : coseg::config_keys()) {
    if (cmd->count(flag_name(key)) > 0) {
      coseg::set_config_value(config, key, flags.values.at(key));
    }
  }
  return config;
}

int evaluate(const std::string& dataset_root, const std::string& preds, const std::string& report_dir) {
  const coseg::Dataset dataset = coseg::load_dataset(dataset_root);
  for (const auto& w : dataset.warnings) {
    std::cerr << "warning: " << w << '\n';
  }
  const coseg::ScoreReport report = coseg::score(preds, dataset);
  const std::string table = coseg::format_score_table(report);
  const std::string lines = coseg::format_score_lines(report);
  std::cout << table << lines;
  if (!report_dir.empty()) {
    fs::create_directories(report_dir);
    std::ofstream(fs::path(report_dir) / "report.txt") << table;
    std::ofstream(fs::path(report_dir) / "scores.txt") << lines;
  }
  if (!report.complete()) {
    std::cerr << report.missing.size() << " labeled image(s) have no prediction\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object co-segmentation by multi-source saliency fusion"};
  app.require_subcommand(1);

  PipelineFlags run_flags, cluster_flags, fuse_flags, segment_flags;
  auto* run = app.add_subcommand("run", "full pipeline: cluster, fuse, segment");
  add_pipeline_flags(run, run_flags);
  auto* cluster = app.add_subcommand("cluster", "write the sub-grouping manifest and required flow pairs");
  add_pipeline_flags(cluster, cluster_flags);
  auto* fuse = app.add_subcommand("fuse", "write fused saliency maps for a clustered group");
  add_pipeline_flags(fuse, fuse_flags);
  auto* segment = app.add_subcommand("segment", "turn fused maps into masks");
  add_pipeline_flags(segment, segment_flags);

  std::string dataset, preds, report_dir;
  auto* eval = app.add_subcommand("evaluate", "score masks against ground truth");
  eval->add_option("--dataset", dataset, "dataset root with one directory per class")->required();
  eval->add_option("--preds", preds, "predicted masks")->required();
  eval->add_option("--report-dir", report_dir, "where to write report.txt and scores.txt");

  coseg::SyntheticSpec spec;
  int corrupt = 0;
  int max_shift = -1;
  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic group with ground truth, maps and flows");
  gen->add_option("--output-dir", spec.output_dir)->required();
  gen->add_option("--name", spec.name, "class directory name");
  gen->add_option("--group-size", spec.group_size)->check(CLI::PositiveNumber);
  gen->add_option("--image-size", spec.image_size)->check(CLI::Range(8, 4096));
  gen->add_option("--sources", spec.sources, "number of saliency sources (L)")->check(CLI::PositiveNumber);
  gen->add_option("--corrupt", corrupt, "1-based source to invert, 0 for none")->check(CLI::NonNegativeNumber);
  gen->add_option("--shift-x", spec.shift_x, "per-image horizontal translation step");
  gen->add_option("--shift-y", spec.shift_y, "per-image vertical translation step");
  gen->add_option("--max-shift", max_shift, "random per-image translations in [0, N] instead of steps");
  gen->add_option("--seed", spec.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*run) {
      const auto summary = coseg::run_pipeline(resolve(run, run_flags));
      std::cout << "K=" << summary.grouping.k << ", " << summary.masks.size() << " masks written\n";
    } else if (*cluster) {
      const auto grouping = coseg::run_cluster_stage(resolve(cluster, cluster_flags));
      std::cout << "K=" << grouping.k << '\n';
    } else if (*fuse) {
      const auto fused = coseg::run_fuse_stage(resolve(fuse, fuse_flags));
      std::cout << fused.size() << " fused maps written\n";
    } else if (*segment) {
      const auto masks = coseg::run_segment_stage(resolve(segment, segment_flags));
      std::cout << masks.size() << " masks written\n";
    } else if (*eval) {
      return evaluate(dataset, preds, report_dir);
    } else if (*gen) {
      if (corrupt > spec.sources) {
        std::cerr << "--corrupt exceeds --sources\n";
        return kUsageError;
      }
      if (corrupt > 0) {
        spec.corrupted_source = corrupt - 1;
      }
      if (max_shift >= 0) {
        spec.offsets = coseg::random_offsets(spec.group_size, max_shift, spec.seed);
      }
      const auto fx = coseg::gen_synthetic(spec);
      std::cout << fx.image_ids.size() << " images, config at " << fx.config << '\n';
    }
  } catch (const coseg::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
