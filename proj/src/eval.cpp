#include "coseg/eval.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "coseg/errors.hpp"
#include "coseg/raster_io.hpp"

namespace fs = std::filesystem;

namespace coseg {
namespace {

void check_dims(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ArgumentError("mask dimensions differ: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                        " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::optional<fs::path> find_with_stem(const fs::path& dir, const std::string& stem) {
  if (!fs::is_directory(dir)) {
    return std::nullopt;
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().stem() == stem && is_image_file(e.path())) {
      return e.path();
    }
  }
  return std::nullopt;
}

} // namespace

double jaccard(const BinaryMask& pred, const BinaryMask& gt) {
  check_dims(pred, gt);
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.bits.size(); ++i) {
    const bool p = pred.bits[i] != 0, g = gt.bits[i] != 0;
    inter += p && g;
    uni += p || g;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double precision(const BinaryMask& pred, const BinaryMask& gt) {
  check_dims(pred, gt);
  if (pred.bits.empty()) {
    return 1.0;
  }
  std::size_t agree = 0;
  for (std::size_t i = 0; i < pred.bits.size(); ++i) {
    agree += (pred.bits[i] != 0) == (gt.bits[i] != 0);
  }
  return static_cast<double>(agree) / static_cast<double>(pred.bits.size());
}

Dataset load_dataset(const std::string& root) {
  if (!fs::is_directory(root)) {
    throw ArgumentError("dataset root is not a directory: " + root);
  }
  Dataset ds;
  for (const auto& cls : fs::directory_iterator(root)) {
    if (!cls.is_directory()) {
      continue;
    }
    DatasetGroup group{cls.path().filename().string(), cls.path().string(), {}};
    for (const auto& f : fs::directory_iterator(cls.path())) {
      if (!f.is_regular_file() || !is_image_file(f.path())) {
        continue;
      }
      DatasetImage img{f.path().stem().string(), f.path().string(), std::nullopt};
      if (const auto gt = find_with_stem(cls.path() / "GT", img.id)) {
        try {
          img.ground_truth = load_mask(gt->string());
        } catch (const std::exception& e) {
          ds.warnings.push_back("unreadable ground truth " + gt->string() + ": " + e.what());
        }
      }
      group.images.push_back(std::move(img));
    }
    if (group.images.empty()) {
      continue;
    }
    std::sort(group.images.begin(), group.images.end(),
              [](const DatasetImage& a, const DatasetImage& b) { return a.id < b.id; });
    ds.groups.push_back(std::move(group));
  }
  if (ds.groups.empty()) {
    throw ArgumentError("dataset root has no class directories with images: " + root);
  }
  std::sort(ds.groups.begin(), ds.groups.end(),
            [](const DatasetGroup& a, const DatasetGroup& b) { return a.name < b.name; });
  return ds;
}

ScoreReport aggregate(std::vector<ImageScore> per_image) {
  ScoreReport r;
  r.per_image = std::move(per_image);
  std::map<std::string, std::pair<std::pair<double, double>, std::size_t>> acc;
  for (const auto& s : r.per_image) {
    auto& [sums, n] = acc[s.group];
    sums.first += s.jaccard;
    sums.second += s.precision;
    ++n;
  }
  for (const auto& [cls, v] : acc) {
    r.per_class[cls] = {v.first.first / v.second, v.first.second / v.second};
  }
  if (!r.per_class.empty()) {
    for (const auto& [cls, m] : r.per_class) {
      r.overall.first += m.first;
      r.overall.second += m.second;
    }
    r.overall.first /= static_cast<double>(r.per_class.size());
    r.overall.second /= static_cast<double>(r.per_class.size());
    for (const auto& s : r.per_image) {
      r.micro.first += s.jaccard;
      r.micro.second += s.precision;
    }
    r.micro.first /= static_cast<double>(r.per_image.size());
    r.micro.second /= static_cast<double>(r.per_image.size());
  }
  return r;
}

ScoreReport score(const std::string& preds_dir, const Dataset& dataset) {
  struct Job {
    const DatasetGroup* group;
    const DatasetImage* image;
  };
  std::vector<Job> jobs;
  for (const auto& g : dataset.groups) {
    for (const auto& img : g.images) {
      if (img.ground_truth) {
        jobs.push_back({&g, &img});
      }
    }
  }
  std::vector<std::optional<ImageScore>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(jobs.size()); ++j) {
    const auto& [g, img] = jobs[j];
    auto path = fs::path(preds_dir) / g->name / (img->id + ".png");
    if (!fs::exists(path)) {
      path = fs::path(preds_dir) / (img->id + ".png");
    }
    if (!fs::exists(path)) {
      continue;
    }
    try {
      const BinaryMask pred = load_mask(path.string());
      results[j] = ImageScore{g->name, img->id, jaccard(pred, *img->ground_truth), precision(pred, *img->ground_truth)};
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  std::vector<ImageScore> table;
  std::vector<std::string> missing;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (results[j]) {
      table.push_back(*results[j]);
    } else {
      missing.push_back(jobs[j].group->name + " " + jobs[j].image->id);
    }
  }
  ScoreReport r = aggregate(std::move(table));
  r.missing = std::move(missing);
  return r;
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".en") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string format_score_lines(const ScoreReport& report) {
  std::ostringstream out;
  for (const auto& s : report.per_image) {
    out << s.group << ' ' << s.image << ' ' << format_real(s.jaccard) << ' ' << format_real(s.precision) << '\n';
  }
  for (const auto& m : report.missing) {
    out << "MISSING " << m << '\n';
  }
  out << "OVERALL " << format_real(report.overall.first) << ' ' << format_real(report.overall.second) << '\n';
  out << "MICRO " << format_real(report.micro.first) << ' ' << format_real(report.micro.second) << '\n';
  return out.str();
}

std::string format_score_table(const ScoreReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "class" << std::right << std::setw(8) << "images" << std::setw(10) << "J"
      << std::setw(10) << "P(%)" << '\n';
  std::map<std::string, int> counts;
  for (const auto& s : report.per_image) {
    ++counts[s.group];
  }
  out << std::fixed;
  for (const auto& [cls, m] : report.per_class) {
    out << std::left << std::setw(24) << cls << std::right << std::setw(8) << counts[cls] << std::setw(10)
        << std::setprecision(3) << m.first << std::setw(10) << std::setprecision(1) << 100.0 * m.second << '\n';
  }
  out << std::left << std::setw(24) << "overall (macro)" << std::right << std::setw(8) << report.per_image.size()
      << std::setw(10) << std::setprecision(3) << report.overall.first << std::setw(10) << std::setprecision(1)
      << 100.0 * report.overall.second << '\n';
  out << std::left << std::setw(24) << "overall (micro)" << std::right << std::setw(8) << report.per_image.size()
      << std::setw(10) << std::setprecision(3) << report.micro.first << std::setw(10) << std::setprecision(1)
      << 100.0 * report.micro.second << '\n';
  if (!report.missing.empty()) {
    out << report.missing.size() << " prediction(s) missing:\n";
    for (const auto& m : report.missing) {
      out << "  " << m << '\n';
    }
  }
  return out.str();
}

} // namespace coseg
