// SPDX-License-Identifier: Apache-2.0

#include "cfisac/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cfisac {

namespace {

void layout_line(std::ostream& out, const char* kind, std::size_t index, const Position3D& p, int region) {
  out << kind << ' ' << index << ' ' << format_double(p.x) << ' ' << format_double(p.y) << ' '
      << format_double(p.z) << ' ' << region << '\n';
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_layout(std::ostream& out, const NetworkLayout& layout) {
  for (std::size_t i = 0; i < layout.aps.size(); ++i)
    layout_line(out, "ap", i, layout.aps[i], region_of(layout.regions, layout.aps[i].x, layout.aps[i].y));
  for (std::size_t i = 0; i < layout.ues.size(); ++i)
    layout_line(out, "ue", i, layout.ues[i], region_of(layout.regions, layout.ues[i].x, layout.ues[i].y));
  for (std::size_t i = 0; i < layout.targets.size(); ++i)
    layout_line(out, "target", i, layout.targets[i].position, layout.targets[i].region);
  for (std::size_t i = 0; i < layout.ap_broadside.size(); ++i)
    layout_line(out, "broadside", i, {layout.ap_broadside[i], 0.0, 0.0}, -1);
}

NetworkLayout read_layout(std::istream& in, const ExperimentConfig& config) {
  NetworkLayout layout;
  layout.area_side = config.area_side_m;
  layout.regions = build_regions(config.area_side_m, config.L, config.effective_cell_extent(),
                                 config.inspection_height_m);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    std::size_t index = 0;
    Position3D p;
    int region = 0;
    if (!(fields >> kind >> index >> p.x >> p.y >> p.z >> region))
      throw std::invalid_argument("layout line " + std::to_string(line_no) + ": malformed record");
    auto place = [&](auto& vec, auto value) {
      if (index != vec.size())
        throw std::invalid_argument("layout line " + std::to_string(line_no) + ": index out of order");
      vec.push_back(value);
    };
    if (kind == "ap") place(layout.aps, p);
    else if (kind == "ue") place(layout.ues, p);
    else if (kind == "target") place(layout.targets, Target{p, region});
    else if (kind == "broadside") place(layout.ap_broadside, p.x);
    else throw std::invalid_argument("layout line " + std::to_string(line_no) + ": unknown kind '" + kind + "'");
  }
  if (layout.ap_broadside.empty()) layout.ap_broadside.assign(layout.aps.size(), 0.0);
  if (layout.ap_broadside.size() != layout.aps.size())
    throw std::invalid_argument("layout: broadside count does not match AP count");
  return layout;
}

void write_assignment(std::ostream& out, const ClusterAssignment& assignment) {
  for (int m = 0; m < assignment.M; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    const char* role = assignment.is_rx[mi] ? "rx" : "tx";
    out << "ap " << m << ' ' << role << ' ' << assignment.beam_region[mi] << '\n';
  }
  for (std::size_t k = 0; k < assignment.serving.size(); ++k) {
    out << "ue " << k;
    for (const int m : assignment.serving[k]) out << ' ' << m;
    out << '\n';
  }
}

void write_channels(std::ostream& out, const ChannelRealization& channels) {
  for (int k = 0; k < channels.K; ++k)
    for (int m = 0; m < channels.M; ++m) {
      const auto& h = channels.ue_ap(k, m);
      for (Eigen::Index i = 0; i < h.size(); ++i)
        out << k << ' ' << m << ' ' << i << ' ' << format_double(h[i].real()) << ' '
            << format_double(h[i].imag()) << '\n';
    }
}

void write_metrics_csv(std::ostream& out, std::span<const MetricSample> samples) {
  out << "drop,entity,metric,value\n";
  for (const auto& s : samples)
    out << s.drop << ',' << s.entity << ',' << to_string(s.kind) << ',' << format_double(s.value) << '\n';
}

void write_cdf_csv(std::ostream& out, const CdfCurve& curve) {
  out << "value,probability\n";
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    out << format_double(curve.values[i]) << ',' << format_double(curve.probabilities[i]) << '\n';
}

void write_detection_csv(std::ostream& out, std::span<const DetectionRecord> log) {
  out << "drop,epoch,region,cell,statistic,threshold,decision,truth,sensing_snr_db\n";
  for (const auto& r : log)
    out << r.drop << ',' << r.epoch << ',' << r.region << ',' << r.cell << ',' << format_double(r.statistic)
        << ',' << format_double(r.threshold) << ',' << (r.decision ? 1 : 0) << ',' << (r.truth ? 1 : 0) << ','
        << format_double(r.sensing_snr_db) << '\n';
}

void write_summary(std::ostream& out, const ResultSet& result) {
  const auto optional_text = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("undefined"); };
  const auto& d = result.diagnostics;
  out << "arm: " << result.label << '\n'
      << "mode: " << to_string(result.config.mode) << '\n'
      << "beamformer: " << to_string(result.config.beamformer) << '\n'
      << "seed: " << result.config.seed << '\n'
      << "drops: " << result.config.n_drops << '\n'
      << "fading: " << result.config.n_fading << '\n'
      << "rate_samples: " << result.rate_cdf.values.size() << '\n'
      << "median_rate_bps: " << format_double(result.rate_cdf.quantile(0.5)) << '\n'
      << "median_sensing_snr_db: " << format_double(result.snr_cdf.quantile(0.5)) << '\n'
      << "pd: " << optional_text(result.detection.pd) << '\n'
      << "pfa: " << optional_text(result.detection.pfa) << '\n'
      << "present_cells: " << result.detection.present << '\n'
      << "absent_cells: " << result.detection.absent << '\n'
      << "fronthaul_max_scalars: " << d.max_fronthaul_scalars << '\n'
      << "fronthaul_mean_scalars: " << format_double(d.mean_fronthaul_scalars) << '\n'
      << "power_violations: " << d.power_violations << '\n'
      << "zf_beams: " << d.zf.zf_beams << '\n'
      << "zf_fallbacks: " << d.zf.zf_fallbacks << '\n'
      << "zf_max_normalized_leakage: " << format_double(d.zf.max_normalized_leakage) << '\n';
}

void write_result_directory(const std::filesystem::path& dir, std::span<const ResultSet> arms) {
  if (arms.empty()) throw std::invalid_argument("write_result_directory: no arms");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  {
    const auto path = dir / "config.txt";
    auto out = open_for_write(path);
    out << to_text(arms.front().config);
    close_checked(out, path);
  }
  for (const auto& arm : arms) {
    const auto write = [&](const std::string& suffix, auto&& body) {
      const auto path = dir / (arm.label + suffix);
      auto out = open_for_write(path);
      body(out);
      close_checked(out, path);
    };
    write("_config.txt", [&](std::ostream& o) { o << to_text(arm.config); });
    write("_metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, arm.samples); });
    write("_rate_cdf.csv", [&](std::ostream& o) { write_cdf_csv(o, arm.rate_cdf); });
    write("_snr_cdf.csv", [&](std::ostream& o) { write_cdf_csv(o, arm.snr_cdf); });
    write("_detections.csv", [&](std::ostream& o) { write_detection_csv(o, arm.detections); });
  }
  const auto path = dir / "summary.txt";
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i > 0) out << '\n';
    write_summary(out, arms[i]);
  }
  close_checked(out, path);
}

}  // namespace cfisac
