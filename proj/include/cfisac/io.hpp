// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cfisac/channel.hpp"
#include "cfisac/clustering.hpp"
#include "cfisac/deployment.hpp"
#include "cfisac/harness.hpp"
#include "cfisac/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cfisac {

/// One entity per line: `kind index x y z region`, kind in {ap, ue, target, broadside}.
/// Broadside lines carry the angle in the x column.
void write_layout(std::ostream& out, const NetworkLayout& layout);

/// Inverse of write_layout. Regions are rebuilt from `config`. Throws std::invalid_argument
/// on malformed records.
NetworkLayout read_layout(std::istream& in, const ExperimentConfig& config);

/// `ap index role region` lines followed by `ue index serving...` lines.
void write_assignment(std::ostream& out, const ClusterAssignment& assignment);

/// `ue ap antenna real imag` per channel entry.
void write_channels(std::ostream& out, const ChannelRealization& channels);

/// Header `drop,entity,metric,value`.
void write_metrics_csv(std::ostream& out, std::span<const MetricSample> samples);

/// Header `value,probability`.
void write_cdf_csv(std::ostream& out, const CdfCurve& curve);

/// Header `drop,epoch,region,cell,statistic,threshold,decision,truth,sensing_snr_db`.
void write_detection_csv(std::ostream& out, std::span<const DetectionRecord> log);

/// Human-readable key: value digest of one arm.
void write_summary(std::ostream& out, const ResultSet& result);

/// Writes config.txt (first arm) plus, per arm, <label>_config.txt, <label>_metrics.csv, <label>_rate_cdf.csv,
/// <label>_snr_cdf.csv, <label>_detections.csv, and a summary.txt over all arms.
/// Throws std::runtime_error when the directory cannot be created or written.
void write_result_directory(const std::filesystem::path& dir, std::span<const ResultSet> arms);

}  // namespace cfisac
