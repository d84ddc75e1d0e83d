// SPDX-License-Identifier: Apache-2.0

#include "cfisac/harness.hpp"

#include "cfisac/channel.hpp"
#include "cfisac/clustering.hpp"
#include "cfisac/deployment.hpp"
#include "cfisac/sensing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace cfisac {

void RunDiagnostics::merge(const RunDiagnostics& other, int drops_before, int drops_other) {
  plans += other.plans;
  power_checks += other.power_checks;
  power_violations += other.power_violations;
  max_power_error = std::max(max_power_error, other.max_power_error);
  zf.zf_beams += other.zf.zf_beams;
  zf.zf_fallbacks += other.zf.zf_fallbacks;
  zf.annulled_links += other.zf.annulled_links;
  zf.max_normalized_leakage = std::max(zf.max_normalized_leakage, other.zf.max_normalized_leakage);
  max_fronthaul_scalars = std::max(max_fronthaul_scalars, other.max_fronthaul_scalars);
  const int total = drops_before + drops_other;
  if (total > 0)
    mean_fronthaul_scalars = (mean_fronthaul_scalars * drops_before +
                              other.mean_fronthaul_scalars * drops_other) / total;
}

std::vector<double> ResultSet::values(MetricKind kind) const {
  std::vector<double> out;
  for (const auto& s : samples)
    if (s.kind == kind) out.push_back(s.value);
  return out;
}

double ResultSet::median(MetricKind kind) const { return cfisac::median(values(kind)); }

namespace {

constexpr double kMinSnr = 1e-30;  // floor so dB values stay finite

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

/// Everything fixed for the lifetime of one drop.
class DropScene {
 public:
  DropScene(const ExperimentConfig& config, int drop) : config_(config), drop_(drop) {
    RandomStream layout_rng(config.seed, {tag(StreamTag::Layout), u64(drop)});
    layout_ = generate_layout(config, layout_rng);
    geoms_ = ap_arrays(layout_, config);
    large_scale_ = draw_large_scale(layout_, config, layout_rng);
    assignment_ = build_assignment(layout_, large_scale_, config);

    RandomStream schedule_rng(config.seed, {tag(StreamTag::Schedule), u64(drop)});
    schedule_ = build_scan_schedule(layout_.regions, schedule_rng);

    std::vector<Position3D> tx_pos, rx_pos;
    for (const int m : assignment_.tx_aps) tx_pos.push_back(layout_.aps[static_cast<std::size_t>(m)]);
    for (const int m : assignment_.rx_aps) rx_pos.push_back(layout_.aps[static_cast<std::size_t>(m)]);
    const RcsModel rcs{config.sigma_rcs_linear(), config.angular_corr_rad()};
    for (const auto& t : layout_.targets) {
      targets_.push_back(reflector_geometry(t.position, layout_.aps, geoms_, config.carrier));
      target_rcs_.push_back(rcs_factors(t.position, tx_pos, rx_pos, rcs));
    }
    rx_row_.assign(layout_.aps.size(), -1);
    for (std::size_t i = 0; i < assignment_.rx_aps.size(); ++i)
      rx_row_[static_cast<std::size_t>(assignment_.rx_aps[i])] = static_cast<int>(i);
    splits_.reserve(layout_.regions.size());
    for (std::size_t l = 0; l < layout_.regions.size(); ++l)
      splits_.push_back(sensing_cluster_for_cell(assignment_, static_cast<int>(l)));
  }

  DropResult run() {
    DropResult out;
    out.drop = drop_;
    out.ap_positions = layout_.aps;
    const auto fh = fronthaul_load(assignment_);
    out.diagnostics.max_fronthaul_scalars = fh.max;
    out.diagnostics.mean_fronthaul_scalars = fh.mean;
    for (int f = 0; f < config_.n_fading; ++f) run_epoch(f, out);
    return out;
  }

 private:
  struct CellData {
    ReflectorGeometry geometry;
    Eigen::MatrixXd rcs_cov;  // over the cluster's tx APs
  };

  const CellData& cell_data(int region, int cell) {
    const auto key = std::make_pair(region, cell);
    if (auto it = cells_.find(key); it != cells_.end()) return it->second;
    const auto& rc = layout_.regions[static_cast<std::size_t>(region)].cells[static_cast<std::size_t>(cell)];
    CellData data;
    data.geometry = reflector_geometry(rc.center, layout_.aps, geoms_, config_.carrier);
    std::vector<Position3D> tx_pos;
    for (const int m : splits_[static_cast<std::size_t>(region)].tx)
      tx_pos.push_back(layout_.aps[static_cast<std::size_t>(m)]);
    data.rcs_cov = rcs_tx_covariance(rc.center, tx_pos,
                                     {config_.sigma_rcs_linear(), config_.angular_corr_rad()});
    return cells_.emplace(key, std::move(data)).first->second;
  }

  double threshold_for(int rank) {
    if (auto it = thresholds_.find(rank); it != thresholds_.end()) return it->second;
    const double t = rank > 0 ? calibrate_threshold(rank, config_.noise_power_w(), config_.pfa_target) : 0.0;
    thresholds_.emplace(rank, t);
    return t;
  }

  void check_power(const BeamformingPlan& plan, RunDiagnostics& diag) const {
    ++diag.plans;
    for (int m = 0; m < plan.M; ++m) {
      const double total = plan.total_power(m);
      if (total == 0.0) continue;  // idle or receive-only AP
      ++diag.power_checks;
      const double err = std::abs(total - plan.P_m) / plan.P_m;
      diag.max_power_error = std::max(diag.max_power_error, err);
      if (err > 1e-12) ++diag.power_violations;
    }
  }

  void run_epoch(int f, DropResult& out) {
    const int L = static_cast<int>(layout_.regions.size());
    const int K = config_.K;
    const int M = config_.M;
    const double noise = config_.noise_power_w();

    std::vector<int> cells(static_cast<std::size_t>(L));
    std::vector<Position3D> centers(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
      cells[static_cast<std::size_t>(l)] = schedule_.cell_at(static_cast<std::size_t>(f), l);
      centers[static_cast<std::size_t>(l)] =
          layout_.regions[static_cast<std::size_t>(l)].cells[static_cast<std::size_t>(cells[static_cast<std::size_t>(l)])].center;
    }

    RandomStream fading_rng(config_.seed, {tag(StreamTag::Fading), u64(drop_), u64(f)});
    const auto channels = draw_ue_ap_channels(large_scale_, geoms_, fading_rng);
    const auto plan = build_plan(channels, large_scale_, assignment_, layout_, geoms_, centers, config_,
                                 &out.diagnostics.zf);
    check_power(plan, out.diagnostics);

    const auto sinrs = communication_sinrs(channels, plan, assignment_, noise);
    for (int k = 0; k < K; ++k)
      out.samples.push_back({drop_, MetricKind::RateBps, k,
                             rate_bps(sinrs[static_cast<std::size_t>(k)], config_.bandwidth)});

    // Swerling-I: one reflectivity draw per target for the whole coherence block.
    std::vector<CMatrix> alphas;
    alphas.reserve(targets_.size());
    for (std::size_t t = 0; t < targets_.size(); ++t) {
      RandomStream rcs_rng(config_.seed, {tag(StreamTag::Rcs), u64(drop_), u64(f), t});
      alphas.push_back(target_rcs_[t].draw(rcs_rng));
    }

    const double direct_scale = config_.subtract_direct ? config_.direct_residual : 1.0;
    DirectPaths direct(derive_seed(config_.seed, {tag(StreamTag::DirectPath), u64(drop_), u64(f)}),
                       &layout_, &geoms_, config_.carrier, config_.rician_k_linear());

    std::vector<double> statistic(static_cast<std::size_t>(L), 0.0);
    std::vector<int> rank(static_cast<std::size_t>(L), 0);
    std::vector<double> snr(static_cast<std::size_t>(L), 0.0);
    std::vector<double> snr_thin(static_cast<std::size_t>(L), 0.0);

    for (int snap = 0; snap < config_.snapshots; ++snap) {
      RandomStream sym_rng(config_.seed, {tag(StreamTag::Symbols), u64(drop_), u64(f), u64(snap)});
      std::vector<Complex> data(static_cast<std::size_t>(K)), sense(static_cast<std::size_t>(M));
      for (auto& x : data) x = sym_rng.unit_phase();
      for (auto& x : sense) x = sym_rng.unit_phase();
      std::vector<CVector> transmit(static_cast<std::size_t>(M));
      for (int m = 0; m < M; ++m) transmit[static_cast<std::size_t>(m)] = transmit_vector(plan, m, data, sense);

      std::map<int, CVector> observables;
      for (const int rx : assignment_.rx_aps) {
        std::vector<TargetEcho> echoes;
        echoes.reserve(targets_.size());
        for (std::size_t t = 0; t < targets_.size(); ++t)
          echoes.push_back({&targets_[t], alphas[t].row(rx_row_[static_cast<std::size_t>(rx)]).transpose()});
        RandomStream noise_rng(config_.seed,
                               {tag(StreamTag::Noise), u64(drop_), u64(f), u64(snap), u64(rx)});
        ObservableInputs in;
        in.rx_ap = rx;
        in.n_antennas = config_.N;
        in.tx_aps = assignment_.tx_aps;
        in.transmit = &transmit;
        in.echoes = echoes;
        in.direct = &direct;
        in.direct_scale = direct_scale;
        in.noise_var = noise;
        observables.emplace(rx, simulate_rx_observable(in, noise_rng));
      }

      for (int l = 0; l < L; ++l) {
        const auto& split = splits_[static_cast<std::size_t>(l)];
        const auto& cell = cell_data(l, cells[static_cast<std::size_t>(l)]);
        std::vector<Dictionary> dicts;
        std::vector<CVector> ys;
        for (const int rx : split.rx) {
          dicts.push_back(build_dictionary(cell.geometry, rx, split.tx, transmit));
          ys.push_back(observables.at(rx));
        }
        const std::vector<Eigen::MatrixXd> covs(dicts.size(), cell.rcs_cov);
        const auto outcome = inspect_cell(dicts, ys, covs, noise, config_.pfa_target);
        statistic[static_cast<std::size_t>(l)] += outcome.statistic;
        rank[static_cast<std::size_t>(l)] += outcome.rank;
        if (snap == 0) {
          snr[static_cast<std::size_t>(l)] = outcome.sensing_snr;
          if (config_.report_thin_snr) snr_thin[static_cast<std::size_t>(l)] = sensing_snr_thin(dicts, covs, noise);
        }
      }
    }

    for (int l = 0; l < L; ++l) {
      const auto li = static_cast<std::size_t>(l);
      const auto& footprint = layout_.regions[li].cells[static_cast<std::size_t>(cells[li])].footprint;
      const bool truth = std::any_of(layout_.targets.begin(), layout_.targets.end(), [&](const Target& t) {
        return footprint.contains(t.position.x, t.position.y);
      });
      DetectionRecord rec;
      rec.drop = drop_;
      rec.epoch = f;
      rec.region = l;
      rec.cell = cells[li];
      rec.statistic = statistic[li];
      rec.threshold = threshold_for(rank[li]);
      rec.decision = rank[li] > 0 && detect(rec.statistic, rec.threshold);
      rec.truth = truth;
      rec.sensing_snr_db = linear_to_db(std::max(snr[li], kMinSnr));
      out.detections.push_back(rec);
      out.samples.push_back({drop_, MetricKind::SensingSnrDb, l, rec.sensing_snr_db});
      out.samples.push_back({drop_, MetricKind::Statistic, l, rec.statistic});
      out.samples.push_back({drop_, MetricKind::Decision, l, rec.decision ? 1.0 : 0.0});
      if (config_.report_thin_snr)
        out.samples.push_back({drop_, MetricKind::SensingSnrThinDb, l, linear_to_db(std::max(snr_thin[li], kMinSnr))});
    }
  }

  const ExperimentConfig& config_;
  int drop_;
  NetworkLayout layout_;
  std::vector<ArrayGeometry> geoms_;
  Eigen::MatrixXd large_scale_;
  ClusterAssignment assignment_;
  ScanSchedule schedule_;
  std::vector<ReflectorGeometry> targets_;
  std::vector<RcsFactors> target_rcs_;
  std::vector<int> rx_row_;
  std::vector<ClusterSplit> splits_;
  std::map<std::pair<int, int>, CellData> cells_;
  std::map<int, double> thresholds_;
};

}  // namespace

DropResult run_drop(const ExperimentConfig& config, int drop_index) {
  validate(config);
  try {
    DropScene scene(config, drop_index);
    return scene.run();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error("drop " + std::to_string(drop_index) + ": " + e.what());
  }
}

ResultSet run_experiment(const ExperimentConfig& config, const std::string& label) {
  validate(config);
  const int drops = config.n_drops;
  std::vector<DropResult> results(static_cast<std::size_t>(drops));

  int workers = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, drops);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int d = next++; d < drops; d = next++) {
      try {
        results[static_cast<std::size_t>(d)] = run_drop(config, d);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = drops;
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  ResultSet set;
  set.label = label;
  set.config = config;
  int merged = 0;
  for (auto& r : results) {
    set.samples.insert(set.samples.end(), r.samples.begin(), r.samples.end());
    set.detections.insert(set.detections.end(), r.detections.begin(), r.detections.end());
    set.diagnostics.merge(r.diagnostics, merged, 1);
    set.layouts.push_back(std::move(r.ap_positions));
    ++merged;
  }
  set.rate_cdf = empirical_cdf(set.values(MetricKind::RateBps));
  set.snr_cdf = empirical_cdf(set.values(MetricKind::SensingSnrDb));
  set.detection = detection_rates(set.detections);
  return set;
}

std::vector<ResultSet> preset_mode_comparison(const ExperimentConfig& config) {
  std::vector<ResultSet> arms;
  for (const auto mode : {ScalabilityMode::UTC, ScalabilityMode::UC, ScalabilityMode::TC, ScalabilityMode::CF}) {
    ExperimentConfig arm = config;
    arm.mode = mode;
    arms.push_back(run_experiment(arm, to_string(mode)));
  }
  return arms;
}

std::vector<ResultSet> preset_rx_sweep(const ExperimentConfig& config, const std::vector<int>& rx_counts) {
  const int cluster = config.m_tx_per_region + config.m_rx_per_region;
  for (const int rx : rx_counts)
    if (rx < 1 || rx >= cluster)
      throw ConfigError("receive-AP count " + std::to_string(rx) + " must lie in [1, " +
                        std::to_string(cluster - 1) + "] for cluster size " + std::to_string(cluster));
  std::vector<ResultSet> arms;
  for (const int rx : rx_counts) {
    ExperimentConfig arm = config;
    arm.mode = ScalabilityMode::UTC;
    arm.m_rx_per_region = rx;
    arm.m_tx_per_region = cluster - rx;
    arms.push_back(run_experiment(arm, "rx" + std::to_string(rx)));
  }
  return arms;
}

std::vector<ResultSet> preset_beamformer_comparison(const ExperimentConfig& config,
                                                    const std::vector<int>& k_zf_values) {
  for (const int k : k_zf_values)
    if (k < 0 || k > config.N - 1)
      throw ConfigError("k_zf = " + std::to_string(k) + " exceeds N - 1 = " + std::to_string(config.N - 1));
  std::vector<ResultSet> arms;
  ExperimentConfig mf = config;
  mf.beamformer = SensingBeamformer::MF;
  mf.k_zf = 0;
  arms.push_back(run_experiment(mf, "MF"));
  for (const int k : k_zf_values) {
    ExperimentConfig zf = config;
    zf.beamformer = SensingBeamformer::ZF;
    zf.k_zf = k;
    arms.push_back(run_experiment(zf, "ZF_k" + std::to_string(k)));
  }
  return arms;
}

}  // namespace cfisac
