// Copyright 2026 The invlqg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "invlqg/experiment.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "invlqg/closedloop.hpp"
#include "invlqg/csv.hpp"
#include "invlqg/prediction.hpp"

namespace invlqg {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << content;
  out.flush();
  if (!out) {
    out.close();
    fs::remove(path);  // never leave a partial file behind
    throw std::runtime_error("write failed: " + path.string());
  }
}

struct CellKl {
  double final_inv = 0.0;
  double final_conv = 0.0;
  double tavg_inv = 0.0;
  double tavg_conv = 0.0;
};

Eigen::MatrixXd stack_rows(const std::vector<Eigen::Vector3d>& samples) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = samples[i];
  return m;
}

double kl_against_prediction(const std::vector<Eigen::Vector3d>& samples,
                             const Eigen::Matrix3d& predicted) {
  const auto [mean, cov] = empirical_gaussian(stack_rows(samples));
  return symmetric_kl(mean, cov, Eigen::Vector3d::Zero(), predicted);
}

double kl_from_moments(const Eigen::Vector3d& sum, const Eigen::Matrix3d& outer, int n,
                       const Eigen::Matrix3d& predicted) {
  const Eigen::Vector3d mean = sum / n;
  const Eigen::Matrix3d cov = (outer - n * mean * mean.transpose()) / (n - 1.0);
  return symmetric_kl(mean, cov, Eigen::Vector3d::Zero(), predicted);
}

std::string prediction_csv(const PredictionSeries& series, const char* flavor) {
  // row-major upper triangle of the 3x3 marginal
  constexpr std::pair<int, int> kUpper[] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  std::string out = "t,flavor,s11,s12,s13,s22,s23,s33\n";
  for (std::size_t t = 0; t < series.tracking_global.size(); ++t) {
    const Eigen::Matrix3d& s = series.tracking_global[t];
    out += format_int(static_cast<std::int64_t>(t));
    out += ',';
    out += flavor;
    for (const auto& [i, j] : kUpper) {
      out += ',';
      out += format_double(s(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const ReferenceTrajectory& ref,
                           const std::vector<TrajectoryPoint>& points) {
  std::string out = "t,x_true,y_true,theta_true,x_est,y_est,theta_est,x_ref,y_ref\n";
  for (std::size_t t = 0; t < points.size(); ++t) {
    const TrajectoryPoint& p = points[t];
    out += format_int(static_cast<std::int64_t>(t));
    for (const double v : {p.truth.x, p.truth.y, p.truth.theta.radians(), p.estimate.x,
                           p.estimate.y, p.estimate.theta.radians(), ref.poses[t].x,
                           ref.poses[t].y}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  try {
    const ReferenceTrajectory ref = mixed_reference(config.tau, config.segments);
    const CostWeights weights(config.weights_c.asDiagonal(), config.weights_d.asDiagonal());
    const Eigen::Matrix3d base_P0 = config.p0_diag.asDiagonal();
    const Eigen::Matrix2d base_M = config.m0_diag.asDiagonal();

    std::vector<std::pair<double, double>> cells;
    for (const double a : config.alpha_sq) {
      for (const double b : config.beta_sq) cells.emplace_back(a, b);
    }

    GridOptions grid_options;
    grid_options.threads = config.threads;
    grid_options.log_trials = config.log_trials;
    grid_options.capture_final_tracking = true;
    grid_options.capture_step_moments = config.time_averaged_kl;
    const GridResult grid = monte_carlo_grid(ref, weights, base_P0, base_M, config.lambda0, cells,
                                             config.trials_per_cell, config.base_seed,
                                             grid_options);

    // a-priori predictions and their divergence from the simulated spread
    std::vector<CellKl> kls(cells.size());
    std::vector<PredictionSeries> pred_inv_series(cells.size());
    std::vector<PredictionSeries> pred_conv_series(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto [alpha_sq, beta_sq] = cells[c];
      const Eigen::Matrix3d p0 = alpha_sq * base_P0;
      const NoiseModel noise(beta_sq * base_M, effective_lambda(config.lambda0, beta_sq));
      pred_inv_series[c] = predict_invariant(ref, weights, noise, p0);
      pred_conv_series[c] = predict_conventional(ref, weights, noise, p0);
      const CellData& cell = grid.cells[c];
      kls[c].final_inv =
          kl_against_prediction(cell.final_tracking_inv, pred_inv_series[c].tracking_global.back());
      kls[c].final_conv = kl_against_prediction(cell.final_tracking_conv,
                                                pred_conv_series[c].tracking_global.back());
      if (config.time_averaged_kl) {
        const std::size_t steps = cell.step_sum_inv.size();
        double acc_inv = 0.0;
        double acc_conv = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
          acc_inv += kl_from_moments(cell.step_sum_inv[t], cell.step_outer_inv[t],
                                     cell.summary.trials, pred_inv_series[c].tracking_global[t]);
          acc_conv += kl_from_moments(cell.step_sum_conv[t], cell.step_outer_conv[t],
                                      cell.summary.trials, pred_conv_series[c].tracking_global[t]);
        }
        kls[c].tavg_inv = acc_inv / static_cast<double>(steps);
        kls[c].tavg_conv = acc_conv / static_cast<double>(steps);
      }
    }

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);

    {
      std::string csv =
          "alpha_sq,beta_sq,mean_cost_conv,mean_cost_inv,win_rate_inv,lost_conv,lost_inv,trials\n";
      for (const CellData& cell : grid.cells) {
        const CellSummary& s = cell.summary;
        csv += format_double(s.alpha_sq) + ',' + format_double(s.beta_sq) + ',' +
               format_double(s.mean_cost_conv) + ',' + format_double(s.mean_cost_inv) + ',' +
               format_double(s.win_rate_inv) + ',' + format_int(s.lost_conv) + ',' +
               format_int(s.lost_inv) + ',' + format_int(s.trials) + '\n';
      }
      write_file(out_dir / "summary.csv", csv);
    }

    {
      std::string csv = config.time_averaged_kl
                            ? "alpha_sq,beta_sq,kl_invariant,kl_conventional,"
                              "kl_invariant_tavg,kl_conventional_tavg\n"
                            : "alpha_sq,beta_sq,kl_invariant,kl_conventional\n";
      for (std::size_t c = 0; c < cells.size(); ++c) {
        csv += format_double(cells[c].first) + ',' + format_double(cells[c].second) + ',' +
               format_double(kls[c].final_inv) + ',' + format_double(kls[c].final_conv);
        if (config.time_averaged_kl) {
          csv += ',' + format_double(kls[c].tavg_inv) + ',' + format_double(kls[c].tavg_conv);
        }
        csv += '\n';
      }
      write_file(out_dir / "kl.csv", csv);
    }

    // series for the last (highest-noise) grid cell
    write_file(out_dir / "prediction_inv.csv",
               prediction_csv(pred_inv_series.back(), "invariant"));
    write_file(out_dir / "prediction_conv.csv",
               prediction_csv(pred_conv_series.back(), "conventional"));

    if (config.log_trials) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        std::string csv = "trial,flavor,cost,lost\n";
        const CellData& cell = grid.cells[c];
        for (std::size_t i = 0; i < cell.trial_log.size(); ++i) {
          const TrialRecord& r = cell.trial_log[i];
          csv += format_int(static_cast<std::int64_t>(i)) + ",conventional," +
                 format_double(r.cost_conv) + ',' + (r.lost_conv ? "1" : "0") + '\n';
          csv += format_int(static_cast<std::int64_t>(i)) + ",invariant," +
                 format_double(r.cost_inv) + ',' + (r.lost_inv ? "1" : "0") + '\n';
        }
        write_file(out_dir / ("trials_alpha" + format_double(cells[c].first) + "_beta" +
                              format_double(cells[c].second) + ".csv"),
                   csv);
      }
    }

    if (config.dump_trajectory) {
      // the dump reruns the named trial at the last grid cell
      TrialConfig trial;
      trial.alpha_sq = cells.back().first;
      trial.beta_sq = cells.back().second;
      trial.base_P0 = base_P0;
      trial.base_M = base_M;
      trial.base_lambda = config.lambda0;
      trial.seed = config.base_seed;
      trial.trial_index = *config.dump_trajectory;
      SimulationOptions sim;
      sim.record_trajectory = true;
      const TrialResult conv = run_conventional_lqg(ref, weights, trial, sim);
      const TrialResult inv = run_invariant_lqg(ref, weights, trial, sim);
      const std::string id = std::to_string(*config.dump_trajectory);
      write_file(out_dir / ("trajectory_" + id + "_conventional.csv"),
                 trajectory_csv(ref, *conv.trajectory));
      write_file(out_dir / ("trajectory_" + id + "_invariant.csv"),
                 trajectory_csv(ref, *inv.trajectory));
    }

    log << "cell (alpha^2, beta^2) | mean cost conv | mean cost inv | win% inv | lost conv | "
           "lost inv | KL conv | KL inv\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const CellSummary& s = grid.cells[c].summary;
      std::ostringstream row;
      row << '(' << s.alpha_sq << ", " << s.beta_sq << ')';
      log << std::left << std::setw(22) << row.str() << " | " << std::setw(14)
          << s.mean_cost_conv << " | " << std::setw(13) << s.mean_cost_inv << " | " << std::setw(8)
          << 100.0 * s.win_rate_inv << " | " << std::setw(9) << s.lost_conv << " | " << std::setw(8)
          << s.lost_inv << " | " << std::setw(7) << std::setprecision(4) << kls[c].final_conv
          << " | " << std::setprecision(4) << kls[c].final_inv << std::setprecision(6) << '\n';
    }
    log << "horizon " << ref.horizon() << " steps, " << config.trials_per_cell
        << " paired trials per cell, outputs in " << out_dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
}

void emit_plot_scripts(const std::filesystem::path& dir) {
  write_file(dir / "plot_cost.gp", R"(set datafile separator comma
set terminal pngcairo size 900,600
set output 'cost.png'
set style data histogram
set style histogram cluster gap 1
set style fill solid 0.8 border -1
set boxwidth 0.9
set ylabel 'mean trajectory cost'
set xlabel 'grid cell (alpha^2, beta^2)'
plot 'summary.csv' skip 1 using 3:xtic(sprintf("(%g,%g)", column(1), column(2))) title 'conventional', \
     '' skip 1 using 4 title 'invariant'
)");
  write_file(dir / "plot_lost.gp", R"(set datafile separator comma
set terminal pngcairo size 900,600
set output 'lost.png'
set style data histogram
set style histogram cluster gap 1
set style fill solid 0.8 border -1
set boxwidth 0.9
set ylabel 'lost trajectories'
set xlabel 'grid cell (alpha^2, beta^2)'
plot 'summary.csv' skip 1 using 6:xtic(sprintf("(%g,%g)", column(1), column(2))) title 'conventional', \
     '' skip 1 using 7 title 'invariant'
)");
  write_file(dir / "plot_kl.gp", R"(set datafile separator comma
set terminal pngcairo size 900,600
set output 'kl.png'
set style data histogram
set style histogram cluster gap 1
set style fill solid 0.8 border -1
set boxwidth 0.9
set logscale y
set ylabel 'symmetric KL divergence'
set xlabel 'grid cell (alpha^2, beta^2)'
plot 'kl.csv' skip 1 using 4:xtic(sprintf("(%g,%g)", column(1), column(2))) title 'conventional', \
     '' skip 1 using 3 title 'invariant'
)");
  write_file(dir / "plot_prediction.gp", R"(set datafile separator comma
set terminal pngcairo size 900,600
set output 'prediction.png'
set ylabel 'predicted tracking covariance entries'
set xlabel 'step'
plot 'prediction_conv.csv' skip 1 using 1:3 with lines title 'conv s11', \
     '' skip 1 using 1:6 with lines title 'conv s22', \
     '' skip 1 using 1:8 with lines title 'conv s33', \
     'prediction_inv.csv' skip 1 using 1:3 with lines dashtype 2 title 'inv s11', \
     '' skip 1 using 1:6 with lines dashtype 2 title 'inv s22', \
     '' skip 1 using 1:8 with lines dashtype 2 title 'inv s33'
)");
}

}  // namespace invlqg
