#include "cmdpal/harness.hpp"

#include "cmdpal/envs.hpp"
#include "cmdpal/lp.hpp"
#include "cmdpal/pqa.hpp"
#include "cmdpal/svg_plot.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cmdpal {

namespace {

std::pair<TabularCmdp, GridGeometry> build_environment(const std::string& id) {
  if (id == "cliff-world") return cliff_world();
  if (id == "deep-sea-treasure") return deep_sea_treasure();
  throw std::invalid_argument("unknown environment id: " + id);
}

RunRecord finish_record(const TabularCmdp& cmdp, double v_star, TabularPolicy policy,
                        AlmTrace trace, std::string label) {
  RunRecord rec;
  rec.label = std::move(label);
  rec.trace = std::move(trace);
  rec.final_policy = std::move(policy);
  rec.v_r = policy_evaluate(cmdp, rec.final_policy).scalar_value;
  rec.v_c.resize(cmdp.num_constraints());
  double violation = 0.0;
  for (int i = 0; i < cmdp.num_constraints(); ++i) {
    rec.v_c(i) = policy_evaluate(cmdp, rec.final_policy, cmdp.constraint_rewards[i]).scalar_value;
    violation = std::max(violation, cmdp.thresholds(i) - rec.v_c(i));
  }
  rec.final_gap = v_star - rec.v_r;
  rec.final_violation = violation;
  return rec;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.environment = j.at("environment").get<std::string>();
  cfg.algorithm = j.at("algorithm").get<std::string>();
  cfg.outer_iters = j.value("outer_iters", cfg.outer_iters);
  cfg.inner_iters = j.value("inner_iters", cfg.inner_iters);
  cfg.beta = j.value("beta", cfg.beta);
  cfg.sigma = j.value("sigma", cfg.sigma);
  if (j.contains("primal_steps"))
    cfg.primal_steps = j.at("primal_steps").get<std::vector<double>>();
  if (j.contains("dual_steps")) cfg.dual_steps = j.at("dual_steps").get<std::vector<double>>();
  if (j.contains("surrogate_steps"))
    cfg.surrogate_steps = j.at("surrogate_steps").get<std::vector<double>>();
  cfg.surrogate_iters = j.value("surrogate_iters", cfg.surrogate_iters);
  cfg.one_hot = j.value("one_hot", cfg.one_hot);
  if (j.contains("tile")) {
    TileCoderConfig tile;
    tile.table_size = j["tile"].value("table_size", tile.table_size);
    tile.num_tilings = j["tile"].value("num_tilings", tile.num_tilings);
    tile.tile_size = j["tile"].value("tile_size", tile.tile_size);
    tile.seed = j["tile"].value("seed", tile.seed);
    cfg.tile = tile;
  }
  cfg.eps_sel = j.value("eps_sel", cfg.eps_sel);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (cfg.primal_steps.empty()) throw std::invalid_argument("config: empty primal step grid");
  if (cfg.eps_sel <= 0.0) throw std::invalid_argument("config: eps_sel must be positive");
  return cfg;
}

std::pair<TabularPolicy, AlmTrace> npg_pd_baseline(const TabularCmdp& cmdp, int T,
                                                   double primal_eta, double dual_eta) {
  if (primal_eta <= 0.0 || dual_eta <= 0.0)
    throw std::invalid_argument("npg_pd_baseline: step sizes must be positive");
  TabularPolicy policy = TabularPolicy::uniform(cmdp.n_states, cmdp.n_actions);
  VectorXd lambda = VectorXd::Zero(cmdp.num_constraints());
  AlmTrace trace;

  for (int t = 1; t <= T; ++t) {
    MatrixXd lagrangian_reward = cmdp.reward;
    for (int i = 0; i < cmdp.num_constraints(); ++i)
      lagrangian_reward += lambda(i) * cmdp.constraint_rewards[i];
    const ValuePair values = policy_evaluate(cmdp, policy, lagrangian_reward);

    // Multiplicative-weights form of softmax natural policy gradient.
    TabularPolicy next;
    next.probs.resize(cmdp.n_states, cmdp.n_actions);
    for (int s = 0; s < cmdp.n_states; ++s) {
      const Eigen::RowVectorXd q = values.q.row(s);
      const Eigen::ArrayXd weights =
          policy.probs.row(s).transpose().array() *
          ((q.transpose().array() - q.maxCoeff()) * primal_eta).exp();
      next.probs.row(s) = (weights / weights.sum()).transpose();
    }
    policy = next;

    AlmTraceRow row;
    row.iter = t;
    row.eps_t = 0.0;
    row.lambda = lambda;
    row.v_r = policy_evaluate(cmdp, policy).scalar_value;
    row.v_c.resize(cmdp.num_constraints());
    for (int i = 0; i < cmdp.num_constraints(); ++i) {
      row.v_c(i) = policy_evaluate(cmdp, policy, cmdp.constraint_rewards[i]).scalar_value;
      lambda(i) = std::max(0.0, lambda(i) - dual_eta * (row.v_c(i) - cmdp.thresholds(i)));
    }
    row.al_value = row.v_r;
    row.inner_grads = 1;
    row.cum_grads = t;
    trace.rows.push_back(std::move(row));
  }
  return {policy, trace};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  auto [cmdp, geo] = build_environment(config.environment);
  const CmdpLpResult lp = solve_occupancy_lp(cmdp);

  ExperimentReport report;
  report.v_star = lp.v_star;
  report.thresholds = cmdp.thresholds;

  AlmOptions opts;
  opts.outer_iters = config.outer_iters;
  opts.beta = config.beta;
  opts.sigma = config.sigma;
  opts.mode = BudgetMode::kFixed;

  if (config.algorithm == "pqa-alm") {
    for (double eta : config.primal_steps) {
      PqaConfig pqa;
      pqa.eta = eta;
      pqa.max_iters = config.inner_iters;
      auto [policy, trace] = run_alm(cmdp, make_pqa_oracle(pqa), opts);
      std::ostringstream label;
      label << "pqa-alm eta=" << eta;
      report.runs.push_back(
          finish_record(cmdp, lp.v_star, std::move(policy), std::move(trace), label.str()));
      report.runs.back().primal_step = eta;
    }
  } else if (config.algorithm == "ppqa-alm") {
    const FeatureMap features =
        config.tile ? tile_code(*config.tile, geo.rows, geo.cols, cmdp.n_actions)
                    : one_hot_features(cmdp.n_states, cmdp.n_actions);
    for (double eta : config.primal_steps) {
      for (double zeta : config.surrogate_steps) {
        PpqaConfig ppqa;
        ppqa.eta = eta;
        ppqa.surrogate_steps = config.surrogate_iters;
        ppqa.surrogate_step = zeta;
        ppqa.max_iters = config.inner_iters;
        auto [policy, trace] = run_alm(cmdp, make_ppqa_oracle(features, ppqa), opts);
        std::ostringstream label;
        label << "ppqa-alm eta=" << eta << " zeta=" << zeta;
        report.runs.push_back(
            finish_record(cmdp, lp.v_star, std::move(policy), std::move(trace), label.str()));
        report.runs.back().primal_step = eta;
        report.runs.back().surrogate_step = zeta;
      }
    }
  } else if (config.algorithm == "npg-pd-baseline") {
    for (double eta : config.primal_steps) {
      for (double dual_eta : config.dual_steps) {
        auto [policy, trace] =
            npg_pd_baseline(cmdp, config.outer_iters * config.inner_iters, eta, dual_eta);
        std::ostringstream label;
        label << "npg-pd eta=" << eta << " dual_eta=" << dual_eta;
        report.runs.push_back(
            finish_record(cmdp, lp.v_star, std::move(policy), std::move(trace), label.str()));
        report.runs.back().primal_step = eta;
        report.runs.back().dual_step = dual_eta;
      }
    }
  } else {
    throw std::invalid_argument("unknown algorithm id: " + config.algorithm);
  }

  report.best_violation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < report.runs.size(); ++i) {
    const RunRecord& rec = report.runs[i];
    report.best_violation = std::min(report.best_violation, rec.final_violation);
    if (rec.final_violation <= config.eps_sel &&
        (report.best_index < 0 || rec.final_gap < report.runs[report.best_index].final_gap))
      report.best_index = static_cast<int>(i);
  }

  if (!config.output_dir.empty()) emit_outputs(report, config.output_dir);
  return report;
}

void emit_outputs(const ExperimentReport& report, const std::string& dir) {
  if (report.runs.empty()) throw std::invalid_argument("emit_outputs: no runs");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  auto write_file = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_outputs: cannot open " + path);
    out << content;
  };

  std::ostringstream summary;
  summary.precision(17);
  summary << "run,label,primal_step,dual_step,surrogate_step,final_gap,final_violation,v_r\n";
  std::vector<PlotSeries> gap_series, violation_series, gap_vs_grads;
  for (size_t i = 0; i < report.runs.size(); ++i) {
    const RunRecord& rec = report.runs[i];
    write_file("run_" + std::to_string(i) + ".csv", rec.trace.to_csv());
    summary << i << ',' << rec.label << ',' << rec.primal_step << ',' << rec.dual_step << ','
            << rec.surrogate_step << ',' << rec.final_gap << ',' << rec.final_violation << ','
            << rec.v_r << '\n';

    PlotSeries gap{rec.label, {}, {}}, viol{rec.label, {}, {}}, grads{rec.label, {}, {}};
    for (const auto& row : rec.trace.rows) {
      gap.x.push_back(row.iter);
      gap.y.push_back(report.v_star - row.v_r);
      double v = 0.0;
      for (int c = 0; c < row.v_c.size(); ++c)
        v = std::max(v, report.thresholds(c) - row.v_c(c));
      viol.x.push_back(row.iter);
      viol.y.push_back(v);
      grads.x.push_back(static_cast<double>(row.cum_grads));
      grads.y.push_back(report.v_star - row.v_r);
    }
    gap_series.push_back(std::move(gap));
    violation_series.push_back(std::move(viol));
    gap_vs_grads.push_back(std::move(grads));
  }
  write_file("summary.csv", summary.str());
  write_file("gap_vs_iter.svg",
             render_line_plot("Optimality gap", "outer iteration", "V* - V_r", gap_series));
  write_file("violation_vs_iter.svg",
             render_line_plot("Constraint violation", "outer iteration", "max(b - V_c, 0)",
                              violation_series));
  write_file("gap_vs_grads.svg", render_line_plot("Optimality gap", "cumulative gradient evals",
                                                  "V* - V_r", gap_vs_grads));
}

}  // namespace cmdpal
