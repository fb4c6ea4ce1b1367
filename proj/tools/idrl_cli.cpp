// Command-line front end: run, aggregate, plot, serve.

#include <csignal>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "idrl/config_io.hpp"
#include "idrl/error.hpp"
#include "idrl/experiment.hpp"
#include "idrl/http_server.hpp"
#include "idrl/plot.hpp"
#include "idrl/records_io.hpp"

namespace {

idrl::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

struct RunFlags {
  std::string config_file;
  std::string env = "gridworld";
  std::string query_kind = "state-reward";
  std::string acquisition = "idrl";
  int num_queries = 10;
  std::string seeds = "0";
  double noise = 0.1;
  int candidate_policies = 5;
  int candidate_update_every = 1;
  double eir_xi = 0.001;
  std::string epd_optimism = "variance";
  std::string mr_probability = "gp";
  int rollout_length = 10;
  std::uint64_t master_seed = 0;
  std::uint64_t env_seed = 0;
  int threads = 0;
  bool record_timing = false;
  std::string out = "results.csv";
};

idrl::ExperimentConfig build_config(const RunFlags& f, CLI::App& cmd) {
  idrl::ExperimentConfig c;
  c.output = f.out;
  if (!f.config_file.empty()) c = idrl::load_config_file(f.config_file, c);
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  idrl::Json j = idrl::Json::object();
  if (given("--env") || (f.config_file.empty())) {
    idrl::Json env = idrl::env_spec_to_json(idrl::default_env_spec(idrl::env_kind_from_string(f.env)));
    env["seed"] = c.env.rng_seed;
    j["env"] = env;
  }
  if (given("--env-seed")) {
    idrl::Json env = j.contains("env") ? j["env"] : idrl::env_spec_to_json(c.env);
    env["seed"] = f.env_seed;
    j["env"] = env;
  }
  if (given("--query-kind")) j["query_kind"] = f.query_kind;
  if (given("--acquisition")) j["acquisition"] = f.acquisition;
  if (given("--num-queries")) j["num_queries"] = f.num_queries;
  if (given("--seeds")) j["seeds"] = f.seeds;
  if (given("--noise")) j["noise"] = f.noise;
  if (given("--candidate-policies")) j["candidate_policies"] = f.candidate_policies;
  if (given("--candidate-update-every")) j["candidate_update_every"] = f.candidate_update_every;
  if (given("--eir-xi")) j["eir_xi"] = f.eir_xi;
  if (given("--epd-optimism")) j["epd_optimism"] = f.epd_optimism;
  if (given("--mr-probability")) j["mr_probability"] = f.mr_probability;
  if (given("--rollout-length")) j["rollout_length"] = f.rollout_length;
  if (given("--master-seed")) j["master_seed"] = f.master_seed;
  if (given("--threads")) j["threads"] = f.threads;
  if (given("--record-timing")) j["record_timing"] = f.record_timing;
  if (given("--out")) j["out"] = f.out;
  return idrl::config_from_json(j, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active reward learning with exact GP reward models on tabular MDPs"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "run an acquisition over seeds and write per-iteration records");
  run->add_option("--config", rf.config_file, "JSON config file; flags given explicitly override it");
  run->add_option("--env", rf.env, "chain | junction | gridworld | four_item");
  run->add_option("--env-seed", rf.env_seed, "base seed for environment generation");
  run->add_option("--query-kind", rf.query_kind,
                  "state-reward | state-comparison | trajectory-return | trajectory-comparison");
  run->add_option("--acquisition", rf.acquisition, "idrl | uniform | igr | eir | epd | mr");
  run->add_option("--num-queries", rf.num_queries, "query budget per seed");
  run->add_option("--seeds", rf.seeds, "e.g. 0..29 or 1,2,5");
  run->add_option("--noise", rf.noise, "observation noise standard deviation");
  run->add_option("--candidate-policies", rf.candidate_policies, "Thompson-sampled candidate policies");
  run->add_option("--candidate-update-every", rf.candidate_update_every, "resample candidates every k queries");
  run->add_option("--eir-xi", rf.eir_xi, "exploration margin of expected improvement");
  run->add_option("--epd-optimism", rf.epd_optimism, "variance | std");
  run->add_option("--mr-probability", rf.mr_probability, "gp | bernoulli");
  run->add_option("--rollout-length", rf.rollout_length, "steps per rollout in trajectory queries");
  run->add_option("--master-seed", rf.master_seed, "master random seed");
  run->add_option("--threads", rf.threads, "worker threads (0 = all cores)");
  run->add_flag("--record-timing", rf.record_timing, "write measured wall_time_ms instead of 0");
  run->add_option("--out", rf.out, "output CSV");

  std::string agg_in, agg_out = "summary.csv";
  auto* agg = app.add_subcommand("aggregate", "mean and standard error per acquisition and iteration");
  agg->add_option("--in", agg_in, "records CSV")->required();
  agg->add_option("--out", agg_out, "summary CSV");

  std::string plot_in, plot_out = "curves.svg", plot_metric = "regret";
  auto* plot = app.add_subcommand("plot", "learning curves as SVG");
  plot->add_option("--in", plot_in, "summary CSV")->required();
  plot->add_option("--out", plot_out, "SVG file");
  plot->add_option("--metric", plot_metric, "regret | mse | cosine");

  idrl::ServerOptions so = idrl::server_options_from_env();
  auto* serve = app.add_subcommand("serve", "run the interactive session service");
  serve->add_option("--port", so.port, "listening port (default from IDRL_PORT or 8080)");
  serve->add_option("--host", so.host, "bind address (default from IDRL_BIND_ADDRESS or 127.0.0.1)");
  serve->add_option("--static-dir", so.static_dir, "directory with the UI bundle");
  serve->add_option("--snapshot-dir", so.snapshot_dir, "directory for per-session snapshots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const idrl::ExperimentConfig config = build_config(rf, *run);
      const auto records = idrl::run_experiment(config);
      idrl::write_records_file(config.output, records);
      std::cerr << "wrote " << records.size() << " records to " << config.output << '\n';
    } else if (*agg) {
      const auto rows = idrl::aggregate(idrl::read_records_file(agg_in));
      std::ofstream out(agg_out, std::ios::binary);
      if (!out) throw idrl::Error(idrl::ErrorKind::invalid_input, "cannot write '" + agg_out + "'");
      idrl::write_summary_csv(out, rows);
    } else if (*plot) {
      std::ifstream in(plot_in, std::ios::binary);
      if (!in) throw idrl::Error(idrl::ErrorKind::invalid_input, "cannot open '" + plot_in + "'");
      idrl::PlotMetric m = idrl::PlotMetric::regret;
      if (plot_metric == "mse") m = idrl::PlotMetric::mse;
      else if (plot_metric == "cosine") m = idrl::PlotMetric::cosine;
      else if (plot_metric != "regret")
        throw idrl::Error(idrl::ErrorKind::invalid_configuration, "unknown metric '" + plot_metric + "'", "metric");
      std::ofstream out(plot_out, std::ios::binary);
      out << idrl::learning_curves_svg(idrl::read_summary_csv(in), m);
    } else if (*serve) {
      idrl::SessionManager sessions(so.snapshot_dir);
      const std::size_t restored = sessions.restore();
      idrl::HttpServer server(sessions, so);
      const int port = server.bind();
      if (port < 0) throw idrl::Error(idrl::ErrorKind::invalid_configuration, "cannot bind " + so.host, "port");
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << so.host << ':' << port << " (" << restored
                << " sessions restored)\n";
      server.listen();
      g_server = nullptr;
    }
  } catch (const idrl::Error& e) {
    std::cerr << "error [" << idrl::to_string(e.kind()) << "]";
    if (!e.field().empty()) std::cerr << " " << e.field();
    std::cerr << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
