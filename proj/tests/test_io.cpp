#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "idrl/config_io.hpp"
#include "idrl/error.hpp"
#include "idrl/experiment.hpp"
#include "idrl/plot.hpp"
#include "idrl/records_io.hpp"

using namespace idrl;

namespace {

std::string field_of(const Json& j) {
  try {
    config_from_json(j);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_configuration);
    return e.field();
  }
  return "<accepted>";
}

std::vector<ExperimentRecord> sample_records() {
  ExperimentConfig c;
  c.env = default_env_spec(EnvKind::chain);
  c.acquisition = Acquisition::igr;
  c.num_queries = 5;
  c.seeds = {0, 1};
  c.threads = 1;
  return run_experiment(c);
}

}  // namespace

TEST_CASE("records CSV round trip") {
  const auto records = sample_records();
  std::stringstream ss;
  write_records_csv(ss, records);
  std::string header;
  std::getline(std::istringstream(ss.str()), header);
  CHECK(header == kRecordsHeader);
  const auto back = read_records_csv(ss);
  CHECK(back == records);
  std::stringstream again;
  write_records_csv(again, back);
  std::stringstream first;
  write_records_csv(first, records);
  CHECK(again.str() == first.str());
}

TEST_CASE("awkward doubles survive the round trip") {
  ExperimentRecord r;
  r.response = 0.1 + 0.2;
  r.regret = 1e-300;
  r.mse = -0.0;
  r.cosine = 0.99999999999999989;
  r.wall_time_ms = 123456789.125;
  std::stringstream ss;
  write_records_csv(ss, {r});
  CHECK(read_records_csv(ss).front() == r);
}

TEST_CASE("malformed CSV is rejected") {
  std::istringstream bad_header("seed,iteration\n0,1\n");
  CHECK_THROWS_AS(read_records_csv(bad_header), Error);
  std::istringstream short_row(std::string(kRecordsHeader) + "\n0,1,idrl\n");
  CHECK_THROWS_AS(read_records_csv(short_row), Error);
  std::istringstream bad_number(std::string(kRecordsHeader) + "\n0,x,idrl,chain,0,0,0,0,0,0\n");
  CHECK_THROWS_AS(read_records_csv(bad_number), Error);
}

TEST_CASE("summary CSV round trip") {
  const auto rows = aggregate(sample_records());
  std::stringstream ss;
  write_summary_csv(ss, rows);
  const auto back = read_summary_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].iteration == rows[i].iteration);
    CHECK(back[i].count == rows[i].count);
    CHECK(back[i].regret.mean == rows[i].regret.mean);
    CHECK(back[i].cosine.standard_error == rows[i].cosine.standard_error);
  }
}

TEST_CASE("records files") {
  const auto path = (std::filesystem::temp_directory_path() / "idrl_records_test.csv").string();
  const auto records = sample_records();
  write_records_file(path, records);
  CHECK(read_records_file(path) == records);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_records_file(path), Error);
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig c;
  c.env = default_env_spec(EnvKind::junction);
  c.query_kind = QueryKind::trajectory_comparison;
  c.acquisition = Acquisition::mr;
  c.num_queries = 17;
  c.seeds = {4, 5, 9};
  c.noise_std = 0.25;
  c.epd_optimism = EpdOptimism::std;
  c.mr_probability = MrProbability::bernoulli;
  c.output = "x.csv";
  const ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.seeds == c.seeds);
  CHECK(back.env.parameters.n == 15);
}

TEST_CASE("config fields fill from the base") {
  ExperimentConfig base;
  base.num_queries = 99;
  const ExperimentConfig c = config_from_json(Json{{"noise", 0.0}}, base);
  CHECK(c.num_queries == 99);
  CHECK(c.noise_std == 0.0);
  const ExperimentConfig d = config_from_json(Json{{"env", {{"kind", "chain"}, {"parameters", {{"n", 8}, {"m", 3}}}}}});
  CHECK(d.env.parameters.n == 8);
  CHECK(d.env.parameters.discount == 0.99);
  CHECK(config_from_json(Json{{"seeds", "0..2,7"}}).seeds == std::vector<std::uint64_t>{0, 1, 2, 7});
}

TEST_CASE("validation errors name the field") {
  CHECK(field_of(Json{{"env", {{"kind", "maze"}}}}) == "env.kind");
  CHECK(field_of(Json{{"env", {{"kind", "chain"}, {"parameters", {{"x", 1}}}}}}) == "env.parameters.x");
  CHECK(field_of(Json{{"env", {{"kind", "chain"}, {"parameters", {{"n", 5}, {"m", 5}}}}}}) == "env.parameters.m");
  CHECK(field_of(Json{{"env", {{"kind", "gridworld"}, {"parameters", {{"size", "big"}}}}}}) ==
        "env.parameters.size");
  CHECK(field_of(Json{{"num_queries", 1.5}}) == "num_queries");
  CHECK(field_of(Json{{"acquisition", "evr"}}) == "acquisition");
  CHECK(field_of(Json{{"query_kind", "ranking"}}) == "query_kind");
  CHECK(field_of(Json{{"seeds", "3..1"}}) == "seeds");
  CHECK(field_of(Json{{"seeds", {-1}}}) == "seeds");
  CHECK(field_of(Json{{"bogus", 1}}) == "bogus");
  CHECK(field_of(Json{{"epd_optimism", "max"}}) == "epd_optimism");
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{3});
  CHECK(parse_seed_list("0..29").size() == 30);
  CHECK(parse_seed_list("1,4,7") == std::vector<std::uint64_t>{1, 4, 7});
  CHECK_THROWS_AS(parse_seed_list(""), Error);
  CHECK_THROWS_AS(parse_seed_list("a..b"), Error);
}

TEST_CASE("config files") {
  const auto path = (std::filesystem::temp_directory_path() / "idrl_config_test.json").string();
  {
    std::ofstream out(path);
    out << R"({"env": {"kind": "chain"}, "acquisition": "uniform", "num_queries": 3})";
  }
  const ExperimentConfig c = load_config_file(path);
  CHECK(c.acquisition == Acquisition::uniform);
  CHECK(c.num_queries == 3);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config_file(path), Error);
  std::remove(path.c_str());
}

TEST_CASE("learning curve plot") {
  const auto rows = aggregate(sample_records());
  const std::string svg = learning_curves_svg(rows, PlotMetric::regret);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("igr") != std::string::npos);
  CHECK(svg.find("chain") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK_NOTHROW(learning_curves_svg({}, PlotMetric::cosine));
}
