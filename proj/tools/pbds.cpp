// pbds: command line front-end over the pbds core library. See docs/pbds.1.md.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pbds/common/error.hpp"
#include "pbds/estimator/size_estimator.hpp"
#include "pbds/lineage/lineage.hpp"
#include "pbds/partition/partition.hpp"
#include "pbds/relalg/csv.hpp"
#include "pbds/relalg/evaluator.hpp"
#include "pbds/relalg/plan_json.hpp"
#include "pbds/safety/safety.hpp"
#include "pbds/sampling/sample.hpp"
#include "pbds/sampling/sample_cache.hpp"
#include "pbds/sketch/sketch.hpp"
#include "pbds/sketch/sketch_index.hpp"
#include "pbds/strategy/strategy.hpp"
#include "pbds/workbench/generator.hpp"
#include "pbds/workbench/replay.hpp"
#include "pbds/workbench/report.hpp"
#include "pbds/workbench/workload.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pbds;

namespace {

struct Options {
  std::string data;
  std::string schema;
  std::string types;
  std::string name;
  std::string csv;
  std::string query;
  std::string config;
  std::string out;
  std::string relation;
  std::string strategy = "cb-opt-gb";
  std::string sample;
  std::string sketch;
  std::string index;
  std::string spec;
  std::string preset;
  std::int64_t rows = 100000;
  std::vector<std::string> attributes;
  std::vector<std::string> ranges;
  std::vector<std::string> group;
  std::vector<std::string> files;
  bool actual = false;
  bool check = false;
  EstimatorConfig est;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << text;
}

/// Prints to stdout, or writes to --out when given.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text << '\n';
  } else {
    write_file(o.out, text + "\n");
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) fail(ErrorKind::invalid_argument, fmt::format("{} is required", flag));
}

/// Flags win over the config file, which wins over defaults.
void apply_config(CLI::App& app, Options& o) {
  if (!o.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(o.config));
    } catch (const json::exception& e) {
      fail(ErrorKind::parse, fmt::format("config: {}", e.what()));
    }
    const auto unset = [&](const char* flag) { return app.get_option(flag)->count() == 0; };
    if (j.contains("fragments") && unset("--fragments")) o.est.fragment_count = j["fragments"].get<std::size_t>();
    if (j.contains("theta") && unset("--theta")) o.est.theta = j["theta"].get<double>();
    if (j.contains("bootstrap") && unset("--bootstrap")) o.est.bootstrap = j["bootstrap"].get<int>();
    if (j.contains("alpha") && unset("--alpha")) o.est.alpha = j["alpha"].get<double>();
    if (j.contains("seed") && unset("--seed")) o.est.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("data") && unset("--data")) o.data = j["data"].get<std::string>();
  }
  if (!(o.est.theta > 0 && o.est.theta <= 1)) fail(ErrorKind::invalid_argument, "--theta must be in (0, 1]");
  if (!(o.est.alpha > 0 && o.est.alpha < 1)) fail(ErrorKind::invalid_argument, "--alpha must be in (0, 1)");
  if (o.est.bootstrap < 1) fail(ErrorKind::invalid_argument, "--bootstrap must be at least 1");
  if (o.est.fragment_count < 1) fail(ErrorKind::invalid_argument, "--fragments must be at least 1");
}

Database load_data(const Options& o) {
  require(o.data, "--data");
  return load_database(o.data);
}

std::string sketched_relation(const Options& o, const QueryPlan& plan, const Database& db) {
  if (!o.relation.empty()) return o.relation;
  try {
    return analyze_shape(plan, db).fact;
  } catch (const Error&) {
    return plan.node(plan.table_accesses().front()).relation;
  }
}

std::vector<RangeSet> load_ranges(const Options& o) {
  std::vector<RangeSet> out;
  for (const auto& path : o.ranges) out.push_back(range_set_from_json(read_file(path)));
  return out;
}

/// Explicit ranges replace equi-depth partitions; they must agree on the fragment count.
void register_ranges(const std::vector<RangeSet>& ranges, const Relation& rel, PartitionCache& cache,
                     EstimatorConfig& config) {
  for (const auto& r : ranges) {
    if (r.size() != ranges.front().size()) {
      fail(ErrorKind::invalid_argument, "explicit ranges must all have the same number of fragments");
    }
    cache.insert(std::make_shared<const RangePartition>(build_range_partition(rel, r)));
  }
  if (!ranges.empty()) config.fragment_count = ranges.front().size();
}

void run_ingest(const Options& o) {
  require(o.csv, "--csv");
  require(o.out, "--out");
  if (o.schema.empty() && o.types.empty()) fail(ErrorKind::invalid_argument, "--schema or --types is required");
  const Schema schema = !o.schema.empty()
                            ? load_schema(o.schema)
                            : schema_from_spec(o.name.empty() ? fs::path(o.csv).stem().string() : o.name, o.types);
  const Relation rel = load_csv(o.csv, schema);
  save_relation(o.out, rel);
  std::cout << json{{"relation", rel.schema().relation_name()}, {"rows", rel.size()}}.dump() << '\n';
}

void run_safety(const Options& o) {
  require(o.query, "--query");
  const Database db = load_data(o);
  emit(o, safety_report_json(load_plan(o.query), db));
}

void run_sample_build(const Options& o) {
  require(o.relation, "--relation");
  const Database db = load_data(o);
  const auto sample = stratified_sample(lookup(db, o.relation), o.group, o.est.theta, o.est.seed);
  emit(o, sample_to_json(sample));
}

void run_sample_ls(const Options& o) {
  json out = json::array();
  for (const auto& path : o.files) {
    const auto s = sample_from_json(read_file(path));
    out.push_back({{"file", path},
                   {"relation", s.relation},
                   {"attrs", s.attributes},
                   {"theta", s.theta},
                   {"seed", s.seed},
                   {"strata", s.strata.size()},
                   {"sample_rows", s.sample_size()},
                   {"over_budget", s.over_budget}});
  }
  std::cout << out.dump(2) << '\n';
}

void run_estimate(Options o) {
  require(o.query, "--query");
  const Database db = load_data(o);
  const QueryPlan plan = load_plan(o.query);
  const std::string relation = sketched_relation(o, plan, db);
  const Relation& rel = lookup(db, relation);
  SampleCache samples;
  PartitionCache partitions;
  register_ranges(load_ranges(o), rel, partitions, o.est);
  if (!o.sample.empty()) {
    samples.insert(std::make_shared<const StratifiedSample>(sample_from_json(read_file(o.sample))));
  }
  std::vector<std::string> attrs = o.attributes;
  if (attrs.empty()) attrs = strategy_pool(candidates(plan, db, relation, o.est.fragment_count), StrategyKind::cb_opt);
  const SizeEstimator estimator(db, o.est, samples, partitions);
  const auto result = estimator.estimate(plan, attrs);
  std::optional<Provenance> prov;
  if (o.actual) prov = lineage(plan, db);
  json out = json::array();
  for (const auto& e : result.estimates) {
    std::optional<std::int64_t> actual;
    if (prov) actual = capture(*prov, *partitions.get(rel, e.attribute, o.est.fragment_count)).size_rows;
    out.push_back(json::parse(size_estimate_to_json(e, actual)));
  }
  emit(o, out.dump(2));
}

void run_capture(Options o) {
  require(o.query, "--query");
  const Database db = load_data(o);
  const QueryPlan plan = load_plan(o.query);
  const Relation& rel = lookup(db, sketched_relation(o, plan, db));
  const auto ranges = load_ranges(o);
  std::shared_ptr<const RangePartition> partition;
  if (!ranges.empty()) {
    partition = std::make_shared<const RangePartition>(build_range_partition(rel, ranges.front()));
  } else {
    if (o.attributes.size() != 1) fail(ErrorKind::invalid_argument, "capture needs one --attribute or --ranges");
    partition = std::make_shared<const RangePartition>(
        build_range_partition(rel, equi_depth_ranges(rel, o.attributes.front(), o.est.fragment_count)));
  }
  Sketch sketch = capture(plan, db, *partition);
  if (!o.index.empty()) {
    auto index = fs::exists(o.index) ? SketchIndex::load(o.index) : std::make_unique<SketchIndex>();
    index->insert(sketch);
    index->save(o.index);
  }
  emit(o, sketch_to_json(sketch));
}

void run_choose(Options o) {
  require(o.query, "--query");
  const StrategyKind strategy = parse_strategy(o.strategy);
  const Database db = load_data(o);
  const QueryPlan plan = load_plan(o.query);
  const std::string relation = sketched_relation(o, plan, db);
  SampleCache samples;
  PartitionCache partitions;
  register_ranges(load_ranges(o), lookup(db, relation), partitions, o.est);
  if (!o.sample.empty()) {
    samples.insert(std::make_shared<const StratifiedSample>(sample_from_json(read_file(o.sample))));
  }
  const SizeEstimator estimator(db, o.est, samples, partitions);
  const CandidateSet cands = candidates(plan, db, relation, o.est.fragment_count);
  const auto choice = select_attribute(strategy, cands, plan, is_cost_based(strategy) ? &estimator : nullptr, o.est.seed);
  json ranking = json::array();
  for (const auto& e : choice.ranking) ranking.push_back(json::parse(size_estimate_to_json(e)));
  emit(o, json{{"strategy", to_string(strategy)}, {"attribute", choice.attribute}, {"ranking", ranking}}.dump(2));
}

void run_apply(const Options& o) {
  require(o.query, "--query");
  require(o.sketch, "--sketch");
  const Database db = load_data(o);
  const QueryPlan plan = load_plan(o.query);
  const Sketch sketch = sketch_from_json(read_file(o.sketch));
  const Relation filtered = evaluate(plan, apply_sketch(sketch, db));
  if (o.check && !bag_equal(filtered, evaluate(plan, db))) {
    fail(ErrorKind::correctness, "sketch-filtered result differs from the full result");
  }
  std::ostringstream out;
  write_csv(out, filtered);
  std::string text = out.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  emit(o, text);
  std::cerr << json{{"rows_scanned", sketch.size_rows}, {"relation_rows", lookup(db, sketch.relation).size()}}.dump()
            << '\n';
}

Database bench_data(const Options& o) {
  if (!o.preset.empty()) {
    if (o.preset == "crimes") return crimes_preset(o.rows, o.est.seed);
    if (o.preset == "tpch") return tpch_preset(o.rows, o.est.seed);
    fail(ErrorKind::invalid_argument, "unknown preset " + o.preset);
  }
  return load_data(o);
}

void run_bench(const Options& o) {
  require(o.spec, "--spec");
  require(o.out, "--out");
  const Database db = bench_data(o);
  const auto workload = generate_workload(workload_spec_from_json(read_file(o.spec)), db);
  ReplayConfig config;
  config.strategy = parse_strategy(o.strategy);
  config.estimator = o.est;
  const RunReport report = run_end_to_end(workload, db, config);
  const ReplaySummary summary = summarize(report);
  fs::create_directories(o.out);
  write_file((fs::path(o.out) / "report.csv").string(), report_csv(report));
  write_file((fs::path(o.out) / "summary.json").string(), summary_to_json(summary) + "\n");
  std::cout << summary_to_json(summary) << '\n';
  if (!summary.correct) fail(ErrorKind::correctness, "a sketch-filtered result differed from the full result");
}

void run_compare(const Options& o) {
  std::vector<ReplaySummary> summaries;
  for (const auto& path : o.files) {
    const fs::path p = fs::is_directory(path) ? fs::path(path) / "summary.json" : fs::path(path);
    summaries.push_back(summary_from_json(read_file(p.string())));
  }
  std::cout << compare_summaries(std::move(summaries));
}

void run_index_list(const Options& o) {
  require(o.index, "--index");
  const auto index = SketchIndex::load(o.index);
  json out = json::array();
  for (const auto& e : index->entries()) {
    out.push_back({{"relation", e.sketch.relation},
                   {"attribute", e.sketch.attribute()},
                   {"fragments", e.sketch.member_count()},
                   {"size_rows", e.sketch.size_rows},
                   {"uses", e.uses},
                   {"fingerprint", e.sketch.captured_for.text}});
  }
  std::cout << out.dump(2) << '\n';
}

void add_config_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON file with fragments, theta, bootstrap, alpha, seed, data");
  cmd->add_option("--fragments", o.est.fragment_count, "Equi-depth fragments per attribute")->capture_default_str();
  cmd->add_option("--theta", o.est.theta, "Sample rate in (0, 1]")->capture_default_str();
  cmd->add_option("--bootstrap", o.est.bootstrap, "Bootstrap resamples")->capture_default_str();
  cmd->add_option("--alpha", o.est.alpha, "Confidence level")->capture_default_str();
  cmd->add_option("--seed", o.est.seed, "Root seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Provenance-based data skipping: capture, reuse and size sketches"};
  app.require_subcommand(1);
  Options o;
  std::function<void()> action;
  CLI::App* active = nullptr;
  const auto sub = [&](CLI::App* parent, const char* name, const char* help, auto fn) {
    CLI::App* cmd = parent->add_subcommand(name, help);
    add_config_flags(cmd, o);
    cmd->add_option("--data", o.data, "Data directory of <name>.csv and <name>.schema.json");
    cmd->add_option("--out", o.out, "Output path");
    cmd->callback([&, cmd, fn] {
      active = cmd;
      action = [&, fn] { fn(o); };
    });
    return cmd;
  };

  auto* ingest = sub(&app, "ingest", "Load a CSV into a data directory", run_ingest);
  ingest->add_option("--csv", o.csv, "Input CSV with a header row");
  ingest->add_option("--schema", o.schema, "Schema JSON");
  ingest->add_option("--types", o.types, "Inline schema, name:type,name:type");
  ingest->add_option("--name", o.name, "Relation name for --types");

  auto* safety = sub(&app, "analyze-safety", "Per table access safe sketch types", run_safety);
  safety->add_option("--query", o.query, "Plan JSON");

  auto* sample = app.add_subcommand("sample", "Stratified samples");
  sample->require_subcommand(1);
  auto* build = sub(sample, "build", "Build a stratified sample", run_sample_build);
  build->add_option("--relation", o.relation, "Relation to sample");
  build->add_option("--group", o.group, "Stratification attributes")->delimiter(',');
  auto* ls = sub(sample, "ls", "Summarize sample files", run_sample_ls);
  ls->add_option("files", o.files, "Sample JSON files");

  auto* estimate = sub(&app, "estimate", "Estimate sketch sizes", run_estimate);
  estimate->add_option("--query", o.query, "Plan JSON");
  estimate->add_option("--attribute", o.attributes, "Attributes to estimate (default: all candidates)")->delimiter(',');
  estimate->add_option("--ranges", o.ranges, "Explicit range set JSON, one per attribute");
  estimate->add_option("--sample", o.sample, "Sample JSON to use instead of building one");
  estimate->add_option("--relation", o.relation, "Sketched relation");
  estimate->add_flag("--actual", o.actual, "Also capture and report the actual size");

  auto* cap = sub(&app, "capture", "Capture a provenance sketch", run_capture);
  cap->add_option("--query", o.query, "Plan JSON");
  cap->add_option("--attribute", o.attributes, "Sketch attribute");
  cap->add_option("--ranges", o.ranges, "Explicit range set JSON");
  cap->add_option("--relation", o.relation, "Sketched relation");
  cap->add_option("--index", o.index, "Sketch index JSON to add the sketch to");

  auto* choose = sub(&app, "choose", "Pick a sketch attribute", run_choose);
  choose->add_option("--query", o.query, "Plan JSON");
  choose->add_option("--strategy", o.strategy, "cb-opt, cb-opt-gb, rand-gb, rand-pk")->capture_default_str();
  choose->add_option("--ranges", o.ranges, "Explicit range set JSON, one per attribute");
  choose->add_option("--sample", o.sample, "Sample JSON to use instead of building one");
  choose->add_option("--relation", o.relation, "Sketched relation");

  auto* apply = sub(&app, "apply", "Evaluate a query over a sketch instance", run_apply);
  apply->add_option("--query", o.query, "Plan JSON");
  apply->add_option("--sketch", o.sketch, "Sketch JSON");
  apply->add_flag("--check", o.check, "Fail unless the result equals the full result");

  auto* bench = app.add_subcommand("bench", "Workload replay");
  bench->require_subcommand(1);
  auto* run = sub(bench, "run", "Replay a generated workload with one strategy", run_bench);
  run->add_option("--spec", o.spec, "Workload spec JSON");
  run->add_option("--strategy", o.strategy, "cb-opt, cb-opt-gb, rand-gb, rand-pk")->capture_default_str();
  run->add_option("--preset", o.preset, "Generate data instead of --data: crimes or tpch");
  run->add_option("--rows", o.rows, "Rows for --preset")->capture_default_str();
  auto* compare = sub(bench, "compare", "Merge summaries across strategies", run_compare);
  compare->add_option("files", o.files, "summary.json files or report directories");

  auto* index = app.add_subcommand("index", "Sketch index");
  index->require_subcommand(1);
  auto* list = sub(index, "list", "List indexed sketches", run_index_list);
  list->add_option("--index", o.index, "Sketch index JSON");

  try {
    app.parse(argc, argv);
    apply_config(*active, o);
    action();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "invalid_flag"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
