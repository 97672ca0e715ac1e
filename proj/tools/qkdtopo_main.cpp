// qkdtopo: plan device placement and key routing for hybrid QKD networks.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qkdtopo/build.hpp"
#include "qkdtopo/evaluate.hpp"
#include "qkdtopo/gen.hpp"
#include "qkdtopo/milp.hpp"

using namespace qkdtopo;
using nlohmann::json;

namespace {

// Exit codes: 0 success; 1 verify found violations; 2 usage; 3 input error;
// 4 solver hit a time/solution limit; 5 internal failure.
enum ExitCode { kOk = 0, kViolations = 1, kUsage = 2, kInput = 3, kLimit = 4, kInternal = 5 };

struct CommonOpts {
  std::string topology;
  std::string demands_csv;
  BuildConfig build;
  RateParams rates;
  SolverConfig solver;
};

void add_instance_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--topology", o.topology,
                  "instance JSON path, or 'nsfnet' for the built-in fixture")
      ->required();
  cmd->add_option("--demands", o.demands_csv,
                  "demand CSV (source,target,demand_kbps); replaces the instance's demands");
}

void add_build_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--budget", o.build.budget, "total cost budget C")
      ->envname("QKDTOPO_BUDGET")
      ->capture_default_str();
  cmd->add_option("--q1", o.build.q1, "CSC device price relative to C2C")
      ->envname("QKDTOPO_Q1")
      ->capture_default_str();
  cmd->add_option("--q2", o.build.q2, "credibility-control price per trusted node")
      ->envname("QKDTOPO_Q2")
      ->capture_default_str();
  cmd->add_option_function<std::string>(
         "--mode", [&o](const std::string& s) { o.build.mode = parse_mode(s); },
         "network mode: hybrid | pure-c2c | pure-csc")
      ->default_str("hybrid");
  cmd->add_flag_function(
      "--no-selection", [&o](std::int64_t) { o.build.relay_selection = false; },
      "trust every node instead of optimizing the trusted set");
  cmd->add_option("--big-m", o.build.big_m, "big-M override (<= 0 selects the auto rule)")
      ->capture_default_str();
  cmd->add_flag_function(
      "--no-tighten-trust", [&o](std::int64_t) { o.build.tighten_trust = false; },
      "drop the redundant T <= I cut");
}

void add_rate_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--r0", o.rates.r0_kbps, "C2C rate at zero distance (kbps)")
      ->capture_default_str();
  cmd->add_option("--r0-hat", o.rates.r0_hat_kbps, "CSC rate at zero distance (kbps)")
      ->capture_default_str();
  cmd->add_option("--alpha", o.rates.alpha_db_per_km, "fibre attenuation (dB/km)")
      ->capture_default_str();
  cmd->add_option("--gamma", o.rates.asym_gamma, "CSC asymmetry penalty per km")
      ->capture_default_str();
  cmd->add_option("--lmax-c2c", o.rates.l_max_km, "C2C reach cutoff (km)")
      ->capture_default_str();
  cmd->add_option("--lmax-csc", o.rates.l_max_total_km, "CSC combined reach cutoff (km)")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--time-limit", o.solver.time_limit_s, "solver wall-clock limit (s)")
      ->envname("QKDTOPO_TIME_LIMIT")
      ->capture_default_str();
  cmd->add_option("--mip-gap", o.solver.mip_gap, "relative optimality gap target")
      ->envname("QKDTOPO_MIP_GAP")
      ->capture_default_str();
  cmd->add_option("--solution-limit", o.solver.solution_limit,
                  "stop after this many incumbent improvements")
      ->envname("QKDTOPO_SOLUTION_LIMIT")
      ->capture_default_str();
  cmd->add_option("--workers", o.solver.workers, "parallel branch & bound workers")
      ->envname("QKDTOPO_WORKERS")
      ->capture_default_str();
  cmd->add_option("--seed", o.solver.seed, "run seed recorded in artifacts")
      ->envname("QKDTOPO_SEED")
      ->capture_default_str();
}

Instance load_common(const CommonOpts& o) {
  Instance inst = o.topology == "nsfnet" ? nsfnet_instance() : load_instance(o.topology);
  if (!o.demands_csv.empty()) {
    std::ifstream in(o.demands_csv, std::ios::binary);
    if (!in) throw IoError("cannot open demand file: " + o.demands_csv);
    std::ostringstream ss;
    ss << in.rdbuf();
    inst.demands = parse_demand_csv(ss.str(), inst.topology, o.demands_csv);
  }
  if (inst.demands.empty()) {
    throw ValidationError("instance has no demand pairs (provide --demands)");
  }
  return inst;
}

json config_json(const CommonOpts& o) {
  return json{
      {"budget", o.build.budget},
      {"q1", o.build.q1},
      {"q2", o.build.q2},
      {"mode", mode_name(o.build.mode)},
      {"relay_selection", o.build.relay_selection},
      {"big_m", o.build.big_m},
      {"big_m_effective", o.build.effective_big_m()},
      {"tighten_trust", o.build.tighten_trust},
      {"rates",
       {{"r0_kbps", o.rates.r0_kbps},
        {"r0_hat_kbps", o.rates.r0_hat_kbps},
        {"alpha_db_per_km", o.rates.alpha_db_per_km},
        {"asym_gamma", o.rates.asym_gamma},
        {"l_max_km", o.rates.l_max_km},
        {"l_max_total_km", o.rates.l_max_total_km}}},
      {"solver",
       {{"time_limit_s", o.solver.time_limit_s},
        {"mip_gap", o.solver.mip_gap},
        {"solution_limit", o.solver.solution_limit},
        {"workers", o.solver.workers},
        {"seed", o.solver.seed}}},
  };
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

int cmd_optimize(const CommonOpts& o, const std::string& out_dir, bool emit_lp) {
  const Instance inst = load_common(o);
  const BuiltModel bm = build_model(inst.topology, inst.demands, o.rates, o.build);
  SolverConfig sc = o.solver;
  sc.warm_start = trivial_start(bm);
  const SolveResult r = solve_milp(bm.model, sc);

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base(out_dir);

  json j;
  j["schema"] = "qkdtopo-deployment-v1";
  j["config"] = config_json(o);
  j["instance"] = {{"source", o.topology},
                   {"nodes", inst.topology.node_count()},
                   {"edges", inst.topology.edge_count()},
                   {"csc_edges", bm.csc_edges.size()},
                   {"demand_pairs", inst.demands.pair_count()}};
  if (inst.seed) j["instance"]["seed"] = *inst.seed;
  j["result"] = {{"status", status_name(r.status)},
                 {"objective_b", r.objective},
                 {"bound", std::isfinite(r.bound) ? json(r.bound) : json(nullptr)},
                 {"gap", std::isfinite(r.gap) ? json(r.gap) : json(nullptr)},
                 {"nodes", r.stats.nodes},
                 {"simplex_iters", r.stats.simplex_iters},
                 {"wall_s", r.stats.wall_s}};

  if (r.has_assignment) {
    const Deployment dep = extract_deployment(bm, r.assignment);
    json devs = json::array();
    for (int e = 0; e < inst.topology.edge_count(); ++e) {
      const long long c = dep.s[static_cast<std::size_t>(e)];
      if (c == 0) continue;
      const Edge& ed = inst.topology.edges()[static_cast<std::size_t>(e)];
      devs.push_back({{"u", inst.topology.node_id(ed.u)},
                      {"v", inst.topology.node_id(ed.v)},
                      {"count", c}});
    }
    json cdevs = json::array();
    for (std::size_t k = 0; k < bm.csc_edges.size(); ++k) {
      const long long c = dep.shat[k];
      if (c == 0) continue;
      const CscEdge& ck = bm.csc_edges[k];
      cdevs.push_back({{"u", inst.topology.node_id(ck.u)},
                       {"p", inst.topology.node_id(ck.p)},
                       {"v", inst.topology.node_id(ck.v)},
                       {"count", c}});
    }
    json trusted = json::array();
    for (int v = 0; v < inst.topology.node_count(); ++v) {
      if (dep.trust[static_cast<std::size_t>(v)]) trusted.push_back(inst.topology.node_id(v));
    }
    json sods = json::array();
    for (int p = 0; p < inst.demands.pair_count(); ++p) {
      const Demand& d = inst.demands.demands()[static_cast<std::size_t>(p)];
      sods.push_back({{"s", inst.topology.node_id(d.s)},
                      {"t", inst.topology.node_id(d.t)},
                      {"demand_kbps", d.demand_kbps},
                      {"delivered_kbps", delivered_rate(bm, dep, p)},
                      {"sod", compute_sod(bm, dep, p)}});
    }
    j["deployment"] = {{"cost", dep.cost()},
                       {"c2c_devices", std::move(devs)},
                       {"csc_devices", std::move(cdevs)},
                       {"trusted_nodes", std::move(trusted)},
                       {"gsod", compute_gsod(bm, dep)},
                       {"sod", std::move(sods)}};
  } else {
    j["deployment"] = nullptr;
  }

  write_file(base / "deployment.json", j.dump(2) + "\n");
  write_file(base / "solution.txt", format_solve_result(bm.model, r));
  if (emit_lp) export_lp_file(bm.model, (base / "model.lp").string());

  std::cout << "status: " << status_name(r.status) << "\n";
  if (r.has_assignment) {
    std::cout << "B = " << format_double(r.objective) << "\n";
  }
  std::cout << "artifacts: " << (base / "deployment.json").string() << ", "
            << (base / "solution.txt").string() << "\n";
  return (r.status == SolveStatus::TimeLimit || r.status == SolveStatus::SolutionLimit)
             ? kLimit
             : kOk;
}

int cmd_generate(const GenSpec& spec, const std::string& out_dir) {
  const InstanceFamily fam = gen_family(spec);
  save_family(fam, out_dir);
  std::cout << "wrote " << fam.instances.size() << " instance(s) under " << out_dir << "\n";
  return kOk;
}

int cmd_compare(const CommonOpts& o, const std::string& family_dir, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base(out_dir);
  int rc = kOk;

  auto run_one = [&](const Instance& inst) {
    return compare_modes(inst.topology, inst.demands, o.rates, o.build, o.solver);
  };

  std::string text, csv;
  if (!family_dir.empty()) {
    std::vector<CompareTable> tables;
    for (int i = 0;; ++i) {
      const std::filesystem::path p =
          std::filesystem::path(family_dir) / ("instance_" + std::to_string(i) + ".json");
      if (!std::filesystem::exists(p)) break;
      tables.push_back(run_one(load_instance(p.string())));
    }
    if (tables.empty()) throw IoError("no instance_<i>.json files under " + family_dir);
    const FamilyCompare fam = average_compares(tables);
    text = fam.to_text();
    csv = fam.to_csv();
    for (const CompareCell& c : fam.cells) {
      if (c.limit_hit) rc = kLimit;
    }
  } else {
    const Instance inst = load_common(o);
    const CompareTable table = run_one(inst);
    text = table.to_text();
    csv = table.to_csv();
    for (const CompareCell& c : table.cells) {
      if (c.limit_hit) rc = kLimit;
    }
  }

  write_file(base / "compare.txt", text);
  write_file(base / "compare.csv", csv);
  write_file(base / "run_config.json", config_json(o).dump(2) + "\n");
  std::cout << text;
  std::cout << "artifacts: " << (base / "compare.txt").string() << ", "
            << (base / "compare.csv").string() << "\n";
  return rc;
}

int cmd_export(const CommonOpts& o, const std::string& out_file) {
  const Instance inst = load_common(o);
  const BuiltModel bm = build_model(inst.topology, inst.demands, o.rates, o.build);
  // LP-format comment header keeps the artifact self-describing.
  std::string text = "\\ qkdtopo model export\n\\ config: " + config_json(o).dump() + "\n";
  text += export_lp(bm.model);
  write_file(out_file, text);
  std::cout << "wrote " << out_file << " (" << bm.model.var_count() << " vars, "
            << bm.model.row_count() << " rows)\n";
  return kOk;
}

int cmd_verify(const CommonOpts& o, const std::string& solution_file) {
  const Instance inst = load_common(o);
  const BuiltModel bm = build_model(inst.topology, inst.demands, o.rates, o.build);
  const auto assignment = load_solution_file(solution_file);
  const VerifyReport rep = verify(bm.model, assignment);
  std::cout << rep.to_string();
  return rep.ok() ? kOk : kViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology optimization for hybrid QKD networks"};
  app.require_subcommand(1);

  CommonOpts opt;
  std::string out_dir = "out";
  std::string out_file;
  std::string family_dir;
  std::string solution_file;
  bool emit_lp = false;
  GenSpec gspec;

  CLI::App* optimize = app.add_subcommand("optimize", "solve one instance and write a deployment");
  add_instance_flags(optimize, opt);
  add_build_flags(optimize, opt);
  add_rate_flags(optimize, opt);
  add_solver_flags(optimize, opt);
  optimize->add_option("--out", out_dir, "artifact directory")->capture_default_str();
  optimize->add_flag("--emit-lp", emit_lp, "also write model.lp next to the deployment");

  CLI::App* generate = app.add_subcommand("generate", "generate a random instance family");
  generate->add_option("--nodes", gspec.n_nodes, "nodes per instance")->capture_default_str();
  generate->add_option("--instances", gspec.instances, "instances in the family")
      ->capture_default_str();
  generate->add_option("--avg-degree", gspec.avg_degree, "average nodal degree")
      ->capture_default_str();
  generate->add_option("--length-lo", gspec.length_lo_km, "min edge length (km)")
      ->capture_default_str();
  generate->add_option("--length-hi", gspec.length_hi_km, "max edge length (km)")
      ->capture_default_str();
  generate->add_option("--demand-lo", gspec.demand_lo_kbps, "min demand (kbps)")
      ->capture_default_str();
  generate->add_option("--demand-hi", gspec.demand_hi_kbps, "max demand (kbps)")
      ->capture_default_str();
  generate->add_option("--user-fraction", gspec.user_fraction, "fraction of nodes with demands")
      ->capture_default_str();
  generate->add_option("--seed", gspec.seed, "family seed")
      ->envname("QKDTOPO_SEED")
      ->capture_default_str();
  generate->add_option("--out", out_dir, "family directory")->capture_default_str();

  CLI::App* compare = app.add_subcommand("compare", "six-way mode comparison");
  add_instance_flags(compare, opt);
  compare->get_option("--topology")->required(false);
  compare->add_option("--family", family_dir, "family directory (averages over instances)");
  add_build_flags(compare, opt);
  add_rate_flags(compare, opt);
  add_solver_flags(compare, opt);
  compare->add_option("--out", out_dir, "artifact directory")->capture_default_str();

  CLI::App* exportc = app.add_subcommand("export", "write the model in LP format");
  add_instance_flags(exportc, opt);
  add_build_flags(exportc, opt);
  add_rate_flags(exportc, opt);
  exportc->add_option("--out", out_file, "LP output path")->required();

  CLI::App* verifyc = app.add_subcommand("verify", "check a solution file against the model");
  add_instance_flags(verifyc, opt);
  add_build_flags(verifyc, opt);
  add_rate_flags(verifyc, opt);
  verifyc->add_option("--solution", solution_file, "name = value solution file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    opt.build.validate();
    opt.solver.validate();
    if (optimize->parsed()) return cmd_optimize(opt, out_dir, emit_lp);
    if (generate->parsed()) return cmd_generate(gspec, out_dir);
    if (compare->parsed()) {
      if (family_dir.empty() && opt.topology.empty()) {
        std::cerr << "compare needs --topology or --family\n";
        return kUsage;
      }
      return cmd_compare(opt, family_dir, out_dir);
    }
    if (exportc->parsed()) return cmd_export(opt, out_file);
    if (verifyc->parsed()) return cmd_verify(opt, solution_file);
    return kUsage;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
