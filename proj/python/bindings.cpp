#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qkdtopo/build.hpp"
#include "qkdtopo/evaluate.hpp"
#include "qkdtopo/gen.hpp"
#include "qkdtopo/milp.hpp"
#include "qkdtopo/model.hpp"
#include "qkdtopo/rates.hpp"
#include "qkdtopo/topology.hpp"

namespace py = pybind11;
using namespace qkdtopo;

PYBIND11_MODULE(_qkdtopo, m) {
  m.doc() = "Topology optimization for hybrid QKD networks (C++ core)";
  m.attr("__version__") = "0.1.0";

  auto err = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", err);
  py::register_exception<ValidationError>(m, "ValidationError", err);
  py::register_exception<IoError>(m, "IoError", err);
  py::register_exception<NumericalError>(m, "NumericalError", err);

  py::enum_<Mode>(m, "Mode")
      .value("HYBRID", Mode::Hybrid)
      .value("PURE_C2C", Mode::PureC2c)
      .value("PURE_CSC", Mode::PureCsc);
  py::enum_<SolveStatus>(m, "SolveStatus")
      .value("OPTIMAL", SolveStatus::Optimal)
      .value("GAP_LIMIT", SolveStatus::GapLimit)
      .value("TIME_LIMIT", SolveStatus::TimeLimit)
      .value("SOLUTION_LIMIT", SolveStatus::SolutionLimit)
      .value("INFEASIBLE", SolveStatus::Infeasible)
      .value("UNBOUNDED", SolveStatus::Unbounded);
  py::enum_<VarDomain>(m, "VarDomain")
      .value("CONTINUOUS", VarDomain::Continuous)
      .value("INTEGER", VarDomain::Integer)
      .value("BINARY", VarDomain::Binary);
  py::enum_<Sense>(m, "Sense")
      .value("LE", Sense::LE)
      .value("EQ", Sense::EQ)
      .value("GE", Sense::GE);

  m.def("mode_name", &mode_name);
  m.def("parse_mode", &parse_mode);
  m.def("status_name", &status_name);

  py::class_<RateParams>(m, "RateParams")
      .def(py::init<>())
      .def_readwrite("r0_kbps", &RateParams::r0_kbps)
      .def_readwrite("r0_hat_kbps", &RateParams::r0_hat_kbps)
      .def_readwrite("alpha_db_per_km", &RateParams::alpha_db_per_km)
      .def_readwrite("asym_gamma", &RateParams::asym_gamma)
      .def_readwrite("l_max_km", &RateParams::l_max_km)
      .def_readwrite("l_max_total_km", &RateParams::l_max_total_km);
  m.def("c2c_rate", &c2c_rate, py::arg("params"), py::arg("length_km"));
  m.def("csc_rate", &csc_rate, py::arg("params"), py::arg("len1_km"), py::arg("len2_km"));

  py::class_<Edge>(m, "Edge")
      .def_readonly("u", &Edge::u)
      .def_readonly("v", &Edge::v)
      .def_readonly("length_km", &Edge::length_km);
  py::class_<CscEdge>(m, "CscEdge")
      .def_readonly("u", &CscEdge::u)
      .def_readonly("p", &CscEdge::p)
      .def_readonly("v", &CscEdge::v)
      .def_readonly("len_up_km", &CscEdge::len_up_km)
      .def_readonly("len_pv_km", &CscEdge::len_pv_km);
  py::class_<Demand>(m, "Demand")
      .def_readonly("s", &Demand::s)
      .def_readonly("t", &Demand::t)
      .def_readonly("demand_kbps", &Demand::demand_kbps);

  py::class_<Topology>(m, "Topology")
      .def(py::init<>())
      .def("add_node", &Topology::add_node)
      .def("add_edge", &Topology::add_edge, py::arg("u"), py::arg("v"), py::arg("length_km"))
      .def("node_index", &Topology::node_index)
      .def("require_node", &Topology::require_node)
      .def("node_count", &Topology::node_count)
      .def("edge_count", &Topology::edge_count)
      .def("node_id", &Topology::node_id)
      .def("nodes", &Topology::nodes)
      .def("edges", &Topology::edges)
      .def("has_edge", &Topology::has_edge)
      .def("edge_length", &Topology::edge_length)
      .def("neighbors", &Topology::neighbors)
      .def("is_connected", &Topology::is_connected)
      .def("enumerate_csc_edges", &Topology::enumerate_csc_edges)
      .def_static("valid_node_id", &Topology::valid_node_id);

  py::class_<DemandMatrix>(m, "DemandMatrix")
      .def(py::init<>())
      .def("add", &DemandMatrix::add, py::arg("s"), py::arg("t"), py::arg("demand_kbps"))
      .def("demands", &DemandMatrix::demands)
      .def("pair_count", &DemandMatrix::pair_count)
      .def("empty", &DemandMatrix::empty)
      .def_readwrite("beta", &DemandMatrix::beta);

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("topology", &Instance::topology)
      .def_readwrite("demands", &Instance::demands)
      .def_readwrite("seed", &Instance::seed);
  m.def("load_instance", &load_instance);
  m.def("parse_instance_json", &parse_instance_json, py::arg("text"), py::arg("origin"));
  m.def("serialize_instance", &serialize_instance);
  m.def("save_instance", &save_instance);
  m.def("parse_demand_csv", &parse_demand_csv, py::arg("text"), py::arg("topology"),
        py::arg("origin"));
  m.def("nsfnet_instance", &nsfnet_instance);

  py::class_<Var>(m, "Var")
      .def_readonly("name", &Var::name)
      .def_readonly("lb", &Var::lb)
      .def_readonly("ub", &Var::ub)
      .def_readonly("domain", &Var::domain)
      .def_readonly("obj", &Var::obj);
  py::class_<RowEntry>(m, "RowEntry")
      .def_readonly("col", &RowEntry::col)
      .def_readonly("coef", &RowEntry::coef);
  py::class_<Row>(m, "Row")
      .def_readonly("name", &Row::name)
      .def_readonly("sense", &Row::sense)
      .def_readonly("rhs", &Row::rhs)
      .def_readonly("terms", &Row::terms);
  py::class_<Model>(m, "Model")
      .def("var_count", &Model::var_count)
      .def("row_count", &Model::row_count)
      .def("var_index", &Model::var_index)
      .def("has_integers", &Model::has_integers)
      .def("maximize", &Model::maximize)
      .def("var", &Model::var, py::return_value_policy::copy)
      .def("row", &Model::row, py::return_value_policy::copy)
      .def("vars", &Model::vars)
      .def("rows", &Model::rows);

  py::class_<BuildConfig>(m, "BuildConfig")
      .def(py::init<>())
      .def_readwrite("budget", &BuildConfig::budget)
      .def_readwrite("q1", &BuildConfig::q1)
      .def_readwrite("q2", &BuildConfig::q2)
      .def_readwrite("mode", &BuildConfig::mode)
      .def_readwrite("relay_selection", &BuildConfig::relay_selection)
      .def_readwrite("big_m", &BuildConfig::big_m)
      .def_readwrite("tighten_trust", &BuildConfig::tighten_trust)
      .def("effective_big_m", &BuildConfig::effective_big_m)
      .def("validate", &BuildConfig::validate);

  py::class_<EdgeRates>(m, "EdgeRates")
      .def_readonly("c2c", &EdgeRates::c2c)
      .def_readonly("csc", &EdgeRates::csc);
  py::class_<ModelMap>(m, "ModelMap")
      .def_readonly("b", &ModelMap::b)
      .def_readonly("s", &ModelMap::s)
      .def_readonly("shat", &ModelMap::shat)
      .def_readonly("t", &ModelMap::t)
      .def_readonly("tp", &ModelMap::tp)
      .def_readonly("tpp", &ModelMap::tpp)
      .def_readonly("flow", &ModelMap::flow)
      .def_readonly("flow_hat", &ModelMap::flow_hat);
  py::class_<BuiltModel>(m, "BuiltModel")
      .def_readonly("model", &BuiltModel::model)
      .def_readonly("map", &BuiltModel::map)
      .def_readonly("topo", &BuiltModel::topo)
      .def_readonly("demands", &BuiltModel::demands)
      .def_readonly("csc_edges", &BuiltModel::csc_edges)
      .def_readonly("rates", &BuiltModel::rates)
      .def_readonly("rate_params", &BuiltModel::rate_params)
      .def_readonly("config", &BuiltModel::config);
  m.def("build_model", &build_model, py::arg("topology"), py::arg("demands"), py::arg("rates"),
        py::arg("config"));
  m.def("trivial_start", &trivial_start);
  m.def("export_lp", &export_lp);
  m.def("export_lp_file", &export_lp_file);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("time_limit_s", &SolverConfig::time_limit_s)
      .def_readwrite("mip_gap", &SolverConfig::mip_gap)
      .def_readwrite("solution_limit", &SolverConfig::solution_limit)
      .def_readwrite("feas_tol", &SolverConfig::feas_tol)
      .def_readwrite("opt_tol", &SolverConfig::opt_tol)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("workers", &SolverConfig::workers)
      .def_readwrite("warm_start", &SolverConfig::warm_start)
      .def("validate", &SolverConfig::validate);
  py::class_<SolveStats>(m, "SolveStats")
      .def_readonly("nodes", &SolveStats::nodes)
      .def_readonly("simplex_iters", &SolveStats::simplex_iters)
      .def_readonly("wall_s", &SolveStats::wall_s);
  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("status", &SolveResult::status)
      .def_readonly("has_assignment", &SolveResult::has_assignment)
      .def_readonly("objective", &SolveResult::objective)
      .def_readonly("bound", &SolveResult::bound)
      .def_readonly("gap", &SolveResult::gap)
      .def_readonly("assignment", &SolveResult::assignment)
      .def_readonly("stats", &SolveResult::stats);
  m.def("solve_lp", &solve_lp, py::arg("model"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("solve_milp", &solve_milp, py::arg("model"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<Violation>(m, "Violation")
      .def_readonly("kind", &Violation::kind)
      .def_readonly("name", &Violation::name)
      .def_readonly("amount", &Violation::amount);
  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("violations", &VerifyReport::violations)
      .def("ok", &VerifyReport::ok)
      .def("__str__", &VerifyReport::to_string);
  m.def("verify", &verify, py::arg("model"), py::arg("assignment"), py::arg("feas_tol") = 1e-6);
  m.def("parse_solution_text", &parse_solution_text, py::arg("text"), py::arg("origin"));
  m.def("load_solution_file", &load_solution_file);
  m.def("format_solve_result", &format_solve_result);

  py::class_<Deployment>(m, "Deployment")
      .def_readonly("s", &Deployment::s)
      .def_readonly("shat", &Deployment::shat)
      .def_readonly("trust", &Deployment::trust)
      .def_readonly("flow", &Deployment::flow)
      .def_readonly("flow_hat", &Deployment::flow_hat)
      .def_readonly("objective_b", &Deployment::objective_b)
      .def_readonly("config", &Deployment::config)
      .def_readonly("seed", &Deployment::seed)
      .def_readonly("status", &Deployment::status)
      .def_readonly("stats", &Deployment::stats)
      .def("cost", &Deployment::cost);
  m.def("extract_deployment", &extract_deployment, py::arg("built"), py::arg("assignment"));
  m.def("delivered_rate", &delivered_rate, py::arg("built"), py::arg("deployment"),
        py::arg("pair"));
  m.def("compute_sod", &compute_sod, py::arg("built"), py::arg("deployment"), py::arg("pair"));
  m.def("compute_gsod", &compute_gsod, py::arg("built"), py::arg("deployment"));

  py::class_<CompareCell>(m, "CompareCell")
      .def_readonly("mode", &CompareCell::mode)
      .def_readonly("selection", &CompareCell::selection)
      .def_readonly("status", &CompareCell::status)
      .def_readonly("has_value", &CompareCell::has_value)
      .def_readonly("limit_hit", &CompareCell::limit_hit)
      .def_readonly("mgsod", &CompareCell::mgsod)
      .def_readonly("standardized", &CompareCell::standardized)
      .def_readonly("wall_s", &CompareCell::wall_s)
      .def_readonly("nodes", &CompareCell::nodes);
  py::class_<CompareTable>(m, "CompareTable")
      .def_readonly("cells", &CompareTable::cells)
      .def("cell", &CompareTable::cell, py::return_value_policy::copy)
      .def("to_text", &CompareTable::to_text)
      .def("to_csv", &CompareTable::to_csv);
  m.def("compare_modes", &compare_modes, py::arg("topology"), py::arg("demands"),
        py::arg("rates"), py::arg("base"), py::arg("solver"),
        py::call_guard<py::gil_scoped_release>());
  py::class_<FamilyCompare>(m, "FamilyCompare")
      .def_readonly("cells", &FamilyCompare::cells)
      .def_readonly("solved", &FamilyCompare::solved)
      .def_readonly("instances", &FamilyCompare::instances)
      .def("to_text", &FamilyCompare::to_text)
      .def("to_csv", &FamilyCompare::to_csv);
  m.def("average_compares", &average_compares);

  py::class_<GenSpec>(m, "GenSpec")
      .def(py::init<>())
      .def_readwrite("n_nodes", &GenSpec::n_nodes)
      .def_readwrite("instances", &GenSpec::instances)
      .def_readwrite("avg_degree", &GenSpec::avg_degree)
      .def_readwrite("length_lo_km", &GenSpec::length_lo_km)
      .def_readwrite("length_hi_km", &GenSpec::length_hi_km)
      .def_readwrite("demand_lo_kbps", &GenSpec::demand_lo_kbps)
      .def_readwrite("demand_hi_kbps", &GenSpec::demand_hi_kbps)
      .def_readwrite("user_fraction", &GenSpec::user_fraction)
      .def_readwrite("seed", &GenSpec::seed)
      .def("validate", &GenSpec::validate)
      .def("edge_target", &GenSpec::edge_target)
      .def("user_count", &GenSpec::user_count);
  py::class_<InstanceFamily>(m, "InstanceFamily")
      .def_readonly("spec", &InstanceFamily::spec)
      .def_readonly("instances", &InstanceFamily::instances);
  m.def("gen_family", &gen_family);
  m.def("gen_instance", &gen_instance, py::arg("spec"), py::arg("instance_seed"));
  m.def("family_manifest", &family_manifest);
  m.def("save_family", &save_family, py::arg("family"), py::arg("dir"));
}
