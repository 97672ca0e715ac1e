"""End-to-end sanity of the python bindings against known small cases."""

import math

import pytest

qkdtopo = pytest.importorskip("qkdtopo")


def exact_config():
    sc = qkdtopo.SolverConfig()
    sc.mip_gap = 0.0
    sc.time_limit_s = 120.0
    return sc


def two_node_instance():
    topo = qkdtopo.Topology()
    u = topo.add_node("u")
    v = topo.add_node("v")
    topo.add_edge(u, v, 150.0)
    dm = qkdtopo.DemandMatrix()
    dm.add(u, v, 1.0)
    return topo, dm


def test_version_and_nsfnet_shape():
    assert qkdtopo.__version__ == "0.1.0"
    inst = qkdtopo.nsfnet_instance()
    assert inst.topology.node_count() == 14
    assert inst.topology.edge_count() == 21
    assert inst.topology.is_connected()
    assert inst.demands.pair_count() == 6
    assert inst.demands.beta == 1.0


def test_rate_model_known_values():
    p = qkdtopo.RateParams()
    assert qkdtopo.c2c_rate(p, 50.0) == pytest.approx(100.0)
    assert qkdtopo.c2c_rate(p, 200.0001) == 0.0
    assert qkdtopo.csc_rate(p, 80.0, 80.0) == pytest.approx(qkdtopo.c2c_rate(p, 80.0))
    assert qkdtopo.csc_rate(p, 100.0, 50.0) == pytest.approx(1000.0 * 10.0**-1.75)
    with pytest.raises(qkdtopo.ValidationError):
        qkdtopo.c2c_rate(p, 0.0)


def test_build_solve_verify_evaluate_round_trip():
    topo, dm = two_node_instance()
    cfg = qkdtopo.BuildConfig()
    cfg.budget = 202.0  # 2 device pairs + 2 trusted nodes at q2 = 100
    built = qkdtopo.build_model(topo, dm, qkdtopo.RateParams(), cfg)
    assert built.model.has_integers()

    sc = exact_config()
    sc.warm_start = qkdtopo.trivial_start(built)
    result = qkdtopo.solve_milp(built.model, sc)
    assert result.status == qkdtopo.SolveStatus.OPTIMAL
    assert result.objective == pytest.approx(2.0, abs=1e-6)
    assert qkdtopo.verify(built.model, result.assignment).ok()

    dep = qkdtopo.extract_deployment(built, result.assignment)
    assert dep.s == [2]
    assert dep.trust == [1, 1]
    assert dep.cost() == pytest.approx(202.0)
    assert qkdtopo.compute_gsod(built, dep) == pytest.approx(result.objective, abs=1e-9)

    text = qkdtopo.format_solve_result(built.model, result)
    parsed = qkdtopo.parse_solution_text(text, "round-trip")
    assert qkdtopo.verify(built.model, parsed).ok()


def test_lp_relaxation_and_export():
    topo, dm = two_node_instance()
    cfg = qkdtopo.BuildConfig()
    cfg.budget = 201.0
    built = qkdtopo.build_model(topo, dm, qkdtopo.RateParams(), cfg)
    relax = qkdtopo.solve_lp(built.model, exact_config())
    assert relax.status == qkdtopo.SolveStatus.OPTIMAL
    # Relaxed trust can shrink to I/M per node (M = 1 + 2*201 = 403), so the
    # budget row reads S*(1 + 200/403) <= 201 and B = S = 403/3 at rate 1.
    assert relax.objective == pytest.approx(403.0 / 3.0, abs=1e-6)

    lp = qkdtopo.export_lp(built.model)
    assert lp.startswith("Maximize")
    for token in ("Subject To", "Bounds", "Generals", "Binaries", "End"):
        assert token in lp
    assert lp == qkdtopo.export_lp(built.model)  # deterministic


def test_generator_is_deterministic():
    spec = qkdtopo.GenSpec()
    spec.n_nodes = 8
    spec.instances = 3
    spec.seed = 11
    fam1 = qkdtopo.gen_family(spec)
    fam2 = qkdtopo.gen_family(spec)
    assert len(fam1.instances) == 3
    texts1 = [qkdtopo.serialize_instance(i) for i in fam1.instances]
    texts2 = [qkdtopo.serialize_instance(i) for i in fam2.instances]
    assert texts1 == texts2
    assert qkdtopo.family_manifest(fam1) == qkdtopo.family_manifest(fam2)
    for inst in fam1.instances:
        assert inst.topology.is_connected()
        again = qkdtopo.parse_instance_json(qkdtopo.serialize_instance(inst), "mem")
        assert qkdtopo.serialize_instance(again) == qkdtopo.serialize_instance(inst)


def test_exceptions_are_typed():
    spec = qkdtopo.GenSpec()
    spec.n_nodes = 1
    with pytest.raises(qkdtopo.ValidationError):
        spec.validate()
    with pytest.raises(qkdtopo.ParseError):
        qkdtopo.parse_instance_json("not json", "mem")
    topo = qkdtopo.Topology()
    topo.add_node("a")
    with pytest.raises(qkdtopo.ValidationError):
        topo.add_node("a b")
    with pytest.raises(qkdtopo.Error):
        qkdtopo.load_instance("/nonexistent/instance.json")


def test_compare_modes_table():
    topo = qkdtopo.Topology()
    a = topo.add_node("a")
    b = topo.add_node("b")
    c = topo.add_node("c")
    topo.add_edge(a, b, 50.0)
    topo.add_edge(b, c, 50.0)
    dm = qkdtopo.DemandMatrix()
    dm.add(a, c, 10.0)
    base = qkdtopo.BuildConfig()
    base.budget = 500.0
    table = qkdtopo.compare_modes(topo, dm, qkdtopo.RateParams(), base, exact_config())
    hs = table.cell(qkdtopo.Mode.HYBRID, True)
    assert hs.has_value and hs.standardized == pytest.approx(100.0)
    assert math.isfinite(hs.mgsod) and hs.mgsod > 0.0
    assert "mode,selection,status," in table.to_csv()
