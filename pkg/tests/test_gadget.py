"""Interface copies, gadget glueing, certificates, and the gate compiler."""

from itertools import product

import pytest

from artifact.core import make_network, step, trace
from artifact.csan import build_lifelike, csan_in_family, csan_to_network, family_spec
from artifact.gadget import (
    CoherentCertificate,
    InvalidGadgetError,
    certificate_from_json,
    certificate_to_json,
    compile_gnetwork,
    compile_gnetwork_detailed,
    context_nodes,
    csan_closure_failures,
    disjoint_union,
    exempt_nodes,
    gadget_copy,
    gadget_from_json,
    gadget_glue,
    gadget_to_json,
    interface_nodes,
    load_certificate,
    load_gadget,
    make_certificate,
    make_gadget,
    make_interface,
    save_certificate,
    save_gadget,
    verify_certificate,
)
from artifact.glue import make_pseudo_orbit
from artifact.gnet import (
    ID_1_1,
    NOR_2_2,
    GNetwork,
    GNetworkBuilder,
    InvalidGNetworkError,
    gnetwork_to_network,
)
from artifact.simulate import embed, verify_simulation

IFACE = make_interface(["ci"], ["co"])
STATES = ({"ci": 0, "co": 0}, {"ci": 0, "co": 1})


def toy_traces():
    # one step moves the carried value from one boundary pair to the next
    return {
        (q, qp): ({"ci": 0, "co": q}, {"ci": 0, "co": qp})
        for q in (0, 1)
        for qp in (0, 1)
    }


def identity_gadget(extra_nodes=0):
    rules = [((), (0,)), ((), (0,)), ((), (0,)), ((1,), (0, 1))]
    rules += [((), (0,))] * extra_nodes
    net = make_network(2, rules)
    return make_gadget(IFACE, net, [{"ci": 0, "co": 1}], [{"ci": 2, "co": 3}])


def neg_gadget():
    net = make_network(2, [((), (0,)), ((), (0,)), ((), (0,)), ((1,), (1, 0))])
    return make_gadget(IFACE, net, [{"ci": 0, "co": 1}], [{"ci": 2, "co": 3}])


def nor_gadget():
    rules = [((), (0,)) for _ in range(8)]
    rules[5] = ((1, 3), (1, 0, 0, 0))
    rules[7] = ((1, 3), (1, 0, 0, 0))
    net = make_network(2, rules)
    return make_gadget(
        IFACE,
        net,
        [{"ci": 0, "co": 1}, {"ci": 2, "co": 3}],
        [{"ci": 4, "co": 5}, {"ci": 6, "co": 7}],
    )


def drive_orbit(gd, gate, q_i, q_ip, q_o, context=None):
    """Record the exempted run for one state triple by stepping the net
    and overwriting the externally driven boundary nodes from the traces."""
    traces = toy_traces()
    q_op = gate.apply(q_i)
    x0 = [0] * gd.net.n
    for v, s in (context or {}).items():
        x0[v] = s
    for k, copy in enumerate(gd.in_copies):
        for c, v in copy.items():
            x0[v] = traces[(q_i[k], q_ip[k])][0][c]
    for k, copy in enumerate(gd.out_copies):
        for c, v in copy.items():
            x0[v] = traces[(q_o[k], q_op[k])][0][c]
    configs = [tuple(x0)]
    x = tuple(x0)
    for t in range(1, 2):
        y = list(step(gd.net, x))
        for k, copy in enumerate(gd.in_copies):
            for c in gd.interface.outputs:
                y[copy[c]] = traces[(q_i[k], q_ip[k])][t][c]
        for k, copy in enumerate(gd.out_copies):
            for c in gd.interface.inputs:
                y[copy[c]] = traces[(q_o[k], q_op[k])][t][c]
        x = tuple(y)
        configs.append(x)
    return make_pseudo_orbit(configs, exempt_nodes(gd))


def toy_certificate(gate_map, contexts=None):
    contexts = contexts or {}
    orbits = {}
    for gate, gd in gate_map.items():
        table = {}
        for q_i in product(range(2), repeat=gate.n_in):
            for q_ip in product(range(2), repeat=gate.n_in):
                for q_o in product(range(2), repeat=gate.n_out):
                    table[(q_i, q_ip, q_o)] = drive_orbit(
                        gd, gate, q_i, q_ip, q_o, contexts.get(gate)
                    )
        orbits[gate] = table
    return make_certificate(
        IFACE, gate_map, STATES, contexts, 1, toy_traces(), orbits
    )


def two_gate_loop():
    b = GNetworkBuilder(2)
    j0, (n0,) = b.new_gate(ID_1_1)
    j1, (n1,) = b.new_gate(ID_1_1)
    b.connect(j0, [n1])
    b.connect(j1, [n0])
    return b.build()


# ---------------------------------------------------------------------------
# Interfaces and gadgets


def test_interface_validation():
    assert IFACE.names == ("ci", "co")
    with pytest.raises(InvalidGadgetError):
        make_interface([], [])
    with pytest.raises(InvalidGadgetError):
        make_interface(["a"], ["a"])
    with pytest.raises(InvalidGadgetError):
        make_interface([1], ["a"])


def test_gadget_validation_errors():
    net = make_network(2, [((), (0,))] * 4)
    with pytest.raises(InvalidGadgetError):
        make_gadget(IFACE, net, [{"ci": 0}], [{"ci": 2, "co": 3}])
    with pytest.raises(InvalidGadgetError):
        make_gadget(IFACE, net, [{"ci": 0, "co": 0}], [{"ci": 2, "co": 3}])
    with pytest.raises(InvalidGadgetError):
        make_gadget(IFACE, net, [{"ci": 0, "co": 9}], [{"ci": 2, "co": 3}])
    with pytest.raises(InvalidGadgetError):
        make_gadget(IFACE, net, [{"ci": 0, "co": 1}], [{"ci": 1, "co": 3}])
    mirror = build_lifelike(4, [(0, 1), (2, 3)], birth=(1,), survive=(0, 1))
    with pytest.raises(InvalidGadgetError):
        make_gadget(IFACE, net, [{"ci": 0, "co": 1}], [{"ci": 2, "co": 3}], csan=mirror)


def test_gadget_copy_is_independent():
    g = identity_gadget()
    c = gadget_copy(g)
    assert c.net == g.net and c.in_copies == g.in_copies
    c.in_copies[0]["ci"] = 3
    assert g.in_copies[0]["ci"] == 0


def test_boundary_node_helpers():
    g = identity_gadget()
    assert interface_nodes(g) == {0, 1, 2, 3}
    assert context_nodes(g) == ()
    assert exempt_nodes(g) == {1, 2}
    assert context_nodes(identity_gadget(extra_nodes=1)) == (4,)
    nor = nor_gadget()
    assert exempt_nodes(nor) == {1, 3, 4, 6}


def test_disjoint_union_adds():
    u = disjoint_union(identity_gadget(), neg_gadget())
    assert u.net.n == 8
    assert len(u.in_copies) == 2 and len(u.out_copies) == 2
    assert u.in_copies[0] == {"ci": 0, "co": 1}
    assert u.in_copies[1] == {"ci": 4, "co": 5}
    for x in product(range(2), repeat=8):
        left = step(identity_gadget().net, x[:4])
        right = step(neg_gadget().net, x[4:])
        assert step(u.net, x) == left + right


def test_single_junction_pair_glue_shape():
    # one-state toy gadgets: only the wiring shape matters
    def stub(n, ins, outs):
        net = make_network(1, [((), (0,))] * n)
        return make_gadget(IFACE, net, ins, outs)

    f = stub(6, [{"ci": 0, "co": 1}], [{"ci": 2, "co": 3}, {"ci": 4, "co": 5}])
    g = stub(6, [{"ci": 0, "co": 1}, {"ci": 4, "co": 5}], [{"ci": 2, "co": 3}])
    h = gadget_glue(f, g, in_pairs=[(0, 0)], out_pairs=[(1, 1)])
    assert h.net.n == 8
    assert h.in_copies == ({"ci": 6, "co": 7},)
    assert h.out_copies == ({"ci": 4, "co": 5},)


def test_glue_rejects_mismatches():
    g = identity_gadget()
    other = make_gadget(
        make_interface(["x"], ["y"]),
        make_network(2, [((), (0,))] * 2),
        [{"x": 0, "y": 1}],
        [],
    )
    with pytest.raises(InvalidGadgetError):
        gadget_glue(g, other, in_pairs=[(0, 0)])
    ternary = make_gadget(
        IFACE,
        make_network(3, [((), (0,))] * 4),
        [{"ci": 0, "co": 1}],
        [{"ci": 2, "co": 3}],
    )
    with pytest.raises(InvalidGadgetError):
        gadget_glue(g, ternary, in_pairs=[(0, 0)])
    nor = nor_gadget()
    with pytest.raises(InvalidGadgetError):
        gadget_glue(nor, nor_gadget(), in_pairs=[(0, 0), (1, 0)])
    with pytest.raises(InvalidGadgetError):
        gadget_glue(g, identity_gadget(), in_pairs=[(0, 7)])


def test_copy_then_self_glue_closes():
    g = identity_gadget()
    closed = gadget_glue(g, gadget_copy(g), in_pairs=[(0, 0)], out_pairs=[(0, 0)])
    assert closed.net.n == 4
    assert closed.in_copies == () and closed.out_copies == ()


# ---------------------------------------------------------------------------
# Certificates


def test_toy_certificate_passes():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    report = verify_certificate(cert)
    assert report.ok, report.message()
    assert report.checked == 8
    assert "ok" in report.message()


def test_nor_certificate_passes():
    cert = toy_certificate({NOR_2_2: nor_gadget()})
    report = verify_certificate(cert)
    assert report.ok, report.message()
    assert report.checked == 64


def test_certificate_missing_cell_fails():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    del cert.pseudo_orbits[ID_1_1][((0,), (0,), (0,))]
    report = verify_certificate(cert)
    assert not report.ok
    assert any("missing pseudo-orbit" in f for f in report.failures)
    assert "rejected" in report.message()


def test_certificate_catches_strayed_copy_trace():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    po = cert.pseudo_orbits[ID_1_1][((0,), (1,), (0,))]
    bad = list(list(c) for c in po.configs)
    bad[1][1] = 0  # input copy must show the 0 -> 1 trace
    cert.pseudo_orbits[ID_1_1][((0,), (1,), (0,))] = make_pseudo_orbit(bad, po.exempt)
    report = verify_certificate(cert)
    assert not report.ok
    assert any("strays from the standard trace" in f for f in report.failures)


def test_certificate_catches_broken_run():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    po = cert.pseudo_orbits[ID_1_1][((1,), (1,), (0,))]
    bad = list(list(c) for c in po.configs)
    bad[1][3] = 0  # node 3 is not exempt and must copy its input
    cert.pseudo_orbits[ID_1_1][((1,), (1,), (0,))] = make_pseudo_orbit(bad, po.exempt)
    report = verify_certificate(cert)
    assert not report.ok
    assert any("not a valid exempted run" in f for f in report.failures)


def test_certificate_catches_wrong_exempt_set():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    po = cert.pseudo_orbits[ID_1_1][((0,), (0,), (0,))]
    cert.pseudo_orbits[ID_1_1][((0,), (0,), (0,))] = make_pseudo_orbit(
        po.configs, exempt=(1,)
    )
    report = verify_certificate(cert)
    assert not report.ok
    assert any("exempt set differs" in f for f in report.failures)


def test_certificate_checks_context():
    gd = identity_gadget(extra_nodes=1)
    cert = toy_certificate({ID_1_1: gd}, contexts={ID_1_1: {4: 1}})
    report = verify_certificate(cert)
    assert not report.ok
    assert any("context nodes differ" in f for f in report.failures)
    cert_ok = toy_certificate({ID_1_1: gd}, contexts={ID_1_1: {4: 0}})
    assert verify_certificate(cert_ok).ok
    cert_bad_keys = toy_certificate({ID_1_1: gd}, contexts={ID_1_1: {4: 0}})
    cert_bad_keys.context_configs[ID_1_1] = {3: 0, 4: 0}
    report = verify_certificate(cert_bad_keys)
    assert not report.ok
    assert any("context must assign exactly" in f for f in report.failures)


def test_certificate_requires_injective_states():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    flat = ({"ci": 0, "co": 0}, {"ci": 0, "co": 0})
    cert.state_configs = flat
    report = verify_certificate(cert)
    assert not report.ok
    assert any("not injective" in f for f in report.failures)


def test_certificate_structural_failures():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    del cert.standard_traces[(0, 1)]
    report = verify_certificate(cert)
    assert not report.ok
    assert any("standard trace (0,1) missing" in f for f in report.failures)

    cert = toy_certificate({ID_1_1: identity_gadget()})
    cert.standard_traces[(1, 1)] = ({"ci": 0, "co": 1},)
    report = verify_certificate(cert)
    assert any("wrong length" in f for f in report.failures)

    cert = toy_certificate({ID_1_1: identity_gadget()})
    cert.gadgets[NOR_2_2] = identity_gadget()
    cert.context_configs[NOR_2_2] = {}
    report = verify_certificate(cert)
    assert any("copies for a 2->2 gate" in f for f in report.failures)


def test_certificate_trace_endpoints_checked():
    cert = toy_certificate({ID_1_1: identity_gadget()})
    cert.standard_traces[(1, 0)] = ({"ci": 0, "co": 0}, {"ci": 0, "co": 0})
    report = verify_certificate(cert)
    assert not report.ok
    assert any("does not start at pattern 1" in f for f in report.failures)


# ---------------------------------------------------------------------------
# Compiling gate networks


def test_compile_identity_loop_swaps():
    gn = two_gate_loop()
    cert = toy_certificate({ID_1_1: identity_gadget()})
    host, emb = compile_gnetwork(gn, cert)
    assert host.n == 4 and emb.time == 1
    source = gnetwork_to_network(gn)
    report = verify_simulation(source, host, emb, mode="exhaustive")
    assert report.ok, report.message()
    for x in product(range(2), repeat=2):
        lhs = embed(emb, host.n, step(source, x))
        rhs = step(host, embed(emb, host.n, x))
        assert lhs == rhs


def test_compile_three_gate_rotation():
    b = GNetworkBuilder(2)
    j0, (n0,) = b.new_gate(ID_1_1)
    j1, (n1,) = b.new_gate(ID_1_1)
    j2, (n2,) = b.new_gate(ID_1_1)
    b.connect(j0, [n2])
    b.connect(j1, [n0])
    b.connect(j2, [n1])
    gn = b.build()
    cert = toy_certificate({ID_1_1: identity_gadget()})
    host, emb = compile_gnetwork(gn, cert)
    assert host.n == 6
    report = verify_simulation(gnetwork_to_network(gn), host, emb, mode="exhaustive")
    assert report.ok, report.message()


def test_compile_with_disjoint_union_step():
    # two independent swap loops; gate 2 touches no earlier gate
    b = GNetworkBuilder(2)
    outs = [b.new_gate(ID_1_1)[1][0] for _ in range(4)]
    b.connect(0, [outs[1]])
    b.connect(1, [outs[0]])
    b.connect(2, [outs[3]])
    b.connect(3, [outs[2]])
    gn = b.build()
    cert = toy_certificate({ID_1_1: identity_gadget()})
    host, emb = compile_gnetwork(gn, cert)
    assert host.n == 8
    report = verify_simulation(gnetwork_to_network(gn), host, emb, mode="exhaustive")
    assert report.ok, report.message()


def test_compile_nor_latch_and_stitching():
    b = GNetworkBuilder(2)
    j0, o0 = b.new_gate(NOR_2_2)
    j1, o1 = b.new_gate(NOR_2_2)
    b.connect(j0, o1)
    b.connect(j1, o0)
    gn = b.build()
    cert = toy_certificate({NOR_2_2: nor_gadget()})
    compiled = compile_gnetwork_detailed(gn, cert)
    host, emb = compiled.network, compiled.embedding
    source = gnetwork_to_network(gn)
    report = verify_simulation(source, host, emb, mode="exhaustive")
    assert report.ok, report.message()
    assert len(compiled.dowels) == 4
    assert all(set(d.keys()) == {"ci", "co"} for d in compiled.dowels)
    # every host step restricted to one gadget copy replays its recorded run
    for x in product(range(2), repeat=4):
        run = trace(host, embed(emb, host.n, x), cert.time)
        fx = step(source, x)
        for j, gate in enumerate(gn.gates):
            q_i = tuple(x[v] for v in gn.inputs[j])
            q_ip = tuple(fx[v] for v in gn.inputs[j])
            q_o = tuple(x[v] for v in gn.outputs[j])
            po = cert.pseudo_orbits[gate][(q_i, q_ip, q_o)]
            placed = compiled.node_maps[j]
            for t in range(cert.time + 1):
                for orig, h in placed.items():
                    assert run[t][h] == po.configs[t][orig]


def test_compile_empty_gate_network():
    gn = GNetwork(2, (), (), ())
    cert = toy_certificate({ID_1_1: identity_gadget()})
    host, emb = compile_gnetwork(gn, cert)
    assert host.n == 0
    assert emb.blocks == ()


def test_compile_folds_context_nodes():
    gn = two_gate_loop()
    gd = identity_gadget(extra_nodes=1)
    cert = toy_certificate({ID_1_1: gd}, contexts={ID_1_1: {4: 0}})
    compiled = compile_gnetwork_detailed(gn, cert)
    assert compiled.network.n == 6
    assert len(compiled.contexts) == 2
    ctx_nodes = sorted(h for m in compiled.contexts for h in m)
    assert len(ctx_nodes) == 2
    assert set(compiled.embedding.blocks[0]) >= set(ctx_nodes)
    report = verify_simulation(
        gnetwork_to_network(gn), compiled.network, compiled.embedding, mode="exhaustive"
    )
    assert report.ok, report.message()


def test_compile_error_reporting():
    gn = two_gate_loop()
    cert = toy_certificate({NOR_2_2: nor_gadget()})
    with pytest.raises(InvalidGadgetError, match="no gadget recorded"):
        compile_gnetwork(gn, cert)
    broken = toy_certificate({ID_1_1: identity_gadget()})
    del broken.pseudo_orbits[ID_1_1][((0,), (0,), (0,))]
    with pytest.raises(InvalidGadgetError, match="rejected"):
        compile_gnetwork(gn, broken)
    looped = GNetwork(2, (ID_1_1,), ((0,),), ((0,),))
    with pytest.raises(InvalidGNetworkError):
        compile_gnetwork(looped, toy_certificate({ID_1_1: identity_gadget()}))


# ---------------------------------------------------------------------------
# Labeled gadgets


def lifelike_gadget(edges):
    mirror = build_lifelike(4, edges, birth=(1,), survive=(0, 1))
    net = csan_to_network(mirror)
    return make_gadget(
        IFACE, net, [{"ci": 0, "co": 1}], [{"ci": 2, "co": 3}], csan=mirror
    )


def test_labeled_glue_keeps_family():
    a = lifelike_gadget([(0, 1), (2, 3)])
    b = lifelike_gadget([(0, 1), (2, 3)])
    h = gadget_glue(a, b, in_pairs=[(0, 0)])
    assert h.csan is not None
    assert h.net.n == 6
    assert csan_in_family(h.csan, family_spec("lifelike"))
    assert h.in_copies == ({"ci": 4, "co": 5},)
    assert h.out_copies == ({"ci": 2, "co": 3},)
    plain_a = make_gadget(IFACE, a.net, a.in_copies, a.out_copies)
    plain_b = make_gadget(IFACE, b.net, b.in_copies, b.out_copies)
    plain = gadget_glue(plain_a, plain_b, in_pairs=[(0, 0)])
    for x in product(range(2), repeat=6):
        assert step(h.net, x) == step(plain.net, x)


def test_labeled_closure_conditions():
    good = lifelike_gadget([(0, 1), (2, 3)])
    assert csan_closure_failures(IFACE, [("g", good)]) == ()
    plain = make_gadget(IFACE, good.net, good.in_copies, good.out_copies)
    fails = csan_closure_failures(IFACE, [("g", plain)])
    assert any("no labeled structure" in f for f in fails)
    leaky = lifelike_gadget([(0, 1), (2, 3), (1, 2)])
    fails = csan_closure_failures(IFACE, [("g", leaky)])
    assert any("receiving nodes have neighbors outside" in f for f in fails)
    assert any("continuation nodes have neighbors outside" in f for f in fails)
    lopsided = lifelike_gadget([(0, 1)])
    fails = csan_closure_failures(IFACE, [("g", lopsided)])
    assert any("induced labeled subgraph differs" in f for f in fails)


def test_labeled_glue_condition_violation_raises():
    leaky = lifelike_gadget([(0, 1), (2, 3), (1, 2)])
    with pytest.raises(Exception):
        gadget_glue(leaky, lifelike_gadget([(0, 1), (2, 3), (1, 2)]), in_pairs=[(0, 0)])


# ---------------------------------------------------------------------------
# Serialization


def test_gadget_json_roundtrip(tmp_path):
    for g in (identity_gadget(), lifelike_gadget([(0, 1), (2, 3)])):
        doc = gadget_to_json(g)
        back = gadget_from_json(doc)
        assert back.net == g.net
        assert back.in_copies == g.in_copies and back.out_copies == g.out_copies
        assert (back.csan is None) == (g.csan is None)
        path = tmp_path / "gadget.json"
        save_gadget(g, str(path), pretty=True)
        assert load_gadget(str(path)).net == g.net
    with pytest.raises(InvalidGadgetError):
        gadget_from_json({"format": "nope"})


def test_certificate_json_roundtrip(tmp_path):
    cert = toy_certificate({ID_1_1: identity_gadget(), NOR_2_2: nor_gadget()})
    doc = certificate_to_json(cert)
    back = certificate_from_json(doc)
    assert back.time == cert.time
    assert back.state_configs == cert.state_configs
    assert set(back.gadgets) == {ID_1_1, NOR_2_2}
    assert back.pseudo_orbits[NOR_2_2] == cert.pseudo_orbits[NOR_2_2]
    assert verify_certificate(back).ok
    path = tmp_path / "cert.json"
    save_certificate(cert, str(path), pretty=True)
    assert verify_certificate(load_certificate(str(path))).ok
    with pytest.raises(InvalidGadgetError):
        certificate_from_json({"format": "certificate"})
