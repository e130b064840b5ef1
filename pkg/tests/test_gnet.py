"""Gate network construction, recovery, catalogs and compilers."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.core import analyze_orbit, index_config, iterate, step, trace
from artifact.gnet import (
    AND_2_1,
    COPY_1_2,
    FRZ_AND,
    FRZ_FORK,
    FRZ_HOLD,
    FRZ_HOT_AND,
    FRZ_ID,
    GATE_SETS,
    GNetworkBuilder,
    ID_1_1,
    InvalidGNetworkError,
    NOR_2_2,
    NotDecomposableError,
    associated_conjunctive,
    conj_to_gconj,
    conjunctive_from_graph,
    fanin_gadget,
    gate_sets,
    gnetwork_from_json,
    gnetwork_step,
    gnetwork_to_json,
    gnetwork_to_network,
    gt_and_tree,
    gt_test_module,
    gt_transient_network,
    network_to_gnetwork,
    prime_rotations,
)
from artifact.simulate import verify_simulation

from conftest import xor_ring


def nor_latch():
    b = GNetworkBuilder(2)
    g0, outs0 = b.new_gate(NOR_2_2)
    g1, outs1 = b.new_gate(NOR_2_2)
    b.connect(g0, list(outs1))
    b.connect(g1, list(outs0))
    return b.build()


def test_gate_tables():
    assert FRZ_AND.apply((1, 1)) == (1,)
    assert FRZ_AND.apply((0, 1)) == (0,)
    assert FRZ_AND.apply((2, 0)) == (2,)
    assert FRZ_HOT_AND.apply((1, 1)) == (2,)
    assert FRZ_HOT_AND.apply((1, 0)) == (0,)
    assert FRZ_HOT_AND.apply((0, 2)) == (2,)
    assert FRZ_HOLD.apply((1, 0)) == (1,)
    assert FRZ_HOLD.apply((0, 2)) == (2,)
    assert FRZ_FORK.apply((2,)) == (2, 2)
    assert NOR_2_2.apply((0, 0)) == (1, 1)
    assert NOR_2_2.apply((1, 0)) == (0, 0)
    # first argument varies fastest in the row order
    assert AND_2_1.table == ((0,), (0,), (0,), (1,))
    assert FRZ_HOLD.table[1 + 3 * 0] == (1,)
    assert FRZ_HOLD.table[0 + 3 * 2] == (2,)


def test_gate_sets_catalog():
    sets = gate_sets()
    assert {k: len(v) for k, v in sets.items()} == {
        "Gmon": 8, "Gmon2": 2, "Gnor": 1, "Gnand": 1,
        "Gconj": 2, "Gwire": 1, "Gt": 5,
    }
    assert all(g.alphabet == 2 for g in sets["Gmon"])
    assert all(g.alphabet == 3 for g in sets["Gt"])


def test_builder_rejects_unwired_ports():
    b = GNetworkBuilder(2)
    b.new_gate(NOR_2_2)
    with pytest.raises(InvalidGNetworkError):
        b.build()


def test_duplicate_consumption_rejected():
    # AND(x, x) with one node on both ports is not allowed
    b = GNetworkBuilder(2)
    g0, (s,) = b.new_gate(ID_1_1)
    g1, (m,) = b.new_gate(AND_2_1)
    b.connect(g1, [s, s])
    b.connect(g0, [m])
    with pytest.raises(InvalidGNetworkError):
        b.build()


def test_self_consumption_rejected():
    b = GNetworkBuilder(2)
    g0, (n0,) = b.new_gate(ID_1_1)
    b.connect(g0, [n0])
    with pytest.raises(InvalidGNetworkError):
        b.build()


def test_latch_dynamics_match_network():
    gn = nor_latch()
    net = gnetwork_to_network(gn)
    for idx in range(2**4):
        x = index_config(idx, 2, 4)
        assert gnetwork_step(gn, x) == step(net, x)
    # one side low, other high: a fixed point of the cross-coupled pair
    settled = iterate(net, (0, 0, 1, 1), 4)
    assert step(net, settled) == settled


def test_roundtrip_latch():
    gn = nor_latch()
    back = network_to_gnetwork(gnetwork_to_network(gn), [NOR_2_2])
    assert back == gn


def test_roundtrip_prime_rotations():
    gn, _ = prime_rotations(8)
    back = network_to_gnetwork(gnetwork_to_network(gn), list(GATE_SETS["Gwire"]))
    assert back == gn


def test_roundtrip_mixed_conjunctive_gnet():
    b = GNetworkBuilder(2)
    c, (a1, a2) = b.new_gate(COPY_1_2)
    g, (m,) = b.new_gate(AND_2_1)
    b.connect(g, [a1, a2])
    i, (r,) = b.new_gate(ID_1_1)
    b.connect(i, [m])
    b.connect(c, [r])
    gn = b.build()
    cat = [AND_2_1, COPY_1_2, ID_1_1]
    back = network_to_gnetwork(gnetwork_to_network(gn), cat)
    assert back == gn


def test_recovery_rejects_foreign_rules():
    with pytest.raises(NotDecomposableError):
        network_to_gnetwork(xor_ring(4), list(GATE_SETS["Gmon"]))


def test_prime_rotation_periods():
    gn, marked = prime_rotations(10)
    net = gnetwork_to_network(gn)
    res = analyze_orbit(net, marked)
    assert res.transient == 0
    assert res.period == 2 * 3 * 5 * 7
    gn3, marked3 = prime_rotations(3)
    assert analyze_orbit(gnetwork_to_network(gn3), marked3).period == 2


def brute_conj_step(n, edges, x):
    ins = [[] for _ in range(n)]
    for u, v in edges:
        ins[v].append(u)
    return tuple(int(all(x[u] for u in ins[v])) for v in range(n))


def test_conjunctive_from_graph():
    edges = [(0, 1), (1, 2), (2, 0), (0, 2)]
    net = conjunctive_from_graph(3, edges)
    for idx in range(8):
        x = index_config(idx, 2, 3)
        assert step(net, x) == brute_conj_step(3, edges, x)


def test_fanin_gadget_triple_and():
    net, inputs, out = fanin_gadget()
    assert net.n == 12
    for idx in range(2**12):
        x = index_config(idx, 2, 12)
        want = x[inputs[0]] & x[inputs[1]] & x[inputs[2]]
        assert iterate(net, x, 3)[out] == want


SMALL_GRAPHS = [
    (1, []),                                    # isolated constant node
    (1, [(0, 0)]),                              # pure self-loop
    (2, [(0, 1), (1, 0)]),                      # 2-cycle
    (3, [(0, 1), (1, 2)]),                      # path: source, relay, sink
    (4, [(3, 0), (3, 1), (0, 1), (1, 2)]),      # fanout from a constant
    (3, [(0, 1), (0, 2), (1, 2), (2, 0)]),      # dense mix
    (4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]),
]


@pytest.mark.parametrize("n,edges", SMALL_GRAPHS)
def test_conj_to_gconj_exhaustive(n, edges):
    net = conjunctive_from_graph(n, edges)
    gn, emb = conj_to_gconj(net)
    host = gnetwork_to_network(gn)
    report = verify_simulation(net, host, emb, mode="exhaustive")
    assert report.ok, report.message()


def test_conj_to_gconj_iterated():
    net = conjunctive_from_graph(4, [(3, 0), (3, 1), (0, 1), (1, 2)])
    gn, emb = conj_to_gconj(net)
    host = gnetwork_to_network(gn)
    from artifact.simulate import embed
    for idx in range(2**4):
        x = index_config(idx, 2, 4)
        y = embed(emb, host.n, x)
        assert iterate(host, y, 3 * emb.time) == embed(
            emb, host.n, iterate(net, x, 3)
        )


def test_conj_to_gconj_fanin_gadget_sampled():
    net, _, _ = fanin_gadget()
    gn, emb = conj_to_gconj(net)
    host = gnetwork_to_network(gn)
    report = verify_simulation(net, host, emb, mode="sample", samples=200, seed=7)
    assert report.ok, report.message()


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_conj_to_gconj_random_graphs(data):
    n = data.draw(st.integers(1, 4))
    all_edges = [(u, v) for u in range(n) for v in range(n)]
    edges = data.draw(st.lists(st.sampled_from(all_edges), unique=True, max_size=8))
    net = conjunctive_from_graph(n, edges)
    gn, emb = conj_to_gconj(net)
    report = verify_simulation(net, gnetwork_to_network(gn), emb, mode="exhaustive")
    assert report.ok, report.message()


def test_gt_test_module_quiescent_and_excited():
    net, names = gt_test_module()
    zero = (0,) * net.n
    assert iterate(net, zero, 10) == zero
    x = [0] * net.n
    x[names["x"]] = 1
    tr = trace(net, tuple(x), 30)
    hold, relay = names["hold"], names["relay"]
    for t in range(3, 30):
        assert tr[t][hold] == 2 or tr[t][relay] == 2
    for t in range(3, 29):
        assert tr[t][hold] == 2 or tr[t + 1][hold] == 2


def test_gt_and_tree():
    for k in range(1, 6):
        net, ins, out, delay = gt_and_tree(k)
        assert delay == (1 if k == 1 else 1 + math.ceil(math.log2(k)))
        for idx in range(2**k):
            bits = index_config(idx, 2, k)
            x = list(bits) + [0] * (net.n - k)
            got = iterate(net, tuple(x), delay)[out]
            assert got == int(all(bits))
        # a frozen input floods the tree
        x = [1] * k + [0] * (net.n - k)
        x[0] = 2
        assert iterate(net, tuple(x), delay)[out] == 2


def test_gt_transient_network_small():
    gn, marked = gt_transient_network(4)
    net = gnetwork_to_network(gn)
    res = analyze_orbit(net, marked)
    assert res.transient >= 6
    assert res.period == 6
    gn3, marked3 = gt_transient_network(3)
    res3 = analyze_orbit(gnetwork_to_network(gn3), marked3)
    assert res3.transient >= 2
    assert res3.period == 2


def small_gt_loop():
    b = GNetworkBuilder(3)
    fork1, (u1, u2) = b.new_gate(FRZ_FORK)
    and1, (m,) = b.new_gate(FRZ_AND)
    b.connect(and1, [u1, u2])
    hold1, (h,) = b.new_gate(FRZ_HOLD)
    fork2, (r, xx) = b.new_gate(FRZ_FORK)
    b.connect(hold1, [m, xx])
    b.connect(fork2, [h])
    b.connect(fork1, [r])
    return b.build()


def test_associated_conjunctive_agreement():
    gn = small_gt_loop()
    net3 = gnetwork_to_network(gn)
    net2 = associated_conjunctive(gn)
    n = gn.n
    for idx in range(3**n):
        x = index_config(idx, 3, n)
        frozen = [i for i, v in enumerate(x) if v == 2]
        y3 = step(net3, x)
        for fill in range(2 ** len(frozen)):
            xs = list(x)
            for j, i in enumerate(frozen):
                xs[i] = (fill >> j) & 1
            y2 = step(net2, tuple(xs))
            for v in range(n):
                if y3[v] != 2:
                    assert y2[v] == y3[v]


def test_associated_conjunctive_on_transient_net():
    gn, marked = gt_transient_network(4)
    net3 = gnetwork_to_network(gn)
    net2 = associated_conjunctive(gn)
    t3 = trace(net3, marked, 12)
    t2 = trace(net2, marked, 12)
    for t in range(13):
        for v in range(gn.n):
            if t3[t][v] != 2:
                assert t2[t][v] == t3[t][v]


def test_gnetwork_json_roundtrip():
    gn, _ = gt_transient_network(4)
    assert gnetwork_from_json(gnetwork_to_json(gn)) == gn
    gn2 = nor_latch()
    assert gnetwork_from_json(gnetwork_to_json(gn2)) == gn2
    with pytest.raises(InvalidGNetworkError):
        gnetwork_from_json({"format": "network"})
