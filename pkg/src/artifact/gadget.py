"""Networks with glueing interfaces, their wiring calculus, and the compiler.

A gadget is a network carrying marked copies of a fixed interface, each
copy flagged as an input or an output. Gluing an output copy of one
gadget onto an input copy of another fuses the two copies node by node
and yields a gadget again, so gate diagrams can be assembled by repeated
glueing. A coherence certificate pins down, for one gate catalog, the
exempted runs and boundary traces that make every such assembly simulate
the corresponding gate network; `compile_gnetwork` performs the assembly
and returns the simulating network with its block embedding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping, Sequence

from .core import (
    ArtifactError,
    Network,
    make_network,
    network_from_json,
    network_to_json,
)
from .csan import Csan, csan_from_json, csan_to_json, csan_to_network
from .glue import (
    Dowel,
    GluedIndex,
    PseudoOrbit,
    check_pseudo_orbit,
    csan_glue,
    glue_networks,
    glued_numbering,
    make_dowel,
    pseudo_orbit_from_json,
    pseudo_orbit_to_json,
)
from .gnet import GNetwork, Gate, gnetwork_to_network
from .simulate import BlockEmbedding


class InvalidGadgetError(ArtifactError, ValueError):
    """Interface, copy map, wiring or certificate constraint violated."""


# ---------------------------------------------------------------------------
# Interfaces and gadgets


@dataclass(frozen=True)
class Interface:
    """Named boundary nodes split into a receiving and an emitting half."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]

    @property
    def names(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def validate(self) -> None:
        names = self.names
        if not names:
            raise InvalidGadgetError("interface must have at least one node")
        if any(not isinstance(c, str) for c in names):
            raise InvalidGadgetError("interface node names must be strings")
        if len(set(names)) != len(names):
            raise InvalidGadgetError("interface halves must be disjoint and duplicate-free")


def make_interface(inputs: Iterable[str], outputs: Iterable[str]) -> Interface:
    iface = Interface(tuple(inputs), tuple(outputs))
    iface.validate()
    return iface


@dataclass
class Gadget:
    """Network plus injective interface copies with disjoint images.

    in_copies[k] and out_copies[k] send every interface name to a node
    of net. When a labeled twin is attached it must expand to exactly
    the same network, so the structured and tabulated views never drift
    apart.
    """

    interface: Interface
    net: Network
    in_copies: tuple[dict[str, int], ...]
    out_copies: tuple[dict[str, int], ...]
    csan: Csan | None = None

    def validate(self) -> None:
        self.interface.validate()
        names = set(self.interface.names)
        seen: set[int] = set()
        for kind, copies in (("input", self.in_copies), ("output", self.out_copies)):
            for k, copy in enumerate(copies):
                if set(copy.keys()) != names:
                    raise InvalidGadgetError(
                        f"{kind} copy {k} must map exactly the interface names"
                    )
                vals = list(copy.values())
                if len(set(vals)) != len(vals):
                    raise InvalidGadgetError(f"{kind} copy {k} must be injective")
                for v in vals:
                    if not 0 <= v < self.net.n:
                        raise InvalidGadgetError(f"{kind} copy {k} maps outside the network")
                    if v in seen:
                        raise InvalidGadgetError("interface copies must have disjoint images")
                    seen.add(v)
        if self.csan is not None and csan_to_network(self.csan) != self.net:
            raise InvalidGadgetError("labeled twin disagrees with the network")


def make_gadget(
    interface: Interface,
    net: Network,
    in_copies: Iterable[Mapping[str, int]],
    out_copies: Iterable[Mapping[str, int]],
    csan: Csan | None = None,
) -> Gadget:
    g = Gadget(
        interface,
        net,
        tuple(dict(c) for c in in_copies),
        tuple(dict(c) for c in out_copies),
        csan,
    )
    g.validate()
    return g


def gadget_copy(g: Gadget) -> Gadget:
    """Fresh gadget with identical content; safe to glue onto the original."""
    return Gadget(
        g.interface,
        g.net,
        tuple(dict(c) for c in g.in_copies),
        tuple(dict(c) for c in g.out_copies),
        g.csan,
    )


def interface_nodes(g: Gadget) -> frozenset[int]:
    """All nodes owned by some interface copy."""
    nodes: set[int] = set()
    for copy in (*g.in_copies, *g.out_copies):
        nodes.update(copy.values())
    return frozenset(nodes)


def context_nodes(g: Gadget) -> tuple[int, ...]:
    """Nodes outside every interface copy, ascending."""
    owned = interface_nodes(g)
    return tuple(v for v in range(g.net.n) if v not in owned)


def exempt_nodes(g: Gadget) -> frozenset[int]:
    """Boundary nodes driven from outside the gadget.

    Receiving halves of input copies and emitting stubs of output
    copies are ruled by whatever gets glued there, never by the gadget
    itself, so its recorded runs are exempted exactly there.
    """
    out: set[int] = set()
    for copy in g.in_copies:
        out.update(copy[c] for c in g.interface.outputs)
    for copy in g.out_copies:
        out.update(copy[c] for c in g.interface.inputs)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Gadget glueing


@dataclass
class _GlueOutcome:
    gadget: Gadget
    num: GluedIndex
    a_nodes: tuple[dict[str, int], ...]
    b_nodes: tuple[dict[str, int], ...]


def _junction_dowel(
    first: Gadget,
    second: Gadget,
    in_pairs: Sequence[tuple[int, int]],
    out_pairs: Sequence[tuple[int, int]],
) -> Dowel:
    # Junction fusing an input copy of `first` with an output copy of
    # `second`: the receiving half keeps the consumer's rules, the
    # emitting half the producer's. Symmetrically for the other kind.
    iface = first.interface
    c1: list[str] = []
    c2: list[str] = []
    phi1: dict[str, int] = {}
    phi2: dict[str, int] = {}
    for j, (ia, ob) in enumerate(in_pairs):
        for c in iface.names:
            name = f"a{j}:{c}"
            (c1 if c in iface.inputs else c2).append(name)
            phi1[name] = first.in_copies[ia][c]
            phi2[name] = second.out_copies[ob][c]
    for j, (oa, ib) in enumerate(out_pairs):
        for c in iface.names:
            name = f"b{j}:{c}"
            (c1 if c in iface.outputs else c2).append(name)
            phi1[name] = first.out_copies[oa][c]
            phi2[name] = second.in_copies[ib][c]
    return make_dowel(c1, c2, phi1, phi2)


def _check_pairs(pairs: Sequence[tuple[int, int]], n_first: int, n_second: int, what: str) -> None:
    firsts = [a for a, _ in pairs]
    seconds = [b for _, b in pairs]
    if len(set(firsts)) != len(firsts) or len(set(seconds)) != len(seconds):
        raise InvalidGadgetError(f"reused {what} index in the wiring")
    if any(not 0 <= a < n_first for a in firsts) or any(
        not 0 <= b < n_second for b in seconds
    ):
        raise InvalidGadgetError(f"{what} wiring index out of range")


def _gadget_glue(
    first: Gadget,
    second: Gadget,
    in_pairs: Sequence[tuple[int, int]],
    out_pairs: Sequence[tuple[int, int]],
) -> _GlueOutcome:
    first.validate()
    second.validate()
    if first.interface != second.interface:
        raise InvalidGadgetError("glued gadgets must share an interface")
    if first.net.alphabet != second.net.alphabet:
        raise InvalidGadgetError("glued gadgets must share an alphabet")
    iface = first.interface
    _check_pairs(in_pairs, len(first.in_copies), len(second.out_copies), "input/output")
    _check_pairs(out_pairs, len(first.out_copies), len(second.in_copies), "output/input")
    dowel = _junction_dowel(first, second, in_pairs, out_pairs)

    if first.csan is not None and second.csan is not None:
        merged = csan_glue(first.csan, second.csan, dowel)
        net = csan_to_network(merged)
    else:
        merged = None
        net = glue_networks(first.net, second.net, dowel)
    num = glued_numbering(first.net.n, second.net.n, dowel)

    def remap(copy: Mapping[str, int], index: Mapping[int, int]) -> dict[str, int]:
        return {c: index[v] for c, v in copy.items()}

    used_in_first = {ia for ia, _ in in_pairs}
    used_out_second = {ob for _, ob in in_pairs}
    used_out_first = {oa for oa, _ in out_pairs}
    used_in_second = {ib for _, ib in out_pairs}
    kept_in = [
        remap(copy, num.v1_index)
        for k, copy in enumerate(first.in_copies)
        if k not in used_in_first
    ] + [
        remap(copy, num.v2_index)
        for k, copy in enumerate(second.in_copies)
        if k not in used_in_second
    ]
    kept_out = [
        remap(copy, num.v1_index)
        for k, copy in enumerate(first.out_copies)
        if k not in used_out_first
    ] + [
        remap(copy, num.v2_index)
        for k, copy in enumerate(second.out_copies)
        if k not in used_out_second
    ]
    gadget = Gadget(iface, net, tuple(kept_in), tuple(kept_out), merged)
    gadget.validate()
    a_nodes = tuple(
        {c: num.v1_index[first.in_copies[ia][c]] for c in iface.names}
        for ia, _ in in_pairs
    )
    b_nodes = tuple(
        {c: num.v1_index[first.out_copies[oa][c]] for c in iface.names}
        for oa, _ in out_pairs
    )
    return _GlueOutcome(gadget, num, a_nodes, b_nodes)


def gadget_glue(
    first: Gadget,
    second: Gadget,
    in_pairs: Sequence[tuple[int, int]] = (),
    out_pairs: Sequence[tuple[int, int]] = (),
) -> Gadget:
    """Glue two gadgets along the wired interface copies.

    in_pairs lists (input copy of first, output copy of second) pairs,
    out_pairs the (output copy of first, input copy of second) ones.
    Surviving copies keep their relative order, first gadget first.
    Empty wiring degenerates to the disjoint union.
    """
    return _gadget_glue(first, second, in_pairs, out_pairs).gadget


def disjoint_union(first: Gadget, second: Gadget) -> Gadget:
    return gadget_glue(first, second)


# ---------------------------------------------------------------------------
# Coherence certificates


@dataclass
class CoherentCertificate:
    """Everything needed to turn gate diagrams into simulating networks.

    state_configs[q] encodes source state q on one interface copy;
    standard_traces[(q, q')] is the boundary evolution from q to q' in
    `time` steps; for each gate the certificate records one exempted
    run per (input states, next input states, output states) triple,
    the next output states being determined by the gate itself.
    """

    interface: Interface
    gadgets: dict[Gate, Gadget]
    state_configs: tuple[dict[str, int], ...]
    context_configs: dict[Gate, dict[int, int]]
    time: int
    standard_traces: dict[tuple[int, int], tuple[dict[str, int], ...]]
    pseudo_orbits: dict[
        Gate,
        dict[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], PseudoOrbit],
    ]

    @property
    def source_alphabet(self) -> int:
        return len(self.state_configs)

    @property
    def host_alphabet(self) -> int:
        for g in self.gadgets.values():
            return g.net.alphabet
        raise InvalidGadgetError("certificate carries no gadgets")


def make_certificate(
    interface: Interface,
    gadgets: Mapping[Gate, Gadget],
    state_configs: Sequence[Mapping[str, int]],
    context_configs: Mapping[Gate, Mapping[int, int]],
    time: int,
    standard_traces: Mapping[tuple[int, int], Sequence[Mapping[str, int]]],
    pseudo_orbits: Mapping[Gate, Mapping[tuple, PseudoOrbit]],
) -> CoherentCertificate:
    if not gadgets:
        raise InvalidGadgetError("certificate needs at least one gate")
    return CoherentCertificate(
        interface,
        dict(gadgets),
        tuple(dict(s) for s in state_configs),
        {g: dict(context_configs.get(g, {})) for g in gadgets},
        time,
        {pair: tuple(dict(p) for p in pats) for pair, pats in standard_traces.items()},
        {
            g: {tuple(map(tuple, key)): po for key, po in table.items()}
            for g, table in pseudo_orbits.items()
        },
    )


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    checked: int
    failures: tuple[str, ...] = ()

    def message(self) -> str:
        if self.ok:
            return f"certificate ok ({self.checked} runs checked)"
        head = "; ".join(self.failures[:4])
        more = len(self.failures) - 4
        tail = f" (+{more} more)" if more > 0 else ""
        return f"certificate rejected: {head}{tail}"


def _edges_by_pair(c: Csan) -> dict[tuple[int, int], tuple[int, ...]]:
    return {e: rho for e, rho in zip(c.edges, c.edge_rho)}


def _adjacent(c: Csan, v: int) -> set[int]:
    out: set[int] = set()
    for u, w in c.edges:
        if u == v:
            out.add(w)
        elif w == v:
            out.add(u)
    return out


def csan_closure_failures(
    interface: Interface, tagged: Sequence[tuple[str, Gadget]]
) -> tuple[str, ...]:
    """Structural conditions keeping every glueing inside the family.

    All interface copies must induce the same labeled subgraph; no edge
    may leave a copy through its receiving half (input copies) or its
    continuation stub (output copies). A gadget set passing these
    checks glues freely without ever tripping the labeled-glue guards.
    """
    names = interface.names
    fails: list[str] = []
    ref: tuple[str, dict[str, int], Csan] | None = None
    for tag, g in tagged:
        if g.csan is None:
            fails.append(f"{tag}: no labeled structure attached")
            continue
        look = _edges_by_pair(g.csan)
        copies = [("input", k, c) for k, c in enumerate(g.in_copies)] + [
            ("output", k, c) for k, c in enumerate(g.out_copies)
        ]
        for kind, k, copy in copies:
            where = f"{tag} {kind} copy {k}"
            if ref is None:
                ref = (where, dict(copy), g.csan)
                continue
            ref_where, ref_copy, ref_csan = ref
            ref_look = _edges_by_pair(ref_csan)
            for i, a in enumerate(names):
                for b in names[i + 1 :]:
                    u, v = copy[a], copy[b]
                    e = look.get((min(u, v), max(u, v)))
                    ru, rv = ref_copy[a], ref_copy[b]
                    r = ref_look.get((min(ru, rv), max(ru, rv)))
                    if (e is None) != (r is None) or e != r:
                        fails.append(
                            f"{where}: induced labeled subgraph differs from"
                            f" {ref_where} on pair ({a!r}, {b!r})"
                        )
            for a in names:
                lam = g.csan.lam[copy[a]]
                ref_lam = ref_csan.lam[ref_copy[a]]
                shared = lam.keys() & ref_lam.keys()
                if any(lam[key] != ref_lam[key] for key in shared):
                    fails.append(
                        f"{where}: vertex labels differ from {ref_where} at {a!r}"
                    )
        for k, copy in enumerate(g.in_copies):
            image = set(copy.values())
            for c in interface.outputs:
                if not _adjacent(g.csan, copy[c]) <= image:
                    fails.append(
                        f"{tag}: input copy {k} receiving nodes have neighbors"
                        " outside the copy"
                    )
                    break
        for k, copy in enumerate(g.out_copies):
            image = set(copy.values())
            for c in interface.inputs:
                if not _adjacent(g.csan, copy[c]) <= image:
                    fails.append(
                        f"{tag}: output copy {k} continuation nodes have neighbors"
                        " outside the copy"
                    )
                    break
    return tuple(fails)


def _copy_trace_matches(
    po: PseudoOrbit,
    copy: Mapping[str, int],
    wanted: Sequence[Mapping[str, int]],
) -> int | None:
    """First time step where the copy strays from the trace, None if none."""
    for t, pattern in enumerate(wanted):
        got = po.configs[t]
        if any(got[copy[c]] != pattern[c] for c in pattern):
            return t
    return None


def verify_certificate(cert: CoherentCertificate) -> CertificateReport:
    """Replay every recorded run against every coherence clause."""
    failures: list[str] = []
    checked = 0
    iface = cert.interface
    try:
        iface.validate()
    except InvalidGadgetError as exc:
        return CertificateReport(False, 0, (f"interface: {exc}",))
    names = iface.names
    nq = cert.source_alphabet
    if nq < 1:
        failures.append("certificate encodes no states")
    if cert.time < 1:
        failures.append("time constant must be >= 1")
    if len({g.net.alphabet for g in cert.gadgets.values()}) > 1:
        failures.append("gadgets disagree on the alphabet")
    host_q = max((g.net.alphabet for g in cert.gadgets.values()), default=1)

    def pattern_ok(pat: Mapping[str, int], what: str) -> bool:
        if set(pat.keys()) != set(names):
            failures.append(f"{what} must assign exactly the interface names")
            return False
        if any(not 0 <= s < host_q for s in pat.values()):
            failures.append(f"{what} uses states outside the alphabet")
            return False
        return True

    states_ok = all(
        pattern_ok(s, f"state pattern {q}") for q, s in enumerate(cert.state_configs)
    )
    if states_ok:
        rows = [tuple(s[c] for c in names) for s in cert.state_configs]
        for q in range(nq):
            for qp in range(q + 1, nq):
                if rows[q] == rows[qp]:
                    failures.append(
                        f"state patterns are not injective (q={q} and q={qp} coincide)"
                    )
    traces_ok = True
    for q in range(nq):
        for qp in range(nq):
            tr = cert.standard_traces.get((q, qp))
            if tr is None:
                failures.append(f"standard trace ({q},{qp}) missing")
                traces_ok = False
                continue
            if len(tr) != cert.time + 1:
                failures.append(f"standard trace ({q},{qp}) has the wrong length")
                traces_ok = False
                continue
            if not all(pattern_ok(p, f"trace ({q},{qp}) step {t}") for t, p in enumerate(tr)):
                traces_ok = False
                continue
            if states_ok and dict(tr[0]) != cert.state_configs[q]:
                failures.append(f"standard trace ({q},{qp}) does not start at pattern {q}")
            if states_ok and dict(tr[-1]) != cert.state_configs[qp]:
                failures.append(f"standard trace ({q},{qp}) does not end at pattern {qp}")

    for gate, gd in cert.gadgets.items():
        prefix = f"gate {gate.name}"
        try:
            gd.validate()
        except InvalidGadgetError as exc:
            failures.append(f"{prefix}: {exc}")
            continue
        if gd.interface != iface:
            failures.append(f"{prefix}: gadget interface differs from the certificate's")
            continue
        if gate.alphabet != nq:
            failures.append(
                f"{prefix}: gate alphabet {gate.alphabet} differs from the"
                f" {nq} encoded states"
            )
            continue
        if len(gd.in_copies) != gate.n_in or len(gd.out_copies) != gate.n_out:
            failures.append(
                f"{prefix}: gadget exposes {len(gd.in_copies)}/{len(gd.out_copies)}"
                f" copies for a {gate.n_in}->{gate.n_out} gate"
            )
            continue
        ctx = cert.context_configs.get(gate, {})
        hat = context_nodes(gd)
        if set(ctx.keys()) != set(hat):
            failures.append(f"{prefix}: context must assign exactly the non-interface nodes")
            continue
        if any(not 0 <= s < gd.net.alphabet for s in ctx.values()):
            failures.append(f"{prefix}: context uses states outside the alphabet")
            continue
        if not (states_ok and traces_ok):
            continue
        protected = exempt_nodes(gd)
        table = cert.pseudo_orbits.get(gate, {})
        for q_i in product(range(nq), repeat=gate.n_in):
            q_op = gate.apply(q_i)
            for q_ip in product(range(nq), repeat=gate.n_in):
                for q_o in product(range(nq), repeat=gate.n_out):
                    checked += 1
                    cell = f"{prefix} cell {q_i}->{q_ip}|{q_o}"
                    po = table.get((q_i, q_ip, q_o))
                    if po is None:
                        failures.append(
                            f"{prefix}: missing pseudo-orbit for inputs"
                            f" {q_i}->{q_ip} outputs {q_o}"
                        )
                        continue
                    if po.exempt != protected:
                        failures.append(
                            f"{cell}: exempt set differs from the protected"
                            " interface nodes"
                        )
                        continue
                    if len(po.configs) != cert.time + 1:
                        failures.append(f"{cell}: run length differs from the time constant")
                        continue
                    try:
                        sub = check_pseudo_orbit(gd.net, po)
                    except ArtifactError as exc:
                        failures.append(f"{cell}: {exc}")
                        continue
                    if not sub.ok:
                        t, v, want, got = sub.failures[0]
                        failures.append(
                            f"{cell}: not a valid exempted run"
                            f" (t={t}, node {v}, want {want}, got {got})"
                        )
                    for k, copy in enumerate(gd.in_copies):
                        tr = cert.standard_traces[(q_i[k], q_ip[k])]
                        t = _copy_trace_matches(po, copy, tr)
                        if t is not None:
                            failures.append(
                                f"{cell}: input copy {k} strays from the standard"
                                f" trace at t={t}"
                            )
                    for k, copy in enumerate(gd.out_copies):
                        tr = cert.standard_traces[(q_o[k], q_op[k])]
                        t = _copy_trace_matches(po, copy, tr)
                        if t is not None:
                            failures.append(
                                f"{cell}: output copy {k} strays from the standard"
                                f" trace at t={t}"
                            )
                    for t in (0, cert.time):
                        if any(po.configs[t][v] != ctx[v] for v in hat):
                            failures.append(
                                f"{cell}: context nodes differ from the recorded"
                                f" context at t={t}"
                            )

    mirrored = [g.csan is not None for g in cert.gadgets.values()]
    if any(mirrored):
        if not all(mirrored):
            failures.append("mixed labeled and unlabeled gadgets")
        else:
            failures.extend(
                csan_closure_failures(
                    iface, [(f"gate {g.name}", gd) for g, gd in cert.gadgets.items()]
                )
            )
    return CertificateReport(not failures, checked, tuple(failures))


# ---------------------------------------------------------------------------
# Compiling gate networks


@dataclass
class CompiledGadgets:
    """Assembly artifacts: the host network and where everything landed.

    dowels[v] locates the fused interface copy carrying source node v;
    node_maps[j] sends gate j's gadget nodes to host nodes; contexts[j]
    is that gadget's frozen surrounding, already in host numbering.
    """

    network: Network
    embedding: BlockEmbedding
    gadget: Gadget
    dowels: tuple[dict[str, int], ...]
    contexts: tuple[dict[int, int], ...]
    node_maps: tuple[dict[int, int], ...]


def compile_gnetwork_detailed(gn: GNetwork, cert: CoherentCertificate) -> CompiledGadgets:
    """Assemble one gadget per gate, glueing wires in gate order.

    Gate j is glued onto the accumulated result of gates 0..j-1 along
    every wire between them; wireless steps degenerate to disjoint
    unions. Each source node ends up owning its fused interface copy as
    a block; all frozen context nodes ride along in node 0's block.
    """
    gn.validate()
    report = verify_certificate(cert)
    if not report.ok:
        raise InvalidGadgetError(report.message())
    if gn.alphabet != cert.source_alphabet:
        raise InvalidGadgetError(
            f"gate network alphabet {gn.alphabet} differs from the"
            f" {cert.source_alphabet} certified states"
        )
    for gate in gn.gates:
        if gate not in cert.gadgets:
            raise InvalidGadgetError(f"no gadget recorded for gate {gate.name}")
    if not gn.gates:
        host = make_network(cert.host_alphabet, [])
        emb = BlockEmbedding(cert.time, (), ())
        emb.validate(make_network(gn.alphabet, []), host)
        return CompiledGadgets(
            host, emb, Gadget(cert.interface, host, (), ()), (), (), ()
        )

    produced_by: dict[int, tuple[int, int]] = {}
    consumed_by: dict[int, tuple[int, int]] = {}
    for j in range(len(gn.gates)):
        for k, v in enumerate(gn.outputs[j]):
            produced_by[v] = (j, k)
        for k, v in enumerate(gn.inputs[j]):
            consumed_by[v] = (j, k)

    acc = gadget_copy(cert.gadgets[gn.gates[0]])
    node_maps: list[dict[int, int]] = [{v: v for v in range(acc.net.n)}]
    in_tags = [(0, k) for k in range(gn.gates[0].n_in)]
    out_tags = [(0, k) for k in range(gn.gates[0].n_out)]
    dowels: dict[int, dict[str, int]] = {}
    for j in range(1, len(gn.gates)):
        gate = gn.gates[j]
        new = gadget_copy(cert.gadgets[gate])
        in_pairs: list[tuple[int, int]] = []
        a_wires: list[int] = []
        for idx, (jj, kk) in enumerate(in_tags):
            v = gn.inputs[jj][kk]
            pj, pk = produced_by[v]
            if pj == j:
                in_pairs.append((idx, pk))
                a_wires.append(v)
        out_pairs: list[tuple[int, int]] = []
        b_wires: list[int] = []
        for idx, (jj, kk) in enumerate(out_tags):
            v = gn.outputs[jj][kk]
            cj, ck = consumed_by[v]
            if cj == j:
                out_pairs.append((idx, ck))
                b_wires.append(v)
        outcome = _gadget_glue(acc, new, in_pairs, out_pairs)
        num = outcome.num
        node_maps = [{o: num.v1_index[h] for o, h in m.items()} for m in node_maps]
        node_maps.append(dict(num.v2_index))
        dowels = {
            v: {c: num.v1_index[h] for c, h in m.items()} for v, m in dowels.items()
        }
        for v, m in zip(a_wires, outcome.a_nodes):
            dowels[v] = m
        for v, m in zip(b_wires, outcome.b_nodes):
            dowels[v] = m
        used_in_first = {ia for ia, _ in in_pairs}
        used_out_second = {ob for _, ob in in_pairs}
        used_out_first = {oa for oa, _ in out_pairs}
        used_in_second = {ib for _, ib in out_pairs}
        in_tags = [t for k, t in enumerate(in_tags) if k not in used_in_first] + [
            (j, k) for k in range(gate.n_in) if k not in used_in_second
        ]
        out_tags = [t for k, t in enumerate(out_tags) if k not in used_out_first] + [
            (j, k) for k in range(gate.n_out) if k not in used_out_second
        ]
        acc = outcome.gadget

    contexts: list[dict[int, int]] = []
    for j, gate in enumerate(gn.gates):
        ctx = cert.context_configs[gate]
        contexts.append({node_maps[j][v]: s for v, s in ctx.items()})
    extra = sorted((h, s) for m in contexts for h, s in m.items())
    blocks: list[tuple[int, ...]] = []
    patterns: list[tuple[tuple[int, ...], ...]] = []
    for v in range(gn.n):
        by_node = {h: c for c, h in dowels[v].items()}
        block = sorted(by_node)
        rows = []
        for q in range(gn.alphabet):
            s_q = cert.state_configs[q]
            row = [s_q[by_node[h]] for h in block]
            if v == 0:
                row.extend(s for _, s in extra)
            rows.append(tuple(row))
        if v == 0:
            block.extend(h for h, _ in extra)
        blocks.append(tuple(block))
        patterns.append(tuple(rows))
    emb = BlockEmbedding(cert.time, tuple(blocks), tuple(patterns))
    emb.validate(gnetwork_to_network(gn), acc.net)
    return CompiledGadgets(
        acc.net,
        emb,
        acc,
        tuple(dowels[v] for v in range(gn.n)),
        tuple(contexts),
        tuple(node_maps),
    )


def compile_gnetwork(gn: GNetwork, cert: CoherentCertificate) -> tuple[Network, BlockEmbedding]:
    compiled = compile_gnetwork_detailed(gn, cert)
    return compiled.network, compiled.embedding


# ---------------------------------------------------------------------------
# Serialization


def _gate_doc(g: Gate) -> dict:
    return {
        "name": g.name,
        "alphabet": g.alphabet,
        "n_in": g.n_in,
        "n_out": g.n_out,
        "table": [list(row) for row in g.table],
    }


def _gate_from_doc(doc: dict) -> Gate:
    return Gate(
        doc["name"],
        doc["alphabet"],
        doc["n_in"],
        doc["n_out"],
        tuple(tuple(row) for row in doc["table"]),
    )


def gadget_to_json(g: Gadget) -> dict:
    doc = {
        "format": "gadget",
        "version": 1,
        "interface": {
            "inputs": list(g.interface.inputs),
            "outputs": list(g.interface.outputs),
        },
        "network": network_to_json(g.net),
        "in_copies": [dict(c) for c in g.in_copies],
        "out_copies": [dict(c) for c in g.out_copies],
    }
    if g.csan is not None:
        doc["csan"] = csan_to_json(g.csan)
    return doc


def gadget_from_json(data: dict) -> Gadget:
    if not isinstance(data, dict) or data.get("format") != "gadget":
        raise InvalidGadgetError("not a gadget document")
    try:
        iface = make_interface(data["interface"]["inputs"], data["interface"]["outputs"])
        csan = csan_from_json(data["csan"]) if "csan" in data else None
        return make_gadget(
            iface,
            network_from_json(data["network"]),
            data["in_copies"],
            data["out_copies"],
            csan,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidGadgetError(f"bad gadget document: {exc}") from exc


def certificate_to_json(cert: CoherentCertificate) -> dict:
    return {
        "format": "certificate",
        "version": 1,
        "interface": {
            "inputs": list(cert.interface.inputs),
            "outputs": list(cert.interface.outputs),
        },
        "time": cert.time,
        "state_configs": [dict(s) for s in cert.state_configs],
        "standard_traces": [
            {"from": q, "to": qp, "patterns": [dict(p) for p in pats]}
            for (q, qp), pats in sorted(cert.standard_traces.items())
        ],
        "gates": [
            {
                "gate": _gate_doc(gate),
                "gadget": gadget_to_json(cert.gadgets[gate]),
                "context": {str(v): s for v, s in sorted(cert.context_configs[gate].items())},
                "pseudo_orbits": [
                    {
                        "inputs": list(q_i),
                        "next_inputs": list(q_ip),
                        "outputs": list(q_o),
                        "orbit": pseudo_orbit_to_json(po),
                    }
                    for (q_i, q_ip, q_o), po in sorted(cert.pseudo_orbits[gate].items())
                ],
            }
            for gate in cert.gadgets
        ],
    }


def certificate_from_json(data: dict) -> CoherentCertificate:
    if not isinstance(data, dict) or data.get("format") != "certificate":
        raise InvalidGadgetError("not a certificate document")
    try:
        iface = make_interface(data["interface"]["inputs"], data["interface"]["outputs"])
        gadgets: dict[Gate, Gadget] = {}
        contexts: dict[Gate, Mapping[int, int]] = {}
        orbits: dict[Gate, dict[tuple, PseudoOrbit]] = {}
        for item in data["gates"]:
            gate = _gate_from_doc(item["gate"])
            gadgets[gate] = gadget_from_json(item["gadget"])
            contexts[gate] = {int(v): s for v, s in item["context"].items()}
            orbits[gate] = {
                (
                    tuple(cell["inputs"]),
                    tuple(cell["next_inputs"]),
                    tuple(cell["outputs"]),
                ): pseudo_orbit_from_json(cell["orbit"])
                for cell in item["pseudo_orbits"]
            }
        traces = {
            (item["from"], item["to"]): item["patterns"]
            for item in data["standard_traces"]
        }
        return make_certificate(
            iface,
            gadgets,
            data["state_configs"],
            contexts,
            data["time"],
            traces,
            orbits,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidGadgetError(f"bad certificate document: {exc}") from exc


def save_gadget(g: Gadget, path: str, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(gadget_to_json(g), fh, indent=2 if pretty else None)
        fh.write("\n")


def load_gadget(path: str) -> Gadget:
    with open(path, encoding="utf-8") as fh:
        return gadget_from_json(json.load(fh))


def save_certificate(cert: CoherentCertificate, path: str, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(certificate_to_json(cert), fh, indent=2 if pretty else None)
        fh.write("\n")


def load_certificate(path: str) -> CoherentCertificate:
    with open(path, encoding="utf-8") as fh:
        return certificate_from_json(json.load(fh))
