"""Life-on-graphs gadget kit: wire, clock, NOR gadget, and its compiler.

Every graph here runs the same local rule: a dead node comes alive on
exactly three live neighbors, a live node survives on two or three.
A signal is a pair of live three-node layers crawling along a ladder of
layers; each layer trails a helper node whose extra live neighbor
overcrowds the layer one step after the pair has passed, pushing it
back to rest. Six layers closed into a ring tick with period six; the
same six layers left open form a wire. The NOR gadget joins two
incoming wire stubs, a pacing ring, and two outgoing wire stubs around
a sixteen-neighbor collector node that fires exactly when both inputs
stayed quiet, so the stubs re-emit the negated disjunction.

The shipped adjacency is data, not code: builders read the versioned
JSON fixtures under data/, while the private layout functions kept in
this module are their provenance and `regenerate_gol_fixtures`
rewrites the files after a layout change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable

from .core import make_network, step
from .csan import (
    Csan,
    FamilySpec,
    build_lifelike,
    csan_from_json,
    csan_to_network,
    family_spec,
    make_csan,
)
from .gadget import (
    CoherentCertificate,
    Gadget,
    Interface,
    InvalidGadgetError,
    compile_gnetwork_detailed,
    context_nodes,
    exempt_nodes,
    make_certificate,
    make_gadget,
    make_interface,
    verify_certificate,
)
from .glue import PseudoOrbit, make_pseudo_orbit, pseudo_orbit_from_json, pseudo_orbit_to_json
from .gnet import NOR_2_2, GNetwork, gnetwork_to_network
from .simulate import BlockEmbedding

BIRTH = (3,)
SURVIVE = (2, 3)

# Host steps per simulated gate step; also the pacing ring's period.
SIGNAL_PERIOD = 6

# Interface of every junction: two consecutive signal layers plus the
# helpers whose values are not settled at the hand-over instants. The
# producer side drives the earlier layer, its helper, and the spent
# helper of the layer already behind the junction; the consumer side
# computes the later layer and its helper.
RELAY_NAMES = ("relay0", "relay1", "relay2", "relay_aux")
DRIVE_NAMES = ("drive0", "drive1", "drive2", "spent_aux", "drive_aux")

_DATA_DIR = Path(__file__).resolve().parent / "data"
_WIRE_FILE = "gol_wire.json"
_CLOCK_FILE = "gol_clock.json"
_NOR_FILE = "gol_nor_gadget.json"
_CERT_FILE = "gol_certificate.json"


class InvalidGolFixtureError(InvalidGadgetError):
    """A gol data file is missing, mislabeled, or malformed."""


# ---------------------------------------------------------------------------
# Layout generators (the provenance of the data files)


def _band(base: int) -> tuple[int, int, int]:
    return (base, base + 1, base + 2)


def _cross(left: Iterable[int], right: Iterable[int]) -> list[tuple[int, int]]:
    return [(u, v) for u in left for v in right]


def _fan(hub: int, nodes: Iterable[int]) -> list[tuple[int, int]]:
    return [(hub, v) for v in nodes]


def _ladder_edges(layers: int, ring: bool) -> list[tuple[int, int]]:
    # Nodes: layer p is the triple 3p..3p+2, helper of layer p is 3*layers+p.
    edges: list[tuple[int, int]] = []
    for p in range(layers if ring else layers - 1):
        edges += _cross(_band(3 * p), _band(3 * ((p + 1) % layers)))
    for p in range(layers):
        edges += _fan(3 * layers + p, _band(3 * p))
    return edges


def _wire_csan() -> Csan:
    return build_lifelike(24, _ladder_edges(6, ring=False), BIRTH, SURVIVE)


def _clock_csan() -> Csan:
    return build_lifelike(24, _ladder_edges(6, ring=True), BIRTH, SURVIVE)


def _clock_initial() -> tuple[int, ...]:
    # Two adjacent live layers with the two helpers trailing them; the
    # pair advances one layer per step and wraps, so layer 2 is live
    # exactly at steps 2 and 3 of each period.
    x = [0] * 24
    for v in (*_band(15), *_band(0), 22, 23):
        x[v] = 1
    return tuple(x)


# NOR gadget node blocks. Input stub: drive layer, spent helper, drive
# helper, relay layer, relay helper, buffer layer + helper, inlet layer
# + helper. Output stub: outlet layer (its helper doubles as the copy's
# spent helper), then drive/relay blocks mirroring the input copies.
_IN_BASE = (0, 17)
_COLLECTOR = 34
_DAMPER = 35
_OUT_BASE = (36, 48)
_CLOCK_BASE = 60
_NOR_SIZE = 84


def _ring_node(layer: int, i: int) -> int:
    return _CLOCK_BASE + 3 * layer + i


def _ring_helper(layer: int) -> int:
    return _CLOCK_BASE + 18 + layer


def _nor_edges() -> list[tuple[int, int]]:
    edges: list[tuple[int, int]] = []
    for base in _IN_BASE:
        drive, relay = _band(base), _band(base + 5)
        buffer, inlet = _band(base + 9), _band(base + 13)
        edges += _cross(drive, relay)
        edges += _fan(base + 4, drive)
        edges += _fan(base + 8, relay)
        edges += _cross(relay, buffer)
        edges += _fan(base + 12, buffer)
        edges += _cross(buffer, inlet)
        edges += _fan(base + 16, inlet)
        edges += _fan(_COLLECTOR, inlet)
    edges.append((_COLLECTOR, _DAMPER))
    edges += _fan(_COLLECTOR, [_ring_node(2, i) for i in range(3)])
    edges += [(_DAMPER, _ring_node(3, 0)), (_DAMPER, _ring_node(3, 1))]
    for base in _OUT_BASE:
        outlet, drive, relay = _band(base), _band(base + 4), _band(base + 8)
        for i in range(3):
            edges += [(outlet[i], _ring_node(3, i)), (outlet[i], _ring_node(3, (i + 1) % 3))]
        edges += _fan(_COLLECTOR, outlet)
        edges += _fan(base + 3, outlet)
        edges += _cross(outlet, drive)
        edges += _fan(base + 7, drive)
        edges += _cross(drive, relay)
        edges += _fan(base + 11, relay)
    for p in range(6):
        edges += _cross(
            [_ring_node(p, i) for i in range(3)],
            [_ring_node((p + 1) % 6, i) for i in range(3)],
        )
        edges += _fan(_ring_helper(p), [_ring_node(p, i) for i in range(3)])
    return edges


def _copy_block(drive0: int, spent: int, drive_aux: int, relay0: int, relay_aux: int) -> dict[str, int]:
    block = {f"drive{i}": drive0 + i for i in range(3)}
    block |= {f"relay{i}": relay0 + i for i in range(3)}
    block |= {"spent_aux": spent, "drive_aux": drive_aux, "relay_aux": relay_aux}
    return block


def _nor_copies() -> tuple[tuple[dict[str, int], ...], tuple[dict[str, int], ...]]:
    ins = tuple(
        _copy_block(base, base + 3, base + 4, base + 5, base + 8) for base in _IN_BASE
    )
    outs = tuple(
        _copy_block(base + 4, base + 3, base + 7, base + 8, base + 11) for base in _OUT_BASE
    )
    return ins, outs


def nor_interface() -> Interface:
    return make_interface(RELAY_NAMES, DRIVE_NAMES)


def _nor_gadget() -> Gadget:
    csan = build_lifelike(_NOR_SIZE, _nor_edges(), BIRTH, SURVIVE)
    ins, outs = _nor_copies()
    return make_gadget(nor_interface(), csan_to_network(csan), ins, outs, csan=csan)


def nor_center_nodes() -> tuple[int, ...]:
    """Columns of the published center run: both inlet triples, the
    pacing triple, damper, collector, both outlet triples."""
    return (
        *_band(_IN_BASE[0] + 13),
        *_band(_IN_BASE[1] + 13),
        *(_ring_node(2, i) for i in range(3)),
        _DAMPER,
        _COLLECTOR,
        *_band(_OUT_BASE[0]),
        *_band(_OUT_BASE[1]),
    )


# ---------------------------------------------------------------------------
# Boundary traces and recorded runs


def _boundary_rows(old: int, new: int) -> tuple[dict[str, int], ...]:
    # Restriction of two back-to-back signals to one junction block: the
    # old value drains through it during steps 0..2, the new value
    # reaches it at step 5 and has fully entered by step 6.
    drive = (old, 0, 0, 0, 0, new, new)
    relay = (old, old, 0, 0, 0, 0, new)
    relay_aux = (0, old, old, 0, 0, 0, 0)
    rows = []
    for t in range(SIGNAL_PERIOD + 1):
        row = {f"drive{i}": drive[t] for i in range(3)}
        row |= {f"relay{i}": relay[t] for i in range(3)}
        row |= {
            "spent_aux": drive[t],
            "drive_aux": relay[t],
            "relay_aux": relay_aux[t],
        }
        rows.append(row)
    return tuple(rows)


def _state_patterns() -> tuple[dict[str, int], ...]:
    return tuple(_boundary_rows(q, q)[0] for q in (0, 1))


def _nor_context(gd: Gadget) -> dict[int, int]:
    live = {_ring_node(5, i) for i in range(3)}
    live |= {_ring_node(0, i) for i in range(3)}
    live |= {_ring_helper(4), _ring_helper(5)}
    return {v: int(v in live) for v in context_nodes(gd)}


def _record_run(
    gd: Gadget,
    traces: dict[tuple[int, int], tuple[dict[str, int], ...]],
    context: dict[int, int],
    q_i: tuple[int, int],
    q_ip: tuple[int, int],
    q_o: tuple[int, int],
    q_op: tuple[int, int],
) -> PseudoOrbit:
    states = _state_patterns()
    x = [0] * gd.net.n
    for v, s in context.items():
        x[v] = s
    for k, copy in enumerate(gd.in_copies):
        for name, v in copy.items():
            x[v] = states[q_i[k]][name]
    for k, copy in enumerate(gd.out_copies):
        for name, v in copy.items():
            x[v] = states[q_o[k]][name]
    configs = [tuple(x)]
    for t in range(1, SIGNAL_PERIOD + 1):
        x = list(step(gd.net, x))
        for k, copy in enumerate(gd.in_copies):
            row = traces[(q_i[k], q_ip[k])][t]
            for name in DRIVE_NAMES:
                x[copy[name]] = row[name]
        for k, copy in enumerate(gd.out_copies):
            row = traces[(q_o[k], q_op[k])][t]
            for name in RELAY_NAMES:
                x[copy[name]] = row[name]
        configs.append(tuple(x))
    return make_pseudo_orbit(configs, exempt_nodes(gd))


def _certificate_parts(gd: Gadget):
    traces = {(a, b): _boundary_rows(a, b) for a in (0, 1) for b in (0, 1)}
    context = _nor_context(gd)
    orbits: dict[tuple, PseudoOrbit] = {}
    for q_i in product(range(2), repeat=2):
        q_op = NOR_2_2.apply(q_i)
        for q_ip in product(range(2), repeat=2):
            for q_o in product(range(2), repeat=2):
                orbits[(q_i, q_ip, q_o)] = _record_run(
                    gd, traces, context, q_i, q_ip, q_o, q_op
                )
    return _state_patterns(), context, traces, orbits


def _assemble_certificate(gd: Gadget) -> CoherentCertificate:
    states, context, traces, orbits = _certificate_parts(gd)
    return make_certificate(
        nor_interface(),
        {NOR_2_2: gd},
        states,
        {NOR_2_2: context},
        SIGNAL_PERIOD,
        traces,
        {NOR_2_2: orbits},
    )


# ---------------------------------------------------------------------------
# Fixture files


def _lifelike_doc(n: int, edges: Iterable[tuple[int, int]]) -> dict:
    shorthand = {"family": "lifelike", "birth": list(BIRTH), "survive": list(SURVIVE)}
    return {
        "format": "csan",
        "version": 1,
        "alphabet": 2,
        "n": n,
        "edges": [[u, v, "id"] for u, v in sorted((min(e), max(e)) for e in edges)],
        "vertices": [{"lambda": dict(shorthand)} for _ in range(n)],
    }


def _load_doc(name: str, expected: str) -> dict:
    path = _DATA_DIR / name
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InvalidGolFixtureError(f"missing data file {name}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidGolFixtureError(f"data file {name} is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != expected:
        raise InvalidGolFixtureError(f"data file {name} is not a {expected} document")
    return doc


def build_wire() -> Csan:
    """Open six-layer signal carrier, one helper node per layer."""
    return csan_from_json(_load_doc(_WIRE_FILE, "gol-wire")["csan"])


def build_clock() -> Csan:
    """Same ladder closed into a ring; ticks with period six."""
    return csan_from_json(_load_doc(_CLOCK_FILE, "gol-clock")["csan"])


def clock_initial() -> tuple[int, ...]:
    """Canonical seed of the ring's period-six orbit."""
    doc = _load_doc(_CLOCK_FILE, "gol-clock")
    return tuple(int(s) for s in doc["initial"])


def build_nor_gadget() -> Gadget:
    """Two input stubs, a pacing ring, and two output stubs around the
    collector; recorded runs re-emit the negated disjunction."""
    doc = _load_doc(_NOR_FILE, "gol-nor-gadget")
    try:
        csan = csan_from_json(doc["csan"])
        iface = make_interface(doc["interface"]["inputs"], doc["interface"]["outputs"])
        ins = tuple({str(k): int(v) for k, v in m.items()} for m in doc["in_copies"])
        outs = tuple({str(k): int(v) for k, v in m.items()} for m in doc["out_copies"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGolFixtureError(f"bad gadget document: {exc}") from exc
    return make_gadget(iface, csan_to_network(csan), ins, outs, csan=csan)


def build_certificate() -> CoherentCertificate:
    """Coherence data for the NOR gadget at time constant six."""
    gd = build_nor_gadget()
    doc = _load_doc(_CERT_FILE, "gol-certificate")
    try:
        states = tuple({str(k): int(v) for k, v in s.items()} for s in doc["state_configs"])
        traces = {
            (int(entry["from"]), int(entry["to"])): tuple(
                {str(k): int(v) for k, v in row.items()} for row in entry["patterns"]
            )
            for entry in doc["standard_traces"]
        }
        context = {int(k): int(v) for k, v in doc["context"].items()}
        orbits = {}
        for cell in doc["pseudo_orbits"]:
            key = (
                tuple(int(s) for s in cell["inputs"]),
                tuple(int(s) for s in cell["next_inputs"]),
                tuple(int(s) for s in cell["outputs"]),
            )
            orbits[key] = pseudo_orbit_from_json(cell["orbit"])
        time = int(doc["time"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidGolFixtureError(f"bad certificate document: {exc}") from exc
    return make_certificate(
        nor_interface(), {NOR_2_2: gd}, states, {NOR_2_2: context}, time, traces, {NOR_2_2: orbits}
    )


def regenerate_gol_fixtures(dest: str | Path | None = None) -> tuple[Path, ...]:
    """Rebuild the four data files from the layout generators.

    Refuses to write anything unless the freshly generated certificate
    verifies in full.
    """
    root = Path(dest) if dest is not None else _DATA_DIR
    root.mkdir(parents=True, exist_ok=True)
    gd = _nor_gadget()
    cert = _assemble_certificate(gd)
    report = verify_certificate(cert)
    if not report.ok:
        raise InvalidGadgetError(f"generated data is unusable: {report.message()}")
    ins, outs = _nor_copies()
    docs = {
        _WIRE_FILE: {
            "format": "gol-wire",
            "version": 1,
            "csan": _lifelike_doc(24, _ladder_edges(6, ring=False)),
        },
        _CLOCK_FILE: {
            "format": "gol-clock",
            "version": 1,
            "csan": _lifelike_doc(24, _ladder_edges(6, ring=True)),
            "initial": list(_clock_initial()),
        },
        _NOR_FILE: {
            "format": "gol-nor-gadget",
            "version": 1,
            "interface": {"inputs": list(RELAY_NAMES), "outputs": list(DRIVE_NAMES)},
            "csan": _lifelike_doc(_NOR_SIZE, _nor_edges()),
            "in_copies": [dict(sorted(c.items())) for c in ins],
            "out_copies": [dict(sorted(c.items())) for c in outs],
        },
        _CERT_FILE: {
            "format": "gol-certificate",
            "version": 1,
            "time": SIGNAL_PERIOD,
            "state_configs": [dict(sorted(s.items())) for s in cert.state_configs],
            "standard_traces": [
                {
                    "from": a,
                    "to": b,
                    "patterns": [dict(sorted(r.items())) for r in cert.standard_traces[(a, b)]],
                }
                for a, b in sorted(cert.standard_traces)
            ],
            "context": {
                str(v): s for v, s in sorted(cert.context_configs[NOR_2_2].items())
            },
            "pseudo_orbits": [
                {
                    "inputs": list(q_i),
                    "next_inputs": list(q_ip),
                    "outputs": list(q_o),
                    "orbit": pseudo_orbit_to_json(po),
                }
                for (q_i, q_ip, q_o), po in sorted(cert.pseudo_orbits[NOR_2_2].items())
            ],
        },
    }
    written = []
    for name, doc in docs.items():
        path = root / name
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return tuple(written)


# ---------------------------------------------------------------------------
# Signals on the open wire


def wire_signal(bit: int, steps: int = 5, offset: int = 0) -> PseudoOrbit:
    """Run of one signal entering the wire, entry layer and helper driven.

    Layer p is live at the two steps offset+p and offset+p+1 when the
    bit is set; its helper follows one step behind. The zero signal
    leaves the wire at rest.
    """
    if bit not in (0, 1):
        raise ValueError(f"signal value must be 0 or 1, got {bit!r}")
    configs = []
    for t in range(steps + 1):
        x = [0] * 24
        if bit:
            for p in range(6):
                if t - offset in (p, p + 1):
                    for v in _band(3 * p):
                        x[v] = 1
                if t - offset in (p + 1, p + 2):
                    x[18 + p] = 1
        configs.append(tuple(x))
    return make_pseudo_orbit(configs, (*_band(0), 18))


# ---------------------------------------------------------------------------
# The kit and the compiler


@dataclass
class GolGadgetKit:
    """One bundle of everything the NOR-to-lifelike pipeline needs."""

    rule: FamilySpec
    wire: Csan
    clock: Csan
    nor: Gadget
    certificate: CoherentCertificate


def build_kit() -> GolGadgetKit:
    return GolGadgetKit(
        family_spec("lifelike"),
        build_wire(),
        build_clock(),
        build_nor_gadget(),
        build_certificate(),
    )


def compile_to_gol(
    gn: GNetwork, certificate: CoherentCertificate | None = None
) -> tuple[Csan, BlockEmbedding]:
    """Compile a closed NOR-gate network into a lifelike member.

    The returned labeled network simulates the gate network with six
    host steps per gate step, witnessed by the block embedding.
    """
    gn.validate()
    for gate in gn.gates:
        if gate != NOR_2_2:
            raise InvalidGadgetError(f"gate {gate.name} is not the two-output NOR")
    if not gn.gates:
        emb = BlockEmbedding(SIGNAL_PERIOD, (), ())
        emb.validate(gnetwork_to_network(gn), make_network(2, []))
        return make_csan(2, 0, [], []), emb
    cert = certificate if certificate is not None else build_certificate()
    compiled = compile_gnetwork_detailed(gn, cert)
    if compiled.gadget.csan is None:
        raise InvalidGadgetError("certificate gadgets carry no labeled structure")
    return compiled.gadget.csan, compiled.embedding
