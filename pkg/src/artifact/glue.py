"""Glueing two networks over a shared dowel, and pseudo-orbit stitching.

A dowel is an abstract node set C split in two halves, injected into
both networks. The glued network keeps C once: nodes of the first half
run the first network's rule, nodes of the second half the second's,
and every dependency is rerouted through the injections. Sequences
that respect each network except on an exempt set can be stitched into
one such sequence for the glued network whenever they agree on the
dowel at every step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    ArtifactError,
    InvalidConfigError,
    Network,
    make_network,
    step,
)
from .csan import Csan, make_csan

Name = str


class InvalidGlueError(ArtifactError, ValueError):
    """Bad dowel, incompatible networks, or unmet glueing hypothesis."""


# ---------------------------------------------------------------------------
# Dowels and the glued node numbering


@dataclass
class Dowel:
    """Shared node set C = c1 + c2 injected into both networks.

    Node names are strings; phi1 and phi2 send every name to a node of
    the first and second network respectively. The two target index
    spaces are separate, so the injections never collide.
    """

    c1: tuple[Name, ...]
    c2: tuple[Name, ...]
    phi1: dict[Name, int]
    phi2: dict[Name, int]

    @property
    def names(self) -> tuple[Name, ...]:
        return self.c1 + self.c2

    def validate(self, n1: int, n2: int) -> None:
        names = self.names
        if any(not isinstance(c, str) for c in names):
            raise InvalidGlueError("dowel node names must be strings")
        if len(set(names)) != len(names):
            raise InvalidGlueError("dowel halves must be disjoint and duplicate-free")
        for phi, n, tag in ((self.phi1, n1, "phi1"), (self.phi2, n2, "phi2")):
            if set(phi.keys()) != set(names):
                raise InvalidGlueError(f"{tag} must be defined exactly on the dowel")
            vals = list(phi.values())
            if len(set(vals)) != len(vals):
                raise InvalidGlueError(f"{tag} must be injective")
            if any(not 0 <= v < n for v in vals):
                raise InvalidGlueError(f"{tag} image outside the network")


def make_dowel(
    c1: Iterable[Name],
    c2: Iterable[Name],
    phi1: Mapping[Name, int],
    phi2: Mapping[Name, int],
) -> Dowel:
    return Dowel(tuple(c1), tuple(c2), dict(phi1), dict(phi2))


@dataclass
class GluedIndex:
    """Deterministic numbering of the glued node set.

    Order: dowel names (first half then second), remaining first-network
    nodes ascending, remaining second-network nodes ascending. origin[i]
    tells which side rules node i and at which original node.
    """

    n: int
    c_index: dict[Name, int]
    v1_index: dict[int, int]
    v2_index: dict[int, int]
    origin: tuple[tuple[int, int], ...]


def glued_numbering(n1: int, n2: int, d: Dowel) -> GluedIndex:
    d.validate(n1, n2)
    img1 = {d.phi1[c]: c for c in d.names}
    img2 = {d.phi2[c]: c for c in d.names}
    c_index = {c: i for i, c in enumerate(d.names)}
    origin: list[tuple[int, int]] = []
    for c in d.c1:
        origin.append((1, d.phi1[c]))
    for c in d.c2:
        origin.append((2, d.phi2[c]))
    v1_index = {}
    for v in range(n1):
        if v in img1:
            v1_index[v] = c_index[img1[v]]
        else:
            v1_index[v] = len(origin)
            origin.append((1, v))
    v2_index = {}
    for v in range(n2):
        if v in img2:
            v2_index[v] = c_index[img2[v]]
        else:
            v2_index[v] = len(origin)
            origin.append((2, v))
    return GluedIndex(len(origin), c_index, v1_index, v2_index, tuple(origin))


def glue_networks(f1: Network, f2: Network, d: Dowel) -> Network:
    """Glued network: dowel once, every dependency rerouted through it."""
    if f1.alphabet != f2.alphabet:
        raise InvalidGlueError("glued networks must share an alphabet")
    num = glued_numbering(f1.n, f2.n, d)
    route = {1: num.v1_index, 2: num.v2_index}
    nets = {1: f1, 2: f2}
    rules = []
    for side, orig in num.origin:
        rule = nets[side].rules[orig]
        rules.append((tuple(route[side][u] for u in rule.deps), rule.table))
    return make_network(f1.alphabet, rules)


# ---------------------------------------------------------------------------
# Pseudo-orbits


@dataclass
class PseudoOrbit:
    """Sequence of configurations respecting F everywhere but on exempt."""

    configs: tuple[tuple[int, ...], ...]
    exempt: frozenset[int]

    @property
    def horizon(self) -> int:
        return len(self.configs) - 1


def make_pseudo_orbit(
    configs: Iterable[Sequence[int]], exempt: Iterable[int] = ()
) -> PseudoOrbit:
    seq = tuple(tuple(x) for x in configs)
    if not seq:
        raise InvalidGlueError("pseudo-orbit needs at least one configuration")
    if any(len(x) != len(seq[0]) for x in seq):
        raise InvalidGlueError("pseudo-orbit configurations must share a length")
    return PseudoOrbit(seq, frozenset(exempt))


@dataclass(frozen=True)
class PseudoOrbitReport:
    ok: bool
    failures: tuple[tuple[int, int, int, int], ...]

    def message(self) -> str:
        if self.ok:
            return "pseudo-orbit respected"
        t, v, want, got = self.failures[0]
        return (
            f"pseudo-orbit broken at t={t}, node {v}: "
            f"expected {want}, found {got} ({len(self.failures)} total)"
        )


def check_pseudo_orbit(net: Network, p: PseudoOrbit) -> PseudoOrbitReport:
    """Verify the step relation at every non-exempt node and time."""
    if any(len(x) != net.n for x in p.configs):
        raise InvalidConfigError("pseudo-orbit does not match the network size")
    if any(not 0 <= s < net.alphabet for x in p.configs for s in x):
        raise InvalidConfigError("pseudo-orbit state outside the alphabet")
    if any(v < 0 or v >= net.n for v in p.exempt):
        raise InvalidConfigError("exempt set outside the node range")
    failures = []
    for t in range(len(p.configs) - 1):
        fx = step(net, p.configs[t])
        nxt = p.configs[t + 1]
        for v in range(net.n):
            if v in p.exempt:
                continue
            if nxt[v] != fx[v]:
                failures.append((t, v, fx[v], nxt[v]))
    return PseudoOrbitReport(not failures, tuple(failures))


def glue_pseudo_orbits(
    f1: Network, f2: Network, d: Dowel, p1: PseudoOrbit, p2: PseudoOrbit
) -> PseudoOrbit:
    """Stitch two compatible pseudo-orbits into one for the glued network.

    The first sequence may be exempt on the second half's image (and
    vice versa) plus private sets X and Y away from the dowel; the
    sequences must agree on the dowel at every step. The result is
    exempt exactly on X union Y, renumbered.
    """
    if len(p1.configs) != len(p2.configs):
        raise InvalidGlueError("pseudo-orbits must have equal length")
    num = glued_numbering(f1.n, f2.n, d)
    img1_c2 = {d.phi1[c] for c in d.c2}
    img2_c1 = {d.phi2[c] for c in d.c1}
    if p1.exempt & {d.phi1[c] for c in d.c1}:
        raise InvalidGlueError("first orbit may not be exempt on the first half")
    if p2.exempt & {d.phi2[c] for c in d.c2}:
        raise InvalidGlueError("second orbit may not be exempt on the second half")
    for t, (x, y) in enumerate(zip(p1.configs, p2.configs)):
        for c in d.names:
            if x[d.phi1[c]] != y[d.phi2[c]]:
                raise InvalidGlueError(
                    f"trace mismatch at t={t}, dowel node {c!r}: "
                    f"{x[d.phi1[c]]} vs {y[d.phi2[c]]}"
                )
    configs = []
    for x, y in zip(p1.configs, p2.configs):
        z = []
        for side, orig in num.origin:
            z.append(x[orig] if side == 1 else y[orig])
        configs.append(tuple(z))
    exempt = {num.v1_index[v] for v in p1.exempt - img1_c2}
    exempt |= {num.v2_index[v] for v in p2.exempt - img2_c1}
    return PseudoOrbit(tuple(configs), frozenset(exempt))


# ---------------------------------------------------------------------------
# Glueing that stays inside a labeled family


def _edge_lookup(c: Csan) -> dict[tuple[int, int], tuple[int, ...]]:
    return dict(zip(c.edges, c.edge_rho))


def _neighbors_of(c: Csan, v: int) -> set[int]:
    out = set()
    for u, w in c.edges:
        if u == v:
            out.add(w)
        elif w == v:
            out.add(u)
    return out


def csan_glue(c1: Csan, c2: Csan, d: Dowel) -> Csan:
    """Glue two labeled networks; the result keeps every local label.

    Requires: the dowel induces the same labeled subgraph in both
    inputs; in the first input, the second half's image touches only
    the dowel; symmetrically in the second input. Each violation is
    reported by name.
    """
    if c1.alphabet != c2.alphabet:
        raise InvalidGlueError("glued networks must share an alphabet")
    d.validate(c1.n, c2.n)
    names = d.names
    look1 = _edge_lookup(c1)
    look2 = _edge_lookup(c2)

    def edge_of(look, phi, a, b):
        u, v = phi[a], phi[b]
        return look.get((min(u, v), max(u, v)))

    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            e1 = edge_of(look1, d.phi1, a, b)
            e2 = edge_of(look2, d.phi2, a, b)
            if (e1 is None) != (e2 is None) or (e1 is not None and e1 != e2):
                raise InvalidGlueError(
                    f"induced dowel subgraphs differ on pair ({a!r}, {b!r})"
                )
    for a in names:
        lam1 = c1.lam[d.phi1[a]]
        lam2 = c2.lam[d.phi2[a]]
        shared = lam1.keys() & lam2.keys()
        if any(lam1[k] != lam2[k] for k in shared):
            raise InvalidGlueError(f"dowel vertex labels differ at {a!r}")
    img1 = {d.phi1[c] for c in names}
    img2 = {d.phi2[c] for c in names}
    for c in d.c2:
        if not _neighbors_of(c1, d.phi1[c]) <= img1:
            raise InvalidGlueError(
                "second-half image must touch only the dowel in the first network"
            )
    for c in d.c1:
        if not _neighbors_of(c2, d.phi2[c]) <= img2:
            raise InvalidGlueError(
                "first-half image must touch only the dowel in the second network"
            )

    num = glued_numbering(c1.n, c2.n, d)
    lam = []
    for side, orig in num.origin:
        lam.append((c1 if side == 1 else c2).lam[orig])
    edges: dict[tuple[int, int], tuple[int, ...]] = {}
    for c, route in ((c1, num.v1_index), (c2, num.v2_index)):
        for (u, v), rho in zip(c.edges, c.edge_rho):
            a, b = route[u], route[v]
            key = (min(a, b), max(a, b))
            if key in edges and edges[key] != rho:
                raise InvalidGlueError(
                    f"conflicting edge labels meet at glued edge {key}"
                )
            edges[key] = rho
    return make_csan(
        c1.alphabet,
        num.n,
        [(u, v, rho) for (u, v), rho in edges.items()],
        lam,
    )


# ---------------------------------------------------------------------------
# Serialization


def dowel_to_json(d: Dowel) -> dict:
    return {
        "format": "dowel",
        "version": 1,
        "C1": list(d.c1),
        "C2": list(d.c2),
        "phi1": dict(d.phi1),
        "phi2": dict(d.phi2),
    }


def dowel_from_json(data: dict) -> Dowel:
    if not isinstance(data, dict) or data.get("format") != "dowel":
        raise InvalidGlueError("not a dowel document")
    try:
        return make_dowel(data["C1"], data["C2"], data["phi1"], data["phi2"])
    except (KeyError, TypeError) as exc:
        raise InvalidGlueError(f"bad dowel document: {exc}") from exc


def pseudo_orbit_to_json(p: PseudoOrbit) -> dict:
    return {
        "format": "pseudoorbit",
        "version": 1,
        "exempt": sorted(p.exempt),
        "configs": [list(x) for x in p.configs],
    }


def pseudo_orbit_from_json(data: dict) -> PseudoOrbit:
    if not isinstance(data, dict) or data.get("format") != "pseudoorbit":
        raise InvalidGlueError("not a pseudo-orbit document")
    try:
        return make_pseudo_orbit(data["configs"], data["exempt"])
    except (KeyError, TypeError) as exc:
        raise InvalidGlueError(f"bad pseudo-orbit document: {exc}") from exc


def save_dowel(d: Dowel, path: str, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dowel_to_json(d), fh, indent=2 if pretty else None)
        fh.write("\n")


def load_dowel(path: str) -> Dowel:
    with open(path, encoding="utf-8") as fh:
        return dowel_from_json(json.load(fh))


def save_pseudo_orbit(p: PseudoOrbit, path: str, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pseudo_orbit_to_json(p), fh, indent=2 if pretty else None)
        fh.write("\n")


def load_pseudo_orbit(path: str) -> PseudoOrbit:
    with open(path, encoding="utf-8") as fh:
        return pseudo_orbit_from_json(json.load(fh))
