"""Block simulation of one network by another.

A simulating network G runs T steps per simulated step of F. Each
F-node owns a block of G-nodes; a state q is written on a block as a
fixed pattern, injective per block. The embedding of an F-configuration
is the union of its block patterns, and correctness means

    embed(F(x)) = G^T(embed(x))   for every configuration x.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .core import (
    ArtifactError,
    Network,
    analyze_orbit,
    check_config,
    iterate,
    step,
)


class InvalidEmbeddingError(ArtifactError, ValueError):
    """Blocks do not partition the host or patterns are not injective."""


@dataclass(frozen=True)
class BlockEmbedding:
    """Assignment of host blocks and per-state patterns to source nodes.

    blocks[v] lists the host nodes owned by source node v; patterns[v][q]
    gives the states written on that block (same order) to encode q.
    time is the host-steps-per-source-step constant T.
    """

    time: int
    blocks: tuple[tuple[int, ...], ...]
    patterns: tuple[tuple[tuple[int, ...], ...], ...]

    def validate(self, source: Network, host: Network) -> None:
        if self.time < 1:
            raise InvalidEmbeddingError("time constant must be >= 1")
        if len(self.blocks) != source.n or len(self.patterns) != source.n:
            raise InvalidEmbeddingError("one block and pattern set per source node")
        seen: set[int] = set()
        for v, block in enumerate(self.blocks):
            if not block:
                raise InvalidEmbeddingError(f"source node {v}: empty block")
            for u in block:
                if not 0 <= u < host.n:
                    raise InvalidEmbeddingError(f"block node {u} out of host range")
                if u in seen:
                    raise InvalidEmbeddingError(f"host node {u} in two blocks")
                seen.add(u)
            pats = self.patterns[v]
            if len(pats) != source.alphabet:
                raise InvalidEmbeddingError(f"source node {v}: need one pattern per state")
            for pat in pats:
                if len(pat) != len(block):
                    raise InvalidEmbeddingError(f"source node {v}: pattern/block length mismatch")
                for s in pat:
                    if not 0 <= s < host.alphabet:
                        raise InvalidEmbeddingError(f"pattern state {s} out of host alphabet")
            if len(set(pats)) != len(pats):
                raise InvalidEmbeddingError(f"source node {v}: patterns not injective")
        if len(seen) != host.n:
            raise InvalidEmbeddingError("blocks do not cover the host network")


def embed(emb: BlockEmbedding, host_n: int, x: Sequence[int]) -> tuple[int, ...]:
    """Host configuration encoding the source configuration x."""
    out = [0] * host_n
    for v, s in enumerate(x):
        block = emb.blocks[v]
        pat = emb.patterns[v][s]
        for u, val in zip(block, pat):
            out[u] = val
    return tuple(out)


def project(emb: BlockEmbedding, y: Sequence[int]) -> tuple[int, ...] | None:
    """Decode a host configuration back to source states, None if off-code."""
    out = []
    for v, block in enumerate(emb.blocks):
        got = tuple(y[u] for u in block)
        for q, pat in enumerate(emb.patterns[v]):
            if pat == got:
                out.append(q)
                break
        else:
            return None
    return tuple(out)


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a simulation or certificate check."""

    ok: bool
    mode: str
    checked: int
    failures: tuple[str, ...] = ()
    counterexample: tuple[int, ...] | None = None
    seed: int | None = None

    def message(self) -> str:
        status = "pass" if self.ok else "FAIL"
        extra = f", counterexample {self.counterexample}" if self.counterexample else ""
        return f"{status} ({self.mode}, {self.checked} configurations checked{extra})"


def verify_simulation(
    source: Network,
    host: Network,
    emb: BlockEmbedding,
    mode: str = "exhaustive",
    samples: int = 1000,
    seed: int | None = None,
) -> VerificationReport:
    """Check embed(F(x)) == G^T(embed(x)).

    mode "exhaustive" sweeps all |Q|^n source configurations; mode
    "sample" draws `samples` configurations from a recorded RNG seed.
    """
    emb.validate(source, host)
    if mode == "exhaustive":
        configs = product(range(source.alphabet), repeat=source.n)
        used_seed = None
    elif mode == "sample":
        used_seed = seed if seed is not None else random.SystemRandom().getrandbits(64)
        rng = random.Random(used_seed)
        configs = (
            tuple(rng.randrange(source.alphabet) for _ in range(source.n))
            for _ in range(samples)
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")
    checked = 0
    for x in configs:
        want = embed(emb, host.n, step(source, x))
        got = iterate(host, embed(emb, host.n, x), emb.time)
        checked += 1
        if want != got:
            bad = [u for u in range(host.n) if want[u] != got[u]]
            return VerificationReport(
                False,
                mode,
                checked,
                failures=(f"host nodes {bad} differ after {emb.time} steps",),
                counterexample=tuple(x),
                seed=used_seed,
            )
    return VerificationReport(True, mode, checked, seed=used_seed)


def verify_orbit_embedding(
    source: Network, host: Network, emb: BlockEmbedding
) -> VerificationReport:
    """Simulation check plus periodicity transfer on every source orbit.

    x is periodic for the source iff embed(x) is periodic for the host;
    exhaustive over the source configuration space.
    """
    rep = verify_simulation(source, host, emb, mode="exhaustive")
    if not rep.ok:
        return rep
    failures = []
    checked = 0
    for x in product(range(source.alphabet), repeat=source.n):
        checked += 1
        x = check_config(source, x)
        src_periodic = analyze_orbit(source, x).transient == 0
        host_periodic = analyze_orbit(host, embed(emb, host.n, x)).transient == 0
        if src_periodic != host_periodic:
            failures.append(
                f"config {x}: source periodic={src_periodic}, host periodic={host_periodic}"
            )
    if failures:
        return VerificationReport(False, "exhaustive", checked, failures=tuple(failures))
    return VerificationReport(True, "exhaustive", checked + rep.checked)


def embedding_to_json(emb: BlockEmbedding) -> dict:
    return {
        "format": "embedding",
        "version": 1,
        "time": emb.time,
        "blocks": [list(b) for b in emb.blocks],
        "patterns": [[list(p) for p in pats] for pats in emb.patterns],
    }


def embedding_from_json(data: dict) -> BlockEmbedding:
    if not isinstance(data, dict) or data.get("format") != "embedding":
        raise InvalidEmbeddingError("not an embedding document")
    try:
        return BlockEmbedding(
            data["time"],
            tuple(tuple(b) for b in data["blocks"]),
            tuple(tuple(tuple(p) for p in pats) for pats in data["patterns"]),
        )
    except (KeyError, TypeError) as exc:
        raise InvalidEmbeddingError(f"malformed embedding document: {exc}") from exc
