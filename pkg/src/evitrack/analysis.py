"""Joint evidential analyses over the connection graph.

The joint frame is the set of explanations of the report picture: which
reports are true and how the true ones partition into time-increasing
chains, one chain per boat. Report trust and anti-link doubts combine
over that frame by Dempster's rule; explanations needing more boats
than allowed fall out as conflict. Everything downstream (path ranking,
count intervals) is bel/pl of subsets of this frame.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .connection import ConnectionGraph
from .evidence import EvidenceInterval, Frame, MassFunction, TotalConflictError, interval
from .params import Params, resolve_params
from .scenario import ReportFilter, Scenario, SchemaError, select_reports


class AnalysisLimitError(ValueError):
    """Exact enumeration would exceed a configured size limit."""


@dataclass(frozen=True)
class JointHypothesis:
    truth: tuple[bool, ...]
    chains: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PathResult:
    chain: tuple[str, ...]
    interval: EvidenceInterval
    rank: int


@dataclass(frozen=True)
class PathRanking:
    paths: tuple[PathResult, ...]
    conflict_k: float
    approximate: bool
    n_subs: int


@dataclass(frozen=True)
class CountResult:
    min_count: int
    intervals: dict[int, EvidenceInterval]


@dataclass
class JointMass:
    """Normalized mass over an enumerated joint frame.

    Focal sets are bitmasks over hypothesis indices; conflict is the
    mass lost to empty intersections, which includes every product
    that would have needed more chains than the frame admits.
    """

    hypotheses: tuple[JointHypothesis, ...]
    masses: dict[int, float]
    conflict: float
    max_count: int

    def _mask_of(self, member: Callable[[JointHypothesis], bool]) -> int:
        mask = 0
        for idx, h in enumerate(self.hypotheses):
            if member(h):
                mask |= 1 << idx
        return mask

    def support(self, member: Callable[[JointHypothesis], bool]) -> float:
        mask = self._mask_of(member)
        return math.fsum(
            w for f, w in self.masses.items() if f & ~mask == 0
        )

    def plausibility(self, member: Callable[[JointHypothesis], bool]) -> float:
        mask = self._mask_of(member)
        return math.fsum(w for f, w in self.masses.items() if f & mask)

    def focal_hypotheses(self, mask: int) -> Iterator[JointHypothesis]:
        idx = 0
        while mask:
            if mask & 1:
                yield self.hypotheses[idx]
            mask >>= 1
            idx += 1


def min_submarines(graph: ConnectionGraph) -> int:
    """Fewest boats explaining all reports as true: minimum path cover
    of the feasibility DAG, via maximum bipartite matching."""
    n = len(graph.reports)
    succ: list[list[int]] = [[] for _ in range(n)]
    for i, j in sorted(graph.edges):
        succ[i].append(j)
    match_to = [-1] * n

    def augment(i: int, seen: set[int]) -> bool:
        for j in succ[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_to[j] == -1 or augment(match_to[j], seen):
                match_to[j] = i
                return True
        return False

    matched = sum(1 for i in range(n) if augment(i, set()))
    return n - matched


def _enumerate_hypotheses(
    n: int, succ_ok: Sequence[frozenset[int]], max_count: int, cap: int
) -> list[JointHypothesis]:
    """All (truth, partition) pairs with at most max_count chains.

    Reports are visited in time order, so appending to a chain keeps it
    increasing; opening chains in visit order makes each partition come
    out exactly once.
    """
    out: list[JointHypothesis] = []
    chains: list[list[int]] = []

    def emit() -> None:
        if len(out) >= cap:
            raise AnalysisLimitError(
                f"joint frame exceeds hypothesis cap ({cap}); "
                "reduce the report set or use beam ranking"
            )
        covered = set()
        for c in chains:
            covered.update(c)
        out.append(
            JointHypothesis(
                truth=tuple(i in covered for i in range(n)),
                chains=tuple(tuple(c) for c in chains),
            )
        )

    def rec(i: int) -> None:
        if i == n:
            emit()
            return
        rec(i + 1)
        for c in chains:
            if i in succ_ok[c[-1]]:
                c.append(i)
                rec(i + 1)
                c.pop()
        if len(chains) < max_count:
            chains.append([i])
            rec(i + 1)
            chains.pop()

    rec(0)
    return out


def _hypotheses_from_chain_sets(
    n: int, chain_sets: Sequence[tuple[tuple[int, ...], ...]]
) -> list[JointHypothesis]:
    out = []
    for chains in chain_sets:
        covered = set()
        for c in chains:
            covered.update(c)
        out.append(
            JointHypothesis(
                truth=tuple(i in covered for i in range(n)),
                chains=chains,
            )
        )
    return out


def _fold_evidence(
    graph: ConnectionGraph,
    hypotheses: Sequence[JointHypothesis],
    focal_cap: int,
    strict_cap: bool,
) -> tuple[dict[int, float], float]:
    """Raw product fold of all report and anti-link simple supports.

    Focal sets are hypothesis bitmasks merged as they collide; mass
    falling on the empty set just disappears and is read back as the
    conflict. Returns normalized masses and k.
    """
    n = len(graph.reports)
    h_count = len(hypotheses)
    full = (1 << h_count) - 1

    truth_masks = [0] * n
    link_masks: dict[tuple[int, int], int] = {key: 0 for key in graph.edges}
    for idx, h in enumerate(hypotheses):
        bit = 1 << idx
        for i, t in enumerate(h.truth):
            if t:
                truth_masks[i] |= bit
        for c in h.chains:
            for a, b in zip(c, c[1:]):
                if (a, b) in link_masks:
                    link_masks[(a, b)] |= bit

    evidences: list[tuple[int, float]] = []
    for i in range(n):
        p = graph.reports[i].trust_p
        if p > 0.0:
            evidences.append((truth_masks[i], p))
    for key in sorted(link_masks):
        q = graph.edges[key].q
        if q > 0.0:
            evidences.append((full & ~link_masks[key], q))

    masses: dict[int, float] = {full: 1.0}
    for focal, p in evidences:
        nxt: dict[int, float] = {}
        for mask, w in masses.items():
            inter = mask & focal
            if p < 1.0:
                nxt[mask] = nxt.get(mask, 0.0) + w * (1.0 - p)
            if inter:
                nxt[inter] = nxt.get(inter, 0.0) + w * p
        if len(nxt) > focal_cap:
            if strict_cap:
                raise AnalysisLimitError(
                    f"joint combination exceeds focal cap ({focal_cap}); "
                    "reduce the report set or use beam ranking"
                )
            # Beam mode keeps the heaviest focals; the dropped mass
            # surfaces as extra conflict, which the approximate flag
            # already warns about.
            keep = sorted(nxt.items(), key=lambda kv: (-kv[1], kv[0]))[:focal_cap]
            nxt = dict(keep)
        masses = nxt
    total = math.fsum(masses.values())
    k = 1.0 - total
    if total <= 0.0:
        raise TotalConflictError(
            "evidence is totally conflicting under this boat-count limit"
        )
    return {mask: w / total for mask, w in masses.items()}, min(max(k, 0.0), 1.0)


def joint_mass(
    scenario: Scenario | None,
    graph: ConnectionGraph,
    params: Params | None = None,
    max_count: int | None = None,
) -> JointMass:
    """Exact joint mass over the frame of at most max_count boats
    (defaults to the minimum that could explain all reports)."""
    params = params or resolve_params(scenario.assumptions if scenario else {})
    n = len(graph.reports)
    if n > params.exact_limit:
        raise AnalysisLimitError(
            f"{n} reports exceed exact_limit ({params.exact_limit}); "
            "use beam ranking or filter the report set"
        )
    if max_count is None:
        max_count = min_submarines(graph)
    succ_ok = _successor_sets(graph)
    hypotheses = _enumerate_hypotheses(n, succ_ok, max_count, params.hypothesis_cap)
    masses, k = _fold_evidence(graph, hypotheses, params.focal_cap, strict_cap=True)
    return JointMass(
        hypotheses=tuple(hypotheses), masses=masses, conflict=k, max_count=max_count
    )


def _successor_sets(graph: ConnectionGraph) -> list[frozenset[int]]:
    n = len(graph.reports)
    succ: list[set[int]] = [set() for _ in range(n)]
    for i, j in graph.edges:
        succ[i].add(j)
    return [frozenset(s) for s in succ]


def _chain_rows(
    graph: ConnectionGraph,
    hypotheses: Sequence[JointHypothesis],
    masses: dict[int, float],
) -> list[tuple[tuple[str, ...], float, float]]:
    """bel/pl for every chain occurring in the frame, plus the no-boat
    row. Batched over focal sets with numpy; a focal supports a chain
    when every member hypothesis carries it and allows the chain when
    any member does."""
    h_count = len(hypotheses)
    chain_ids: dict[tuple[int, ...], int] = {}
    per_hyp: list[list[int]] = []
    empty_idx = -1
    for idx, h in enumerate(hypotheses):
        if not h.chains:
            empty_idx = idx
        ids = []
        for c in h.chains:
            cid = chain_ids.setdefault(c, len(chain_ids))
            ids.append(cid)
        per_hyp.append(ids)
    n_chains = len(chain_ids)

    width = max((len(ids) for ids in per_hyp), default=0)
    pad = np.full((h_count, max(width, 1)), -1, dtype=np.int64)
    for idx, ids in enumerate(per_hyp):
        pad[idx, : len(ids)] = ids

    bel = np.zeros(n_chains, dtype=np.float64)
    pl = np.zeros(n_chains, dtype=np.float64)
    bel_empty = 0.0
    pl_empty = 0.0
    nbytes = (h_count + 7) // 8
    for mask, w in masses.items():
        raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[:h_count]
        members = np.nonzero(bits)[0]
        if empty_idx >= 0 and bits[empty_idx]:
            pl_empty += w
            if len(members) == 1:
                bel_empty += w
        if n_chains:
            flat = pad[members].ravel()
            flat = flat[flat >= 0]
            counts = np.bincount(flat, minlength=n_chains)
            bel += w * (counts == len(members))
            pl += w * (counts > 0)

    rows: list[tuple[tuple[str, ...], float, float]] = []
    if empty_idx >= 0:
        rows.append(((), bel_empty, pl_empty))
    for chain, cid in chain_ids.items():
        ids = tuple(graph.reports[i].id for i in chain)
        rows.append((ids, float(bel[cid]), float(pl[cid])))
    return rows


def _beam_chains(
    graph: ConnectionGraph, beam_width: int
) -> list[tuple[int, ...]]:
    """Best-first chain enumeration by raw weight p_i * prod(p_j(1-q)).

    The weight shrinks monotonically along extensions, so the first
    beam_width chains popped are the globally heaviest ones.
    """
    succ = _successor_sets(graph)
    heap: list[tuple[float, tuple[int, ...]]] = []
    for i, r in enumerate(graph.reports):
        if r.trust_p > 0.0:
            heapq.heappush(heap, (-r.trust_p, (i,)))
    kept: list[tuple[int, ...]] = []
    while heap and len(kept) < beam_width:
        neg_w, chain = heapq.heappop(heap)
        kept.append(chain)
        tail = chain[-1]
        for j in sorted(succ[tail]):
            p = graph.reports[j].trust_p
            step = p * (1.0 - graph.edges[(tail, j)].q)
            if step > 0.0:
                heapq.heappush(heap, (neg_w * step, chain + (j,)))
    return kept


def _beam_hypotheses(
    graph: ConnectionGraph,
    chains: Sequence[tuple[int, ...]],
    max_count: int,
    cap: int,
) -> list[JointHypothesis]:
    """Hypotheses assembled from disjoint beam chains, heaviest-first,
    silently truncated at the cap (the result is approximate anyway)."""
    n = len(graph.reports)
    members = [frozenset(c) for c in chains]
    found: list[tuple[tuple[int, ...], ...]] = [()]
    picked: list[int] = []

    def rec(start: int, used: frozenset[int]) -> None:
        for idx in range(start, len(chains)):
            if len(found) >= cap:
                return
            if used & members[idx]:
                continue
            picked.append(idx)
            found.append(
                tuple(sorted((chains[i] for i in picked), key=lambda c: c[0]))
            )
            if len(picked) < max_count:
                rec(idx + 1, used | members[idx])
            picked.pop()

    rec(0, frozenset())
    return _hypotheses_from_chain_sets(n, found)


def ranked_paths(
    scenario: Scenario | None,
    graph: ConnectionGraph,
    n_subs: int | None = None,
    top_n: int | None = None,
    params: Params | None = None,
    allow_beam: bool = True,
) -> PathRanking:
    """Candidate chains ranked by evidential support under the
    hypothesis of at most n_subs boats.

    Exact up to exact_limit reports; beyond that a beam over the
    heaviest chains is used and the result is flagged approximate.
    """
    params = params or resolve_params(scenario.assumptions if scenario else {})
    if n_subs is None:
        n_subs = max(1, min_submarines(graph))
    if n_subs < 1:
        raise ValueError("n_subs must be at least 1")
    if top_n is not None and top_n < 1:
        raise ValueError("top_n must be at least 1")
    n = len(graph.reports)
    if n == 0:
        return PathRanking(paths=(), conflict_k=0.0, approximate=False, n_subs=n_subs)

    approximate = n > params.exact_limit
    if approximate and not allow_beam:
        raise AnalysisLimitError(
            f"{n} reports exceed exact_limit ({params.exact_limit}); "
            "enable beam ranking to continue"
        )
    if approximate:
        chains = _beam_chains(graph, params.beam_width)
        hypotheses = _beam_hypotheses(
            graph, chains, n_subs, params.hypothesis_cap
        )
    else:
        succ_ok = _successor_sets(graph)
        hypotheses = _enumerate_hypotheses(
            n, succ_ok, n_subs, params.hypothesis_cap
        )
    masses, k = _fold_evidence(
        graph, hypotheses, params.focal_cap, strict_cap=not approximate
    )
    rows = _chain_rows(graph, hypotheses, masses)
    rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
    if top_n is not None:
        rows = rows[:top_n]
    paths = tuple(
        PathResult(chain=chain, interval=EvidenceInterval(s, p), rank=i + 1)
        for i, (chain, s, p) in enumerate(rows)
    )
    return PathRanking(
        paths=paths, conflict_k=k, approximate=approximate, n_subs=n_subs
    )


def count_intervals(
    scenario: Scenario | None,
    graph: ConnectionGraph,
    params: Params | None = None,
) -> CountResult:
    """Evidence intervals for every boat count from zero up to the
    minimum that explains all reports."""
    jm = joint_mass(scenario, graph, params=params)
    top = jm.max_count
    frame = Frame(str(c) for c in range(top + 1))
    count_masks = [0] * (top + 1)
    for idx, h in enumerate(jm.hypotheses):
        count_masks[len(h.chains)] |= 1 << idx
    projected: dict[int, float] = {}
    for mask, w in jm.masses.items():
        image = 0
        for c in range(top + 1):
            if mask & count_masks[c]:
                image |= 1 << c
        projected[image] = projected.get(image, 0.0) + w
    # Accumulation error over many focals can drift past the strict
    # mass tolerance; renormalizing by the true total is a no-op up to
    # float noise.
    total = math.fsum(projected.values())
    m = MassFunction(frame, {mask: w / total for mask, w in projected.items()})
    intervals = {
        c: interval(m, frame.subset([str(c)])) for c in range(top + 1)
    }
    min_count = top
    for c in range(top + 1):
        if intervals[c].plausibility > 0.0:
            min_count = c
            break
    return CountResult(min_count=min_count, intervals=intervals)


def evidence_region(
    scenario: Scenario,
    rect: tuple[float, float, float, float],
    t_window: tuple[int, int] | None = None,
) -> EvidenceInterval:
    """Evidence that at least one boat is behind the reports inside the
    rectangle and window: support 1 - prod(1 - p_i), plausibility 1."""
    _check_rect(scenario, rect)
    flt = ReportFilter(time_window=t_window, region=rect, exclude_flagged=True)
    doubt = 1.0
    for r in select_reports(scenario, flt):
        doubt *= 1.0 - r.trust_p
    return EvidenceInterval(1.0 - doubt, 1.0)


def incident_start(
    scenario: Scenario,
    rect: tuple[float, float, float, float],
    threshold: float,
) -> int | None:
    """Earliest report time at which the rectangle's cumulative support
    reaches the threshold, i.e. when the picture stops being explicable
    as all-false."""
    if not 0.0 < threshold <= 1.0:
        raise SchemaError("threshold", "must be in (0, 1]")
    _check_rect(scenario, rect)
    flt = ReportFilter(region=rect, exclude_flagged=True)
    doubt = 1.0
    for r in select_reports(scenario, flt):
        doubt *= 1.0 - r.trust_p
        if 1.0 - doubt >= threshold:
            return r.time
    return None


def _check_rect(
    scenario: Scenario, rect: tuple[float, float, float, float]
) -> None:
    x0, y0, x1, y1 = rect
    if x0 > x1 or y0 > y1:
        raise SchemaError("rect", "corners must satisfy x0 <= x1 and y0 <= y1")
    bx0, by0, bx1, by1 = scenario.navmap.bounds
    if x0 < bx0 or y0 < by0 or x1 > bx1 or y1 > by1:
        raise SchemaError("rect", "rectangle extends outside map bounds")


def ranking_to_dict(ranking: PathRanking) -> dict:
    return {
        "paths": [
            {
                "chain": list(p.chain),
                "support": p.interval.support,
                "plausibility": p.interval.plausibility,
                "rank": p.rank,
            }
            for p in ranking.paths
        ],
        "conflict_k": ranking.conflict_k,
        "approximate": ranking.approximate,
        "n_subs": ranking.n_subs,
    }


def counts_to_dict(result: CountResult) -> dict:
    return {
        "min_count": result.min_count,
        "intervals": {
            str(c): [iv.support, iv.plausibility]
            for c, iv in sorted(result.intervals.items())
        },
    }
