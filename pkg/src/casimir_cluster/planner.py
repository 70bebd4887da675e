"""Drive schedules that grow ladder and square-lattice H-graphs.

A discrete travel scenario of proper time ``T = 2L / (c s)`` resonates every
pair of half-wave modes with ``k + k' = s`` (and, more weakly, ``k + k' = q s``
for odd ``q >= 3``). Entanglement is only generated at first order when the
sum is odd, so every planned edge joins an even mode to an odd one and all
plans are bipartite by construction.

Square plans are laid out on a grid of rows ``rho``. Row ``rho`` holds four
modes ``A, B, C, D``: ``B + C = p`` is a rung of the central ladder, ``A + B``
and ``C + D`` equal the neighbour primes, and consecutive rows are linked by
the ``p +- 2`` drives (columns B, C) and by closing drives (columns A, D).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bogoliubov import beta_discrete_first_order
from .errors import InvalidArgumentError, PlanInfeasibleError

COLUMNS = ("A", "B", "C", "D")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def segment_duration(length_L: float, speed_c: float, target_sum: int) -> float:
    """Proper time ``2L / (c s)`` that resonates pairs with ``k + k' = s``."""
    return 2 * length_L / (speed_c * target_sum)


def resonance_phase(k: int, target_sum: int) -> float:
    """Free-evolution phase ``omega_k T = 2 pi k / s`` picked up over one segment."""
    return 2 * math.pi * k / target_sum


@dataclass(frozen=True)
class DriveSegment:
    drive_omega: float
    duration_T: float
    repetitions_N: int = 1
    pump_phase: float = 0.0
    label: str = ""
    target_sum: int | None = None
    roles: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.duration_T > 0:
            raise InvalidArgumentError("segment duration must be positive")
        if self.repetitions_N < 1:
            raise InvalidArgumentError("repetitions_N must be >= 1")


@dataclass(frozen=True)
class PlannedEdge:
    k: int
    kp: int
    weight: float
    label: str
    in_lattice: bool = True

    @property
    def pair(self) -> tuple[int, int]:
        return (self.k, self.kp)


@dataclass(frozen=True)
class SpuriousEdge:
    l: int
    lp: int
    relative_weight: float
    q: int
    label: str = ""


@dataclass(frozen=True)
class DrivePlan:
    """Ordered drive segments together with the edges they are expected to create.

    ``grid`` maps ``(rho, column)`` to a mode for square plans; ``node_labels``
    lists every grid position a mode occupies. ``diagnostics`` carries checks
    that the planner surfaces rather than resolves (e.g. closing-sum
    expressions that disagree with the derived ones).
    """

    segments: tuple[DriveSegment, ...]
    predicted_edges: tuple[PlannedEdge, ...]
    spurious_edges: tuple[SpuriousEdge, ...] = ()
    grid: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def nodes(self) -> list[int]:
        modes = {m for e in self.predicted_edges for m in e.pair}
        modes.update(self.grid.values())
        return sorted(modes)

    @property
    def node_labels(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for (rho, col), mode in sorted(self.grid.items()):
            out.setdefault(mode, []).append(f"{col}{rho}")
        return out

    def identifications(self) -> dict[int, list[str]]:
        """Modes that sit at more than one grid position."""
        return {m: labels for m, labels in self.node_labels.items() if len(labels) > 1}

    def segment(self, label: str) -> DriveSegment:
        for seg in self.segments:
            if seg.label == label or label in seg.roles:
                return seg
        raise KeyError(label)

    def edges_for(self, label: str) -> list[tuple[int, int]]:
        return sorted(e.pair for e in self.predicted_edges if e.label == label)

    def to_json(self) -> str:
        payload = {
            "segments": [asdict(s) for s in self.segments],
            "predicted_edges": [asdict(e) for e in self.predicted_edges],
            "spurious_edges": [asdict(e) for e in self.spurious_edges],
            "grid": {f"{col}{rho}": m for (rho, col), m in sorted(self.grid.items())},
            "diagnostics": self.diagnostics,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_dot(self, name: str = "plan") -> str:
        lines = [f"graph {name} {{"]
        for mode in self.nodes:
            labels = self.node_labels.get(mode)
            text = f"{mode}" + (f" ({', '.join(labels)})" if labels else "")
            lines.append(f'  {mode} [label="{text}"];')
        for e in sorted(self.predicted_edges, key=lambda e: (e.k, e.kp, e.label)):
            style = "solid" if e.in_lattice else "dashed"
            lines.append(f'  {e.k} -- {e.kp} [label="{e.label}", weight="{e.weight:.6g}", '
                         f"style={style}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _central_weight(p: int) -> float:
    k = (p - 1) // 2
    return math.sqrt(k * (p - k)) / p ** 3


def weight_deviation(p: int, k: int) -> float:
    """Relative shortfall ``|B_k - B_max| / B_max`` of pair ``(k, p - k)``."""
    return 1.0 - math.sqrt(k * (p - k)) / p ** 3 / _central_weight(p)


def lambda_from_Lambda(p: int, Lambda: float) -> int:
    """Largest half-width ``w`` whose pairs all lie within ``Lambda`` of the peak weight.

    A pair ``(k, p - k)`` is inside the window when ``|p/2 - k| <= w``.
    """
    if not 0 < Lambda < 1:
        raise InvalidArgumentError(f"Lambda must lie in (0, 1), got {Lambda}")
    if p < 3:
        return 0
    best = 0
    for w in range(1, p // 2 + 1):
        ks = [k for k in range(1, p) if abs(p / 2 - k) <= w]
        if all(weight_deviation(p, k) <= Lambda for k in ks):
            best = w
        else:
            break
    return best


@dataclass(frozen=True)
class UniformityFilter:
    """Keeps only modes whose pair weights stay within ``Lambda`` of the maximum.

    ``overrides`` fixes the half-width for particular sums instead of deriving
    it from ``Lambda``.
    """

    Lambda: float
    overrides: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not 0 < self.Lambda < 1:
            raise InvalidArgumentError(f"Lambda must lie in (0, 1), got {self.Lambda}")
        for _, w in self.overrides:
            if w < 1:
                raise InvalidArgumentError("lambda_p must be >= 1")

    def lambda_p(self, p: int) -> int:
        return dict(self.overrides).get(p, lambda_from_Lambda(p, self.Lambda))

    def admits(self, p: int, k: int) -> bool:
        return abs(p / 2 - k) <= self.lambda_p(p)


def _check_central_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or p < 7 or p % 2 == 0 or not is_prime(p):
        raise InvalidArgumentError(f"p must be an odd prime >= 7, got {p!r}")


def _segment(L: float, c: float, s: int, label: str, roles=None) -> DriveSegment:
    T = segment_duration(L, c, s)
    return DriveSegment(drive_omega=2 * math.pi / T, duration_T=T, label=label,
                        target_sum=s, roles=tuple(roles or (label,)))


def spurious_edges(p: int, q_max: int, cutoff: int) -> list[SpuriousEdge]:
    """Pairs ``l < l' <= cutoff`` with ``l + l' = q p`` for odd ``3 <= q <= q_max``.

    Weights are relative to the best ``q = 1`` pair, using
    ``sqrt(l l') / (q p)^3`` for both.
    """
    if q_max < 3 or q_max % 2 == 0:
        raise InvalidArgumentError(f"q_max must be odd and >= 3, got {q_max}")
    w_max = _central_weight(p)
    out = []
    for q in range(3, q_max + 1, 2):
        s = q * p
        for l in range(max(1, s - cutoff), (s + 1) // 2):
            lp = s - l
            w = math.sqrt(l * lp) / s ** 3
            out.append(SpuriousEdge(l, lp, w / w_max, q, ""))
    return out


def max_spurious_ratio(p: int, q: int) -> float:
    """Largest relative weight at harmonic ``q`` with no mode cutoff."""
    s = q * p
    l = (s - 1) // 2
    return math.sqrt(l * (s - l)) / s ** 3 / _central_weight(p)


def plan_ladder(p: int, length_L: float = 1.0, speed_c: float = 1.0,
                filter: UniformityFilter | None = None, h: float = 0.01) -> DrivePlan:
    """Three segments at sums ``p``, ``p - 2`` and ``p + 2`` building a ladder graph.

    Without a filter every pair with positive modes is kept; with one, both
    endpoints must satisfy ``|p/2 - k| <= lambda_p``.
    """
    _check_central_prime(p)
    window = (lambda k: filter.admits(p, k)) if filter else (lambda k: True)
    segments, edges = [], []
    for s, label in ((p, "T1"), (p - 2, "T1'"), (p + 2, "T1''")):
        segments.append(_segment(length_L, speed_c, s, label))
        for k in range(1, (s + 1) // 2):
            if window(k) and window(s - k):
                edges.append(PlannedEdge(k, s - k, beta_discrete_first_order(k, s - k, h), label))
    diag = {"p": p, "lambda_p": filter.lambda_p(p) if filter else None}
    return DrivePlan(tuple(segments), tuple(edges), diagnostics=diag)


def square_row(p: int, p_minus: int, p_plus: int, rho: int) -> dict[str, int]:
    """Modes of row ``rho``; rows alternate which side of ``p/2`` column B sits on."""
    o = 4 * rho + 1
    if rho % 2 == 0:
        b, c = (p - o) // 2, (p + o) // 2
        a, d = p_plus - b, p_minus - c
    else:
        b, c = (p + o) // 2, (p - o) // 2
        a, d = p_minus - b, p_plus - c
    return {"A": a, "B": b, "C": c, "D": d}


def printed_closing_sums(p: int, p_minus: int, p_plus: int) -> tuple[int, int]:
    """Closing sums written as ``p + D' - D'' - 2`` and ``p - D' + D'' + 2``."""
    d1, d2 = p - p_minus, p_plus - p
    return (p + d1 - d2 - 2, p - d1 + d2 + 2)


def _row_ok(p, p_minus, p_plus, rho, row, filter) -> bool:
    if min(row.values()) < 1:
        return False
    if filter is None:
        return True
    sums = {"A": p_plus, "D": p_minus} if rho % 2 == 0 else {"A": p_minus, "D": p_plus}
    return (filter.admits(p, row["B"]) and filter.admits(p, row["C"])
            and filter.admits(sums["A"], row["A"]) and filter.admits(sums["D"], row["D"]))


def plan_square(p: int, p_minus: int, p_plus: int, length_L: float = 1.0, speed_c: float = 1.0,
                filter: UniformityFilter | None = None, h: float = 0.01,
                q_max: int = 3, max_rows: int | None = None) -> DrivePlan:
    """Square-lattice plan around the ladder of ``p`` using neighbour primes.

    The rows kept are the contiguous run around ``rho = 0`` whose four modes
    are positive and pass the filter windows (``max_rows`` caps the run).
    Closing drives link consecutive A and D modes; their sums are derived
    from the grid and compared with the printed expressions in
    ``diagnostics``. Segments sharing a sum are merged and list every role.
    Predicted edges are all pairs of plan modes resonant with some segment;
    those not on the grid are marked ``in_lattice=False``.

    Raises:
        InvalidArgumentError: bad primes or ordering.
        PlanInfeasibleError: fewer than two admissible rows, so nothing closes.
    """
    _check_central_prime(p)
    if p_minus == p_plus:
        raise InvalidArgumentError("p_minus and p_plus must differ")
    for q in (p_minus, p_plus):
        if q < 3 or q % 2 == 0 or not is_prime(q):
            raise InvalidArgumentError(f"neighbour {q} is not an odd prime")
    if not p_minus < p < p_plus:
        raise InvalidArgumentError(f"need p_minus < p < p_plus, got {p_minus}, {p}, {p_plus}")

    def ok(rho):
        return _row_ok(p, p_minus, p_plus, rho, square_row(p, p_minus, p_plus, rho), filter)

    if not ok(0):
        raise PlanInfeasibleError(f"central row of p={p} is outside the filter windows")
    lo = hi = 0
    while ok(hi + 1):
        hi += 1
    while ok(lo - 1):
        lo -= 1
    if max_rows is not None:
        # trim the longer side first so the patch stays centred on rho = 0
        while hi - lo + 1 > max(max_rows, 1):
            if hi >= -lo:
                hi -= 1
            else:
                lo += 1
    if hi == lo:
        raise PlanInfeasibleError(
            "only one admissible row: no closing drives can link the A/D columns")

    grid = {}
    for rho in range(lo, hi + 1):
        for col, mode in square_row(p, p_minus, p_plus, rho).items():
            grid[(rho, col)] = mode

    lattice_pairs: dict[tuple[int, int], int] = {}
    closing_sums: dict[str, set[int]] = {"A": set(), "D": set()}

    def link(a, b):
        pair = (min(a, b), max(a, b))
        lattice_pairs[pair] = a + b

    for rho in range(lo, hi + 1):
        row = [grid[(rho, col)] for col in COLUMNS]
        link(row[0], row[1]); link(row[1], row[2]); link(row[2], row[3])
        if rho < hi:
            for col in COLUMNS:
                a, b = grid[(rho, col)], grid[(rho + 1, col)]
                link(a, b)
                if col in closing_sums:
                    closing_sums[col].add(a + b)

    derived_closing = sorted(closing_sums["A"] | closing_sums["D"])
    roles: dict[int, list[str]] = {}
    for s, name in ((p, "T1"), (p - 2, "T1'"), (p + 2, "T1''"), (p_minus, "T'''"),
                    (p_plus, "T''''")):
        roles.setdefault(s, []).append(name)
    for s in sorted(closing_sums["A"]):
        roles.setdefault(s, []).append("T_IV")
    for s in sorted(closing_sums["D"]):
        roles.setdefault(s, []).append("T_V")
    stray = {s for s in lattice_pairs.values() if s not in roles}
    if stray:  # pragma: no cover - guarded by the row construction
        raise PlanInfeasibleError(f"lattice links with unplanned sums {sorted(stray)}")

    segments = []
    for s, names in roles.items():
        names = list(dict.fromkeys(names))
        segments.append(_segment(length_L, speed_c, s, "+".join(names), names))
    label_of = {seg.target_sum: seg.label for seg in segments}

    modes = sorted(set(grid.values()))
    mode_set = set(modes)
    edges = []
    for i, k in enumerate(modes):
        for kp in modes[i + 1:]:
            s = k + kp
            if s in label_of:
                edges.append(PlannedEdge(k, kp, beta_discrete_first_order(k, kp, h), label_of[s],
                                         in_lattice=(k, kp) in lattice_pairs))

    spurious = []
    for seg in segments:
        for e in spurious_edges(seg.target_sum, q_max, max(modes)):
            if e.l in mode_set and e.lp in mode_set:
                spurious.append(SpuriousEdge(e.l, e.lp, e.relative_weight, e.q, seg.label))

    printed = printed_closing_sums(p, p_minus, p_plus)
    diag = {
        "p": p, "p_minus": p_minus, "p_plus": p_plus,
        "delta_minus": p - p_minus, "delta_plus": p_plus - p,
        "rows": [lo, hi],
        "derived_closing_sums": derived_closing,
        "printed_closing_sums": list(printed),
        "closing_sums_match_printed": sorted(set(printed)) == derived_closing,
        "lambda": ({str(s): filter.lambda_p(s) for s in (p, p_minus, p_plus)} if filter else None),
    }
    return DrivePlan(tuple(segments), tuple(edges), tuple(spurious), grid, diag)


def equalize_repetitions(plan: DrivePlan, target_r: float) -> dict[str, int]:
    """Repetitions per segment so its strongest lattice edge reaches ``|r| ~ target_r``.

    ``N = round(target_r / |beta cos(theta)|)`` with ``theta = 2 pi k / s``;
    ``target_r = 0`` gives zero repetitions everywhere.
    """
    if target_r < 0:
        raise InvalidArgumentError("target_r must be >= 0")
    out = {}
    for seg in plan.segments:
        per_rep = [abs(e.weight * math.cos(resonance_phase(e.k, seg.target_sum)))
                   for e in plan.predicted_edges if e.label == seg.label and e.in_lattice]
        if not per_rep or max(per_rep) == 0:
            out[seg.label] = 0
            continue
        out[seg.label] = int(round(target_r / max(per_rep)))
    return out
