"""Randomised conflict-free edge coloring of nearly regular graphs.

Pipeline:

1. split the edges into ``s = ceil(log2 Delta)`` random classes ``E_i`` with
   near-regular class degrees (violations are resampled locally);
2. in every class draw a vertex label ``Z in {1, 2, 3, 4}``, check the degree
   conditions that make the Hall arguments work, resample neighborhoods of
   violating vertices;
3. build a matching ``M_i`` of ``E_i`` saturating labels 1 and 2 and paint it
   with color ``i``;
4. edges still unsatisfied form a sparse residual graph, which gets a proper
   edge coloring in fresh colors; everything left uncolored gets one last
   color.

Randomness is keyed by ``(seed, restart, stage, layer, round)``; a variable
redrawn in round ``r`` takes its value from round ``r``'s stream, so redrawing
one variable never perturbs another.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .edgecolor import greedy_edge_coloring, matching_decomposition, misra_gries
from .graph import Graph
from .matching import Bipartition, HallViolator, Matching, augment_preserving, saturating_matching, maximum_matching
from .verify import UNCOLORED, EdgeColoring, StructuralError, satisfied_mask, verify

log = logging.getLogger(__name__)

__all__ = [
    "PipelineConfig",
    "Decomposition",
    "LayerPlan",
    "RunReport",
    "default_s",
    "layer_epsilon",
    "label_probabilities",
    "decompose_edges",
    "sample_partition",
    "check_partition_events",
    "build_layer_matching",
    "satisfaction_from_layers",
    "layers_coloring",
    "fallback_satisfy",
    "max_d_event_counts",
    "color_nearly_regular",
    "color_nearly_regular_best",
    "target_bound",
]

STAGE_EDGES, STAGE_LABELS, STAGE_MATCH = 0, 1, 2
FALLBACKS = ("vizing", "greedy", "matching")
PROFILES = ("paper", "scaled")
EVENTS = ("S1", "B2", "B13", "S2")


@dataclass(frozen=True)
class PipelineConfig:
    seed: int = 0
    restart: int = 0
    max_rounds: int = 20
    budget_factor: int = 100  # variable redraws per stage, times n
    profile: str = "scaled"
    residual_multiplier: float = 3.0
    fallback: str = "vizing"
    s: int | None = None
    check_all_t: bool = False

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.budget_factor < 1:
            raise ValueError("budget_factor must be >= 1")
        if self.residual_multiplier <= 0:
            raise ValueError("residual_multiplier must be positive")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}")
        if self.s is not None and self.s < 1:
            raise ValueError("s must be >= 1")

    def rng(self, stage: int, layer: int, rnd: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, self.restart, stage, layer, rnd])


def default_s(max_degree: int) -> int:
    """``ceil(log2 Delta)`` in integer arithmetic."""
    return max(1, (max_degree - 1).bit_length())


def target_bound(max_degree: int) -> float:
    """``log2 D + 3 log2 log2 D + 9``."""
    lg = math.log2(max_degree)
    return lg + 3 * math.log2(lg) + 9


@dataclass
class Decomposition:
    s: int
    edge_class: np.ndarray  # class id in [0, s) per edge
    degrees: np.ndarray  # (s, n) class degrees
    strict: bool
    lower: float
    upper: float
    resampled: int = 0
    rounds: int = 0

    def class_edges(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.edge_class == i)

    @property
    def max_deviation(self) -> float:
        """Largest violation of the class-degree window (0 when strict)."""
        over = self.degrees.max() - self.upper
        under = self.lower - self.degrees.min()
        return float(max(0.0, over, under))


@dataclass
class LayerPlan:
    index: int
    labels: np.ndarray  # values 1..4 per vertex
    eps: float
    clamped: bool
    matching: Matching
    edge_ids: np.ndarray  # ids in G of the matching edges
    saturated: np.ndarray  # bool per vertex
    saturating: bool
    violations: int = 0
    resampled: int = 0

    @property
    def skipped(self) -> bool:
        return len(self.edge_ids) == 0


@dataclass
class RunReport:
    s: int
    profile: str
    seed: int
    restart: int = 0
    delta: int = 0
    strict: bool = True
    clamped_layers: int = 0
    saturating_layers: int = 0
    event_violations: int = 0
    resamples: dict = field(default_factory=lambda: {"edges": 0, "partitions": 0, "gate": 0})
    delta_prime: int = 0
    residual_threshold: float = 0.0
    residual_edges: int = 0
    colors: dict = field(default_factory=lambda: {"layers": 0, "fallback": 0, "final": 0, "total": 0})
    fallback: str = "vizing"
    verified: bool = False
    short_circuit: bool = False
    d_event_max: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# --- stage 1: edge decomposition -------------------------------------------

def _class_degrees(G: Graph, edge_class: np.ndarray, s: int) -> np.ndarray:
    n = G.n
    deg = np.bincount(edge_class * n + G.edges[:, 0], minlength=s * n)
    deg += np.bincount(edge_class * n + G.edges[:, 1], minlength=s * n)
    return deg.reshape(s, n)


def decompose_edges(G: Graph, cfg: PipelineConfig = PipelineConfig()) -> Decomposition:
    """Random edge partition into ``s`` classes with class degrees near ``Delta/s``.

    A vertex with some class degree outside ``Delta/s -+ 3 sqrt(Delta)``
    gets all its incident edges redrawn; this repeats until no vertex is bad
    or the round/variable budget runs out (then the result is "relaxed").
    """
    delta = int(G.degrees.max()) if G.n else 0
    if delta < 2:
        raise ValueError("decompose_edges needs max degree >= 2")
    s = cfg.s or default_s(delta)
    upper = delta / s + 3 * math.sqrt(delta)
    lower = delta / s - 3 * math.sqrt(delta)
    edge_class = cfg.rng(STAGE_EDGES, 0, 0).integers(0, s, G.m)
    budget = cfg.budget_factor * G.n
    spent = 0
    rnd = 0
    deg = _class_degrees(G, edge_class, s)
    while True:
        bad = np.flatnonzero(((deg > upper) | (deg < lower)).any(axis=0))
        if bad.size == 0 or rnd >= cfg.max_rounds or spent >= budget:
            break
        rnd += 1
        mark = np.zeros(G.n, dtype=bool)
        mark[bad] = True
        redo = np.flatnonzero(mark[G.edges[:, 0]] | mark[G.edges[:, 1]])
        fresh = cfg.rng(STAGE_EDGES, 0, rnd).integers(0, s, G.m)
        edge_class[redo] = fresh[redo]
        spent += redo.size
        deg = _class_degrees(G, edge_class, s)
    strict = bool(((deg <= upper) & (deg >= lower)).all())
    return Decomposition(s, edge_class, deg, strict, lower, upper, spent, rnd)


# --- stage 2: vertex labels --------------------------------------------------

def layer_epsilon(delta_i: int, profile: str = "scaled") -> tuple[float, bool]:
    """``(eps, clamped)`` with ``eps = sqrt(D) ln D``, clamped to ``D/12`` in the scaled profile."""
    if delta_i < 1:
        return 0.0, False
    eps = math.sqrt(delta_i) * math.log(delta_i)
    if eps / delta_i <= 1 / 12:
        return eps, False
    if profile == "paper":
        raise ValueError(
            f"label probabilities are negative for class max degree {delta_i} "
            "(eps/D > 1/12); use the scaled profile"
        )
    return delta_i / 12, True


def label_probabilities(eps: float, delta_i: int) -> np.ndarray:
    """Probabilities of labels 1..4."""
    r = 3 * eps / delta_i if delta_i else 0.0
    p = np.array([0.25 - r, 0.25, 2 * r, 0.5 - r])
    if p.min() < -1e-12:
        raise ValueError(f"invalid label probabilities {p}")
    return np.clip(p, 0.0, 1.0)


def _labels_from_uniform(u: np.ndarray, probs: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs)
    cum[-1] = 1.0
    return (np.searchsorted(cum, u, side="right") + 1).astype(np.int8)


def sample_partition(i: int, G_i: Graph, cfg: PipelineConfig = PipelineConfig(), rnd: int = 0):
    """``(labels, eps, clamped)`` for layer ``i``; labels are independent per vertex."""
    delta_i = int(G_i.degrees.max()) if G_i.m else 0
    if delta_i == 0:
        return np.full(G_i.n, 4, dtype=np.int8), 0.0, False
    eps, clamped = layer_epsilon(delta_i, cfg.profile)
    probs = label_probabilities(eps, delta_i)
    u = cfg.rng(STAGE_LABELS, i, rnd).random(G_i.n)
    return _labels_from_uniform(u, probs), eps, clamped


def _label_counts(G_i: Graph, labels: np.ndarray):
    a, b = G_i.edges[:, 0], G_i.edges[:, 1]
    n = G_i.n
    la, lb = labels[a], labels[b]

    def count(mask_a, mask_b):
        return np.bincount(a, weights=mask_b, minlength=n) + np.bincount(b, weights=mask_a, minlength=n)

    y1 = count(la == 1, lb == 1)
    y2 = count(la == 2, lb == 2)
    y3 = count(la == 3, lb == 3)
    return y1, y2, y1 + y3


def _event_masks(G_i: Graph, labels: np.ndarray, eps: float) -> dict[str, np.ndarray]:
    """Per-vertex failure masks of the four degree conditions."""
    delta_i = int(G_i.degrees.max()) if G_i.m else 0
    y1, y2, y13 = _label_counts(G_i, labels)
    low = delta_i / 4 - 2 * eps
    high = delta_i / 4 + eps
    return {
        "S1": ~(y1 < low),
        "B2": ~(y2 > low),
        "B13": ~(y13 > high),
        "S2": ~(y2 < high),
    }


def check_partition_events(G_i: Graph, labels: np.ndarray, eps: float) -> list[tuple[int, str]]:
    """``(v, event)`` pairs whose degree condition fails.

    S1: Y1 < D/4 - 2eps, B2: Y2 > D/4 - 2eps, B13: Y13 > D/4 + eps,
    S2: Y2 < D/4 + eps, with Y counting neighbors in G_i by label.
    """
    if G_i.m == 0:
        return []
    masks = _event_masks(G_i, labels, eps)
    out = []
    for v in range(G_i.n):
        for name in EVENTS:
            if masks[name][v]:
                out.append((v, name))
    return out


def _resample_labels(G_i: Graph, i: int, cfg: PipelineConfig, budget: int):
    """Sample labels, then redraw neighborhoods of failing vertices; keep the best state."""
    labels, eps, clamped = sample_partition(i, G_i, cfg, 0)
    if G_i.m == 0:
        return labels, eps, clamped, 0, 0
    delta_i = int(G_i.degrees.max())
    probs = label_probabilities(eps, delta_i)
    indptr, nbr, _ = G_i.csr

    def failing(lab):
        masks = _event_masks(G_i, lab, eps)
        return masks["S1"] | masks["B2"] | masks["B13"] | masks["S2"]

    bad = failing(labels)
    best, best_bad = labels.copy(), int(bad.sum())
    spent = 0
    rnd = 0
    while best_bad and rnd < cfg.max_rounds and spent < budget:
        rnd += 1
        vs = np.flatnonzero(bad)
        redo = np.zeros(G_i.n, dtype=bool)
        starts, stops = indptr[vs], indptr[vs + 1]
        for a, b in zip(starts.tolist(), stops.tolist()):
            redo[nbr[a:b]] = True
        u = cfg.rng(STAGE_LABELS, i, rnd).random(G_i.n)
        labels = labels.copy()
        labels[redo] = _labels_from_uniform(u[redo], probs)
        spent += int(redo.sum())
        bad = failing(labels)
        if int(bad.sum()) < best_bad:
            best, best_bad = labels.copy(), int(bad.sum())
    return best, eps, clamped, best_bad, spent


# --- stage 3: matchings ------------------------------------------------------

def build_layer_matching(G_i: Graph, labels: np.ndarray, rng: np.random.Generator | None = None):
    """``(M, saturating)``: matching in ``G_i[V1 + V3, V2]`` covering ``V1 + V2`` if possible.

    First a matching saturating ``V1`` in ``G_i[V1, V2]`` (Hall), then
    augmenting paths in ``G_i[V1 + V3, V2]`` until maximum (Berge), which
    never unmatches a vertex.  If a Hall condition fails the best matching
    found is returned with ``saturating=False``.

    With ``rng`` the search runs on randomly relabelled vertices, so which
    label-3 vertices end up matched is not tied to vertex ids.
    """
    lab = np.asarray(labels)
    if not (lab == 1).any() and not (lab == 2).any():
        return Matching(), True
    perm = rng.permutation(G_i.n) if rng is not None else np.arange(G_i.n)
    V1 = perm[lab == 1].tolist()
    V2 = perm[lab == 2].tolist()
    V3 = perm[lab == 3].tolist()
    e = G_i.edges
    la, lb = lab[e[:, 0]], lab[e[:, 1]]
    h_mask = ((la == 1) & (lb == 2)) | ((la == 2) & (lb == 1))
    hp_mask = h_mask | ((la == 3) & (lb == 2)) | ((la == 2) & (lb == 3))
    pe = perm[e]
    H = Bipartition(V1, V2, pe[h_mask].tolist())
    first = saturating_matching(H, "left")
    if isinstance(first, HallViolator):
        first = maximum_matching(H)
    Hp = Bipartition(V1 + V3, V2, pe[hp_mask].tolist())
    M = augment_preserving(Hp, first)
    assert first.saturated <= M.saturated
    saturating = M.saturates(V1) and M.saturates(V2)
    inv = np.argsort(perm).tolist()
    return Matching({inv[a]: inv[b] for a, b in M.mate.items()}), saturating


def _matching_edge_ids(G: Graph, M: Matching) -> np.ndarray:
    pairs = [(a, b) for a, b in M.mate.items() if a < b]
    if not pairs:
        return np.zeros(0, dtype=np.int64)
    return np.sort(G.edge_ids(pairs))


def satisfaction_from_layers(G: Graph, layers) -> np.ndarray:
    """Edges satisfied by the layer matchings painted with distinct colors.

    ``uv`` is satisfied iff for some layer it lies in ``M_i`` or exactly one
    of ``u, v`` is covered by ``M_i``.
    """
    sat = np.zeros(G.m, dtype=bool)
    u, v = G.edges[:, 0], G.edges[:, 1]
    for L in layers:
        if L.skipped:
            continue
        t = L.saturated
        sat |= t[u] != t[v]
        sat[L.edge_ids] = True
    return sat


def layers_coloring(G: Graph, layers) -> EdgeColoring:
    c = EdgeColoring.empty(G.m)
    for L in layers:
        c.colors[L.edge_ids] = L.index
    return c


def max_d_event_counts(G: Graph, layers, max_s: int = 14) -> np.ndarray:
    """``max over t in {0,1}^s`` of the number of neighbors ``u`` of ``v`` with ``D(v, u, t)``.

    ``D(v, u, t)``: in every layer, ``t[i] = 0`` and ``u`` has label 3 or 4, or
    ``t[i] = 1`` and ``u`` has label 1, 2 or 3.  Exponential in ``s``; meant
    for small diagnostic runs.
    """
    s = len(layers)
    if s > max_s:
        raise ValueError(f"exhaustive D-event check is limited to s <= {max_s}")
    forced = np.zeros(G.n, dtype=np.int64)
    value = np.zeros(G.n, dtype=np.int64)
    for bit, L in enumerate(layers):
        lab = L.labels
        forced |= (lab != 3).astype(np.int64) << bit
        value |= ((lab == 1) | (lab == 2)).astype(np.int64) << bit
    a, b = G.edges[:, 0], G.edges[:, 1]
    best = np.zeros(G.n, dtype=np.int64)
    for t in range(1 << s):
        ok = ((t ^ value) & forced) == 0
        cnt = np.bincount(a, weights=ok[b], minlength=G.n) + np.bincount(b, weights=ok[a], minlength=G.n)
        np.maximum(best, cnt.astype(np.int64), out=best)
    return best


# --- stage 4: residual ---------------------------------------------------------

def fallback_satisfy(G_res: Graph, fresh_palette: int | list = 0, method: str = "vizing") -> EdgeColoring:
    """Proper edge coloring of the residual graph in fresh colors.

    ``fresh_palette`` is either the first fresh color id or an explicit list
    of color ids long enough for the chosen method.
    """
    if method == "vizing":
        raw = misra_gries(G_res)
    elif method == "greedy":
        raw = greedy_edge_coloring(G_res)
    elif method == "matching":
        raw = matching_decomposition(G_res)
    else:
        raise ValueError(f"unknown fallback {method!r}")
    if G_res.m == 0:
        return EdgeColoring.empty(0)
    # compact to 0..k-1 so the palette size equals the number of colors used
    _, dense = np.unique(raw, return_inverse=True)
    if isinstance(fresh_palette, int):
        return EdgeColoring(dense + fresh_palette)
    pal = np.asarray(fresh_palette, dtype=np.int64)
    if dense.max() >= len(pal):
        raise ValueError("fresh palette too small for the fallback coloring")
    return EdgeColoring(pal[dense])


# --- assembly --------------------------------------------------------------------

def _build_layers(G: Graph, dec: Decomposition, cfg: PipelineConfig, report: RunReport):
    layers = []
    graphs = []
    budget = cfg.budget_factor * G.n
    for i in range(dec.s):
        G_i = G.edge_subgraph(dec.class_edges(i))
        graphs.append(G_i)
        labels, eps, clamped, bad, spent = _resample_labels(G_i, i, cfg, budget)
        report.resamples["partitions"] += spent
        layers.append(_make_layer(G, G_i, i, labels, eps, clamped, bad, spent, cfg.rng(STAGE_MATCH, i, 0)))
    return layers, graphs


def _make_layer(G, G_i, i, labels, eps, clamped, bad, spent, rng=None) -> LayerPlan:
    if G_i.m == 0:
        M, sat_ok = Matching(), True
    else:
        M, sat_ok = build_layer_matching(G_i, labels, rng)
        if bad == 0 and not sat_ok:
            raise AssertionError(f"layer {i}: degree conditions hold but V1+V2 is not saturated")
    saturated = np.zeros(G.n, dtype=bool)
    if M.mate:
        saturated[list(M.mate)] = True
    return LayerPlan(i, labels, eps, clamped, M, _matching_edge_ids(G, M), saturated, sat_ok, bad, spent)


def _residual_degree(G: Graph, sat: np.ndarray) -> np.ndarray:
    un = G.edges[~sat]
    return np.bincount(un.ravel(), minlength=G.n)


def color_nearly_regular(G: Graph, cfg: PipelineConfig = PipelineConfig()):
    """Total conflict-free (closed) coloring of ``G`` and its :class:`RunReport`."""
    deg = G.degrees
    if G.n == 0 or G.m == 0:
        raise StructuralError("graph has no edges")
    if (deg == 0).any():
        raise StructuralError(f"isolated vertex {int(np.flatnonzero(deg == 0)[0])}")
    delta = int(deg.max())
    report = RunReport(s=0, profile=cfg.profile, seed=cfg.seed, restart=cfg.restart,
                       delta=delta, fallback=cfg.fallback)

    if delta <= 4:
        report.short_circuit = True
        coloring = fallback_satisfy(G, 0, cfg.fallback)
        report.delta_prime = delta
        report.residual_edges = G.m
        report.colors = {"layers": 0, "fallback": len(coloring.palette), "final": 0,
                         "total": len(coloring.palette)}
        return _finish(G, coloring, report)

    dec = decompose_edges(G, cfg)
    report.s = dec.s
    report.strict = dec.strict
    report.resamples["edges"] = dec.resampled
    layers, graphs = _build_layers(G, dec, cfg, report)

    threshold = cfg.residual_multiplier * default_s(delta)
    report.residual_threshold = threshold
    sat = satisfaction_from_layers(G, layers)
    rdeg = _residual_degree(G, sat)
    best = (int(rdeg.max()), layers, sat)
    indptr, nbr, _ = G.csr
    budget = cfg.budget_factor * G.n
    spent = 0
    rnd = 0
    while int(rdeg.max()) > threshold and rnd < cfg.max_rounds and spent < budget:
        # a vertex with too many unsatisfied edges redraws the labels of its
        # closed neighborhood in every layer
        rnd += 1
        bad = np.flatnonzero(rdeg > threshold)
        redo = np.zeros(G.n, dtype=bool)
        redo[bad] = True
        for a, b in zip(indptr[bad].tolist(), indptr[bad + 1].tolist()):
            redo[nbr[a:b]] = True
        new_layers = []
        for L, G_i in zip(layers, graphs):
            if G_i.m == 0:
                new_layers.append(L)
                continue
            delta_i = int(G_i.degrees.max())
            u = cfg.rng(STAGE_LABELS, L.index, cfg.max_rounds + rnd).random(G.n)
            labels = L.labels.copy()
            labels[redo] = _labels_from_uniform(u[redo], label_probabilities(L.eps, delta_i))
            bad_i = int(np.any(np.stack(list(_event_masks(G_i, labels, L.eps).values())), axis=0).sum())
            new_layers.append(_make_layer(G, G_i, L.index, labels, L.eps, L.clamped, bad_i, 0,
                                          cfg.rng(STAGE_MATCH, L.index, rnd)))
            spent += int(redo.sum())
        layers = new_layers
        sat = satisfaction_from_layers(G, layers)
        rdeg = _residual_degree(G, sat)
        if int(rdeg.max()) < best[0]:
            best = (int(rdeg.max()), layers, sat)
    report.resamples["gate"] = spent
    _, layers, sat = best

    report.clamped_layers = sum(L.clamped for L in layers)
    report.saturating_layers = sum(L.saturating for L in layers)
    report.event_violations = sum(L.violations for L in layers)
    if cfg.check_all_t:
        report.d_event_max = int(max_d_event_counts(G, layers).max())

    coloring = layers_coloring(G, layers)
    assert np.array_equal(satisfied_mask(G, coloring), sat), "layer bookkeeping disagrees with verifier"
    back = np.flatnonzero(~sat)
    residual = G.edge_subgraph(back)
    report.residual_edges = int(back.size)
    report.delta_prime = int(residual.degrees.max()) if residual.m else 0
    n_layer_colors = len(coloring.palette)

    fb = fallback_satisfy(residual, dec.s, cfg.fallback)
    coloring.colors[back] = fb.colors
    n_fb = len(fb.palette)
    final_color = dec.s + n_fb
    uncolored = coloring.colors == UNCOLORED
    used_final = bool(uncolored.any())
    coloring.colors[uncolored] = final_color
    report.colors = {
        "layers": n_layer_colors,
        "fallback": n_fb,
        "final": int(used_final),
        "total": n_layer_colors + n_fb + int(used_final),
    }
    return _finish(G, coloring, report)


def _finish(G: Graph, coloring: EdgeColoring, report: RunReport):
    rep = verify(G, coloring, "closed")
    if not rep.conflict_free:
        raise RuntimeError(f"internal error: {len(rep.unsatisfied)} edges unsatisfied after assembly")
    assert rep.colors_used == report.colors["total"]
    report.verified = True
    log.debug("colored %r with %d colors", G, report.colors["total"])
    return coloring, report


def color_nearly_regular_best(G: Graph, cfg: PipelineConfig = PipelineConfig(), restarts: int = 1):
    """Best (fewest colors) of ``restarts`` independent runs; earliest wins ties."""
    best = None
    for r in range(max(1, restarts)):
        run_cfg = PipelineConfig(**{**asdict(cfg), "restart": cfg.restart + r})
        result = color_nearly_regular(G, run_cfg)
        if best is None or result[1].colors["total"] < best[1].colors["total"]:
            best = result
    return best
