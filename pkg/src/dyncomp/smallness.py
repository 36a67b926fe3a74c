"""Smallness constants, thin covers, leftover covers, TSBP separations.

A finite point set F is topologically small with constant m if any m+1
translates of F by distinct powers of the rotation have empty common
intersection.  On the circle and torus this is decided exactly: translates
share a point only when the points involved lie on one orbit, so the
constant is the largest orbit-difference class inside F.  Covers built
here always come with exact re-verification, and a separate checker
re-validates every artifact using region algebra alone.
"""

import bisect
from dataclasses import dataclass
from itertools import combinations, product

from .errors import (
    DuplicateInput,
    EmptyInput,
    MixedAmbient,
    NotContained,
    NotDisjoint,
    PointOutside,
    SearchExhausted,
    UnprovenInput,
)
from .scalars import ExactScalar, ONE, ZERO
from .systems import CircleRotation, Odometer, TorusRotation
from .regions import (
    BoxRegion,
    CylinderRegion,
    Region,
    arc_point_gap,
    inner_approx,
    pairwise_disjoint,
    region_gap,
    translate_region,
    union_many,
)
from .plfun import bump, extrema_on, min_cascade, support_report, sum_of

DEFAULT_DEPTH = 10**4


# -- certificates


@dataclass(frozen=True)
class SmallnessCertificate:
    constant: int
    verdict: str  # "proven" | "bounded-search"
    search_depth: int | None
    witness: tuple  # shifts whose translates share a point (may be empty)


@dataclass(frozen=True)
class ThinCover:
    opens: tuple  # U_j around the covered points
    shifts: tuple  # translate_region(U_j, d_j) <= U, pairwise disjoint
    nbhd: object  # open V >= F whose closure the same cover handles


@dataclass(frozen=True)
class LeftoverCover:
    closed: tuple  # F_j around the covered points
    tighter: tuple  # T_j around the targets
    mids: tuple  # V_j
    opens: tuple  # W_j, pairwise disjoint, total mass < epsilon
    functions: tuple
    shifts: tuple
    epsilon: ExactScalar


def _point_list(system, F):
    if isinstance(system, CircleRotation):
        if isinstance(F, Region):
            pts = F.point_list()
        else:
            pts = tuple(ExactScalar.coerce(x).frac() for x in F)
        return tuple(sorted(set(pts)))
    if isinstance(system, TorusRotation):
        out = {tuple(ExactScalar.coerce(c).frac() for c in p) for p in F}
        return tuple(sorted(out))
    if isinstance(system, Odometer):
        if isinstance(F, CylinderRegion):
            return tuple(sorted(F.indices))
        return tuple(sorted(set(int(i) for i in F)))
    raise MixedAmbient("unsupported system")


def _orbit_classes(system, points):
    """Group points by x ~ y iff y = h^k(x); returns [(rep, [(point, k)])]."""
    classes = []
    for p in points:
        for rep, members in classes:
            k = system.orbit_shift(rep, p)
            if k is not None:
                members.append((p, k))
                break
        else:
            classes.append((p, [(p, 0)]))
    return classes


def distinct_sums_card(d, n) -> int:
    d = list(d)
    n = list(n)
    if len(set(d)) != len(d):
        raise DuplicateInput("shift list has repeats")
    if len(n) != 2 or n[0] == n[1]:
        raise DuplicateInput("need two distinct return times")
    return len({di + nj for di in d for nj in n})


def smallness_constant(system, F, search_depth: int = DEFAULT_DEPTH) -> SmallnessCertificate:
    """Exact smallness constant of a finite point set.

    Circle and torus cases are proven: a common point of translates forces
    all participating points onto one orbit, so the constant is the largest
    orbit class and the witness realigns that class onto its first point.
    Odometer truncations identify shifts modulo the cycle length, so the
    verdict there is only bounded-search.
    """
    points = _point_list(system, F)
    if not points:
        raise EmptyInput("smallness needs a non-empty finite set")
    if isinstance(system, Odometer):
        K = system.resolution
        if search_depth < K:
            raise SearchExhausted(
                "cycle length %d exceeds search depth %d" % (K, search_depth)
            )
        base = points[0]
        witness = tuple(sorted((base - i) % K for i in points))
        return SmallnessCertificate(
            constant=len(points),
            verdict="bounded-search",
            search_depth=K,
            witness=witness,
        )
    classes = _orbit_classes(system, points)
    best = max(classes, key=lambda c: len(c[1]))
    witness = tuple(sorted(-k for _, k in best[1]))
    return SmallnessCertificate(
        constant=len(best[1]),
        verdict="proven",
        search_depth=None,
        witness=witness,
    )


def union_smallness_bound(certs) -> int:
    total = 0
    for cert in certs:
        if cert.verdict != "proven":
            raise UnprovenInput("union bound needs proven certificates")
        total += cert.constant
    return total


def _translate_points(system, points, d):
    if isinstance(system, Odometer):
        K = system.resolution
        return {(p + d) % K for p in points}
    return {system.apply(p, d) for p in points}


def verify_smallness(system, F, cert, window: int = 8):
    """Independent check: witness intersection non-empty, and no
    (constant+1)-family of translates meets within the shift window.

    On a truncated odometer, translation by e and by e + K coincide, so a
    bounded-search certificate there speaks about shifts distinct modulo
    the cycle length; the scan ranges over residues accordingly.
    """
    failures = []
    points = set(_point_list(system, F))
    if cert.witness:
        common = None
        for d in cert.witness:
            img = _translate_points(system, points, d)
            common = img if common is None else (common & img)
        if not common:
            failures.append("witness translates have empty intersection")
        if len(set(cert.witness)) != len(cert.witness):
            failures.append("witness shifts repeat")
        if len(cert.witness) > cert.constant:
            failures.append("witness larger than the constant")
    if isinstance(system, Odometer):
        scan = range(1, min(system.resolution, 2 * window + 1))
    else:
        scan = [e for e in range(-window, window + 1) if e]
    hits = [e for e in scan if points & _translate_points(system, points, e)]
    for combo in combinations([0] + hits, cert.constant + 1):
        common = None
        for d in combo:
            img = _translate_points(system, points, d)
            common = img if common is None else (common & img)
            if not common:
                break
        if common:
            failures.append("translates %r share a point" % (combo,))
            break
    return failures


# -- thin covers


def _min_circle_gap(points):
    """Smallest pairwise distance among distinct circle points, or None."""
    pts = sorted(points)
    if len(pts) < 2:
        return None
    best = None
    for a, b in zip(pts, pts[1:]):
        g = b - a
        if best is None or g < best:
            best = g
    wrap = pts[0] + ONE - pts[-1]
    if wrap < best:
        best = wrap
    return best


class _OrbitHits:
    """Integers m with h^m(rep) inside U, over a growable window.

    nearest_free answers the least |m - k| unused hit, preferring the
    positive side on ties, exactly like scanning e = 0, +1, -1, ...
    and skipping collisions.
    """

    def __init__(self, system, rep, U, lo, hi):
        self.system = system
        self.U = U
        self.rep = rep
        self.theta = system.theta
        self.lo = lo
        self.hi = lo - 1
        self.hits = []
        self.free = []
        self._grow_right(hi)

    def _grow_right(self, new_hi):
        x = (self.rep + (self.hi + 1) * self.theta).frac()
        for m in range(self.hi + 1, new_hi + 1):
            if self.U.contains_point(x):
                self.hits.append(m)
                self.free.append(True)
            x = (x + self.theta).frac()
        self.hi = new_hi

    def _grow_left(self, new_lo):
        add = []
        x = (self.rep + (self.lo - 1) * self.theta).frac()
        for m in range(self.lo - 1, new_lo - 1, -1):
            if self.U.contains_point(x):
                add.append(m)
            x = (x - self.theta).frac()
        add.reverse()
        self.hits = add + self.hits
        self.free = [True] * len(add) + self.free
        self.lo = new_lo

    def nearest_free(self, k, depth):
        while True:
            best = None  # (distance, -is_right, index)
            i = bisect.bisect_left(self.hits, k)
            for j in range(i, len(self.hits)):
                if self.free[j]:
                    best = (self.hits[j] - k, 0, j)
                    break
            for j in range(min(i, len(self.hits)) - 1, -1, -1):
                if self.free[j]:
                    d = k - self.hits[j]
                    if best is None or d < best[0]:
                        best = (d, 1, j)
                    break
            span = max(k - self.lo, self.hi - k, 1)
            if best is not None and best[0] <= min(k - self.lo, self.hi - k):
                self.free[best[2]] = False
                return self.hits[best[2]]
            if span > depth:
                raise SearchExhausted(
                    "no free translate into the target within depth %d" % depth
                )
            self._grow_right(k + 2 * span)
            self._grow_left(k - 2 * span)


def _assign_targets(system, points, U, depth):
    """(target, shift) per point: distinct targets, minimal |shift| scans."""
    classes = _orbit_classes(system, points)
    lookup = {}
    scanners = []
    for ci, (rep, members) in enumerate(classes):
        ks = [k for _, k in members]
        lo, hi = min(ks) - 8, max(ks) + 8
        scanners.append(_OrbitHits(system, rep, U, lo, hi))
        for p, k in members:
            lookup[p] = (ci, k)
    out = []
    for p in points:  # points arrive sorted: deterministic order
        ci, k = lookup[p]
        m = scanners[ci].nearest_free(k, depth)
        d = m - k
        target = system.apply(p, d)
        out.append((target, d))
    return out


def thin_cover(system, F, U, search_depth: int = DEFAULT_DEPTH) -> ThinCover:
    """Open cover of a finite set whose translates sit disjointly inside U.

    Each point x gets the least |d| with h^d(x) in U, skipping shifts whose
    target is already taken; neighborhood radii are half the least pairwise
    target distance, halved again so closures stay disjoint.
    """
    if not isinstance(system, CircleRotation):
        raise MixedAmbient("thin covers are built over circle rotations")
    if U.is_empty:
        raise EmptyInput("target open set is empty")
    points = _point_list(system, F)
    if not points:
        return ThinCover((), (), Region.empty(system))
    assigned = _assign_targets(system, points, U, search_depth)
    targets = [t for t, _ in assigned]
    pair = _min_circle_gap(targets)
    radii = []
    for t, _ in assigned:
        g = arc_point_gap(t, U.complement()) if not U.is_full else ONE
        r = g if pair is None else (pair if pair < g else g)
        radii.append(r / 2 / 2)
    opens = tuple(
        Region(system, [(x - r, x + r, False, False)])
        for (x, r) in zip(points, radii)
    )
    nbhd = union_many(
        system,
        [Region(system, [(x - r / 2, x + r / 2, False, False)])
         for (x, r) in zip(points, radii)],
    )
    return ThinCover(opens, tuple(d for _, d in assigned), nbhd)


def closed_thin_cover(system, F, U, search_depth: int = DEFAULT_DEPTH):
    """Closed shrunken version: closures of the half-radius neighborhoods."""
    cover = thin_cover(system, F, U, search_depth)
    points = _point_list(system, F)
    out = []
    for x, open_j, d in zip(points, cover.opens, cover.shifts):
        (a, b, _, _) = open_j.logical_arcs()[0]
        quarter = (b - a) / 4
        out.append((Region(system, [(a + quarter, b - quarter, True, True)]), d))
    return out


def verify_thin_cover(system, F, U, cover):
    failures = []
    points = _point_list(system, F)
    if len(cover.opens) != len(points) or len(cover.shifts) != len(points):
        failures.append("cover size mismatch")
        return failures
    for x, open_j in zip(points, cover.opens):
        if not open_j.contains_point(x):
            failures.append("a point escapes its covering set")
    images = [translate_region(system, open_j, d)
              for open_j, d in zip(cover.opens, cover.shifts)]
    for img in images:
        if not U.contains_region(img):
            failures.append("a translated cover piece leaves the target")
    if not pairwise_disjoint(system, images):
        failures.append("translated cover pieces overlap")
    if points:
        if not union_many(system, list(cover.opens)).contains_region(cover.nbhd):
            failures.append("thin neighborhood escapes the cover")
        for x in points:
            if not cover.nbhd.contains_point(x):
                failures.append("thin neighborhood misses a point")
                break
    return failures


def verify_closed_thin_cover(system, F, U, items):
    failures = []
    points = _point_list(system, F)
    if points and not items:
        failures.append("empty cover for a non-empty set")
        return failures
    if items:
        covered = union_many(system, [Fj for Fj, _ in items])
        for x in points:
            if not covered.contains_point(x):
                failures.append("a point escapes the closed cover")
                break
        images = [translate_region(system, Fj, d) for Fj, d in items]
        for img in images:
            if not U.contains_region(img):
                failures.append("a translated closed piece leaves the target")
        if not pairwise_disjoint(system, images):
            failures.append("translated closed pieces overlap")
    return failures


# -- leftover covers


def leftover_cover(system, F, U, eps, search_depth: int = DEFAULT_DEPTH) -> LeftoverCover:
    """Cover of a finite set with nested target neighborhoods and a PL
    partition that is exactly 1 on the pulled-back mid sets.

    Around each target t_j (found as in thin_cover) sit W_j > V_j > T_j,
    radii halving, with W_j pairwise disjoint and total mass under eps;
    F_j is the pullback of the quarter-radius arc, the bump of each pair
    (pullback of closure(V_j), pullback of W_j) enters a min-cascade so
    the sum is exactly 1 on the union of the pulled-back closure(V_j).
    """
    eps = ExactScalar.coerce(eps)
    if eps.sign() <= 0:
        raise EmptyInput("epsilon must be positive")
    if not isinstance(system, CircleRotation):
        raise MixedAmbient("leftover covers are built over circle rotations")
    if U.is_empty:
        raise EmptyInput("target open set is empty")
    points = _point_list(system, F)
    if not points:
        return LeftoverCover((), (), (), (), (), (), eps)
    assigned = _assign_targets(system, points, U, search_depth)
    targets = [t for t, _ in assigned]
    pair = _min_circle_gap(targets)
    count = ExactScalar.rational(len(points))
    budget = eps / (count * 2)
    closed = []
    tighter = []
    mids = []
    opens = []
    shifts = []
    pairs = []
    for x, (t, d) in zip(points, assigned):
        g = arc_point_gap(t, U.complement()) if not U.is_full else ONE
        w = g
        if pair is not None and pair < w:
            w = pair
        if budget < w:
            w = budget
        w = w / 2
        W = Region(system, [(t - w, t + w, False, False)])
        V = Region(system, [(t - w / 2, t + w / 2, False, False)])
        T = Region(system, [(t - w / 4, t + w / 4, False, False)])
        Fj = Region(system, [(x - w / 8, x + w / 8, True, True)])
        closed.append(Fj)
        tighter.append(T)
        mids.append(V)
        opens.append(W)
        shifts.append(d)
        pairs.append(
            (translate_region(system, V.closure(), -d),
             translate_region(system, W, -d))
        )
    gs = [bump(Fc, Wc) for Fc, Wc in pairs]
    fs = min_cascade(system, gs)
    cover = LeftoverCover(
        tuple(closed), tuple(tighter), tuple(mids), tuple(opens),
        tuple(fs), tuple(shifts), eps,
    )
    failures = verify_leftover_cover(system, F, U, eps, cover)
    if failures:
        raise RuntimeError("leftover cover postcondition failed: " + "; ".join(failures))
    return cover


def verify_leftover_cover(system, F, U, eps, cover):
    """The five conclusions, re-checked with region algebra and exact extrema."""
    failures = []
    points = _point_list(system, F)
    n = len(cover.functions)
    if not points and n == 0:
        return failures
    covered = union_many(system, list(cover.closed)) if cover.closed else Region.empty(system)
    for x in points:
        if not covered.contains_point(x):
            failures.append("clause 1: a point escapes the closed cover")
            break
    for Fj, T, V, W, d in zip(cover.closed, cover.tighter, cover.mids,
                              cover.opens, cover.shifts):
        img = translate_region(system, Fj, d)
        if not T.contains_region(img):
            failures.append("clause 2: pullback not inside T")
        if not V.contains_region(T.closure()):
            failures.append("clause 2: closure(T) not inside V")
        if not W.contains_region(V.closure()):
            failures.append("clause 2: closure(V) not inside W")
        if not U.contains_region(W):
            failures.append("clause 2: W leaves the target")
    if n:
        total = sum_of(list(cover.functions))
        ones = union_many(
            system,
            [translate_region(system, V.closure(), -d)
             for V, d in zip(cover.mids, cover.shifts)],
        )
        mn, mx = extrema_on(total, ones)
        if mn != ONE or mx != ONE:
            failures.append("clause 3: sum is not 1 on the pulled-back mids")
        for f, W, d in zip(cover.functions, cover.opens, cover.shifts):
            sup = support_report(system, f).support
            if not W.contains_region(translate_region(system, sup, d)):
                failures.append("clause 4: translated support leaves W")
        lo_ok = all(f.range_bounds()[0].sign() >= 0 for f in cover.functions)
        hi_ok = all((f.range_bounds()[1] - ONE).sign() <= 0 for f in cover.functions)
        if not (lo_ok and hi_ok):
            failures.append("clause 4: function range leaves [0, 1]")
    if cover.opens:
        if not pairwise_disjoint(system, list(cover.opens)):
            failures.append("clause 5: W pieces overlap")
        mass = ZERO
        for W in cover.opens:
            mass = mass + W.measure()
        if not mass < ExactScalar.coerce(eps):
            failures.append("clause 5: W mass reaches epsilon")
    return failures


# -- TSBP separations


def _boundary_cert(system, region):
    pts = region.boundary_points()
    if not pts:
        return SmallnessCertificate(1, "proven", None, ())
    return smallness_constant(system, Region.points(system, pts))


def _extend_region(system, R, m):
    if R.is_empty:
        return Region.empty(system)
    arcs = []
    for a, b, _, _ in R.logical_arcs():
        arcs.append((a - m, b + m, False, False))
    return Region(system, arcs)


def _companion_arc(system, room):
    a, b, _, _ = room.logical_arcs()[0]
    mid = (a + b) / 2
    r = (b - a) / 8
    return Region(system, [(mid - r, mid + r, False, False)])


def _tsbp_circle(system, F, K):
    if F.is_empty and K.is_empty:
        U = Region(system, [(ExactScalar.rational(1, 4), ExactScalar.rational(3, 8), False, False)])
        V = Region(system, [(ExactScalar.rational(5, 8), ExactScalar.rational(3, 4), False, False)])
        return U, V
    if F.is_empty:
        room = K.closure().complement()
        if room.is_empty:
            raise NotDisjoint("nothing outside the sets to separate with")
        U = _companion_arc(system, room)
        m = region_gap(U.closure(), K) / 4
        return U, _extend_region(system, K.closure(), m)
    if K.is_empty:
        room = F.closure().complement()
        if room.is_empty:
            raise NotDisjoint("nothing outside the sets to separate with")
        V = _companion_arc(system, room)
        m = region_gap(V.closure(), F) / 4
        return _extend_region(system, F.closure(), m), V
    m = region_gap(F.closure(), K.closure()) / 4
    return (
        _extend_region(system, F.closure(), m),
        _extend_region(system, K.closure(), m),
    )


def _box_axis_arcs(factor, arc_a, arc_b):
    r = Region(factor, [arc_a]).intersect(Region(factor, [arc_b]))
    if r.is_empty:
        return None
    if r.is_full:
        return [(ZERO, ONE, True, False)]
    return [(a, b, lc, hc) for a, b, lc, hc in r.logical_arcs()]

def _intersect_box_lists(system, boxes_a, boxes_b):
    out = []
    for ba in boxes_a:
        for bb in boxes_b:
            per_axis = []
            dead = False
            for ax in range(system.dim):
                arcs = _box_axis_arcs(system.factors[ax], ba[ax], bb[ax])
                if arcs is None:
                    dead = True
                    break
                per_axis.append(arcs)
            if not dead:
                out.extend(tuple(combo) for combo in product(*per_axis))
    return out


def _tsbp_torus(system, F, K):
    if F.is_empty or K.is_empty:
        raise EmptyInput("torus separation needs two non-empty box unions")
    margins = []
    caps = []
    for box in list(F.boxes) + list(K.boxes):
        for ax in range(system.dim):
            lo, hi, _, _ = box[ax]
            caps.append((ONE - (hi - lo)) / 4)
    for bf in F.boxes:
        for bk in K.boxes:
            best = ZERO
            for ax in range(system.dim):
                ra = Region(system.factors[ax], [bf[ax]])
                rb = Region(system.factors[ax], [bk[ax]])
                if ra.intersects(rb):
                    continue
                g = region_gap(ra, rb)
                if best < g:
                    best = g
            if best.sign() == 0:
                raise NotDisjoint("box pair cannot be separated on any axis")
            margins.append(best / 4)
    m = min(margins + [c for c in caps if c.sign() > 0])
    if m.sign() <= 0:
        raise NotDisjoint("boxes leave no room to grow")

    def extend(R):
        boxes = []
        for box in R.boxes:
            boxes.append(tuple((lo - m, hi + m, False, False) for lo, hi, _, _ in box))
        return BoxRegion(system, boxes)

    return extend(F), extend(K)


def _torus_boundary_cert(system, U, window: int = 4):
    """Certificate for a box-union boundary on the torus.

    The boundary splits per axis into face cylinders grid_n x (other axes);
    translates of one cylinder share a point only when the axis-n grid
    translates do, so each cylinder is small with the grid's constant and
    the union is small with the sum (a common point of m+1 translates
    pigeonholes some axis past its grid constant).  A bounded window scan
    re-checks that no larger family meets.
    """
    per_axis = []
    for ax in range(system.dim):
        grid = set()
        for box in U.boxes:
            lo, hi, _, _ = box[ax]
            grid.add(lo.frac())
            grid.add(hi.frac())
        cert = smallness_constant(system.factors[ax], Region.points(system.factors[ax], grid))
        per_axis.append(cert)
    constant = union_smallness_bound(per_axis)
    faces = U.boundary_region().boxes

    def shifted(e):
        return [tuple((lo + e * system.thetas[ax], hi + e * system.thetas[ax], lc, hc)
                      for ax, (lo, hi, lc, hc) in enumerate(box))
                for box in faces]

    hits = [e for e in range(-window, window + 1)
            if e and _intersect_box_lists(system, faces, shifted(e))]
    pool = [0] + hits
    for combo in combinations(pool, constant + 1):
        current = shifted(combo[0])
        for e in combo[1:]:
            current = _intersect_box_lists(system, current, shifted(e))
            if not current:
                break
        if current:
            raise RuntimeError("boundary smallness bound violated in-window")
    return SmallnessCertificate(constant, "proven", None, ())


def tsbp_separate(system, F, K):
    """Disjoint open fattenings with topologically small boundaries.

    Margins are a quarter of the exact gap; the certificate covers the
    boundary of the first output.
    """
    if isinstance(system, Odometer):
        if F.intersects(K):
            raise NotDisjoint("the closed sets meet")
        if F.is_empty and K.is_full:
            raise NotDisjoint("nothing outside the sets to separate with")
        cert = SmallnessCertificate(1, "proven", None, ())
        return F, K, cert
    if isinstance(system, TorusRotation):
        if F.intersects(K):
            raise NotDisjoint("the closed sets meet")
        U, V = _tsbp_torus(system, F, K)
        if U.closure().intersects(V.closure()):
            raise RuntimeError("separation postcondition failed")
        return U, V, _torus_boundary_cert(system, U)
    if F.intersects(K):
        raise NotDisjoint("the closed sets meet")
    U, V = _tsbp_circle(system, F, K)
    if U.closure().intersects(V.closure()):
        raise RuntimeError("separation postcondition failed")
    return U, V, _boundary_cert(system, U)


def tsbp_point_nbhd(system, x, U):
    """Small-boundary neighborhood V of x with closure(V) inside U."""
    if not isinstance(system, CircleRotation):
        raise MixedAmbient("point neighborhoods are built over circle rotations")
    x = ExactScalar.coerce(x).frac()
    if not U.contains_point(x):
        raise PointOutside("the point is not in the open set")
    if U.is_full:
        r = ExactScalar.rational(1, 8)
    else:
        r = arc_point_gap(x, U.complement()) / 2
    V = Region(system, [(x - r, x + r, False, False)])
    if not U.contains_region(V.closure()):
        raise RuntimeError("neighborhood postcondition failed")
    return V, _boundary_cert(system, V)


# -- measure-regular approximations


def regular_inner_approx(system, U, eps):
    """Open V with closure(V) inside U, boundary finite and certified,
    and mass of U minus closure(V) under eps, exactly."""
    eps = ExactScalar.coerce(eps)
    if U.is_empty:
        raise EmptyInput("cannot retract an empty open set")
    if eps.sign() <= 0:
        raise EmptyInput("epsilon must be positive")
    if U.is_full:
        quarter = eps / 4
        A = Region(system, [(ZERO - quarter, quarter, True, True)])
        V = U.minus(A)
    else:
        V = inner_approx(system, U, eps).interior()
    removed = U.minus(V.closure()).measure()
    if not removed < eps:
        raise RuntimeError("inner approximation misses its mass bound")
    if not U.contains_region(V.closure()):
        raise RuntimeError("inner approximation escapes the open set")
    return V, _boundary_cert(system, V)


def regular_outer_approx(system, F, U, eps):
    """Open V between F and U with certified finite boundary and
    mass of V minus F under eps, exactly."""
    eps = ExactScalar.coerce(eps)
    if eps.sign() <= 0:
        raise EmptyInput("epsilon must be positive")
    FC = F.closure()
    if not U.contains_region(FC):
        raise NotContained("the closed set leaves the open set")
    if FC.is_empty:
        if U.is_empty:
            raise NotContained("no room for a companion arc")
        if U.is_full:
            a, b = ZERO, ONE
        else:
            a, b, _, _ = U.logical_arcs()[0]
        mid = (a + b) / 2
        q = b - a
        if eps < q:
            q = eps
        q = q / 8
        V = Region(system, [(mid - q, mid + q, False, False)])
    else:
        pieces = ExactScalar.rational(len(FC.logical_arcs()))
        g = ONE if U.is_full else region_gap(FC, U.complement())
        m = eps / pieces
        if g < m:
            m = g
        V = _extend_region(system, FC, m / 4)
    added = V.minus(FC).measure()
    if not added < eps:
        raise RuntimeError("outer approximation misses its mass bound")
    if not U.contains_region(V.closure()):
        raise RuntimeError("outer approximation escapes the open set")
    if not V.contains_region(FC):
        raise RuntimeError("outer approximation lost the closed set")
    return V, _boundary_cert(system, V)
