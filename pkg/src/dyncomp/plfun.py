"""Exact piecewise-linear functions on the circle.

A PLFunction is a finite breakpoint list ((x, value), ...) with abscissae
strictly increasing in [0, 1); between consecutive breakpoints the function
interpolates linearly, wrapping 1 -> 0.  Everything is ExactScalar, so
lattice operations, Birkhoff sums, extrema, integrals and partitions of
unity come out with no rounding at all.

Odometer analogues are locally constant: CylinderFunction holds one exact
value per level-n cylinder and the PL machinery degenerates to vectors.
"""

import bisect
import heapq
import os
from dataclasses import dataclass

from .errors import (
    BreakpointBudget,
    CoverFailure,
    EmptyInput,
    MixedAmbient,
    NoGap,
)
from .scalars import ExactScalar, ONE, ZERO
from .systems import CircleRotation, Odometer
from .regions import CylinderRegion, Region, union_many


def _collinear(p, q, r):
    # q lies on the segment p -> r (abscissae already lifted, increasing)
    (xp, vp), (xq, vq), (xr, vr) = p, q, r
    return ((vq - vp) * (xr - xq) - (vr - vq) * (xq - xp)).sign() == 0


def _prune(pts):
    first_v = pts[0][1]
    if all(v == first_v for _, v in pts):
        return [(ZERO, first_v)]
    stack = []
    for p in pts:
        stack.append(p)
        while len(stack) >= 3 and _collinear(stack[-3], stack[-2], stack[-1]):
            del stack[-2]
    # the seam: first and last points may be redundant against wrapped neighbours
    changed = True
    while changed and len(stack) >= 3:
        changed = False
        xf, vf = stack[0]
        if _collinear(stack[-2], stack[-1], (xf + ONE, vf)):
            stack.pop()
            changed = True
            if len(stack) < 3:
                break
        xl, vl = stack[-1]
        if _collinear((xl - ONE, vl), stack[0], stack[1]):
            stack.pop(0)
            changed = True
    return stack


class PLFunction:
    """Continuous piecewise-linear function on the circle, canonical form.

    Collinear breakpoints are pruned on construction, so equal functions
    have identical breakpoint tuples; constants normalize to ((0, c),).
    """

    __slots__ = ("breakpoints", "_xs")

    def __init__(self, breakpoints):
        pts = [(ExactScalar.coerce(x), ExactScalar.coerce(v)) for x, v in breakpoints]
        if not pts:
            raise EmptyInput("a PL function needs at least one breakpoint")
        pts.sort(key=lambda p: p[0])
        if pts[0][0].sign() < 0 or (pts[-1][0] - ONE).sign() >= 0:
            raise ValueError("breakpoint abscissae must lie in [0, 1)")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if x0 == x1:
                raise ValueError("duplicate breakpoint abscissa %r" % (x0,))
        pts = _prune(pts)
        object.__setattr__(self, "breakpoints", tuple(pts))
        object.__setattr__(self, "_xs", tuple(p[0] for p in pts))

    def __setattr__(self, name, value):
        raise AttributeError("PLFunction is immutable")

    @classmethod
    def constant(cls, v) -> "PLFunction":
        return cls([(ZERO, v)])

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        return self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def __repr__(self):
        inner = ", ".join("(%s, %s)" % (x, v) for x, v in self.breakpoints)
        return "PLFunction([%s])" % inner

    def _segment(self, i):
        """Endpoints of segment i in lifted coordinates."""
        bps = self.breakpoints
        xa, va = bps[i]
        if i + 1 < len(bps):
            xb, vb = bps[i + 1]
        else:
            xb, vb = bps[0][0] + ONE, bps[0][1]
        return xa, va, xb, vb

    def _slope(self, i):
        xa, va, xb, vb = self._segment(i)
        return (vb - va) / (xb - xa)

    def evaluate(self, x) -> ExactScalar:
        x = ExactScalar.coerce(x).frac()
        bps = self.breakpoints
        if len(bps) == 1:
            return bps[0][1]
        if x < bps[0][0]:
            x = x + ONE
            i = len(bps) - 1
        else:
            i = bisect.bisect_right(self._xs, x) - 1
        xa, va, xb, vb = self._segment(i)
        if x == xa:
            return va
        return va + (vb - va) * (x - xa) / (xb - xa)

    def range_bounds(self):
        """(min, max) over the whole circle; attained at breakpoints."""
        vals = [v for _, v in self.breakpoints]
        mn = mx = vals[0]
        for v in vals[1:]:
            if v < mn:
                mn = v
            if mx < v:
                mx = v
        return mn, mx


@dataclass(frozen=True)
class SupportReport:
    """Closure of {f != 0} and the exact level set {f = 1}."""

    support: object
    one_set: object


def support_report(system, f) -> SupportReport:
    if isinstance(f, CylinderFunction):
        nz = [i for i, v in enumerate(f.values) if v.sign() != 0]
        ones = [i for i, v in enumerate(f.values) if v == ONE]
        return SupportReport(CylinderRegion(system, nz), CylinderRegion(system, ones))
    bps = f.breakpoints
    if len(bps) == 1:
        v = bps[0][1]
        sup = Region.empty(system) if v.sign() == 0 else Region.full(system)
        one = Region.full(system) if v == ONE else Region.empty(system)
        return SupportReport(sup, one)
    nz = []
    ones = []
    for i in range(len(bps)):
        xa, va, xb, vb = f._segment(i)
        sa, sb = va.sign(), vb.sign()
        if sa == 0 and sb == 0:
            pass
        elif sa == 0:
            nz.append((xa, xb, False, True))
        elif sb == 0:
            nz.append((xa, xb, True, False))
        elif sa == sb:
            nz.append((xa, xb, True, True))
        else:
            t = va / (va - vb)
            xc = xa + (xb - xa) * t
            nz.append((xa, xc, True, False))
            nz.append((xc, xb, False, True))
        da, db = (va - ONE).sign(), (vb - ONE).sign()
        if da == 0 and db == 0:
            ones.append((xa, xb, True, True))
        elif da == 0:
            ones.append((xa, xa, True, True))
        elif db == 0:
            pass  # recorded by the next segment's left endpoint
        elif da != db:
            t = (va - ONE) / (va - vb)
            xc = xa + (xb - xa) * t
            ones.append((xc, xc, True, True))
    return SupportReport(Region(system, nz).closure(), Region(system, ones))


# -- lattice and linear operations


def _scale(f, c):
    c = ExactScalar.coerce(c)
    return PLFunction([(x, v * c) for x, v in f.breakpoints])


def sum_of(fns) -> PLFunction:
    """Exact sum of many PL functions by one slope-event sweep."""
    fns = list(fns)
    if not fns:
        raise EmptyInput("sum of no functions")
    if len(fns) == 1:
        return fns[0]
    xs = sorted({x for f in fns for x in f._xs})
    x0 = xs[0]
    events = {}
    slopes = []
    total_v = ZERO
    total_s = ZERO
    for fi, f in enumerate(fns):
        total_v = total_v + f.evaluate(x0)
        bps = f.breakpoints
        if len(bps) == 1:
            slopes.append(ZERO)
            continue
        if bps[0][0] == x0:
            s = f._slope(0)
            start = 1
        else:
            s = f._slope(len(bps) - 1)
            start = 0
        slopes.append(s)
        total_s = total_s + s
        for i in range(start, len(bps)):
            events.setdefault(bps[i][0], []).append((fi, i))
    out = [(x0, total_v)]
    prev = x0
    for x in xs[1:]:
        total_v = total_v + total_s * (x - prev)
        for fi, i in events.get(x, ()):
            ns = fns[fi]._slope(i)
            total_s = total_s + ns - slopes[fi]
            slopes[fi] = ns
        out.append((x, total_v))
        prev = x
    return PLFunction(out)


def _min2(f, g) -> PLFunction:
    xs = sorted(set(f._xs) | set(g._xs))
    n = len(xs)
    out = []
    for j, xa in enumerate(xs):
        xb = xs[(j + 1) % n]
        lift = xb if j + 1 < n else xb + ONE
        fa, ga = f.evaluate(xa), g.evaluate(xa)
        fb, gb = f.evaluate(xb), g.evaluate(xb)
        out.append((xa, fa if fa < ga else ga))
        da, db = fa - ga, fb - gb
        if da.sign() * db.sign() < 0:
            t = da / (da - db)
            out.append(((xa + (lift - xa) * t).frac(), fa + (fb - fa) * t))
    return PLFunction(out)


def pl_combine(op: str, operands) -> PLFunction:
    """min | max | sum | difference | scale, all exact.

    Breakpoints of the result come from the operands plus exactly the
    crossing abscissae that min / max introduce.
    """
    operands = list(operands)
    if op == "sum":
        return sum_of(operands)
    if op == "difference":
        f, g = operands
        return sum_of([f, _scale(g, ExactScalar.rational(-1))])
    if op == "scale":
        f, c = operands
        return _scale(f, c)
    if op == "min":
        out = operands[0]
        for g in operands[1:]:
            out = _min2(out, g)
        return out
    if op == "max":
        neg = [_scale(f, ExactScalar.rational(-1)) for f in operands]
        out = neg[0]
        for g in neg[1:]:
            out = _min2(out, g)
        return _scale(out, ExactScalar.rational(-1))
    raise ValueError("unknown PL operation %r" % op)


def translate_fn(system, f, n: int):
    """f composed with the inverse n-th iterate: breakpoints move by +n*theta."""
    n = int(n)
    if isinstance(system, Odometer):
        return f.translate(n)
    if not isinstance(system, CircleRotation):
        raise MixedAmbient("translate_fn needs a circle rotation or odometer")
    if n == 0:
        return f
    shift = system.theta * ExactScalar.rational(n)
    return PLFunction([((x + shift).frac(), v) for x, v in f.breakpoints])


_DEFAULT_BP_CAP = 10**7


def _bp_cap() -> int:
    return int(os.environ.get("DYNCOMP_BP_CAP", _DEFAULT_BP_CAP))


def birkhoff_sum(system, g, N: int) -> PLFunction:
    """Unnormalized sum S_N g = sum_{j<N} g o h^j, by cocycle doubling."""
    if not isinstance(system, CircleRotation):
        raise MixedAmbient("Birkhoff sums are built over circle rotations")
    N = int(N)
    if N < 1:
        raise ValueError("Birkhoff sum needs N >= 1")
    if N * len(g.breakpoints) > _bp_cap():
        raise BreakpointBudget(
            "S_%d would need up to %d breakpoints (cap %d)"
            % (N, N * len(g.breakpoints), _bp_cap())
        )
    S = g
    cur = 1
    for bit in bin(N)[3:]:
        S = sum_of([S, translate_fn(system, S, -cur)])
        cur *= 2
        if bit == "1":
            S = sum_of([S, translate_fn(system, g, -cur)])
            cur += 1
    return S


def global_extrema(f):
    """(min, max, argmin); PL extrema sit at breakpoints."""
    bps = f.breakpoints
    mn = mx = bps[0][1]
    argmin = bps[0][0]
    for x, v in bps[1:]:
        if v < mn:
            mn, argmin = v, x
        if mx < v:
            mx = v
    return mn, mx, argmin


def extrema_on(f, region):
    """(inf, sup) of f over the closure of a circle region."""
    if region.is_empty:
        raise EmptyInput("extrema over an empty region")
    cl = region.closure()
    cands = []
    for lo, hi, _, _ in cl.pieces:
        cands.append(f.evaluate(lo))
        if lo != hi:
            cands.append(f.evaluate(hi.frac()))
    for x, v in f.breakpoints:
        if cl.contains_point(x):
            cands.append(v)
    mn = mx = cands[0]
    for v in cands[1:]:
        if v < mn:
            mn = v
        if mx < v:
            mx = v
    return mn, mx


def integral(system, f) -> ExactScalar:
    """Exact Lebesgue integral: sum of trapezoid areas (cylinder average
    for odometer functions)."""
    if isinstance(f, CylinderFunction):
        tot = ZERO
        for v in f.values:
            tot = tot + v
        return tot / ExactScalar.rational(len(f.values))
    bps = f.breakpoints
    if len(bps) == 1:
        return bps[0][1]
    total = ZERO
    for i in range(len(bps)):
        xa, va, xb, vb = f._segment(i)
        total = total + (va + vb) * (xb - xa) / 2
    return total


# -- bumps and partitions of unity


def bump(F, W) -> PLFunction:
    """Trapezoid equal to 1 on the closed set F, supported strictly inside
    the open set W.

    The ramps run across the middle half of each gap between F and the
    boundary of W, so the support closure keeps a positive distance from
    the boundary.
    """
    if F.system is not W.system:
        raise MixedAmbient("bump needs both regions on one system")
    FC = F.closure()
    if FC.is_empty:
        return PLFunction.constant(ZERO)
    if W.is_full:
        return PLFunction.constant(ONE)
    if not W.contains_region(FC):
        raise NoGap("closed set is not inside the open set")
    if FC.intersects(W.complement().closure()):
        raise NoGap("closed set touches the boundary of the open set")
    pts = []
    for a, b, _, _ in W.logical_arcs():
        arc = Region(W.system, [(a, b, False, False)])
        inside = FC.intersect(arc)
        if inside.is_empty:
            continue
        lo = hi = None
        for c, d, _, _ in inside.logical_arcs():
            if not a < c:
                c, d = c + ONE, d + ONE
            if lo is None or c < lo:
                lo = c
            if hi is None or hi < d:
                hi = d
        ramp_lo = a + (lo - a) / 2
        ramp_hi = b - (b - hi) / 2
        pts.append((ramp_lo.frac(), ZERO))
        pts.append((lo.frac(), ONE))
        if lo != hi:
            pts.append((hi.frac(), ONE))
        pts.append((ramp_hi.frac(), ZERO))
    return PLFunction(pts)


def _support_pieces(system, gs):
    out = []
    sups = []
    for i, g in enumerate(gs):
        sup = support_report(system, g).support
        sups.append(sup)
        for lo, hi, _, _ in sup.pieces:
            out.append((lo, hi, i))
    out.sort(key=lambda t: (t[0], t[1]))
    return out, sups


def min_cascade(system, gs):
    """f_j = min(g_j, 1 - sum_{i<j} f_i), exactly.

    Only earlier functions whose supports meet supp(g_j) can change the
    minimum there, so the running sum is taken over support neighbours;
    the output functions are identical to the naive left-to-right cascade.
    """
    gs = list(gs)
    n = len(gs)
    if n == 0:
        return []
    pieces, _ = _support_pieces(system, gs)
    adj = [set() for _ in range(n)]
    active = []
    for lo, hi, owner in pieces:
        while active and active[0][0] < lo:
            heapq.heappop(active)
        for _, other in active:
            if other != owner:
                adj[owner].add(other)
                adj[other].add(owner)
        heapq.heappush(active, (hi, owner))
    ends = {o for lo, hi, o in pieces if (hi - ONE).sign() == 0}
    zeros = {o for lo, hi, o in pieces if lo.sign() == 0}
    for o1 in ends:
        for o2 in zeros:
            if o1 != o2:
                adj[o1].add(o2)
                adj[o2].add(o1)
    one = PLFunction.constant(ONE)
    fs = []
    for j in range(n):
        nbrs = sorted(i for i in adj[j] if i < j)
        if not nbrs:
            fs.append(gs[j])
            continue
        s = fs[nbrs[0]] if len(nbrs) == 1 else sum_of([fs[i] for i in nbrs])
        fs.append(_min2(gs[j], pl_combine("difference", (one, s))))
    return fs


def partition_of_unity(pairs, C):
    """Bumps for the pairs (F_j, W_j), cascaded so they sum to exactly 1
    on C.

    Requires C inside the union of the F_j; each output vanishes outside
    its W_j and the exact sum is verified to be constant 1 on C.
    """
    pairs = list(pairs)
    system = C.system
    if pairs:
        covered = union_many(system, [F for F, _ in pairs])
        if not covered.contains_region(C):
            raise CoverFailure("target region is not covered by the closed sets")
    elif not C.is_empty:
        raise CoverFailure("no pairs given but the target region is nonempty")
    gs = [bump(F, W) for F, W in pairs]
    fs = min_cascade(system, gs)
    if not C.is_empty:
        total = sum_of(fs) if fs else PLFunction.constant(ZERO)
        mn, mx = extrema_on(total, C)
        if mn != ONE or mx != ONE:
            raise CoverFailure("cascade sum is not constant 1 on the target")
    return fs


# -- odometer degeneration


class CylinderFunction:
    """Locally constant function on an odometer truncation: one exact
    value per level-n cylinder."""

    __slots__ = ("values",)

    def __init__(self, values):
        vals = tuple(ExactScalar.coerce(v) for v in values)
        if not vals:
            raise EmptyInput("a cylinder function needs at least one value")
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("CylinderFunction is immutable")

    @classmethod
    def indicator(cls, region: CylinderRegion) -> "CylinderFunction":
        K = region.system.resolution
        return cls([ONE if i in region.indices else ZERO for i in range(K)])

    def __eq__(self, other):
        if not isinstance(other, CylinderFunction):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return "CylinderFunction([%s])" % ", ".join(str(v) for v in self.values)

    def evaluate(self, index: int) -> ExactScalar:
        return self.values[index % len(self.values)]

    def translate(self, n: int) -> "CylinderFunction":
        K = len(self.values)
        return CylinderFunction([self.values[(i - n) % K] for i in range(K)])

    def add(self, other: "CylinderFunction") -> "CylinderFunction":
        if len(self.values) != len(other.values):
            raise MixedAmbient("cylinder functions live on different truncations")
        return CylinderFunction([a + b for a, b in zip(self.values, other.values)])

    def range_bounds(self):
        mn = mx = self.values[0]
        for v in self.values[1:]:
            if v < mn:
                mn = v
            if mx < v:
                mx = v
        return mn, mx
