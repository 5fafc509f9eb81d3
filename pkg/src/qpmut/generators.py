"""Deterministic constructors for the built-in quiver families.

Surface family: for genus g with b boundary components (one marked point on
each), the quiver is assembled from three kinds of building blocks chained
through shared gluing vertices, with a ladder of 2(b-1) extra triangles
spliced in place of a distinguished arrow x -> y when b > 1.  The sphere
case (g = 0) is the bare ladder plus one extra x -> y arrow.

Star family: two hub vertices joined by a double arrow, with three arms of
lengths p-1, q-1, r-1; the potential couples each of the two hub arrows to
two of the arms.

Also provided: the six-vertex quiver with two triangle blades and a pendant
arrow (potential with two 3-cycles and one 6-cycle), and linear fan
triangulations of a disc.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidQuiverError
from .potential import QP, Potential
from .quiver import Arrow, Quiver


@dataclass(frozen=True)
class SurfaceParams:
    g: int
    b: int

    def __post_init__(self):
        if self.g < 0 or self.b < 1 or (self.g, self.b) == (0, 1):
            raise InvalidQuiverError(f"no triangulated surface for (g, b) = ({self.g}, {self.b})")


@dataclass(frozen=True)
class StarParams:
    p: int
    q: int
    r: int

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 2:
            raise InvalidQuiverError("arm parameters must all be at least 2")


def predicted_counts(sp: SurfaceParams) -> tuple[int, int, int]:
    """(vertices, arrows, triangles) for any quiver in the (g, b) class."""
    n = 6 * (sp.g - 1) + 4 * sp.b
    e = 12 * (sp.g - 1) + 7 * sp.b
    t = 4 * (sp.g - 1) + 2 * sp.b
    assert 2 * n == 3 * t + 2 * sp.b and e == 3 * t + sp.b
    return n, e, t


class _Builder:
    """Accumulates vertices, arrows and oriented triangles."""

    def __init__(self):
        self.count = 0
        self.arrows: list[Arrow] = []
        self.triangles: list[tuple[str, str, str]] = []
        self._next_arrow = 0

    def vertex(self) -> int:
        v = self.count
        self.count += 1
        return v

    def arrow(self, s: int, t: int) -> str:
        aid = f"a{self._next_arrow}"
        self._next_arrow += 1
        self.arrows.append(Arrow(aid, s, t))
        return aid

    def triangle(self, e1: str, e2: str, e3: str):
        self.triangles.append((e1, e2, e3))

    def finish(self, extra_terms: dict | None = None) -> QP:
        q = Quiver(self.count, tuple(self.arrows))
        terms = {cycle: Fraction(1) for cycle in self.triangles}
        if extra_terms:
            terms.update(extra_terms)
        return QP(q, Potential.from_dict(terms), reduced=True)


def _left_block(bd: _Builder, glue: int) -> None:
    # 4 own vertices, 9 arrows, 3 triangles; one gluing point
    top = bd.vertex()
    left = bd.vertex()
    mid = bd.vertex()
    bot = bd.vertex()
    t_m = bd.arrow(top, mid)
    t_b = bd.arrow(top, bot)
    l_t = bd.arrow(left, top)
    l_b = bd.arrow(left, bot)
    m_l1 = bd.arrow(mid, left)
    m_l2 = bd.arrow(mid, left)
    b_m = bd.arrow(bot, mid)
    b_g = bd.arrow(bot, glue)
    g_t = bd.arrow(glue, top)
    bd.triangle(l_t, t_m, m_l1)
    bd.triangle(l_b, b_m, m_l2)
    bd.triangle(t_b, b_g, g_t)


def _terminal_block(bd: _Builder, glue: int) -> None:
    # the left block with every arrow reversed
    top = bd.vertex()
    left = bd.vertex()
    mid = bd.vertex()
    bot = bd.vertex()
    m_t = bd.arrow(mid, top)
    b_t = bd.arrow(bot, top)
    t_l = bd.arrow(top, left)
    b_l = bd.arrow(bot, left)
    l_m1 = bd.arrow(left, mid)
    l_m2 = bd.arrow(left, mid)
    m_b = bd.arrow(mid, bot)
    g_b = bd.arrow(glue, bot)
    t_g = bd.arrow(top, glue)
    bd.triangle(m_t, t_l, l_m1)
    bd.triangle(m_b, b_l, l_m2)
    bd.triangle(t_g, g_b, b_t)


def _middle_block(bd: _Builder, g1: int, g2: int) -> None:
    # 5 own vertices, 12 arrows, 4 triangles; two gluing points
    p = bd.vertex()
    top = bd.vertex()
    mid = bd.vertex()
    q = bd.vertex()
    r = bd.vertex()
    p_t = bd.arrow(p, top)
    p_q = bd.arrow(p, q)
    t_m = bd.arrow(top, mid)
    t_r = bd.arrow(top, r)
    g1_p = bd.arrow(g1, p)
    m_p = bd.arrow(mid, p)
    m_q = bd.arrow(mid, q)
    g2_t = bd.arrow(g2, top)
    q_g1 = bd.arrow(q, g1)
    q_r = bd.arrow(q, r)
    r_m = bd.arrow(r, mid)
    r_g2 = bd.arrow(r, g2)
    bd.triangle(g1_p, p_q, q_g1)
    bd.triangle(m_p, p_t, t_m)
    bd.triangle(q_r, r_m, m_q)
    bd.triangle(t_r, r_g2, g2_t)


def _odd_middle_block(bd: _Builder, g1: int, g2: int) -> tuple[int, int]:
    # middle-pair block for odd genus; contains the x -> y arrow internally
    p = bd.vertex()
    top = bd.vertex()
    q = bd.vertex()
    r = bd.vertex()
    x = bd.vertex()
    y = bd.vertex()
    p_t = bd.arrow(p, top)
    p_q = bd.arrow(p, q)
    t_y = bd.arrow(top, y)
    t_r = bd.arrow(top, r)
    g1_p = bd.arrow(g1, p)
    x_q = bd.arrow(x, q)
    bd.arrow(x, y)
    y_p = bd.arrow(y, p)
    g2_t = bd.arrow(g2, top)
    q_g1 = bd.arrow(q, g1)
    q_r = bd.arrow(q, r)
    r_x = bd.arrow(r, x)
    r_g2 = bd.arrow(r, g2)
    bd.triangle(g1_p, p_q, q_g1)
    bd.triangle(y_p, p_t, t_y)
    bd.triangle(x_q, q_r, r_x)
    bd.triangle(t_r, r_g2, g2_t)
    return x, y


def _genus_one_core(bd: _Builder) -> tuple[int, int]:
    x = bd.vertex()
    one = bd.vertex()
    two = bd.vertex()
    y = bd.vertex()
    x_1 = bd.arrow(x, one)
    bd.arrow(x, y)
    two_x = bd.arrow(two, x)
    two_y = bd.arrow(two, y)
    d1 = bd.arrow(one, two)
    d2 = bd.arrow(one, two)
    y_1 = bd.arrow(y, one)
    bd.triangle(two_x, x_1, d1)
    bd.triangle(two_y, y_1, d2)
    return x, y


def _splice_ladder(bd: _Builder, x: int, y: int, b: int) -> None:
    """Chain of 2(b-1) triangles joining x to y; replaces an x -> y arrow."""
    us, ms, ws, zs = [x], [], [], [y]
    for i in range(1, b):
        us.append(bd.vertex())
        ms.append(bd.vertex())
        ws.append(bd.vertex())
        zs.append(bd.vertex())
    for i in range(1, b):
        u_prev, u = us[i - 1], us[i]
        m, w = ms[i - 1], ws[i - 1]
        z_prev, z = zs[i - 1], zs[i]
        uu = bd.arrow(u, u_prev)
        diag = bd.arrow(u_prev, m)
        mu = bd.arrow(m, u)
        bd.arrow(m, w)
        wz = bd.arrow(w, z_prev)
        zw = bd.arrow(z, w)
        zz = bd.arrow(z_prev, z)
        bd.triangle(diag, mu, uu)
        bd.triangle(zz, zw, wz)
    bd.arrow(us[b - 1], zs[b - 1])


def build_surface_qp(sp: SurfaceParams) -> QP:
    """Reduced QP of a fixed triangulation of the genus-g surface with b
    boundary components and one marked point per component."""
    g, b = sp.g, sp.b
    bd = _Builder()
    if g == 0:
        # sphere with b holes: the ladder joins two of the holes directly,
        # with one extra arrow closing the outer face
        x = bd.vertex()
        y = bd.vertex()
        _splice_ladder(bd, x, y, b - 1)
        bd.arrow(x, y)
    else:
        if g == 1:
            x, y = _genus_one_core(bd)
        else:
            # junction i joins block i to block i+1; for even genus the
            # middle junction is the x -> y arrow instead of a shared vertex
            right_of: list[int] = []
            left_of: list[int] = []
            x = y = -1
            for j in range(1, g):
                if g % 2 == 0 and j == g // 2:
                    x = bd.vertex()
                    y = bd.vertex()
                    right_of.append(x)
                    left_of.append(y)
                else:
                    v = bd.vertex()
                    right_of.append(v)
                    left_of.append(v)
            if g % 2 == 0:
                bd.arrow(x, y)
            _left_block(bd, right_of[0])
            for i in range(2, g):
                if g % 2 == 1 and 2 * i - 1 == g:
                    x, y = _odd_middle_block(bd, left_of[i - 2], right_of[i - 1])
                else:
                    _middle_block(bd, left_of[i - 2], right_of[i - 1])
            _terminal_block(bd, left_of[g - 2])
        if b > 1:
            # detach the x -> y arrow and splice the ladder in its place
            bd.arrows = [
                a for a in bd.arrows if not (a.source == x and a.target == y)
            ]
            _splice_ladder(bd, x, y, b)
    qp = bd.finish()
    n, e, t = predicted_counts(sp)
    assert (qp.quiver.n, len(qp.quiver.arrows), len(qp.potential.terms)) == (n, e, t)
    return qp


def build_pqr(sp: StarParams) -> QP:
    """Star QP: hubs a = 0 and b = 1, arms of lengths p-1, q-1, r-1.

    Arm vertices are numbered leftmost-arm first: p-arm occupies 2..p,
    q-arm p+1..p+q-1, r-arm p+q..p+q+r-2.  The vertex "labeled j" on an arm
    is the j-th vertex counted from the hub.
    """
    p, q, r = sp.p, sp.q, sp.r
    bd = _Builder()
    hub_a = bd.vertex()
    hub_b = bd.vertex()

    def arm(length: int) -> list[int]:
        verts = [bd.vertex() for _ in range(length)]
        for s, t in zip(verts, verts[1:]):
            bd.arrow(s, t)
        return verts

    p_arm = arm(p - 1)
    q_arm = arm(q - 1)
    r_arm = arm(r - 1)
    alpha1 = bd.arrow(hub_a, p_arm[0])
    alpha2 = bd.arrow(p_arm[0], hub_b)
    beta1 = bd.arrow(hub_a, q_arm[0])
    beta2 = bd.arrow(q_arm[0], hub_b)
    gamma1 = bd.arrow(hub_a, r_arm[0])
    gamma2 = bd.arrow(r_arm[0], hub_b)
    eps = bd.arrow(hub_b, hub_a)
    eta = bd.arrow(hub_b, hub_a)
    terms = {
        (eps, alpha1, alpha2): Fraction(1),
        (eps, beta1, beta2): Fraction(1),
        (eta, alpha1, alpha2): Fraction(1),
        (eta, gamma1, gamma2): Fraction(1),
    }
    return bd.finish(terms)


def pqr_arm_vertex(sp: StarParams, arm: str, index: int) -> int:
    """Vertex id of the index-th vertex (1-based, counted from the hubs) on
    the chosen arm."""
    lengths = {"p": sp.p - 1, "q": sp.q - 1, "r": sp.r - 1}
    if arm not in lengths or not 1 <= index <= lengths[arm]:
        raise InvalidQuiverError(f"no vertex {index} on arm {arm!r}")
    offset = {"p": 0, "q": sp.p - 1, "r": sp.p + sp.q - 2}[arm]
    return 2 + offset + index - 1


def build_x6() -> QP:
    """Six vertices: a center with two triangle blades through doubled
    vertical arrows, plus one pendant arrow into the center.  The potential
    has the two blade 3-cycles and one 6-cycle through the doubles."""
    bd = _Builder()
    top = bd.vertex()
    left = bd.vertex()
    right = bd.vertex()
    center = bd.vertex()
    bot_l = bd.vertex()
    bot_r = bd.vertex()
    bd.arrow(top, center)
    eps1 = bd.arrow(left, bot_l)
    beta1 = bd.arrow(left, bot_l)
    beta2 = bd.arrow(right, bot_r)
    eps2 = bd.arrow(right, bot_r)
    alpha1 = bd.arrow(center, left)
    alpha2 = bd.arrow(center, right)
    gamma1 = bd.arrow(bot_l, center)
    gamma2 = bd.arrow(bot_r, center)
    terms = {
        (alpha1, beta1, gamma1): Fraction(1),
        (alpha2, beta2, gamma2): Fraction(1),
        (alpha1, eps1, gamma1, alpha2, eps2, gamma2): Fraction(1),
    }
    return bd.finish(terms)


def build_disc_fan(points: int) -> QP:
    """Fan triangulation of a disc with the given number of marked points:
    the linear quiver on points-3 vertices, zero potential."""
    if points < 4:
        raise InvalidQuiverError("a disc needs at least 4 marked points to carry a quiver")
    n = points - 3
    bd = _Builder()
    verts = [bd.vertex() for _ in range(n)]
    for s, t in zip(verts, verts[1:]):
        bd.arrow(s, t)
    return bd.finish()
