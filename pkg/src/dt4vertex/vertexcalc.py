"""The analytic core: characters of fixed points, redistribution into
Laurent polynomials, square-rooted equivariant Euler classes, and the DT/PT
vertex and edge q-series.

Square roots are taken with a fixed convention: from each pair of weights
with opposite linear forms, the representative whose form has positive
first nonzero coefficient (under l1 > l2 > l3) is kept.  All reported
values are canonical; sign assignments are interpreted relative to this
convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactalg import (
    FactoredWeightProduct,
    LambdaRat,
    QSeries,
    TChar,
    TLaurent,
    binomial_laurent,
    weight_form,
)
from .partitions import EdgeData, SolidPartition, enumerate_dt
from .ptconfig import LegModule, enumerate_boxconfigs

E1, E2, E3, E4 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
AXIS_WEIGHTS = (E1, E2, E3, E4)
FULL_DEN = (E1, E2, E3, E4)
IDENTITY_SUBST = AXIS_WEIGHTS


class TFixedObstruction(Exception):
    """A torus-fixed weight appeared with positive coefficient: the Euler
    class would divide by zero (the vertex has no T-fixed deformations)."""


# ---------------------------------------------------------------------------
# characters


def leg_laurent(pp, axis):
    """Character of C[x_j : j != axis]/I(pp): the plane partition is read
    with its indices on the three non-axis slots in increasing order."""
    slots = [i for i in range(4) if i != axis]
    terms = {}
    for (u, v, h) in pp.boxes():
        w = [0, 0, 0, 0]
        w[slots[0]], w[slots[1]], w[slots[2]] = u, v, h
        terms[tuple(w)] = 1
    return TLaurent(terms)


def dt_character(sp):
    """Character Z of the structure sheaf of the subscheme of a solid
    partition: leg cylinders glued by inclusion-exclusion plus the added
    boxes, as a rational character over prod (1 - t_i) of the leg axes."""
    den = []
    num = TLaurent()
    axes = [i for i in range(4) if not sp.legs[i].is_empty()]
    for i in axes:
        den.append(AXIS_WEIGHTS[i])
        part = leg_laurent(sp.legs[i], i)
        for j in axes:
            if j != i:
                part = part * binomial_laurent(AXIS_WEIGHTS[j])
        num = num + part
    finite = {}
    for box, k in sp.multi_leg_boxes():
        finite[box] = finite.get(box, 0) + (1 - k)
    for box in sorted(sp.added):
        finite[box] = finite.get(box, 0) + 1
    finite = TLaurent({w: c for w, c in finite.items() if c})
    if not finite.is_zero():
        for j in axes:
            finite = finite * binomial_laurent(AXIS_WEIGHTS[j])
        num = num + finite
    return TChar(num, den)


def pt_character(config):
    """Character of a stable pair: the CM curve of the module's legs plus
    the cokernel boxes."""
    cm = SolidPartition(config.module.legs)
    z = dt_character(cm)
    q = config.character()
    if q.is_zero():
        return z
    extra = q
    for d in z.den:
        extra = extra * binomial_laurent(d)
    return TChar(z.num + extra, z.den)


def vertex_prelim(z):
    """Trace of -RHom(E,E)_0 as a rational character over
    D = (1-t1)(1-t2)(1-t3)(1-t4), computed in the closed form (1 - P*Pbar)/D
    with P = 1 - Z*D the Poincare polynomial."""
    remaining = list(z.den)
    num = z.num
    for w in FULL_DEN:
        if w in remaining:
            remaining.remove(w)
        else:
            num = num * binomial_laurent(w)
    if remaining:
        raise ValueError("character denominator must divide (1-t1)..(1-t4)")
    p = TLaurent.one() - num
    pbar = p.bar()
    return TChar(TLaurent.one() - p * pbar, FULL_DEN)


def vertex_prelim_series_oracle(z, bound):
    """Direct truncated evaluation of Z + Zbar/(t1t2t3t4)
    - Z*Zbar*(1-t1)(1-t2)(1-t3)(1-t4)/(t1t2t3t4), for cross-checking the
    closed form through a given total degree."""
    zbar = z.bar()
    minus_one = (-1, -1, -1, -1)
    second = TChar(zbar.num.shift(minus_one), zbar.den)
    d_lau = TLaurent.one()
    for w in FULL_DEN:
        d_lau = d_lau * binomial_laurent(w)
    third = z * zbar
    third = TChar(-(third.num * d_lau).shift(minus_one), third.den)
    total = z + second + third
    return total.expand_series(bound)


def leg_F(pp, axis):
    """The redistribution block F of a leg: -Z + Zbar/(abc)
    - Z*Zbar*(1-a)(1-b)(1-c)/(abc) in the three non-axis variables."""
    if pp.is_empty():
        return TLaurent()
    z = leg_laurent(pp, axis)
    zbar = z.bar()
    slots = [i for i in range(4) if i != axis]
    shift = tuple(-1 if i in slots else 0 for i in range(4))
    d3 = TLaurent.one()
    for i in slots:
        d3 = d3 * binomial_laurent(AXIS_WEIGHTS[i])
    return -z + zbar.shift(shift) - (z * zbar * d3).shift(shift)


def edge_F(pp):
    """F for an edge in its own frame (the line along axis 1)."""
    return leg_F(pp, 0)


def redistribute_vertex(z, legs):
    """The vertex Laurent polynomial: vertex_prelim(Z) + sum_i F_i/(1-t_i).
    Every denominator factor must cancel exactly."""
    prelim = vertex_prelim(z)
    num = prelim.num
    for axis in range(4):
        f = leg_F(legs[axis], axis)
        if f.is_zero():
            continue
        for j in range(4):
            if j != axis:
                f = f * binomial_laurent(AXIS_WEIGHTS[j])
        num = num + f
    return TChar(num, FULL_DEN).to_laurent()


def redistribute_edge(pp, e):
    """The edge Laurent polynomial from (defE), computed monomial by
    monomial: a term c*t2^a*t3^b*t4^c of F with k = m*a + m'*b + m''*c
    contributes c*(t1^-1 + .. + t1^-(k-1)) for k >= 2 and
    -c*(1 + t1 + .. + t1^-k) for k <= 0."""
    m, mp, mpp = e.as_tuple() if isinstance(e, EdgeData) else e
    f = edge_F(pp)
    out = {}
    for (w1, a, b, c), coeff in f.terms.items():
        if w1 != 0:
            raise ValueError("edge F must not involve t1")
        k = m * a + mp * b + mpp * c
        if k == 1:
            continue
        if k >= 2:
            rng, sign = range(-(k - 1), 0), 1
        else:
            rng, sign = range(0, -k + 1), -1
        for s in rng:
            w = (s, a, b, c)
            v = out.get(w, 0) + sign * coeff
            if v:
                out[w] = v
            else:
                del out[w]
    return TLaurent(out)


def redistribute_edge_division_oracle(pp, e):
    """The same edge term through the displayed quotient
    [t1^-1 F - F(t2 t1^-m, t3 t1^-m', t4 t1^-m'')] / (1 - t1^-1)."""
    m, mp, mpp = e.as_tuple() if isinstance(e, EdgeData) else e
    f = edge_F(pp)
    cols = (E1, (-m, 1, 0, 0), (-mp, 0, 1, 0), (-mpp, 0, 0, 1))
    num = f.shift((-1, 0, 0, 0)) - f.subst(cols)
    return TChar(num, ((-1, 0, 0, 0),)).to_laurent()


# ---------------------------------------------------------------------------
# square-rooted Euler classes


@dataclass(frozen=True)
class SqrtEuler:
    """Canonical square root of (-1)^parity * e_T(-V); a zero value records
    a vanishing contribution (a negative T-fixed term)."""

    value: FactoredWeightProduct
    parity: int

    def is_zero(self):
        return self.value.is_zero()

    def expand(self):
        return self.value.expand()

    @classmethod
    def zero(cls):
        return cls(FactoredWeightProduct.zero(), 0)

    def to_json(self):
        return {"value": self.value.to_json(), "parity": self.parity}

    @classmethod
    def from_json(cls, data):
        return cls(FactoredWeightProduct.from_json(data["value"]), data["parity"])


def form_collect(v):
    """Total coefficient per linear form of a Laurent polynomial."""
    out = {}
    for w, c in v.terms.items():
        f = weight_form(w)
        s = out.get(f, 0) + c
        if s:
            out[f] = s
        else:
            del out[f]
    return out


def check_cy_symmetric(v):
    """Squarability: the multiset of (form, coefficient) must be symmetric
    under form negation (the weight-level identity Vbar = V*t1t2t3t4 after
    the Calabi-Yau identification)."""
    collected = form_collect(v)
    for f, c in collected.items():
        if any(f):
            g = (-f[0], -f[1], -f[2])
            if collected.get(g, 0) != c:
                return False
    return True


def euler_sqrt(v, subst=None):
    """Canonical square root of the signed Euler class of -V.

    Pairs each weight with a partner of opposite form, keeps the
    representatives with positive leading form coefficient, and returns
    value = prod form^(-coeff) over representatives together with the parity
    making value^2 = (-1)^parity * e_T(-V).
    """
    if subst is not None:
        v = v.subst(subst)
    if not check_cy_symmetric(v):
        raise ValueError("vertex is not square-symmetric: Vbar != V*t1t2t3t4")
    zero_contribution = False
    for w, c in sorted(v.terms.items()):
        if w[0] == w[1] == w[2] == w[3]:
            if c > 0:
                raise TFixedObstruction(f"T-fixed weight {w} with coefficient {c}")
            zero_contribution = True
    if zero_contribution:
        return SqrtEuler.zero()
    value = FactoredWeightProduct.one()
    parity = 0
    for w, c in sorted(v.terms.items()):
        f = weight_form(w)
        lead = f[0] if f[0] else (f[1] if f[1] else f[2])
        if lead > 0:
            value = value.mul_form(f, -c)
            parity += c
    return SqrtEuler(value, parity % 2)


def euler_full_product(v, subst=None):
    """e_T(-V) as a LambdaRat from the unpaired full product over all
    weights; None when a positive T-fixed coefficient makes it undefined."""
    if subst is not None:
        v = v.subst(subst)
    acc = FactoredWeightProduct.one()
    for w, c in sorted(v.terms.items()):
        f = weight_form(w)
        if not any(f):
            if c > 0:
                return None
            return LambdaRat.from_int(0)
        acc = acc.mul_form(f, -c)
    return acc.expand()


# ---------------------------------------------------------------------------
# vertex and edge computations with memoization


@dataclass(frozen=True)
class VertexCharacter:
    """A fixed point's rational character and its redistributed vertex."""

    key: str
    Zrat: TChar
    V: TLaurent


@dataclass(frozen=True)
class EdgeCharacter:
    pp: object
    edge: EdgeData
    E: TLaurent


def subst_key(subst):
    if subst is None or tuple(map(tuple, subst)) == IDENTITY_SUBST:
        return ""
    return "@[" + ";".join(",".join(map(str, col)) for col in subst) + "]"


def dt_vertex_character(sp):
    z = dt_character(sp)
    v = redistribute_vertex(z, sp.legs)
    return VertexCharacter(sp.key(), z, v)


def pt_vertex_character(config):
    z = pt_character(config)
    v = redistribute_vertex(z, config.module.legs)
    return VertexCharacter(config.key(), z, v)


_MEMO = {}


def clear_memo():
    _MEMO.clear()


def _root_cached(base_key, subst, make_v, cache):
    key = subst_key(subst) + base_key
    if cache is None:
        root = _MEMO.get(key)
        if root is None:
            root = euler_sqrt(make_v(), subst)
            _MEMO[key] = root
        return key, root
    rec = cache.get(key)
    if rec is not None:
        return key, SqrtEuler.from_json(rec["root"])
    v = make_v()
    root = euler_sqrt(v, subst)
    cache.put(key, {"key": key, "V": v.to_json(), "root": root.to_json()})
    return key, root


def dt_vertex_root(sp, subst=None, cache=None):
    """Canonical Euler root of a DT fixed point, with its sign key."""
    return _root_cached(sp.key(), subst, lambda: dt_vertex_character(sp).V, cache)


def pt_vertex_root(config, subst=None, cache=None):
    return _root_cached(
        config.key(), subst, lambda: pt_vertex_character(config).V, cache
    )


def edge_key(pp, e):
    m, mp, mpp = e.as_tuple() if isinstance(e, EdgeData) else e
    return f"edge:{pp.render()};m:({m},{mp},{mpp})"


def edge_character(pp, e):
    if not isinstance(e, EdgeData):
        e = EdgeData(*e)
    return EdgeCharacter(pp, e, redistribute_edge(pp, e))


def edge_root(pp, e, subst=None, cache=None):
    """Canonical Euler root of an edge term."""
    return _root_cached(
        edge_key(pp, e), subst, lambda: edge_character(pp, e).E, cache
    )


def sign_of(signs, key):
    if signs is None:
        return 1
    s = signs[key]
    if s not in (1, -1):
        raise ValueError(f"sign for {key} must be +1 or -1")
    return s


def _series_from_points(points, trunc, signs, pool):
    """Deterministic aggregation of (key, order, root) contributions into a
    QSeries: terms are summed in canonical key order per q-order."""
    if pool is not None:
        computed = list(pool.map(lambda f: f(), points))
    else:
        computed = [f() for f in points]
    by_order = {}
    for key, order, root in computed:
        by_order.setdefault(order, []).append((key, root))
    coeffs = {}
    for order in sorted(by_order):
        total = LambdaRat.from_int(0)
        for key, root in sorted(by_order[order], key=lambda kr: kr[0]):
            if root.is_zero():
                continue
            total = total + root.expand().scale(sign_of(signs, key))
        coeffs[order] = total
    return QSeries(trunc, coeffs)


def dt_vertex_series(lam, mu, nu, rho, trunc, signs=None, subst=None, cache=None, pool=None):
    """The equivariant DT vertex: sum over solid partitions with the given
    legs of sign * sqrt((-1)^a e_T(-V)) q^{renormalized volume}."""
    legs = (lam, mu, nu, rho)
    cm = SolidPartition(legs)
    lowest = cm.renormalized_volume()
    max_added = trunc - 1 - lowest
    if max_added < 0:
        return QSeries.zero(trunc)
    jobs = []
    for sp in enumerate_dt(lam, mu, nu, rho, max_added):
        order = lowest + sp.n_added()

        def job(sp=sp, order=order):
            key, root = dt_vertex_root(sp, subst, cache)
            return key, order, root

        jobs.append(job)
    return _series_from_points(jobs, trunc, signs, pool)


def pt_vertex_series(lam, mu, nu, rho, trunc, signs=None, subst=None, cache=None, pool=None):
    """The equivariant PT vertex: sum over gravity-closed box configurations
    over the CM curve of sign * sqrt((-1)^a e_T(-V)) q^{|B| + |pi_CM|}."""
    legs = (lam, mu, nu, rho)
    module = LegModule(legs)
    cm = SolidPartition(legs)
    lowest = cm.renormalized_volume()
    max_len = trunc - 1 - lowest
    if max_len < 0:
        return QSeries.zero(trunc)
    jobs = []
    for config in enumerate_boxconfigs(module, max_len):
        order = lowest + config.weighted_length()

        def job(config=config, order=order):
            key, root = pt_vertex_root(config, subst, cache)
            return key, order, root

        jobs.append(job)
    return _series_from_points(jobs, trunc, signs, pool)
