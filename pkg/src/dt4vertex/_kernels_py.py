"""Pure-Python arithmetic kernels.

Laurent polynomials in t1..t4 are dicts mapping 4-tuples of integer
exponents to nonzero integer coefficients; polynomials in l1..l3 are dicts
mapping 3-tuples to nonzero integers.  The compiled twin
``dt4vertex._kernels_cy`` provides the same surface; ``dt4vertex.kernels``
selects one at import time.  No function mutates its inputs.
"""

BACKEND = "python"


def laurent_add(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for w, c in b.items():
        s = out.get(w, 0) + c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def laurent_sub(a, b):
    out = dict(a)
    for w, c in b.items():
        s = out.get(w, 0) - c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def laurent_neg(a):
    return {w: -c for w, c in a.items()}


def laurent_scale(a, k):
    if k == 0:
        return {}
    if k == 1:
        return dict(a)
    return {w: c * k for w, c in a.items()}


def laurent_mul(a, b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    bi = list(b.items())
    for (w1, w2, w3, w4), c in a.items():
        for (v1, v2, v3, v4), d in bi:
            w = (w1 + v1, w2 + v2, w3 + v3, w4 + v4)
            s = out.get(w, 0) + c * d
            if s:
                out[w] = s
            else:
                del out[w]
    return out


def laurent_shift(a, w):
    w1, w2, w3, w4 = w
    if not (w1 or w2 or w3 or w4):
        return dict(a)
    return {(v1 + w1, v2 + w2, v3 + w3, v4 + w4): c
            for (v1, v2, v3, v4), c in a.items()}


def laurent_bar(a):
    return {(-w1, -w2, -w3, -w4): c for (w1, w2, w3, w4), c in a.items()}


def laurent_subst(a, cols):
    """Substitute t_i -> t^cols[i]; cols are four 4-tuples (a matrix by columns)."""
    (a1, b1, c1, d1), (a2, b2, c2, d2), (a3, b3, c3, d3), (a4, b4, c4, d4) = cols
    out = {}
    for (w1, w2, w3, w4), c in a.items():
        w = (w1 * a1 + w2 * a2 + w3 * a3 + w4 * a4,
             w1 * b1 + w2 * b2 + w3 * b3 + w4 * b4,
             w1 * c1 + w2 * c2 + w3 * c3 + w4 * c4,
             w1 * d1 + w2 * d2 + w3 * d3 + w4 * d4)
        s = out.get(w, 0) + c
        if s:
            out[w] = s
        else:
            del out[w]
    return out


def poly_add(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_sub(a, b):
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) - c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_neg(a):
    return {m: -c for m, c in a.items()}


def poly_scale(a, k):
    if k == 0:
        return {}
    if k == 1:
        return dict(a)
    return {m: c * k for m, c in a.items()}


def poly_mul(a, b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    bi = list(b.items())
    for (e1, e2, e3), c in a.items():
        for (f1, f2, f3), d in bi:
            m = (e1 + f1, e2 + f2, e3 + f3)
            s = out.get(m, 0) + c * d
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def poly_linear_mul(p, form):
    """Multiply p by the linear form c1*l1 + c2*l2 + c3*l3."""
    c1, c2, c3 = form
    out = {}
    for (e1, e2, e3), c in p.items():
        if c1:
            m = (e1 + 1, e2, e3)
            s = out.get(m, 0) + c * c1
            if s:
                out[m] = s
            else:
                del out[m]
        if c2:
            m = (e1, e2 + 1, e3)
            s = out.get(m, 0) + c * c2
            if s:
                out[m] = s
            else:
                del out[m]
        if c3:
            m = (e1, e2, e3 + 1)
            s = out.get(m, 0) + c * c3
            if s:
                out[m] = s
            else:
                del out[m]
    return out
