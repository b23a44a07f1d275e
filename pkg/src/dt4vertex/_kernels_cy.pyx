# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled arithmetic kernels (Cython twin of ``dt4vertex._kernels_py``).

Coefficients are arbitrary-precision Python ints; the speedup comes from
compiled dict-merge loops and unboxed exponent arithmetic.
"""

BACKEND = "cython"


def laurent_add(dict a, dict b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    cdef dict out = dict(a)
    for w, c in b.items():
        s = out.get(w, 0) + c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def laurent_sub(dict a, dict b):
    cdef dict out = dict(a)
    for w, c in b.items():
        s = out.get(w, 0) - c
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def laurent_neg(dict a):
    cdef dict out = {}
    for w, c in a.items():
        out[w] = -c
    return out


def laurent_scale(dict a, k):
    if k == 0:
        return {}
    if k == 1:
        return dict(a)
    cdef dict out = {}
    for w, c in a.items():
        out[w] = c * k
    return out


def laurent_mul(dict a, dict b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef list bi = list(b.items())
    cdef long w1, w2, w3, w4
    cdef tuple wa, wb, w
    for wa, c in a.items():
        w1 = wa[0]
        w2 = wa[1]
        w3 = wa[2]
        w4 = wa[3]
        for wb, d in bi:
            w = (w1 + <long> wb[0], w2 + <long> wb[1],
                 w3 + <long> wb[2], w4 + <long> wb[3])
            s = out.get(w, 0) + c * d
            if s:
                out[w] = s
            else:
                del out[w]
    return out


def laurent_shift(dict a, tuple w):
    cdef long w1 = w[0], w2 = w[1], w3 = w[2], w4 = w[3]
    if not (w1 or w2 or w3 or w4):
        return dict(a)
    cdef dict out = {}
    cdef tuple v
    for v, c in a.items():
        out[(<long> v[0] + w1, <long> v[1] + w2,
             <long> v[2] + w3, <long> v[3] + w4)] = c
    return out


def laurent_bar(dict a):
    cdef dict out = {}
    cdef tuple w
    for w, c in a.items():
        out[(-<long> w[0], -<long> w[1], -<long> w[2], -<long> w[3])] = c
    return out


def laurent_subst(dict a, cols):
    cdef long a1, b1, c1, d1, a2, b2, c2, d2, a3, b3, c3, d3, a4, b4, c4, d4
    (a1, b1, c1, d1), (a2, b2, c2, d2), (a3, b3, c3, d3), (a4, b4, c4, d4) = cols
    cdef dict out = {}
    cdef tuple wa, w
    cdef long w1, w2, w3, w4
    for wa, c in a.items():
        w1 = wa[0]
        w2 = wa[1]
        w3 = wa[2]
        w4 = wa[3]
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


def poly_add(dict a, dict b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    cdef dict out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_sub(dict a, dict b):
    cdef dict out = dict(a)
    for m, c in b.items():
        s = out.get(m, 0) - c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return out


def poly_neg(dict a):
    cdef dict out = {}
    for m, c in a.items():
        out[m] = -c
    return out


def poly_scale(dict a, k):
    if k == 0:
        return {}
    if k == 1:
        return dict(a)
    cdef dict out = {}
    for m, c in a.items():
        out[m] = c * k
    return out


def poly_mul(dict a, dict b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    cdef dict out = {}
    cdef list bi = list(b.items())
    cdef long e1, e2, e3
    cdef tuple ma, mb, m
    for ma, c in a.items():
        e1 = ma[0]
        e2 = ma[1]
        e3 = ma[2]
        for mb, d in bi:
            m = (e1 + <long> mb[0], e2 + <long> mb[1], e3 + <long> mb[2])
            s = out.get(m, 0) + c * d
            if s:
                out[m] = s
            else:
                del out[m]
    return out


def poly_linear_mul(dict p, form):
    cdef long c1 = form[0], c2 = form[1], c3 = form[2]
    cdef dict out = {}
    cdef tuple me, m
    cdef long e1, e2, e3
    for me, c in p.items():
        e1 = me[0]
        e2 = me[1]
        e3 = me[2]
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
