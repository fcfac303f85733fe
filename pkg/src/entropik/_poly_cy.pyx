# cython: language_level=3, boundscheck=False, wraparound=False
"""Sparse multivariate polynomial kernels (compiled backend).

Semantic twin of ``_poly_py.py``; keep the two in sync.  Coefficients are
arbitrary exact-rational Python objects; the speedup comes from compiled
dict/tuple loops, not from native numerics.
"""

BACKEND = "cython"


cpdef tuple mono_mul(tuple m1, tuple m2):
    cdef Py_ssize_t i = 0, j = 0, n1 = len(m1), n2 = len(m2)
    cdef list out
    cdef tuple p1, p2
    if n1 == 0:
        return m2
    if n2 == 0:
        return m1
    out = []
    while i < n1 and j < n2:
        p1 = <tuple>m1[i]
        p2 = <tuple>m2[j]
        if p1[0] is p2[0]:
            out.append((p1[0], p1[1] + p2[1]))
            i += 1
            j += 1
        elif (<object>p1[0]).key < (<object>p2[0]).key:
            out.append(p1)
            i += 1
        else:
            out.append(p2)
            j += 1
    while i < n1:
        out.append(m1[i])
        i += 1
    while j < n2:
        out.append(m2[j])
        j += 1
    return tuple(out)


cpdef dict p_add(dict p1, dict p2):
    cdef dict out
    if not p1:
        return dict(p2)
    if not p2:
        return dict(p1)
    out = dict(p1)
    for m, c in p2.items():
        s = out.get(m)
        if s is None:
            out[m] = c
        else:
            s = s + c
            if s:
                out[m] = s
            else:
                del out[m]
    return out


cpdef dict p_neg(dict p):
    cdef dict out = {}
    for m, c in p.items():
        out[m] = -c
    return out


cpdef dict p_sub(dict p1, dict p2):
    return p_add(p1, p_neg(p2))


cpdef dict p_scale(dict p, q):
    cdef dict out = {}
    if not q:
        return out
    for m, c in p.items():
        out[m] = c * q
    return out


cpdef dict p_mul(dict p1, dict p2):
    cdef dict out = {}
    cdef tuple m
    if not p1 or not p2:
        return out
    if len(p1) > len(p2):
        p1, p2 = p2, p1
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = mono_mul(<tuple>m1, <tuple>m2)
            c = c1 * c2
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
    return out


cpdef dict p_pow(dict p, n):
    cdef dict result = None
    cdef dict base = p
    if n == 0:
        return {(): _one_coeff(p)}
    while True:
        if n & 1:
            result = base if result is None else p_mul(result, base)
        n >>= 1
        if not n:
            return result
        base = p_mul(base, base)


cdef _one_coeff(dict p):
    for c in p.values():
        return c / c
    from entropik._ratio import Q
    return Q(1)


cpdef dict p_diff(dict p, atom):
    cdef dict out = {}
    cdef tuple m, nm
    cdef Py_ssize_t idx
    for m0, c in p.items():
        m = <tuple>m0
        for idx in range(len(m)):
            a, e = m[idx]
            if a is atom:
                if e == 1:
                    nm = m[:idx] + m[idx + 1:]
                else:
                    nm = m[:idx] + ((a, e - 1),) + m[idx + 1:]
                nc = c * e
                s = out.get(nm)
                if s is None:
                    out[nm] = nc
                else:
                    s = s + nc
                    if s:
                        out[nm] = s
                    else:
                        del out[nm]
                break
    return out
