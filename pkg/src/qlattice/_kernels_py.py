"""Pure-Python term kernel (reference and fallback)."""


def eval_points(idx, signs, units, orders, origins, qexp, qunits, qorigin, cunit, corder):
    """Evaluate product terms at many points.

    ``idx[p, f]`` is the Pochhammer (or power) index of factor ``f`` at point
    ``p``; ``units[f]``/``orders[f]`` are that factor's ladder tables centred
    at ``origins[f]``.  Returns per-point ``(unit, order)`` lists.
    """
    rows = idx.tolist()
    sg = [int(s) for s in signs]
    org = [int(o) for o in origins]
    qe = qexp.tolist()
    nf = len(sg)
    out_u = []
    out_o = []
    for p, row in enumerate(rows):
        num = cunit
        den = None
        order = corder
        for f in range(nf):
            j = org[f] + row[f]
            if sg[f] > 0:
                num = num * units[f][j]
                order += orders[f][j]
            else:
                den = units[f][j] if den is None else den * units[f][j]
                order -= orders[f][j]
        num = num * qunits[qorigin + qe[p]]
        out_u.append(num if den is None else num / den)
        out_o.append(order)
    return out_u, out_o
