"""Shared helpers for building small instances in tests.

Instances are written as lists of per-user resource index lists, which
reads better in assertions than raw bitmasks.
"""

from __future__ import annotations

from hypothesis import strategies as st

from rescheck import INF, Instance


def mask(resources) -> int:
    m = 0
    for r in resources:
        m |= 1 << r
    return m


def inst(
    rows,
    p: int,
    *,
    target=None,
    s: int = 0,
    d: int = 1,
    t=INF,
) -> Instance:
    """Instance with num_resources=p; rows[u] lists u's resource indices.

    target defaults to all p resources.
    """
    access = tuple(mask(row) for row in rows)
    tgt = (1 << p) - 1 if target is None else mask(target)
    return Instance(access=access, num_resources=p, target=tgt, s=s, d=d, t=t)


def norm(rows, p: int, **kw) -> Instance:
    """Like inst(), but normalized (t clamped, target projected)."""
    from rescheck import normalize

    return normalize(inst(rows, p, **kw))


@st.composite
def instances(draw, max_n=6, max_p=4, max_s=2, max_d=3):
    """Arbitrary small instances; target is a nonempty submask."""
    m = draw(st.integers(1, max_p))
    n = draw(st.integers(0, max_n))
    full = (1 << m) - 1
    access = tuple(draw(st.integers(0, full)) for _ in range(n))
    target = draw(st.integers(1, full))
    s = draw(st.integers(0, max_s))
    d = draw(st.integers(1, max_d))
    t = draw(st.sampled_from([1, 2, 3, INF]))
    return Instance(access=access, num_resources=m, target=target, s=s, d=d, t=t)
