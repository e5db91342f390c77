"""Bundled example models.

Each builder returns a fresh CdgaModel.  The .cdga files shipped with the
package are generated from these builders by scripts/make_models.py, so the
text files and the in-memory constructors can never drift apart.
"""

from __future__ import annotations

from fractions import Fraction

from .model import (
    BasisElement,
    CdgaModel,
    LieActionData,
    TwistData,
    enumerate_free_cdga,
)

F = Fraction


def build_point() -> CdgaModel:
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {}})
    return CdgaModel("point", [("one", 0)], "one", {}, {}, lie, twist)


def build_s1_trivial() -> CdgaModel:
    """Circle with trivial geometric action and xi = dtheta (not exact)."""
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {"dtheta": F(1)}})
    return CdgaModel(
        "s1_trivial",
        [("one", 0), ("dtheta", 1)],
        "one",
        {},
        {},
        lie,
        twist,
    )


def build_s3_fixed_circle() -> CdgaModel:
    """Fixed circle of the sphere action: trivial action, xi = -dtheta."""
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {"dtheta": F(-1)}})
    return CdgaModel(
        "s3_fixed_circle",
        [("one", 0), ("dtheta", 1)],
        "one",
        {},
        {},
        lie,
        twist,
    )


def build_s1_exact_xi(cap: int = 5) -> CdgaModel:
    """Circle-with-collar model whose xi = dh is exact.

    h is a nilpotent even function generator (truncated past h^cap), which
    keeps the de Rham ranks at the circle values (1, 1) for every cap.
    """
    return enumerate_free_cdga(
        [("h", 0), ("eta", 1), ("dtheta", 1)],
        {"h": [(F(1), (("eta", 1),))]},
        degree_cap=2,
        poly_cap=cap,
        name="s1_exact_xi",
        generators=["T1"],
        iota_on_gens={"T1": {}},
        xi={"T1": [(F(1), (("eta", 1),))]},
        nilpotent=True,
    )


def build_t2() -> CdgaModel:
    """Two-torus, trivial two-generator action with xi_j = dtheta_j."""
    return enumerate_free_cdga(
        [("th1", 1), ("th2", 1)],
        {},
        degree_cap=2,
        poly_cap=1,
        name="t2",
        generators=["T1", "T2"],
        iota_on_gens={"T1": {}, "T2": {}},
        structure_constants={},
        xi={
            "T1": [(F(1), (("th1", 1),))],
            "T2": [(F(1), (("th2", 1),))],
        },
    )


def build_t3_bundle(k: int = 1) -> CdgaModel:
    """Invariant model of a circle bundle over the two-torus, twist k*volume."""
    model = enumerate_free_cdga(
        [("th1", 1), ("th2", 1), ("th3", 1)],
        {},
        degree_cap=3,
        poly_cap=1,
        name=f"t3_bundle_k{k}",
        generators=["T1"],
        iota_on_gens={"T1": {"th3": [(F(1), ())]}},
        H=[(F(k), (("th1", 1), ("th2", 1), ("th3", 1)))],
        xi={"T1": []},
    )
    return model


def build_s3(cap: int = 6) -> CdgaModel:
    """Torus-invariant sphere model: c ~ cos^2(lambda), gamma = dc,
    alpha ~ dphi1, beta ~ dphi2, twist gamma^alpha^beta, section
    (rotation of the first coordinate, -c*beta)."""
    return enumerate_free_cdga(
        [("c", 0), ("gamma", 1), ("alpha", 1), ("beta", 1)],
        {"c": [(F(1), (("gamma", 1),))]},
        degree_cap=3,
        poly_cap=cap,
        name="s3",
        generators=["T1"],
        iota_on_gens={"T1": {"alpha": [(F(1), ())]}},
        H=[(F(1), (("gamma", 1), ("alpha", 1), ("beta", 1)))],
        xi={"T1": [(F(-1), (("c", 1), ("beta", 1)))]},
        nilpotent=True,
    )


# -- sphere model on smooth generators (with one quotient relation) ---------

_S3S_ODD = ("w", "a", "beta")  # canonical order of odd factors
_S3S_DEG = {"v": 0, "w": 1, "a": 1, "beta": 1, "g": 2}


def _s3s_normalize(vpow: int, factors: tuple, cap: int):
    """Normal form of v^vpow * (wedge of factors) in the smooth sphere model.

    Rewrites w^a -> v*g.  Returns (sign, vpow, frozenset) or None when the
    monomial vanishes, including past the truncation ideal (v^(cap+1), v^cap w).
    """
    sign = 1
    odds = [f for f in factors if _S3S_DEG[f] % 2]
    evens = [f for f in factors if not _S3S_DEG[f] % 2]
    # Koszul-sort odd factors into canonical order
    order = {f: i for i, f in enumerate(_S3S_ODD)}
    arr = list(odds)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if order[arr[j]] > order[arr[j + 1]]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    if len(set(arr)) != len(arr):
        return None
    gs = evens.count("g")
    if gs > 1:
        return None
    s = set(arr) | ({"g"} if gs else set())
    if "w" in s and "a" in s:
        # w^a sits at the front of the canonical odd order: no extra sign
        if "g" in s:
            return None
        s = (s - {"w", "a"}) | {"g"}
        vpow += 1
    if "g" in s and ("w" in s or "a" in s):
        return None  # g repeats a 1-form factor of w or a
    if vpow > cap or (vpow == cap and "w" in s):
        return None
    return sign, vpow, frozenset(s)


def _s3s_name(vpow: int, s: frozenset) -> str:
    parts = []
    if vpow == 1:
        parts.append("v")
    elif vpow > 1:
        parts.append(f"v{vpow}")
    for f in ("w", "a", "g", "beta"):
        if f in s:
            parts.append(f)
    return "_".join(parts) if parts else "one"


def build_s3_smooth(cap: int = 6) -> CdgaModel:
    """Sphere model on smooth generators: v ~ sin^2(lambda), w = dv,
    a ~ sin^2(lambda) dphi1, g = da, beta ~ dphi2, relation w^a = v*g.

    The fixed circle of the rotation is v = 0; restriction to it is an honest
    chain map, which the free-generator sphere model cannot provide.
    """
    monos = []
    for vpow in range(cap + 1):
        for mask in range(16):
            s = set()
            for i, f in enumerate(("w", "a", "beta", "g")):
                if mask >> i & 1:
                    s.add(f)
            if "w" in s and "a" in s:
                continue
            if "g" in s and ("w" in s or "a" in s):
                continue  # g repeats a 1-form factor of w or a
            if vpow == cap and "w" in s:
                continue  # truncation ideal (v^(cap+1), v^cap w)
            monos.append((vpow, frozenset(s)))
    deg = lambda m: sum(_S3S_DEG[f] for f in m[1])
    monos.sort(key=lambda m: (deg(m), m[0], _s3s_name(*m)))
    names = {m: _s3s_name(*m) for m in monos}
    basis = [(names[m], deg(m)) for m in monos]

    def factors_of(m):
        vpow, s = m
        return vpow, tuple(f for f in ("w", "a", "beta", "g") if f in s)

    def mono_combo(terms):
        out = {}
        for c, m in terms:
            out[names[m]] = out.get(names[m], 0) + c
        return {k: v for k, v in out.items() if v}

    wedge_table = {}
    for m1 in monos:
        for m2 in monos:
            v1, f1 = factors_of(m1)
            v2, f2 = factors_of(m2)
            nf = _s3s_normalize(v1 + v2, f1 + f2, cap)
            if nf is None:
                wedge_table[(names[m1], names[m2])] = {}
            else:
                sg, vp, s = nf
                wedge_table[(names[m1], names[m2])] = {_s3s_name(vp, s): F(sg)}

    d_of_factor = {"v": ("w",), "a": ("g",)}
    d_table = {}
    for m in monos:
        vpow, fs = factors_of(m)
        word = ("v",) * vpow + fs
        terms = []
        for i, f in enumerate(word):
            img = d_of_factor.get(f)
            if not img:
                continue
            # moving d(f) to the front costs (-1)^(deg(prefix) * deg(f))
            sign = 1
            for h in word[:i]:
                sign *= -1 if (_S3S_DEG[h] * _S3S_DEG[f]) % 2 else 1
            rest = word[:i] + word[i + 1 :]
            vp = rest.count("v")
            nf = _s3s_normalize(vp, img + tuple(x for x in rest if x != "v"), cap)
            if nf is None:
                continue
            sg, vp2, s2 = nf
            terms.append((F(sign * sg), (vp2, s2)))
        combo = mono_combo(terms)
        if combo:
            d_table[names[m]] = combo

    iota_of_factor = {"a": (1, ("v",)), "g": (-1, ("w",))}
    iota_table = {}
    for m in monos:
        vpow, fs = factors_of(m)
        word = ("v",) * vpow + fs
        terms = []
        for i, f in enumerate(word):
            img = iota_of_factor.get(f)
            if not img:
                continue
            coeff, repl = img
            # moving iota(f) to the front costs (-1)^(deg(prefix) * deg(f))
            sign = 1
            for h in word[:i]:
                sign *= -1 if (_S3S_DEG[h] * _S3S_DEG[f]) % 2 else 1
            rest = word[:i] + word[i + 1 :]
            allf = repl + rest
            vp = allf.count("v")
            nf = _s3s_normalize(vp, tuple(x for x in allf if x != "v"), cap)
            if nf is None:
                continue
            sg, vp2, s2 = nf
            terms.append((F(sign * coeff * sg), (vp2, s2)))
        combo = mono_combo(terms)
        if combo:
            iota_table[names[m]] = combo

    lie = LieActionData(generators=["T1"], iota={"T1": iota_table})
    twist = TwistData(
        H={"g_beta": F(-1)},
        xi={"T1": {"v_beta": F(1), "beta": F(-1)}},
    )
    return CdgaModel("s3_smooth", basis, "one", wedge_table, d_table, lie, twist)


def build_s3_nu() -> CdgaModel:
    """Vertically-supported model of the tubular neighbourhood of the fixed
    circle: fiber data t0 (radial bump), s1 = d(t0), t2 (fiber 2-form with
    unit fiber integral), tensored with the circle direction bt."""
    basis = [
        ("one", 0),
        ("t0", 0),
        ("s1", 1),
        ("bt", 1),
        ("t0_bt", 1),
        ("t2", 2),
        ("s1_bt", 2),
        ("t2_bt", 3),
    ]
    wt = {
        ("t0", "bt"): {"t0_bt": F(1)},
        ("s1", "bt"): {"s1_bt": F(1)},
        ("t2", "bt"): {"t2_bt": F(1)},
        ("t0_bt", "bt"): {},
        ("s1_bt", "bt"): {},
        ("t2_bt", "bt"): {},
        ("t2", "t2"): {},
        ("t2", "s1"): {},
        ("s1", "t2"): {},
        ("t2", "t2_bt"): {},
        ("t2_bt", "t2"): {},
        ("s1", "s1_bt"): {},
        ("s1_bt", "s1"): {},
        ("t2", "s1_bt"): {},
        ("s1_bt", "t2"): {},
        ("t2_bt", "s1"): {},
        ("s1", "t2_bt"): {},
    }
    dt = {"t0": {"s1": F(1)}, "t0_bt": {"s1_bt": F(1)}}
    iota = {
        "T1": {
            "t2": {"s1": F(-1)},
            "t2_bt": {"s1_bt": F(-1)},
        }
    }
    lie = LieActionData(generators=["T1"], iota=iota)
    twist = TwistData(H={}, xi={"T1": {"bt": F(-1)}})
    return CdgaModel("s3_nu", basis, "one", wt, dt, lie, twist)


def build_rot_plane() -> CdgaModel:
    """Vertically-supported model of the rotation plane over a point."""
    basis = [("one", 0), ("t0", 0), ("s1", 1), ("t2", 2)]
    wt = {("t2", "t2"): {}, ("t2", "s1"): {}, ("s1", "t2"): {}}
    dt = {"t0": {"s1": F(1)}}
    lie = LieActionData(generators=["T1"], iota={"T1": {"t2": {"s1": F(-1)}}})
    twist = TwistData(H={}, xi={"T1": {}})
    return CdgaModel("rot_plane", basis, "one", wt, dt, lie, twist)


def build_cech_circle() -> CdgaModel:
    """Circle glued from two arcs: wfun is the glued partial coordinate,
    s = d(wfun), t the global angular 1-form."""
    basis = [("one", 0), ("wfun", 0), ("s", 1), ("t", 1)]
    wt = {("s", "t"): {}, ("t", "s"): {}}
    dt = {"wfun": {"s": F(1)}}
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {}})
    return CdgaModel("cech_circle", basis, "one", wt, dt, lie, twist)


def build_cech_arc(which: int) -> CdgaModel:
    basis = [("one", 0), ("f", 0), ("df", 1)]
    dt = {"f": {"df": F(1)}}
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {}})
    return CdgaModel(f"cech_arc{which}", basis, "one", {}, dt, lie, twist)


def build_cech_overlap() -> CdgaModel:
    """Two points: delta separates them, delta^2 = 1."""
    basis = [("one", 0), ("delta", 0)]
    wt = {("delta", "delta"): {"one": F(1)}}
    lie = LieActionData(generators=["T1"], iota={"T1": {}})
    twist = TwistData(H={}, xi={"T1": {}})
    return CdgaModel("cech_overlap", basis, "one", wt, {}, lie, twist)


BUILDERS = {
    "point": build_point,
    "s1_trivial": build_s1_trivial,
    "s1_exact_xi": build_s1_exact_xi,
    "t2": build_t2,
    "t3_bundle_k1": lambda: build_t3_bundle(1),
    "s3": build_s3,
    "s3_smooth": build_s3_smooth,
    "s3_fixed_circle": build_s3_fixed_circle,
    "s3_nu": build_s3_nu,
    "rot_plane": build_rot_plane,
    "cech_circle": build_cech_circle,
    "cech_arc1": lambda: build_cech_arc(1),
    "cech_arc2": lambda: build_cech_arc(2),
    "cech_overlap": build_cech_overlap,
}
