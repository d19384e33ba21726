#!/usr/bin/env python3
"""Refinement study on the 3D ball well: measured counting functions, heat
traces and boundary counts against their closed-form bounds at two grid
resolutions.

The quantity tracked per evaluation point is the signed margin
``measured - bound`` (negative while the bound holds).  Refinement must not
push it upward: a bound that only holds thanks to coarse discretization
would reveal itself here by a rising margin.
"""

import argparse

import numpy as np

from wellspectra import a2r, bounds
from wellspectra.assemble import assemble_pencil, classify_nodes
from wellspectra.eigcount import heat_trace, inertia, pencil_eigs
from wellspectra.errors import OnEigenvalue
from wellspectra.model import GridSpec, build_potential
from wellspectra.scenario import _nudged

DEPTH, RADIUS, LEVEL, P = 12.0, 1.0, -0.5, 3.0


def measure(resolution, lams, ts, gammas):
    grid = GridSpec(box=((-2.0, 2.0),) * 3, resolution=(resolution,) * 3)
    V = build_potential(
        {"name": "ball_well", "center": [0.0, 0.0, 0.0], "radius": RADIUS, "depth": DEPTH},
        grid,
    )
    dec = classify_nodes(V, LEVEL)
    pencil = assemble_pencil(dec, V, LEVEL)
    spec = pencil_eigs(pencil.K_II, pencil.M_interior)
    bm = a2r.boundary_measures(pencil)
    S0 = a2r.schur_form(pencil, 0.0)

    normW1 = V.norm(LEVEL, 1.0)
    normWp = V.norm(LEVEL, P)
    dmu_p, _, dnu_dmu = a2r.radon_nikodym_report(bm, pencil.sigma, P)
    q, S_trace = bounds.trace_sobolev_constants(3)
    b = bounds.estimate_b(S0, bm, pencil.sigma, q, S_trace, 200, seed=7)
    _, m, c1, c2 = bounds.boundary_bound_constants(3, P, S_trace, b, dmu_p, dnu_dmu)
    r, S_r = bounds.weighted_sobolev(3, P, normWp)
    d = 2 * r / (r - 2)

    rows = []
    for lam in lams:
        lam_used, n_dir = _nudged(
            lambda x: inertia_count(pencil.K_II, pencil.M_interior, x), lam, "lambda"
        )
        rows.append(("count(lam=%.3g)" % lam, n_dir,
                     bounds.dirichlet_count_bound(3, P, normW1, normWp, lam_used)))
    for t in ts:
        rows.append(("trace(t=%.3g)" % t, heat_trace(spec, t),
                     bounds.ultracontractivity_and_trace_bounds(d, S_r, normW1, t)[1]))
    for g in gammas:
        g_used, n_g = _nudged(lambda x: steklov_count(S0, bm, x), g, "gamma")
        rows.append(("boundary(gamma=%.3g)" % g, n_g,
                     bounds.a2r_count_bound(m, c1, c2, normW1, g_used)))
    return rows


def inertia_count(K, M, lam):
    import scipy.sparse as sp

    inert = inertia((K - lam * sp.diags(M)).tocsr())
    if inert.n_zero:
        raise OnEigenvalue("on spectrum")
    return inert.n_minus


def steklov_count(S0, bm, gamma):
    inert = inertia(S0 - gamma * np.diag(bm.mu))
    if inert.n_zero:
        raise OnEigenvalue("on spectrum")
    return inert.n_minus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--coarse", type=int, default=17)
    ap.add_argument("--fine", type=int, default=25)
    args = ap.parse_args()

    lams = [0.9, 1.8]
    ts = [0.5, 2.0]
    gammas = [1.0, 4.0]
    coarse = measure(args.coarse, lams, ts, gammas)
    fine = measure(args.fine, lams, ts, gammas)

    print(
        f"{'point':>22} {'lhs_c':>10} {'lhs_f':>10} {'rhs_c':>12} {'rhs_f':>12} "
        f"{'margin_c':>12} {'margin_f':>12} safe"
    )
    for (name, lc, rc), (_, lf, rf) in zip(coarse, fine):
        mc, mf = lc - rc, lf - rf
        safe = mc <= 0 and mf <= mc
        print(
            f"{name:>22} {lc:>10.4g} {lf:>10.4g} {rc:>12.5g} {rf:>12.5g} "
            f"{mc:>12.5g} {mf:>12.5g} {'yes' if safe else 'NO'}"
        )


if __name__ == "__main__":
    main()
