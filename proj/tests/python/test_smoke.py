#!/usr/bin/env python3
"""Smoke tests for the python module: the main operations round-trip through
the bindings with the same numbers the C++ suites check."""

import math
import sys

import heatctl as h

FAILURES = []


def check(name, cond, detail=""):
    print(f"  {'ok' if cond else 'FAIL'}: {name} {detail}")
    if not cond:
        FAILURES.append(name)


def main():
    # kernel and closed form
    k = h.solve_kernel(4 * math.pi**2 + 1.005, 1.02, 65)
    check("k11", abs(k.k11 + 20.7517) <= 1e-3, k.k11)
    check("bessel I1(1)", abs(h.bessel_kernel_value(1.0, 1.0, 0.0) + 0.5651591039924851) <= 1e-10)
    check("diag limit", abs(h.bessel_kernel_value(2.0, 0.5, 0.5) + 0.5) <= 1e-12)

    tp = h.build_transform(k)
    y = [math.sin(0.2 * i) for i in range(65)]
    back = h.apply_inverse(tp, h.apply_forward(tp, y))
    check("round trip", max(abs(a - b) for a, b in zip(back, y)) <= 1e-10)
    check("inverse kernel bound", tp.inverse_kernel_max_sq > 0)

    # certification numbers
    spec = h.PlantSpec(1.02, 0.1, [[0.0, 2.0], [-2.0, 0.0]], [[1.0, 0.0]], [[-5.0], [-1.0]])
    cert = h.certify_gains(spec)
    check("sigma_max", abs(cert.sigma_max - 0.11547) <= 1e-5, cert.sigma_max)
    check("theta_star", abs(cert.theta_star - 0.01) <= 1e-6, cert.theta_star)
    check("Q11", abs(cert.Q[0][0] - 1 / (2 * (1.02 + math.pi**2))) <= 1e-9)

    printed = [[0.0134, 0.0041, 0.0041], [0.0041, 0.1667, 0.1667], [0.0041, 0.1667, 0.6667]]
    mu = h.mu_from_Q(printed, [[-5.0], [-1.0]])
    check("printed mu", abs(mu - 6.464) <= 0.005, mu)
    check("remark7 diagnostic", abs(h.mu_closed_form_n2(1.02, -5.0, -1.0) - 8.9381) <= 0.005)

    try:
        h.certify_gains(h.PlantSpec(1.02, 0.2, [[0.0, 2.0], [-2.0, 0.0]],
                                    [[1.0, 0.0]], [[-5.0], [-1.0]]))
        check("certification failure raises", False)
    except RuntimeError:
        check("certification failure raises", True)

    # reproducible noise
    p1 = h.brownian_path(7, 1e-3, 1000)
    p2 = h.brownian_path(7, 1e-3, 1000)
    check("brownian determinism", list(p1.increments) == list(p2.increments))

    # short closed-loop run through the preset machinery
    sc = h.scenario_preset("section4")
    sc.m = 65
    sc.dt = 1e-3
    sc.horizon = 0.5
    sc.resolve_fields()
    tr1 = h.simulate_closed_loop(sc, 11)
    tr2 = h.simulate_closed_loop(sc, 11)
    check("records", len(tr1.t) == 501, len(tr1.t))
    check("simulation determinism", list(tr1.norm_sq) == list(tr2.norm_sq))
    check("control active", max(abs(v) for v in tr1.u) > 0.1)

    ens = h.run_ensemble(sc, 8, 123)
    check("ensemble size", len(ens.tail_slopes) == 8)
    check("ensemble positive", ens.initial_mean > 0.4)

    # coupled system against its certificate
    cz = h.scenario_preset("coupledZeta")
    ens = h.run_ensemble(cz, 40, 5)
    rep = h.check_coupled_bound(ens, cert, 1.0)
    check("coupled bound pass", rep.pass_, rep.max_margin)

    print(f"{len(FAILURES)} failures")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
