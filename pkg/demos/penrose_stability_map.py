#!/usr/bin/env python3
"""
Stability map of maxwellian backgrounds under the +-cos(x) interactions.

For the attractive sign (p_1 = -1/2) the homogeneous state destabilizes below
a critical temperature; the winding-number check detects it, a bisection
locates the threshold (closed form: T_c = 1/2), and the resolvent root on the
negative imaginary axis gives the growth rate of the unstable mode.
"""

import hmflab as H


def main() -> None:
    print("== winding-number verdicts across temperature ==")
    print(f"{'T':>6} | {'cos(x)':^22} | {'-cos(x)':^22}")
    for T in (0.3, 0.4, 0.5, 0.7, 1.0, 2.0):
        row = [f"{T:6.2f}"]
        for ik in (H.InteractionKernel.cosine(), H.InteractionKernel.anticosine()):
            rep = H.penrose_check(ik, H.maxwellian(T))
            mode = rep.modes[0]
            verdict = "stable" if rep.stable else "UNSTABLE"
            row.append(f"{verdict:>9} (winding {mode.winding:+d}, kappa {mode.kappa_est:5.3f})")
        print(" | ".join(row))

    print("\n== critical temperature of the attractive interaction ==")
    family = lambda T: (H.InteractionKernel.anticosine(), H.maxwellian(T))
    t_c = H.critical_parameter(family, 0.1, 1.0, tol=1e-3)
    print(f"bisection on the winding verdict: T_c = {t_c:.4f}  (closed form 0.5)")

    print("\n== growth rate below threshold ==")
    for T in (0.3, 0.4, 0.45):
        lam = H.growth_rate(H.InteractionKernel.anticosine(), H.maxwellian(T))
        print(f"T = {T:4.2f}: unstable mode grows like exp({lam:.4f} t)")

    print("\nthe rate is the root of 1 - Khat(1, -i lam) = 0; an eps = 0 run from a")
    print("tiny seed reproduces it to well under a percent (see the")
    print("unstable-anticosine preset).")


if __name__ == "__main__":
    main()
