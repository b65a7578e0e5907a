"""Sech-power waves for the flows, with numerical residuals."""
import numpy as np

from negkdv.soliton import FLOWS, Grid, balance, hyp_substitute, residual_numeric, solve_params, strip_common

for flow, (eq_id, field) in FLOWS.items():
    h = hyp_substitute(eq_id)
    st = strip_common(h)
    print(f"{flow} ({eq_id}, field {field}): common factor {st.factor_text()}")
    print("   reduced:", st.expr.render())
    for n in balance(h):
        sol = solve_params(h, n)
        res = residual_numeric(eq_id, sol, 1, Grid(), p_value=1)
        print(f"   n = {n}: {sol.constraints}, residual {res['max_residual']:.1e} ({res['form']})")

# %% finite differences converge at second order towards the analytic residual
for steps in (51, 101, 201):
    r = residual_numeric("eq101", {"A": 2, "p": 1, "n": 2}, 2, Grid(steps=steps), "finite_difference")
    print(f"{steps:4d} points: errors {np.round(r['errors'], 4)}, observed order {r['order']:.3f}")
