"""Leading orders and resonances of the two travelling-wave ODEs."""
from negkdv.identities import expand_cleared, travelling_wave
from negkdv.painleve import leading_orders, ode_from_id, painleve_report, resonances

ode = ode_from_id("eq102")
print("order 4 travelling ODE:", ode)

# %% dominant balance: w ~ a chi^p
for lo in leading_orders(ode):
    print("p =", lo.p, " coefficient polynomial (ascending):", lo.coeff_poly.coeffs)
    for a, mult in lo.roots:
        if a == 0:
            continue
        r = resonances(ode, lo.p, a)
        vals = [f"{complex(v).real:.4f}" if isinstance(v, complex) else str(v) for v, _ in r.resonances]
        print(f"  a = {a}: resonances {vals}, {r.classification}, sum {r.resonance_sum}")

# %% comparison with the printed tables
for ode_id in ("eq102", "eq105"):
    rep = painleve_report(ode_id)
    print(ode_id, rep.status, rep.details["verdict"])
    for line in rep.details.get("differences", []):
        print("   ", line)

# %% the n = 5 wave equation derived from scratch
t5 = travelling_wave(expand_cleared(5))
print("derived order 6 ODE has", len(t5.terms), "monomials")
