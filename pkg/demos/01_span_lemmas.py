"""Products of Hill solutions and the kernels of the projective connections.

Run with ``python demos/01_span_lemmas.py``.
"""
from negkdv.diffalg import HillIdeal, reduce_hill, var
from negkdv.identities import verify_mapping
from negkdv.operators import delta_op

pair = HillIdeal.pair()
psi1, psi2 = var("psi1"), var("psi2")

# %% Delta^(n) applied to degree n-1 products, reduced modulo both Hill equations
for n in (3, 4, 5):
    print(f"Delta^({n}) = {delta_op(n).render()}")
    for i in range(n - 1, -1, -1):
        mono = psi1 ** i * psi2 ** (n - 1 - i)
        image = delta_op(n).apply(mono)
        print(f"  {mono}: {len(image.terms):3d} terms before reduction, "
              f"reduced -> {reduce_hill(image, pair) or 0}")

# %% the flows u_t = (psi^(n-1))_x land on the cleared negative-KdV equations
for n in (3, 4, 5):
    r = verify_mapping(n)
    print(r.check_id, r.status, r.details["subchecks"])
