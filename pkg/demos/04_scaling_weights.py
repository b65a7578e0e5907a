"""Gradings that make the equations homogeneous."""
from negkdv.identities import cleared_numerator, expand_cleared
from negkdv.symmetry import WeightSystem, check_homogeneous, find_scaling_weights, t_degree_profile

for eq_id, label in (("eq1b", "x"), ("eq101", "x"), ("eq102", "v")):
    fam = find_scaling_weights(cleared_numerator(eq_id), label)
    print(eq_id, "gradings:", [w.render() for w in fam])

printed = WeightSystem({"v": 2}, {"w": -3})
print("(v:2, w:-3) on eq102:", check_homogeneous(cleared_numerator("eq102"), printed))

prof = {(c, m) for _, c, m in t_degree_profile(expand_cleared(5))}
print("t-degree profile of the n = 5 cleared equation:", prof)
