"""Smoke test for the envlab extension module: python crates/py/python/smoke_test.py"""

import math

import envlab


def close(a, b, rel=1e-12):
    return abs(a - b) <= rel * max(abs(a), abs(b))


grid = envlab.Grid.uniform([0.0, 0.0], [1.0, 1.0], [4, 4])
assert grid.shape == [4, 4] and grid.n_cells == 16

f = envlab.StepFunction.product_indicator(grid, [(0.0, 0.5), (0.0, 0.5)], value=2.0)
prof = f.rearrange()
assert prof.plateaus == [(2.0, 0.25)]
assert prof(0.1) == 2.0 and prof(0.3) == 0.0
assert close(envlab.Space.lebesgue(grid, 2.0).norm(f), 1.0)
assert close(envlab.Space.lorentz(grid, 2.0, 2.0).norm(f), 1.0)
assert close(envlab.mixed_norm(f, [1.0, 2.0]), 2.0 * 0.5 * math.sqrt(0.5))

g = envlab.StepFunction.from_json(f.to_json())
assert g.values == f.values

p = envlab.Exponent(envlab.StepFunction.constant(grid, 3.0))
assert close(envlab.variable_norm(f, p), 2.0 * 0.25 ** (1 / 3), rel=1e-9)

try:
    envlab.Space.lebesgue(grid, 0.0)
except ValueError:
    pass
else:
    raise AssertionError("p = 0 accepted")

fine = envlab.Grid.dyadic([0.0], [1.0], 12)
curve = envlab.Space.lebesgue(fine, 2.0).envelope(envlab.dyadic_t_samples(2, 10), fit=(2.0**-10, 2.0**-2))
assert abs(curve["fit"]["alpha"] - 0.5) < 1e-6

probe = envlab.Space.lorentz(envlab.Grid.uniform([0.0], [1.0], [1]), 2.0, 2.0).index_probe(
    4.0, {"kind": "cascade", "alpha": 1.02, "j0": 2}, 5, 30
)
assert probe["classification"] == "bounded", probe["classification"]

w = envlab.non_embedding_witness([1.0, 2.0], 0.5, [2.0**k for k in range(4, 11)])
assert len(w["target_norms"]) == 7

lo, hi = envlab.hardy_bracket(2.0, 0.5, 0.5, 8, 0.5, 2.0, 0.25)
assert 0 < lo <= hi

print("envlab smoke test passed")
