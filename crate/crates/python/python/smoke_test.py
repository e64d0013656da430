"""Smoke test for the modfol extension module.

Build and install with `maturin develop` (or `pip install .`) from
crates/python, then run `python python/smoke_test.py`.
"""

import modfol

c = modfol.curve(11)
assert (c.mu, c.nu2, c.nu3, c.nu_inf, c.genus) == (12, 0, 0, 2, 1), c

forms = modfol.decompose(23)
assert len(forms) == 1 and forms[0].degree == 2, forms
assert forms[0].classification == "pseudo_anosov"
assert modfol.classify(37) == ["strebel", "strebel"]

t = modfol.torus(2, 1, 1, 1)
assert t.kind == "anosov" and abs(t.dilatation - 2.618033988749895) < 1e-12, t.kind
assert modfol.torus(1, 1, 0, 1).kind == "parabolic_strebel"

p = modfol.periods(23, digits=45)
assert p.detected_rank == p.exact_rank == 2, (p.detected_rank, p.exact_rank)
rank, relations = modfol.detect_rank(["1.0", "1.4142135623730950488016887242096980785696718753769"], 45)
assert rank == 2 and relations == [], (rank, relations)

iet = modfol.Iet(["1/2", "1/3", "1/6"], [3, 1, 2])
assert iet.periodicity() == (True, "2", 6), iet.periodicity()
assert iet.apply_inverse(iet.apply("1/5")) == "1/5"

golden = modfol.Iet(["1", "w"], [2, 1], field="w^2-w-1")
assert golden.minimality(2000) == (True, 0)
assert golden.rauzy_step().permutation == [2, 1]

try:
    modfol.curve(1)
except ValueError:
    pass
else:
    raise AssertionError("level 1 accepted")

try:
    modfol.classify(5)
except modfol.ModfolError:
    pass
else:
    raise AssertionError("genus 0 accepted")

print("modfol smoke test passed")
