"""Verify every Bäcklund generator and look at the critical loci where the
generic formulas become 0/0.

Run: python demos/backlund_tour.py
"""

from painleve3.backlund import (
    CRITICAL_CASES, GENERATORS, group_relations_check, locus_equation_residual,
    verify_transformation,
)

for family, names in GENERATORS.items():
    for name in names:
        rep = verify_transformation(name, family)
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status}  {family} {name:<4} {rep.param_action}")

print()
for rel, ok in group_relations_check().items():
    print(f"{'PASS' if ok else 'FAIL'}  {rel}")

print()
for case in CRITICAL_CASES:
    (k, v), = case.relation.items()
    derived = case.value()
    printed_ok = locus_equation_residual(case, case.printed).is_zero()
    print(f"{case.generator} at {k} = {v}:")
    print(f"  q~ on the locus   = {derived}")
    print(f"  printed value     = {case.printed} ({'solves' if printed_ok else 'does not solve'}"
          " the target equation)")
