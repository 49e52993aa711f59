"""Indicial-rate catalogs from link spectra, and the index-change count.

Uses the two shipped spectrum files: the round 5-sphere (whose function
rates are non-negative integers with harmonic-polynomial multiplicities)
and the partial product-link spectrum carrying only the established bounds.
"""

from pathlib import Path

from cone_forge import spectra as sp

DATA = Path(__file__).resolve().parents[1] / "src" / "cone_forge" / "data"

print("== function rates on the flat cone over the round S5 ==")
s5 = sp.load_spectrum(DATA / "s5.json")
for r in sp.function_rates(3, s5.coclosed(0), (-0.5, 6.5)):
    print(f"  lambda = {r.lam:4.1f}  multiplicity {r.multiplicity}")
print("gap report:", sp.function_gap_report(3, s5.coclosed(0)))

print("\n== the quadric-cone link (partial data) ==")
s23 = sp.load_spectrum(DATA / "s2xs3_partial.json")
print("one-form catalog on (-3, 0]:", sp.one_form_catalog(s23, (-3.0, 0.0)))
print("one-form catalog on (0, 1]:")
for r in sp.one_form_catalog(s23, (0.0, 1.0)):
    print(f"  lambda = {r.lam}  [{r.gen_type}] x{r.multiplicity}")

print("\npaired 2-/3-form catalog on (-2, 0]:")
for r in sp.paired_catalog(s23, (-2.0, 0.0)):
    print(f"  lambda = {r.lam}  [{r.gen_type}]")

print("\nharmonic 2-form rates in (-2.5, 0.5):")
for r in sp.harmonic_rate_catalog(s23, 2, (-2.5, 0.5)):
    print(f"  lambda = {r.lam}  [{r.gen_type}] x{r.multiplicity}"
          f"{'  + log partner' if r.log_mode else ''}")

print("\n== index change across the cylinder-end kernel ==")
end = [sp.CriticalRate(lam=0.0, degree=0, multiplicity=1,
                       gen_type="end-constant", log_mode=True)]
N = sp.index_change([[]], end, sp.WeightVector((-2.0,), -0.25),
                    sp.WeightVector((-1.9,), 0.25))
print(f"N = {N}; by the duality argument the Fredholm index is -N/2 = {-N//2}")
