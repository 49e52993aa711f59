import itertools
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hst

from cone_forge import spectra as sp

DATA = Path(__file__).resolve().parents[1] / "src" / "cone_forge" / "data"


def make_spec(betti=(1, 0, 1, 1, 0, 1), modes=()):
    return sp.LinkSpectrum(betti=betti, modes=tuple(
        sp.Mode(p=p, mu=float(mu), mult=mult,
                mu_exact=Fraction(mu) if isinstance(mu, (int, Fraction)) else None)
        for p, mu, mult in modes))


# ---------------------------------------------------------------------------
# spectrum validation


def test_poincare_duality_enforced():
    with pytest.raises(sp.ConstraintViolation):
        sp.LinkSpectrum(betti=(1, 1, 0, 0, 0, 1))


def test_zero_mode_multiplicity_must_match_betti():
    with pytest.raises(sp.ConstraintViolation):
        make_spec(modes=[(2, 0, 3)])


def test_constraint_records_enforced():
    rec = sp.ConstraintRecord(p=0, bound=5.0, strict=True)
    with pytest.raises(sp.ConstraintViolation):
        sp.LinkSpectrum(betti=(1, 0, 1, 1, 0, 1),
                        modes=(sp.Mode(p=0, mu=4.0, mult=1),),
                        constraints=(rec,))
    sp.LinkSpectrum(betti=(1, 0, 1, 1, 0, 1),
                    modes=(sp.Mode(p=0, mu=6.0, mult=1),),
                    constraints=(rec,))


def test_tagged_constraint_scopes():
    rec = sp.ConstraintRecord(p=2, bound=9.0, strict=False, tag="primitive-11")
    sp.LinkSpectrum(betti=(1, 0, 1, 1, 0, 1),
                    modes=(sp.Mode(p=2, mu=4.0, mult=1, tag="other"),),
                    constraints=(rec,))
    with pytest.raises(sp.ConstraintViolation):
        sp.LinkSpectrum(betti=(1, 0, 1, 1, 0, 1),
                        modes=(sp.Mode(p=2, mu=4.0, mult=1, tag="primitive-11"),),
                        constraints=(rec,))


def test_schema_errors():
    with pytest.raises(sp.SchemaError):
        sp.spectrum_from_dict({"betti": [1, 0, 0]})
    with pytest.raises(sp.SchemaError):
        sp.spectrum_from_dict({"betti": [1, 0, 0, 0, 0, 1],
                               "coexact_modes": [{"p": 0}]})
    with pytest.raises(sp.SchemaError):
        sp.spectrum_from_dict([1, 2, 3])


def test_load_shipped_s5():
    spec = sp.load_spectrum(DATA / "s5.json")
    assert spec.betti == (1, 0, 0, 0, 0, 1)
    assert spec.completeness(0) == 61.0
    assert [m.mu for m in spec.nonzero(0)] == [5, 12, 21, 32, 45, 60]


def test_load_shipped_s2xs3():
    spec = sp.load_spectrum(DATA / "s2xs3_partial.json")
    assert spec.betti == (1, 0, 1, 1, 0, 1)
    assert spec.completeness(0) == 5.0
    assert spec.completeness(1) == 8.0
    bounds = {(c.p, c.bound, c.strict) for c in spec.constraints}
    assert (0, 5.0, True) in bounds and (1, 8.0, False) in bounds


def test_shipped_spectrum_by_name():
    assert sp.shipped_spectrum("s5").betti == (1, 0, 0, 0, 0, 1)
    assert sp.load_spectrum("s2xs3_partial").betti == (1, 0, 1, 1, 0, 1)
    with pytest.raises(FileNotFoundError):
        sp.load_spectrum("no_such_spectrum")


def test_implicit_harmonic_modes():
    spec = make_spec()
    modes = spec.coclosed(2)
    assert modes[0].mu == 0.0 and modes[0].mult == 1


# ---------------------------------------------------------------------------
# radial couplings


def test_laplacian_coefficients_function_case():
    c = sp.laplacian_coefficients(0, -1.3)
    assert c.alpha_factor is None
    assert c.beta_factor == pytest.approx((-1.3) * (-1.3 + 4.0))


def test_laplacian_coefficients_p3_normal_form():
    c = sp.laplacian_coefficients(3, -2.0)
    assert c.alpha_factor == pytest.approx(-1.0)  # (lam+p-2)(lam-p+6) = -1
    assert (c.hat_alpha_shift, c.hat_beta_shift) == (1, 1)
    assert (c.alpha_cross, c.beta_cross) == (-2.0, -2.0)


def test_laplacian_coefficients_beta_boundary():
    # the slice coupling (lam+p)(lam-p+4) vanishes exactly on the pure-mode
    # boundary rates lam = -p and lam = p-4 (both equal -2 at p = 2)
    assert sp.laplacian_coefficients(2, -2.0).beta_factor == pytest.approx(0.0)
    assert sp.laplacian_coefficients(1, -1.0).beta_factor == pytest.approx(0.0)
    assert sp.laplacian_coefficients(1, -3.0).beta_factor == pytest.approx(0.0)
    assert sp.laplacian_coefficients(2, 0.0).beta_factor == pytest.approx(4.0)


def test_laplacian_coefficients_degree_range():
    with pytest.raises(sp.DegreeOutOfRange):
        sp.laplacian_coefficients(7, 0.0)


# ---------------------------------------------------------------------------
# hat eigenvalues


def test_hat_eigenvalues_examples():
    spec = make_spec()
    fam3 = [e for e in sp.hat_eigenvalues(spec, 3) if e[2] == 3]
    assert fam3 == [(1.0, 1, 3)]  # (p-4)^2 = 1 with multiplicity h_2
    spec8 = make_spec(modes=[(2, 8, 1)])
    fam4 = sorted(e[0] for e in sp.hat_eigenvalues(spec8, 3) if e[2] == 4)
    assert fam4 == pytest.approx([(2 * math.sqrt(2) - 1) ** 2,
                                  (2 * math.sqrt(2) + 1) ** 2])
    spec0 = make_spec(betti=(1, 0, 0, 0, 0, 1), modes=[(0, 7, 2)])
    ev = sp.hat_eigenvalues(spec0, 0)
    assert ev == [(4.0, 1, 2), (11.0, 2, 2)]  # mu + (p-2)^2 only


def test_hat_pair_symmetry():
    spec = make_spec(modes=[(0, 7, 1), (1, 8, 2), (2, 11, 1)])
    for p in range(7):
        window = (-12.0, 8.0)
        cat = sp.harmonic_rate_catalog(spec, p, window)
        tally = {}
        for r in cat:
            mu_hat = round((r.lam + 2.0) ** 2, 6)
            if mu_hat > 0:
                key = (mu_hat, r.lam > -2.0)
                tally[key] = tally.get(key, 0) + r.multiplicity
        for (mu_hat, upper), mult in tally.items():
            assert tally.get((mu_hat, not upper)) == mult, (p, mu_hat)


def test_log_mode_iff_rate_minus_two():
    spec = make_spec()
    cat = sp.harmonic_rate_catalog(spec, 2, (-6.5, 2.5))
    t6 = [r for r in cat if r.gen_type == "T6"]
    assert len(t6) == 1 and t6[0].lam == -2.0 and t6[0].log_mode
    assert t6[0].dim == 2  # phi_21 and log r phi_21
    assert all(r.log_mode == (abs(r.lam + 2.0) < 1e-12) for r in cat)


def test_harmonic_catalog_known_generators():
    # p=2, h2=1: T6 at lambda = -2 with multiplicity 1
    spec = make_spec()
    cat = sp.harmonic_rate_catalog(spec, 2, (-2.5, -1.5))
    assert [(r.lam, r.gen_type, r.multiplicity) for r in cat] == \
        [(-2.0, "T6", 1)]
    # p=1, mu_0 = 12: T4 root at sqrt(12+4)-3 = 1 (T2 carries r dr there too)
    spec12 = make_spec(modes=[(0, 12, 1)])
    cat = sp.harmonic_rate_catalog(spec12, 1, (0.5, 1.5))
    assert {(r.lam, r.gen_type) for r in cat} == {(1.0, "T4"), (1.0, "T2")}
    # empty spectrum, empty window result
    empty = sp.LinkSpectrum(betti=(0, 0, 0, 0, 0, 0))
    assert sp.harmonic_rate_catalog(empty, 3, (-5.0, 5.0)) == []


def test_harmonic_catalog_t7_includes_green_partner():
    # harmonic p-modes also solve (lam+p)(lam-p+4) = 0 at lam = p-4
    spec = make_spec(betti=(1, 0, 0, 0, 0, 1))
    cat = sp.harmonic_rate_catalog(spec, 0, (-5.0, 1.0))
    assert [(r.lam, r.gen_type) for r in cat] == [(-4.0, "T7"), (0.0, "T6")]


def test_harmonic_p1_empty_under_link_bounds():
    # with the function bound (> 5), the 1-form bound (>= 8) and h_1 = 0,
    # no 1-form critical rate lies in (-3, 0)
    spec = make_spec(modes=[(0, 5.5, 2), (0, 12, 1), (1, 8, 1), (1, 11, 3)])
    assert sp.harmonic_rate_catalog(spec, 1, (-3.0, 0.0)) == []


def test_t4_rates_match_exact_one_forms():
    # d of a degree-k harmonic polynomial is a harmonic 1-form of rate k-1;
    # the T4 equation (lam+1)(lam+5) = k(k+4) must reproduce exactly that
    for k in range(1, 7):
        spec = make_spec(betti=(1, 0, 0, 0, 0, 1), modes=[(0, k * (k + 4), 1)])
        cat = sp.harmonic_rate_catalog(spec, 1, (k - 1.5, k - 0.5))
        assert [r.lam for r in cat if r.gen_type == "T4"] == [float(k - 1)]


def test_critical_endpoint_rejected():
    spec = make_spec()
    with pytest.raises(sp.CriticalEndpoint):
        sp.harmonic_rate_catalog(spec, 2, (-2.0, 1.0))


# ---------------------------------------------------------------------------
# one-form catalog


def obata_spec(extra=()):
    return make_spec(modes=[(1, 8, 1)] + list(extra))


def test_one_form_empty_below_zero():
    assert sp.one_form_catalog(obata_spec(), (-3.0, 0.0)) == []


def test_one_form_mu12_twice_tagged():
    cat = sp.one_form_catalog(obata_spec([(0, 12, 1)]), (0.0, 1.0))
    tags = sorted(r.gen_type for r in cat if r.lam == 1.0)
    assert tags == ["1F1", "1F2", "1F3-killing", "1F4"]


def test_one_form_killing_entry():
    cat = sp.one_form_catalog(obata_spec(), (0.0, 1.0))
    assert {(r.lam, r.gen_type) for r in cat} == {(1.0, "1F2"),
                                                  (1.0, "1F3-killing")}


def test_one_form_moving_family_rate():
    cat = sp.one_form_catalog(obata_spec([(0, 7.25, 1)]), (0.0, 1.0))
    moving = [r for r in cat if r.gen_type == "1F1"]
    assert moving[0].lam == pytest.approx(math.sqrt(11.25) - 3.0)


def test_one_form_constraint_violations():
    bad_obata = make_spec(modes=[(0, 4.5, 1)])
    with pytest.raises(sp.ConstraintViolation):
        sp.one_form_catalog(bad_obata, (-3.0, 0.0))
    bad_killing = make_spec(modes=[(1, 7.0, 1)])
    with pytest.raises(sp.ConstraintViolation):
        sp.one_form_catalog(bad_killing, (-3.0, 0.0))
    bad_h1 = sp.LinkSpectrum(betti=(1, 1, 1, 1, 1, 1))
    with pytest.raises(sp.ConstraintViolation):
        sp.one_form_catalog(bad_h1, (-3.0, 0.0))
    with pytest.raises(sp.WindowOutOfRange):
        sp.one_form_catalog(obata_spec(), (-4.0, 0.0))


# ---------------------------------------------------------------------------
# paired catalog


def test_paired_three_generators_when_no_moving_family():
    cat = sp.paired_catalog(obata_spec(), (-2.0, 0.0))
    assert [r.lam for r in cat] == [0.0, 0.0, 0.0]
    assert {r.gen_type[:2] for r in cat} == {"P1", "P2", "P3"}


def test_paired_moving_family():
    cat = sp.paired_catalog(obata_spec([(0, 7.25, 1), (0, 12, 1)]),
                            (-2.0, 0.0))
    p4 = [r for r in cat if r.gen_type == "P4"]
    assert sorted(r.lam for r in p4) == pytest.approx(
        [math.sqrt(11.25) - 4.0, 0.0])


def test_paired_window_range():
    with pytest.raises(sp.WindowOutOfRange):
        sp.paired_catalog(obata_spec(), (-2.0, 0.5))


# ---------------------------------------------------------------------------
# function rates


def harmonic_polynomial_dim(k, nvars=6):
    """Brute force: kernel dimension of the Laplacian on degree-k monomials."""
    monos = [m for m in itertools.combinations_with_replacement(range(nvars), k)]
    lower = {m: i for i, m in enumerate(
        itertools.combinations_with_replacement(range(nvars), k - 2))} \
        if k >= 2 else {}
    A = np.zeros((len(lower), len(monos)))
    for col, m in enumerate(monos):
        counts = [m.count(v) for v in range(nvars)]
        for v in range(nvars):
            if counts[v] >= 2:
                c = counts[v] * (counts[v] - 1)
                new = list(counts)
                new[v] -= 2
                key = tuple(itertools.chain.from_iterable(
                    [vv] * nn for vv, nn in enumerate(new)))
                A[lower[key], col] += c
    rank = np.linalg.matrix_rank(A) if lower else 0
    return len(monos) - rank


def test_function_rates_round_sphere_oracle():
    spec = sp.load_spectrum(DATA / "s5.json")
    rates = sp.function_rates(3, spec.coclosed(0), (-0.5, 6.5))
    got = {r.lam: r.multiplicity for r in rates}
    expect = {0.0: 1}
    for k in range(1, 7):
        expect[float(k)] = harmonic_polynomial_dim(k)
    assert got == expect
    assert expect[2.0] == 20


def test_function_rates_zero_mode():
    rates = sp.function_rates(3, [sp.Mode(p=0, mu=0.0, mult=1,
                                          mu_exact=Fraction(0))],
                              (-5.0, 1.0))
    assert sorted(r.lam for r in rates) == [-4.0, 0.0]


def test_function_rates_mu12():
    rates = sp.function_rates(3, [sp.Mode(p=0, mu=12.0, mult=1,
                                          mu_exact=Fraction(12))],
                              (-7.0, 3.0))
    assert sorted(r.lam for r in rates) == [-6.0, 2.0]


def test_function_gap_report():
    good = [sp.Mode(p=0, mu=0.0, mult=1), sp.Mode(p=0, mu=6.0, mult=2)]
    rep = sp.function_gap_report(3, good)
    assert rep["no_rate_in_negative_gap"] and rep["no_rate_in_zero_one"]
    sphere = [sp.Mode(p=0, mu=5.0, mult=6)]
    rep = sp.function_gap_report(3, sphere)
    assert not rep["no_rate_in_zero_one"]  # the round sphere saturates


# ---------------------------------------------------------------------------
# index change


def end_kernel_dim2():
    # K_infty(0) = span{1, t}: one generator plus its t-partner
    return [sp.CriticalRate(lam=0.0, degree=0, multiplicity=1,
                            gen_type="end-constant", log_mode=True)]


def test_index_change_reproduces_minus_one():
    nu = 0.25
    N = sp.index_change(
        [[]], end_kernel_dim2(),
        sp.WeightVector((-2.0,), -nu), sp.WeightVector((-1.9,), nu))
    assert N == 2
    assert -N // 2 == -1  # the openness-proof index via duality


def test_index_change_empty():
    N = sp.index_change([[], []], [],
                        sp.WeightVector((0.0, 0.0), 0.0),
                        sp.WeightVector((1.0, 1.0), 1.0))
    assert N == 0


def test_index_change_errors():
    with pytest.raises(sp.WeightOrderViolation):
        sp.index_change([[]], [], sp.WeightVector((1.0,), 0.0),
                        sp.WeightVector((0.0,), 1.0))
    rate = sp.CriticalRate(lam=0.5, degree=0, multiplicity=1, gen_type="x")
    with pytest.raises(sp.CriticalEndpoint):
        sp.index_change([[rate]], [], sp.WeightVector((0.5,), 0.0),
                        sp.WeightVector((1.0,), 1.0))


@settings(max_examples=60, deadline=None)
@given(hst.lists(hst.tuples(hst.floats(-5, 5), hst.integers(1, 4)),
                 max_size=8),
       hst.floats(-6, 6), hst.floats(0.01, 3), hst.floats(0.01, 3))
def test_index_change_window_additivity(entries, lo, gap1, gap2):
    cat = [sp.CriticalRate(lam=l, degree=0, multiplicity=m, gen_type="t")
           for l, m in entries]
    mid, hi = lo + gap1, lo + gap1 + gap2
    if any(min(abs(r.lam - e) for e in (lo, mid, hi)) <= 1e-9 for r in cat):
        return  # ties are tested separately as errors
    def wv(x):
        return sp.WeightVector((x,), x)
    full = sp.index_change([cat], cat, wv(lo), wv(hi))
    split = (sp.index_change([cat], cat, wv(lo), wv(mid))
             + sp.index_change([cat], cat, wv(mid), wv(hi)))
    assert full == split
    assert full >= 0
    assert full >= sp.index_change([cat], cat, wv(lo), wv(mid))


def test_weight_vector_criticality():
    cat = [sp.CriticalRate(lam=1.0, degree=0, multiplicity=1, gen_type="t")]
    assert sp.WeightVector((1.0,), 5.0).is_critical([cat], [])
    assert not sp.WeightVector((0.5,), 5.0).is_critical([cat], [])
