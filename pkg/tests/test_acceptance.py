"""Acceptance layer: exhaustive identity and bound checks at desk scale.

Each test here states its size sweep explicitly and pins tolerances; the
unit-test files cover API behavior, this file covers the mathematics.
"""

import cmath
import itertools
import json
import math
import random

import numpy as np
import pytest

from momentkit.assembly import (CASE_COND_EXP, CASE_NAMES, D4_EXPONENTS,
                                FinitePlace, GlobalSpec, d3_status, d4_toy,
                                wt4_local, zeta_factors)
from momentkit.characters import (AddChar, MultChar, canonical_psi,
                                  enumerate_chars, gauss_sum, jacobi_sum,
                                  trivial_char)
from momentkit.charsum import B_sum, CharSumInstance, S_eval, scan
from momentkit.cli import cli_run
from momentkit.field import make_field, odd_prime_powers, quad_ext
from momentkit.hypergeom import HyperSpec, classify_exceptional, hyper_sum
from momentkit.oracle import oracle_m4
from momentkit.padic import (VANISHES, Case1, Case2NS, Case2SC, Case3,
                             LocalCharParam, LocalFieldModel, gauss_integral,
                             m4I_term, m4_closed, m4_empty_split,
                             trivial_local_char, _ADMISSIBLE_I)
from momentkit.series import (LocalWeightExpr, expand_at, geometric,
                              one_minus_u, residue_and_order)

PP_31 = odd_prime_powers(3, 31)


def field_for(q):
    pf = {p ** f: (p, f) for p, f in odd_prime_powers(3, q)}
    return make_field(*pf[q])


def regular_tob_thetas(qctx):
    return enumerate_chars(qctx.ext, "nontrivial", "trivial_on_base",
                           "regular", qctx=qctx)


# ---------------------------------------------------------------------------
# 1. Gauss / Jacobi suite


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13, 25, 27, 49])
def test_gauss_jacobi_suite(q):
    ctx = field_for(q)
    n = q - 1
    sq = math.sqrt(q)
    chars = enumerate_chars(ctx)
    # tau table: taus[k, a-1] = tau(chi_k, psi_a) for all nontrivial psi_a
    char_mat = np.stack([c.values() for c in chars])
    psi_mat = np.stack([AddChar(ctx, a).values() for a in range(1, q)],
                       axis=1)
    taus = char_mat @ psi_mat
    # modulus and trivial-character values
    assert np.all(np.abs(np.abs(taus[1:]) - sq) < 1e-9 * sq)
    assert np.all(np.abs(taus[0] + 1.0) < 1e-12)
    # Jacobi-Gauss identity over every pair with nontrivial product, and
    # every nontrivial additive character
    jac = {}
    for k1, k2 in itertools.product(range(1, n), repeat=2):
        if (k1 + k2) % n == 0:
            continue
        jac[(k1, k2)] = jacobi_sum(chars[k1], chars[k2])
        lhs = taus[k1] * taus[k2]
        rhs = jac[(k1, k2)] * taus[(k1 + k2) % n]
        assert np.max(np.abs(lhs - rhs)) < 1e-9 * q
    # spot-check the tau table against the scalar API
    psi3 = AddChar(ctx, min(3, q - 1))
    assert abs(taus[1, min(3, q - 1) - 1]
               - gauss_sum(chars[1], psi3)) < 1e-12 * sq


# ---------------------------------------------------------------------------
# 2. hypergeometric reduction of the B sum


@pytest.mark.parametrize("p,f", PP_31)
def test_b_sum_hypergeometric_reduction(p, f):
    qctx = quad_ext(p, f)
    base = qctx.base
    q = base.q
    tol = 1e-7 * math.sqrt(q)
    psi = canonical_psi(base)
    chi0 = trivial_char(base)
    # arg[t-2, y] = 1 - y/(1-t); built once, reused for every pair
    arg = np.empty((q - 2, q), dtype=np.int64)
    for i, t in enumerate(range(2, q)):
        inv1mt = base.inv(base.sub(1, t))
        for y in range(q):
            arg[i, y] = base.sub(1, base.mul(y, inv1mt))
    nontrivial = enumerate_chars(base, "nontrivial")
    from momentkit.hypergeom import hyper_all_t
    for chi in nontrivial:
        cvals = chi.values()[2:]
        for eta in nontrivial:
            b_all = cvals @ eta.values()[arg]
            pref = -gauss_sum(chi, psi) * gauss_sum(eta, psi) / math.sqrt(q)
            h = hyper_all_t(HyperSpec((chi0, chi0), (chi, eta)))
            assert np.max(np.abs(b_all[1:] - pref * h[1:])) < tol
            # tie the vectorized table to the scalar API under test
            inst = CharSumInstance(qctx, chi, eta, MultChar(qctx.ext, 1))
            for y in (1, q - 1):
                assert abs(B_sum(inst, y) - b_all[y]) < 1e-10 * q


# ---------------------------------------------------------------------------
# 3. three-way S agreement


@pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1),
                                 (13, 1)])
def test_s_methods_exhaustive(p, f):
    qctx = quad_ext(p, f)
    q = qctx.base.q
    tol = 1e-7 * q
    chis = enumerate_chars(qctx.base, "nontrivial")
    rhos = enumerate_chars(qctx.ext, "nontrivial")
    for chi, eta, rho in itertools.product(chis, chis, rhos):
        inst = CharSumInstance(qctx, chi, eta, rho)
        d = S_eval(inst, "direct")
        assert abs(S_eval(inst, "via_AB") - d) < tol
        assert abs(S_eval(inst, "via_T") - d) < tol


@pytest.mark.parametrize("p,f", [(17, 1), (19, 1), (23, 1), (5, 2), (3, 3),
                                 (29, 1), (31, 1)])
def test_s_methods_random(p, f):
    qctx = quad_ext(p, f)
    q = qctx.base.q
    tol = 1e-7 * q
    rng = random.Random(97 * q + 11)
    for _ in range(1000):
        inst = CharSumInstance(
            qctx,
            MultChar(qctx.base, rng.randrange(1, q - 1)),
            MultChar(qctx.base, rng.randrange(1, q - 1)),
            MultChar(qctx.ext, rng.randrange(1, q * q - 1)))
        d = S_eval(inst, "direct")
        assert abs(S_eval(inst, "via_AB") - d) < tol
        assert abs(S_eval(inst, "via_T") - d) < tol


# ---------------------------------------------------------------------------
# 4. whole-range bound scan


def test_bound_scan_q_31():
    out = scan(3, 31)
    assert out["max_abs_S_over_q"] <= 1000
    assert out["max_abs_T_over_sqrt_q"] <= 1000
    assert not out["any_flagged"]
    # empirical maxima are recorded in the report
    assert out["max_abs_S_over_q"] > 0
    assert {r["q"] for r in out["rows"]} == {p ** f for p, f in PP_31}


# ---------------------------------------------------------------------------
# 5. exceptional-pair classification


def test_no_exceptional_pairs_in_sweep():
    for p, f in PP_31:
        ctx = make_field(p, f)
        chi0 = trivial_char(ctx)
        for chi in enumerate_chars(ctx, "nontrivial"):
            for eta in enumerate_chars(ctx, "nontrivial"):
                got = classify_exceptional(
                    HyperSpec((chi0, chi0), (chi, eta)))
                assert got["kummer"] is None
                assert got["belyi"] is None
                assert got["inverse_belyi"] is None


def test_exceptional_positive_controls():
    # 2-Kummer: both tuples are complete square-root multisets
    ctx = make_field(13, 1)
    nu = 12
    chi = (MultChar(ctx, 1), MultChar(ctx, 1 + nu // 2))
    eta = (MultChar(ctx, 5), MultChar(ctx, 5 + nu // 2))
    assert classify_exceptional(HyperSpec(chi, eta))["kummer"] == 2
    # Belyi: chi = {alpha, beta} with a = b = 1, eta the full square-root
    # set of alpha + beta
    ctx7 = make_field(7, 1)
    spec = HyperSpec((MultChar(ctx7, 2), MultChar(ctx7, 4)),
                     (MultChar(ctx7, 0), MultChar(ctx7, 3)))
    got = classify_exceptional(spec)
    assert got["belyi"] == (1, 1)


# ---------------------------------------------------------------------------
# 6. Kloosterman / Weil


def test_kloosterman_weil_bound():
    for p, f in odd_prime_powers(3, 49):
        ctx = make_field(p, f)
        chi0 = trivial_char(ctx)
        spec = HyperSpec((chi0, chi0), ())
        for t in range(1, ctx.q):
            assert abs(hyper_sum(spec, t)) <= 2.0 + 1e-9


# ---------------------------------------------------------------------------
# 7. closed forms against the independent integrator


def _local_cases(q):
    m = LocalFieldModel(q, 1)
    qctx = quad_ext(q, 1)
    theta = regular_tob_thetas(qctx)[0]
    unram = LocalCharParam(c=cmath.exp(0.37j))
    ram = LocalCharParam(c=cmath.exp(0.21j), ram=MultChar(m.residue, 1))
    combos = [
        (Case1(m, 1), trivial_local_char()),
        (Case1(m, -1), trivial_local_char()),
        (Case1(m, 1), unram),
        (Case1(m, 1), ram),          # weight vanishes; oracle must agree
        (Case2NS(m, 1, -1), trivial_local_char()),
        (Case2NS(m, 1, 1), trivial_local_char()),
        (Case2SC(qctx, theta), trivial_local_char()),
        (Case2SC(qctx, theta), unram),
        (Case2SC(qctx, theta), ram),
        (Case3(m, 1), trivial_local_char()),
        (Case3(m, 2), unram),
        (Case3(m, 1), ram),
    ]
    return combos


@pytest.mark.parametrize("q", [3, 5, 7])
def test_oracle_matches_closed_forms(q):
    for case, chi in _local_cases(q):
        for s in (0.0, 0.1, -0.1, 0.25j):
            closed = m4_closed(case, chi, s=s)
            if closed is VANISHES:
                closed = 0j
            val, bound = oracle_m4(case, chi, s=s, N=8)
            assert bound <= 10 * q ** -4
            assert abs(val - closed) <= bound, (case, chi, s)


# ---------------------------------------------------------------------------
# 8. term-by-term structure of the depth-zero weight


def _sc_chi_list(qctx):
    base = qctx.base
    out = [trivial_local_char(), LocalCharParam(c=cmath.exp(0.31j))]
    out += [LocalCharParam(c=cmath.exp(0.17j), ram=MultChar(base, k))
            for k in range(1, base.q - 1)]
    return out


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13])
def test_m4_term_structure(q):
    qctx = quad_ext(q, 1)
    s = 0.0
    for theta in regular_tob_thetas(qctx):
        case = Case2SC(qctx, theta)
        for chi in _sc_chi_list(qctx):
            t1 = m4I_term(case, chi, s, (1,))
            t4 = m4I_term(case, chi, s, (4,))
            t2 = m4I_term(case, chi, s, (2,))
            t3 = m4I_term(case, chi, s, (3,))
            assert abs(t1 - t4) < 1e-9
            assert abs(t2 - t3) < 1e-9
            if chi.a == 1:
                # ramified characters kill every forced-slot tail
                assert abs(t1) < 1e-12 and abs(t2) < 1e-12
            d, e = m4_empty_split(case, chi, s)
            empty = m4I_term(case, chi, s, ())
            assert abs((d + e) - empty) < 1e-9
            total = sum(m4I_term(case, chi, s, I)
                        for I in sorted(_ADMISSIBLE_I))
            val, bound = oracle_m4(case, chi, s=s, N=8)
            assert abs(total - val) <= bound


@pytest.mark.xfail(strict=True, reason="the single-forced-slot terms "
                   "M4^{1} and M4^{4} are equal but provably nonzero for "
                   "unramified characters (their residue sum over the "
                   "elliptic classes is (q-1)^2 theta(omega), not 0); "
                   "recorded as entry D5 in the project decisions ledger")
def test_m4_single_slot_terms_vanish_unramified():
    qctx = quad_ext(5, 1)
    case = Case2SC(qctx, regular_tob_thetas(qctx)[0])
    chi = trivial_local_char()
    assert abs(m4I_term(case, chi, 0.0, (1,))) < 1e-9
    assert abs(m4I_term(case, chi, 0.0, (4,))) < 1e-9


# ---------------------------------------------------------------------------
# 9. dual-weight uniformity at the center


def test_dual_weight_uniform_bounds():
    for p, f in PP_31:
        q = p ** f
        qctx = quad_ext(p, f)
        thetas = regular_tob_thetas(qctx)
        ram_ks = range(1, q - 1) if q <= 13 else (1, 2, (q - 1) // 2)
        chis = [trivial_local_char(), LocalCharParam(c=cmath.exp(0.4j)),
                LocalCharParam(c=-1.0)]
        chis += [LocalCharParam(c=cmath.exp(0.2j),
                                ram=MultChar(qctx.base, k)) for k in ram_ks]
        for theta in (thetas if q <= 13 else thetas[:3]):
            case = Case2SC(qctx, theta)
            for chi in chis:
                assert abs(m4_closed(case, chi, 0.0)) <= 50.0
        m = LocalFieldModel(p, f)
        for t in (1, 2 % q or 1, q - 1):
            case = Case3(m, t)
            for chi in chis:
                assert abs(m4_closed(case, chi, 0.0)) <= 50.0 * q ** -0.5


# ---------------------------------------------------------------------------
# 10. the twisted Gauss integral


def test_gauss_integral_bound_and_exact_value():
    for p, f in PP_31:
        q = p ** f
        m = LocalFieldModel(p, f)
        cs = [1.0, -1.0, cmath.exp(0.4j), cmath.exp(2.2j)]
        chis = [LocalCharParam(c=c) for c in cs]
        chis += [LocalCharParam(c=cmath.exp(0.3j), ram=MultChar(m.residue, k))
                 for k in range(1, q - 1)]
        units = range(1, q) if q <= 13 else (1, 2, q - 1)
        for a in units:
            for chi in chis:
                val = gauss_integral(m, a, chi)
                assert abs(val) <= 20.0 * q ** -0.5
                if chi.a == 0:
                    x = chi.c * q ** -0.5
                    want = -1 / (q - 1) + x / (1 - x)
                    assert abs(val - want) < 1e-12


# ---------------------------------------------------------------------------
# 11. series toolkit


@pytest.mark.parametrize("q", [2, 3, 5, 49])
def test_geometric_residue(q):
    order, res = residue_and_order(1.0 / one_minus_u(q), 0.0)
    assert order == -1
    assert abs(res - 1 / math.log(q)) < 1e-10


def test_d3_order_formula_200_random():
    rng = random.Random(1729)
    qs = [p ** f for p, f in odd_prime_powers(3, 13)]
    for _ in range(200):
        r = rng.randint(1, 3)
        n = rng.randint(0, 4)
        places = tuple(FinitePlace(q, rng.choice(("case1", "case1", "case1",
                                                  "case2sc", "case3",
                                                  "case2ns", "case4ns")))
                       for q in rng.sample(qs, n))
        st = d3_status(GlobalSpec(r=r, finite=places))
        cases = [pl.case for pl in places]
        if any(c != "case1" for c in cases):
            assert st.vanishes
        else:
            assert st.order == 3 * r - 5 + len(cases)


def _cauchy_coeffs(fn, s0, nmax, radius=0.05, samples=256):
    """Taylor coefficients by numerical contour integration; independent of
    the Laurent machinery under test."""
    thetas = 2 * math.pi * np.arange(samples) / samples
    zs = s0 + radius * np.exp(1j * thetas)
    vals = np.array([fn(z) for z in zs])
    out = []
    for k in range(nmax + 1):
        ck = np.mean(vals * np.exp(-1j * k * thetas)) / radius ** k
        out.append(complex(ck))
    return out


def test_laurent_expansions_match_numeric_oracle():
    probes = [
        (geometric(7.0, 0.8, 0.3), 0.2),
        (zeta_factors(5), 0.1),
        (wt4_local("case1", 7).expr, 0.15),
        (LocalWeightExpr(3.0, (1.0, -2.0, 0.5), (1.0, 0.3), 2), -0.2),
    ]
    for expr, s0 in probes:
        ser = expand_at(expr, s0, order=3)
        want = _cauchy_coeffs(expr.eval, s0, 3)
        scale = max(abs(c) for c in want) + 1.0
        for n in range(4):
            assert abs(ser.coeff(n) - want[n]) < 1e-8 * scale, (s0, n)


# ---------------------------------------------------------------------------
# 12. per-place ledger bounds


def test_d4_ledger_bounds_constant_10():
    for name in CASE_NAMES:
        e1, e0 = D4_EXPONENTS[name]
        for p, f in PP_31:
            q = p ** f
            spec = GlobalSpec(r=1, finite=(FinitePlace(q, name),))
            out = d4_toy(spec, arch_stubs=1.0)
            entry = out["ledger"][0]
            cond = float(q ** CASE_COND_EXP[name])
            for n in range(-2, 3):
                assert abs(entry["w1"][n]) <= 10.0 * cond ** e1, (name, q, n)
                assert abs(entry["w0"][n]) <= 10.0 * cond ** e0, (name, q, n)


# ---------------------------------------------------------------------------
# 13. end-to-end artifact determinism


_ARTIFACT_SUITE = [
    ["gauss", "--qlist", "3,5,7,9"],
    ["charsum-scan", "--qmin", "3", "--qmax", "9"],
    ["hyper", "--q", "9"],
    ["hyper", "--q", "7", "--chi", "1", "--eta", "2"],
    ["local", "--case", "case2sc", "--q", "5", "--s", "0.1", "--oracle", "8"],
    ["local", "--case", "case3", "--q", "7", "--oracle", "8",
     "--chi-ram", "2"],
    ["degenerate", "--spec",
     '{"r": 1, "finite": [{"q": 3, "case": "case1"}, '
     '{"q": 5, "case": "case2sc"}]}', "--d4"],
    ["conductors", "--spec", '{"r": 1, "finite": [{"q": 7, "case": "case3"}]}'],
]


def _run_suite(outdir):
    outdir.mkdir()
    for i, argv in enumerate(_ARTIFACT_SUITE):
        jpath = outdir / f"{i:02d}.json"
        cpath = outdir / f"{i:02d}.csv"
        code = cli_run(argv + ["--json", str(jpath), "--csv", str(cpath)])
        assert code == 0, argv
    return sorted(outdir.iterdir())


def test_artifact_determinism(tmp_path):
    first = _run_suite(tmp_path / "run1")
    second = _run_suite(tmp_path / "run2")
    assert [f.name for f in first] == [f.name for f in second]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes(), a.name
    # sanity: the artifacts carry the config echo and schema
    doc = json.loads((tmp_path / "run1" / "00.json").read_text("utf-8"))
    assert set(doc) == {"spec", "results", "violations", "version"}
    assert doc["violations"] == []
