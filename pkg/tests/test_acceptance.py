"""Acceptance suite: one printed PASS/FAIL line per criterion, all exact.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 tests/test_acceptance.py``.
"""
import contextlib
import io
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from test_rmf import brute_force, random_instance  # noqa: E402

from hodgefl.cli import main  # noqa: E402
from hodgefl.corpus import corpus, polynomial_plane, delta_plane  # noqa: E402
from hodgefl.gkz import (  # noqa: E402
    construct, euler_box_commutators, fourier_transform_generators, toric_check,
)
from hodgefl.linalg import (  # noqa: E402
    Matrix, det, invariant_factors, kernel_lattice, rank, smith_normal_form,
)
from hodgefl.microlocal import (  # noqa: E402
    default_context, verify_filtration_shift, verify_phi_identities,
)
from hodgefl.monodromic import (  # noqa: E402
    antipode, check_fl_restriction, cz_model, delta_model, fl, fourier_inversion_check,
    tate_twist, v_filtration, validate,
)
from hodgefl.rmf import check_rmf, rmf  # noqa: E402
from hodgefl.weyl import to_text  # noqa: E402

CORPUS_SEED = 2024
CORPUS_SIZE = 60
FIX = Path(__file__).resolve().parent.parent / "fixtures"

_corpus = None


def the_corpus():
    global _corpus
    if _corpus is None:
        _corpus = corpus(CORPUS_SEED, CORPUS_SIZE)
    return _corpus


def ceil_q(x):
    return -((-x.numerator) // x.denominator)


# --- criteria -----------------------------------------------------------------

def criterion_1():
    t = time.time()
    mods = the_corpus()
    bad = []
    for n, M in enumerate(mods):
        if max((M.dim(c) for c in M.grid), default=0) > 4 or M.denom > 3 or M.r not in (1, 2):
            bad.append(f"#{n} outside the corpus bounds")
        if not validate(M).ok:
            bad.append(f"#{n} invalid input")
            continue
        F = fl(M)
        if not validate(F).ok:
            bad.append(f"#{n} fl(M) invalid")
        for c in M.grid:
            if F.spaces[M.r - c].F != M.spaces[c].F.shift(ceil_q(c)):
                bad.append(f"#{n} Hodge jump mismatch at chi={c}")
    dt = time.time() - t
    ranks = sorted({M.r for M in mods})
    ok = not bad and len(mods) >= 50 and ranks == [1, 2] and dt < 60
    return ok, f"{len(mods)} modules, r in {ranks}, {dt:.1f}s (< 60s){'; ' + bad[0] if bad else ''}"


def criterion_2():
    mods = [M for M in the_corpus() if M.is_unipotent()] + [cz_model(), delta_model()]
    bad = []
    for n, M in enumerate(mods):
        rep = fourier_inversion_check(M)
        if not rep.ok or "intertwiner" not in rep.info:
            bad.append(f"#{n}: {rep.to_json()['failures'][:1]}")
        elif fl(fl(M)) != antipode(tate_twist(M, M.r)):
            bad.append(f"#{n}: intertwiner is not the identity")
    return not bad, f"{len(mods)} unipotent modules{'; ' + bad[0] if bad else ''}"


def criterion_3():
    mods = [M for M in the_corpus() if M.r == 1] + [cz_model(), delta_model()]
    bad = [n for n, M in enumerate(mods) if not check_fl_restriction(M).ok]
    return not bad and len(mods) > 10, f"{len(mods)} rank one modules, failing: {bad}"


def criterion_4():
    t = time.time()
    rep = verify_phi_identities(default_context(), 200, seed=7)
    dt = time.time() - t
    failed = [i["identity"] for i in rep["identities"] if not i["ok"]]
    return rep["ok"] and dt < 30, f"200 samples, seed 7, {dt:.1f}s (< 30s), failing: {failed}"


def criterion_5():
    rep = verify_filtration_shift(default_context(), 6)
    return rep["ok"], f"{rep['monomials']} monomials with |alpha| + |j| <= 6"


def criterion_6():
    rng = random.Random(5)
    counts = {True: 0, False: 0}
    bad = []
    for trial in range(120):
        N, L = random_instance(rng, rng.randint(1, 3))
        res = rmf(N, L)
        sols = brute_force(N, L)
        counts[res.exists] += 1
        if res.exists:
            if check_rmf(N, L, res.filtration) or sols != [res.filtration]:
                bad.append(trial)
        elif sols:
            bad.append(trial)
    rng = random.Random(9)
    larger = 0
    for _ in range(40):
        N, L = random_instance(rng, rng.randint(4, 5))
        res = rmf(N, L)
        if res.exists:
            larger += 1
            if check_rmf(N, L, res.filtration):
                bad.append("large")
    ok = not bad and counts[True] > 0 and counts[False] > 0
    return ok, (f"120 oracle instances ({counts[True]} unique solutions, {counts[False]} certified "
                f"nonexistent), {larger} larger instances, mismatches: {bad}")


def criterion_7():
    mods = the_corpus() + [cz_model(), delta_model(), polynomial_plane(), delta_plane()]
    bad = [n for n, M in enumerate(mods) if not v_filtration(M)[1].ok]
    return not bad, f"{len(mods)} modules, failing: {bad}"


def criterion_8():
    t = time.time()
    s = construct([[1, 1, 1], [0, 1, 2]], [0, 0])
    checks = {
        "lattice": [tuple(abs(x) for x in v) for v in s.lattice_basis] == [(1, 2, 1)]
        and s.lattice_basis[0] in ((1, -2, 1), (-1, 2, -1)),
        "box": [to_text(b, "l") for b in s.boxes] == ["d1*d3 - d2^2"],
        "flags": s.flags == {"homogeneous": True, "pointed": True, "columns_span": True},
        "commutators": all(c["ok"] for c in euler_box_commutators(s)),
        "round_trip": all(f["round_trip"] for f in fourier_transform_generators(s)),
        "toric": toric_check(s, points=25, seed=1)["ok"],
    }
    dt = time.time() - t
    failed = [k for k, v in checks.items() if not v]
    return not failed and dt < 5, f"{dt:.2f}s (< 5s), failing: {failed}"


def criterion_9():
    rng = random.Random(99)
    bad = []
    for trial in range(100):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = Matrix.of([[rng.randint(-10, 10) for _ in range(n)] for _ in range(m)])
        U, D, V = smith_normal_form(A)
        diag = [D[i, i] for i in range(min(m, n))]
        ok = (U @ A @ V == D and abs(det(U)) == 1 and abs(det(V)) == 1
              and all(D[i, j] == 0 for i in range(m) for j in range(n) if i != j)
              and all(x >= 0 for x in diag))
        nz = [int(x) for x in diag if x]
        ok &= len(nz) == rank(A) and all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
        ok &= all(x == 0 for x in diag[len(nz):])
        basis = kernel_lattice(A)
        ok &= len(basis) == n - rank(A)
        ok &= all(not any(A.apply(v)) for v in basis)
        if basis:
            # saturated: the basis matrix has all invariant factors 1
            ok &= invariant_factors(Matrix.of(basis)) == [1] * len(basis)
        if not ok:
            bad.append(trial)
    return not bad, f"100 matrices up to 6x6, entries in [-10, 10], failing: {bad}"


CLI_COMMANDS = [
    ["gkz", "--matrix", "1,1,1;0,1,2", "--beta", "0,0", "--seed", "3"],
    ["gkz", "--matrix", "1,2", "--beta", "0"],
    ["mono", "validate", str(FIX / "broken.json")],
    ["mono", "inversion", str(FIX / "czmodel.json")],
    ["mono", "flrestrict", str(FIX / "deltamodel.json")],
    ["mono", "rmf", str(FIX / "rmf_jordan.json")],
    ["mono", "rmf", str(FIX / "rmf_none.json")],
    ["micro", "identities", "--samples", "50", "--seed", "7"],
    ["micro", "shifts", "--bound", "6"],
]


def _run_cli(argv):
    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, buf.getvalue().encode(), err.getvalue().encode()


def criterion_10():
    bad = []
    for argv in CLI_COMMANDS:
        for fmt in ("text", "json"):
            full = argv + ["--format", fmt]
            if _run_cli(full) != _run_cli(full):
                bad.append(" ".join(full[:2]))
    return not bad, f"{len(CLI_COMMANDS)} commands x 2 formats, differing: {bad}"


CRITERIA = [
    (1, "FL Hodge filtration formula on the corpus", criterion_1),
    (2, "Fourier inversion on unipotent modules", criterion_2),
    (3, "restriction/transform exchange for r = 1", criterion_3),
    (4, "comparison map identity suite", criterion_4),
    (5, "filtration shifts under the comparison map", criterion_5),
    (6, "relative monodromy filtration vs oracle", criterion_6),
    (7, "V-filtration axioms", criterion_7),
    (8, "GKZ construction", criterion_8),
    (9, "Smith normal form and kernel saturation", criterion_9),
    (10, "CLI determinism", criterion_10),
]


def report_line(number, title, fn):
    ok, detail = fn()
    return ok, f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, line = report_line(number, title, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [report_line(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
