"""The nine acceptance criteria, exact and timed.

Each criterion prints one ``criterion N: PASS|FAIL`` line; under pytest the
lines are also collected into a terminal summary section.  Run standalone
with ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
import oracles  # noqa: E402

from stringy.builders import SHIPPED, build_point_orbifold  # noqa: E402
from stringy.cli import main as cli_main  # noqa: E402
from stringy.dataset import load_shipped  # noqa: E402
from stringy.group import Group, parse_permutation, permutation_name  # noqa: E402
from stringy.kclass import is_effective, obstruction, rank  # noqa: E402
from stringy.model import normal_identity_holds  # noqa: E402
from stringy.product import StringyProduct, verify_axioms, verify_route_agreement, verify_excess_route  # noqa: E402
from stringy.symbolic import root_realization, verify_trivial_cocycle  # noqa: E402

SIGMA = "(12)"


def criterion_1():
    """point orbifold of S_3 gives the group algebra (36 entries)"""
    p = build_point_orbifold(Group.symmetric(3), "point-S3")
    rows = StringyProduct(p).table()
    assert len(rows) == 36
    table = oracles.s3_multiplication()
    for m1, b1, m2, b2, value in rows:
        ab = permutation_name(table[(parse_permutation(m1, 3), parse_permutation(m2, 3))])
        assert p.group.mul(m1, m2) == ab
        assert value == p.sector(ab).algebra.one()


def criterion_2():
    """S_m + inv(S_m^-1) = N on every sector of every shipped dataset"""
    for name in SHIPPED:
        p = load_shipped(name)
        for m in p.ordered_elements():
            assert normal_identity_holds(p, m), f"{name} X^{m}"


def criterion_3():
    """obstruction rank in Z>=0 and effective on sym2-P1, sym3-P1, sym4-point"""
    for name in ("sym2-P1", "sym3-P1", "sym4-point"):
        p = load_shipped(name)
        for t in p.iter_triples():
            R = obstruction(t.m1, t.m2, p, check=False)
            r = rank(R)
            assert r.denominator == 1 and r >= 0, f"{name} ({t.m1},{t.m2}): rank {r}"
            assert R.is_zero() or is_effective(R), f"{name} ({t.m1},{t.m2}): {R}"


def criterion_4():
    """pull-push = push-pull on point-S3, sym2-P1, sym3-P1, also with a second section set"""
    for name in ("point-S3", "sym2-P1", "sym3-P1"):
        p = load_shipped(name)
        if name != "point-S3":
            assert p.sections("last-pivot") != p.sections(), f"{name}: second section set not distinct"
        rep = verify_route_agreement(p, ["last-pivot"])
        assert rep.ok and rep.count("pass") == 2, [str(f) for f in rep]


def criterion_5():
    """associativity and module structure on sym3-P1, exhaustive"""
    rep = verify_axioms(load_shipped("sym3-P1"))
    assert rep.ok, [str(f) for f in rep.failures]
    passed = {f.check for f in rep if f.status == "pass"}
    assert {"associativity", "module"} <= passed


def criterion_6():
    """1_s*1_s = x(x)1 + 1(x)x and 1_s*x_s = x(x)x against the Gram-system oracle"""
    p = load_shipped("sym2-P1")
    X = p.untwisted.algebra
    A = p.sector(SIGMA).algebra
    expected = oracles.sym2_p1_twisted_products()
    for route in ("pullpush", "pushpull"):
        prod = StringyProduct(p, route)
        for (a, b), coeffs in expected.items():
            assert prod.basis_product(SIGMA, A.index(a), SIGMA, A.index(b)) == X.element(coeffs)
    assert expected[("1", "1")] == list(X.element({"x⊗1": 1, "1⊗x": 1}).coeffs)
    assert expected[("1", "x")] == list(X.element({"x⊗x": 1}).coeffs)


def criterion_7():
    """trivial cocycle on every shipped dataset; Eu(S_s)^2 = w^2 = 2x on sym2-P1"""
    for name in SHIPPED:
        rep = verify_trivial_cocycle(load_shipped(name))
        assert rep.ok, f"{name}: {[str(f) for f in rep.failures]}"
    p = load_shipped("sym2-P1")
    rr, s = root_realization(SIGMA, p)
    assert rr.algebra.dim == 4  # Q[x]/(x^2)[w]/(w^2 - 2x)
    assert s == rr.root("T[12]")
    assert s * s == rr.embed(p.sector(SIGMA).algebra.element({"x": 2}))


def _report(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv)
    return code, buf.getvalue()


def criterion_8():
    """every table and report is unchanged when T is doubled"""
    for name in SHIPPED:
        T = load_shipped(name).T
        for cmd in (["table"], ["table", "--route", "pushpull"], ["cocycles"], ["verify"], ["symbolic-check"]):
            base = _report(cmd + [name])
            doubled = _report(cmd + [name, "--truncation", str(2 * T)])
            assert base == doubled, f"{name} {' '.join(cmd)}"


def criterion_9():
    """excess-intersection route passes on integral sectors and skips cleanly elsewhere"""
    for name in SHIPPED:
        p = load_shipped(name)
        rep = verify_excess_route(p)
        assert rep.ok, f"{name}: {[str(f) for f in rep.failures]}"
        for f in rep:
            if f.status == "skip":
                assert "root extension" in f.witness
    rep = verify_excess_route(load_shipped("sym3-P1"))
    passed = {f.witness.split(":")[0] for f in rep if f.check == "excess-route" and f.status == "pass"}
    assert "((123),(123),(123))" in passed and "((132),(132),(132))" in passed
    skipped = [f for f in rep if f.check == "excess-route" and f.status == "skip"]
    assert skipped and all("(12)" in f.witness or "(13)" in f.witness or "(23)" in f.witness for f in skipped)
    for name in ("point-Z2", "point-S3"):
        assert verify_excess_route(load_shipped(name)).count("skip") == 0


CRITERIA = [
    (1, criterion_1, 1.0),
    (2, criterion_2, 1.0),
    (3, criterion_3, 5.0),
    (4, criterion_4, 30.0),
    (5, criterion_5, 60.0),
    (6, criterion_6, None),
    (7, criterion_7, None),
    (8, criterion_8, None),
    (9, criterion_9, None),
]


def run_criterion(number, fn, limit):
    """Returns (passed, line)."""
    start = time.perf_counter()
    error = None
    try:
        fn()
    except AssertionError as exc:
        error = f"assertion failed: {exc}" if str(exc) else "assertion failed"
    elapsed = time.perf_counter() - start
    if error is None and limit is not None and elapsed > limit:
        error = f"took {elapsed:.2f}s, limit {limit:g}s"
    status = "PASS" if error is None else "FAIL"
    budget = f" / {limit:g}s" if limit is not None else ""
    line = f"criterion {number}: {status} ({elapsed:.2f}s{budget}) {fn.__doc__}"
    if error:
        line += f"  [{error}]"
    return error is None, line


@pytest.mark.parametrize("number, fn, limit", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_acceptance(number, fn, limit, request):
    ok, line = run_criterion(number, fn, limit)
    print(line)
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])
    lines.append(line)
    assert ok, line


ACCEPTANCE_KEY = pytest.StashKey[list]()


if __name__ == "__main__":
    results = [run_criterion(n, fn, limit) for n, fn, limit in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
