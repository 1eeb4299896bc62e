import random
from fractions import Fraction

import pytest

from graphcohom.kernels import _speedups_available, pure_backend


speedups = _speedups_available()
pure = pure_backend()


@pytest.mark.skipif(speedups is None, reason="compiled kernels not built")
def test_backends_agree_on_random_matrices():
    rng = random.Random(31337)
    for _ in range(300):
        nr, nc = rng.randint(0, 9), rng.randint(0, 9)
        rows = []
        for _ in range(nr):
            r = {}
            for j in range(nc):
                if rng.random() < 0.5:
                    v = Fraction(rng.randint(-8, 8), rng.randint(1, 5))
                    if v:
                        r[j] = v
            rows.append(r)
        assert pure.rref_frac([dict(r) for r in rows], nc) == speedups.rref_frac(
            [dict(r) for r in rows], nc
        )
        for p in (2, 3, 7, 10007):
            mrows = [
                {c: int(v * 40) for c, v in r.items() if int(v * 40) % p}
                for r in rows
            ]
            assert pure.rref_mod([dict(r) for r in mrows], nc, p) == speedups.rref_mod(
                [dict(r) for r in mrows], nc, p
            )


@pytest.mark.skipif(speedups is None, reason="compiled kernels not built")
def test_backends_agree_on_graph_complex_blocks():
    from graphcohom import algebra as alg
    from graphcohom.graph import builtin_graph
    from graphcohom.graph_complex import build

    C = build(alg.torus(2), builtin_graph("complete:3"))
    for p in range(3):
        M = C.delta_matrix(p)
        rows = [dict(M.row(i)) for i in range(M.rows)]
        assert pure.rref_frac([dict(r) for r in rows], M.cols) == speedups.rref_frac(
            [dict(r) for r in rows], M.cols
        )


def test_forced_pure_env(tmp_path):
    import subprocess
    import sys

    code = (
        "from graphcohom.kernels import BACKEND; print(BACKEND)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        env={"GRAPHCOHOM_PURE": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "pure"
