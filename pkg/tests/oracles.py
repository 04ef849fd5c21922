"""Hand-built reference computations that share no code with the package.

Everything here is plain Fractions and lists so a bug in the engine cannot
leak into the expected values.
"""

from fractions import Fraction
from itertools import permutations


def gauss_solve(a, b):
    """Solve a x = b for square invertible a (lists of Fractions), b a list of columns."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(col[i]) for col in b] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(r for r in range(c, n) if m[r][c] != 0)
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [vr - f * vc for vr, vc in zip(m[r], m[c])]
    return [[m[i][n + k] for i in range(n)] for k in range(len(b))]


class DualNumbers:
    """Q[x]/(x^2) tensor powers, basis indexed by 0/1 exponent tuples, trace on x...x."""

    def __init__(self, factors):
        self.factors = factors
        # first factor varies fastest, matching the package's tensor layout
        self.basis = []
        for k in range(2 ** factors):
            self.basis.append(tuple((k >> i) & 1 for i in range(factors)))

    def mul(self, u, v):
        out = [Fraction(0)] * len(self.basis)
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if a and b:
                    e = tuple(p + q for p, q in zip(self.basis[i], self.basis[j]))
                    if max(e, default=0) <= 1:
                        out[self.basis.index(e)] += a * b
        return out

    def trace(self, u):
        top = tuple([1] * self.factors)
        return u[self.basis.index(top)]

    def gram(self):
        n = len(self.basis)
        unit = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return [[self.trace(self.mul(unit[i], unit[j])) for j in range(n)] for i in range(n)]


def gram_pushforward(pull, source, target):
    """Pushforward adjoint to ``pull`` (target-by-source matrix of f^*: source -> target).

    Solves G_source P = pull^T G_target, i.e. <f_* b, a> = <b, f^* a>.
    """
    gs = source.gram()
    gt = target.gram()
    ns, nt = len(source.basis), len(target.basis)
    rhs_cols = []
    for b in range(nt):
        rhs_cols.append([sum(pull[t][a] * gt[t][b] for t in range(nt)) for a in range(ns)])
    cols = gauss_solve(gs, rhs_cols)
    return lambda vec: [sum(cols[b][a] * vec[b] for b in range(nt)) for a in range(ns)]


def diagonal_pull():
    """Matrix of a (x) b -> ab from Q[x]/x^2 tensor Q[x]/x^2 to Q[x]/x^2."""
    X, D = DualNumbers(2), DualNumbers(1)
    mat = [[Fraction(0)] * len(X.basis) for _ in D.basis]
    for s, e in enumerate(X.basis):
        if sum(e) <= 1:
            mat[D.basis.index((sum(e),))][s] = Fraction(1)
    return mat, X, D


def sym2_p1_twisted_products():
    """1_s * 1_s and 1_s * x_s on the (12) sector of Sym^2 P^1.

    Over the pair (s, s) the obstruction class has rank 0, so the product is the
    Gram-adjoint of the diagonal pullback applied to a*b in the diagonal algebra.
    """
    mat, X, D = diagonal_pull()
    push = gram_pushforward(mat, X, D)
    one, x = [Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]
    return {
        ("1", "1"): push(D.mul(one, one)),
        ("1", "x"): push(D.mul(one, x)),
    }


def s3_multiplication():
    """Permutation composition on S_3 with (a*b)(i) = a(b(i))."""
    perms = list(permutations(range(3)))
    return {(a, b): tuple(a[b[i]] for i in range(3)) for a in perms for b in perms}
