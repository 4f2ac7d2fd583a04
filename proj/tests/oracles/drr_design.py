"""Independent oracle for the dual-rotating-retarder design matrix.

Builds the 24x16 system with plain numpy (no shared code with the C++
library) and prints the singular-value conditioning ratio that the unit
tests freeze as a golden value.
"""
import numpy as np

def rot(psi):
    c, s = np.cos(2 * psi), np.sin(2 * psi)
    return np.array([[1, 0, 0, 0], [0, c, s, 0], [0, -s, c, 0], [0, 0, 0, 1.0]])

def lp(a):
    c, s = np.cos(2 * a), np.sin(2 * a)
    return 0.5 * np.array([[1, c, s, 0], [c, c * c, c * s, 0], [s, c * s, s * s, 0], [0, 0, 0, 0]])

def ret(axis, d):
    r0 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, np.cos(d), np.sin(d)], [0, 0, -np.sin(d), np.cos(d)]])
    return rot(-axis) @ r0 @ rot(axis)

def design(delta=np.pi / 2, th=(30, -45, 60, -90), thp=(0, 30, 60, 90, 120, 150)):
    rows = []
    s = np.array([1.0, 0, 0, 0])
    for t in th:
        b = ret(np.radians(t), delta) @ lp(0) @ s
        for tp in thp:
            a = (lp(0) @ ret(np.radians(tp), delta))[0]
            rows.append(np.outer(a, b).ravel())
    return np.array(rows)

if __name__ == "__main__":
    A = design()
    sv = np.linalg.svd(A, compute_uv=False)
    print("rank", np.linalg.matrix_rank(A), "ratio", repr(sv[-1] / sv[0]), "smax", sv[0], "smin", sv[-1])
    A1 = design(thp=(0,))
    print("truncated rank", np.linalg.matrix_rank(A1))
    rng = np.random.default_rng(1)
    worst = 0
    for d in np.radians(np.linspace(80, 100, 68)):
        M = ret(0.3, d)
        f = A @ M.ravel()
        for k in range(20):
            fn = f * (1 + 1e-3 * rng.standard_normal(f.shape))
            Mh = np.linalg.lstsq(A, fn, rcond=None)[0].reshape(4, 4)
            worst = max(worst, np.linalg.norm(Mh - M) / np.linalg.norm(M))
    print("worst rel err at 0.1% noise", worst)
