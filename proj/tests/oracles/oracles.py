"""Independent reference values frozen into the C++ tests.

Run with `python3 tests/oracles/oracles.py`. Uses numpy/scipy only; nothing
here shares code with the C++ implementation.
"""
import itertools

import numpy as np
from scipy.linalg import sqrtm, logm
from scipy.optimize import minimize


def mpow(m, p):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    top = max(w.max(), 0.0)
    f = np.array([x ** p if x > 1e-12 * top and x > 0 else 0.0 for x in w])
    return (v * f) @ v.conj().T


def sandwiched(rho, sigma, a):
    g = (1 - a) / (2 * a)
    s = mpow(sigma, g)
    w = np.linalg.eigvalsh(s @ rho @ s)
    w = w[w > 1e-14]
    return np.log2(np.sum(w ** a)) / (a - 1)


def sigma_from(x, d):
    l = np.zeros((d, d), complex)
    l[np.diag_indices(d)] = x[:d]
    k = d
    for i in range(1, d):
        for j in range(i):
            l[i, j] = x[k] + 1j * x[k + 1]
            k += 2
    s = l @ l.conj().T
    return s / np.trace(s).real


def min_div(rho, da, db, a, mutual, restarts=20, seed=0):
    rho_a = np.trace(rho.reshape(da, db, da, db), axis1=1, axis2=3)
    w = rho_a if mutual else np.eye(da)
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        x0 = rng.normal(size=db * db)
        f = lambda x: sandwiched(rho, np.kron(w, sigma_from(x, db)), a)
        r = minimize(f, x0, method="Nelder-Mead", options=dict(xatol=1e-12, fatol=1e-14, maxiter=40000, maxfev=40000))
        r = minimize(f, r.x, method="Nelder-Mead", options=dict(xatol=1e-13, fatol=1e-15, maxiter=40000, maxfev=40000))
        best = min(best, r.fun)
    return best


def fixed_state():
    # Hand-written full-rank two-qubit state used by the frozen oracle tests.
    g = np.array([[0.9, 0.1 + 0.2j, -0.3, 0.05j],
                  [0.4 - 0.1j, 0.7, 0.2 + 0.1j, -0.2],
                  [0.0, 0.3j, 0.5, 0.1],
                  [0.2, -0.1, 0.1 - 0.4j, 0.6]])
    m = g @ g.conj().T
    return m / np.trace(m).real


phi = np.zeros(4)
phi[0] = phi[3] = 1 / np.sqrt(2)
phi = np.outer(phi, phi).astype(complex)

print("Phi2 conditional entropy a=0.6:", -min_div(phi, 2, 2, 0.6, False))
print("Phi2 conditional entropy a=2:", -min_div(phi, 2, 2, 2.0, False))
print("Phi2 mutual information a=2:", min_div(phi, 2, 2, 2.0, True))
cc = np.diag([0.5, 0, 0, 0.5]).astype(complex)
print("classical correlated cond entropy a=0.75:", -min_div(cc, 2, 2, 0.75, False))

rho = fixed_state()
print("fixed state matrix diag:", np.real(np.diag(rho)))
for a in (0.6, 0.75, 2.0):
    print(f"fixed S~_{a}(A|B) = {-min_div(rho, 2, 2, a, False):.12f}")
    print(f"fixed I~_{a}(A;B) = {min_div(rho, 2, 2, a, True):.12f}")
# Relative entropy oracle for the alpha -> 1 limit.
sigma = np.diag([0.3, 0.2, 0.4, 0.1]).astype(complex)
d = np.trace(rho @ (logm(rho) - logm(sigma))).real / np.log(2)
print(f"fixed D(rho||diag(.3,.2,.4,.1)) = {d:.12f}")
for a in (0.999, 1.001, 0.5, 2.0):
    print(f"fixed D~_{a} = {sandwiched(rho, sigma, a):.12f}")


def pgm_success(probs, buckets):
    # Square-root measurement per bucket; B is trivial so every state is the 1x1 matrix [1].
    total = 0.0
    for members in buckets.values():
        rho_c = sum(probs[x] for x in members)
        inv_sqrt = np.linalg.inv(sqrtm(np.array([[rho_c]])))
        for x in members:
            m = inv_sqrt @ np.array([[probs[x]]]) @ inv_sqrt
            total += probs[x] * m[0, 0].real
    return total


for n in range(1, 7):
    probs = {}
    buckets = {}
    for bits in itertools.product((0, 1), repeat=n):
        x = int("".join(map(str, bits)), 2)
        probs[x] = np.prod([0.8 if b == 0 else 0.2 for b in bits])
        buckets.setdefault(sum(bits), []).append(x)
    print(f"biased bit, weight buckets, n={n}: PGM success {pgm_success(probs, buckets):.15f}")
