#!/usr/bin/env python3
"""One-shot generator for the packaged H2 qubit Hamiltonian.

Builds the STO-3G molecular Hamiltonian of H2 from closed-form Gaussian
integrals, runs a tiny restricted Hartree-Fock loop, lifts the result to
the four-spin-orbital Fock space, applies the Bravyi-Kitaev occupation
encoding, and projects onto Pauli strings.  The resulting coefficient
table is written to src/ansatzforge/data/h2_bk_sto3g.json together with
reference energies and a checksum.

The library only ever reads the frozen JSON; this script exists so the
numbers have a reproducible origin.  Run from the repository root:

    python tools/generate_h2_data.py
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from pathlib import Path

import numpy as np

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903

BOND_LENGTH_ANGSTROM = 0.735

# STO-3G hydrogen 1s: three primitives, exponents already scaled for
# zeta = 1.24 (standard published values).
STO3G_EXPONENTS = np.array([3.42525091, 0.62391373, 0.16885540])
STO3G_COEFFS = np.array([0.15432897, 0.53532814, 0.44463454])


def boys_f0(t: float) -> float:
    if t < 1e-12:
        return 1.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


def _norm(alpha: float) -> float:
    return (2.0 * alpha / math.pi) ** 0.75


def overlap_prim(a, ra, b, rb):
    p = a + b
    r2 = float(np.dot(ra - rb, ra - rb))
    return _norm(a) * _norm(b) * (math.pi / p) ** 1.5 * math.exp(-a * b / p * r2)


def kinetic_prim(a, ra, b, rb):
    p = a + b
    mu = a * b / p
    r2 = float(np.dot(ra - rb, ra - rb))
    return mu * (3.0 - 2.0 * mu * r2) * overlap_prim(a, ra, b, rb)


def nuclear_prim(a, ra, b, rb, rc):
    p = a + b
    r2 = float(np.dot(ra - rb, ra - rb))
    rp = (a * ra + b * rb) / p
    t = p * float(np.dot(rp - rc, rp - rc))
    pref = -2.0 * math.pi / p * math.exp(-a * b / p * r2)
    return _norm(a) * _norm(b) * pref * boys_f0(t)


def eri_prim(a, ra, b, rb, c, rc, d, rd):
    p = a + b
    q = c + d
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    r2ab = float(np.dot(ra - rb, ra - rb))
    r2cd = float(np.dot(rc - rd, rc - rd))
    t = p * q / (p + q) * float(np.dot(rp - rq, rp - rq))
    pref = (
        2.0 * math.pi ** 2.5
        / (p * q * math.sqrt(p + q))
        * math.exp(-a * b / p * r2ab - c * d / q * r2cd)
    )
    return _norm(a) * _norm(b) * _norm(c) * _norm(d) * pref * boys_f0(t)


def ao_integrals(centers):
    """Contracted AO matrices S, T, V and the chemists' ERI tensor."""
    nbf = len(centers)
    prims = [
        [(alpha, coeff, centers[i]) for alpha, coeff in zip(STO3G_EXPONENTS, STO3G_COEFFS)]
        for i in range(nbf)
    ]
    # renormalize each contracted function
    norms = []
    for funcs in prims:
        s = sum(
            ca * cb * overlap_prim(a, r, b, r2)
            for a, ca, r in funcs
            for b, cb, r2 in funcs
        )
        norms.append(1.0 / math.sqrt(s))

    S = np.zeros((nbf, nbf))
    T = np.zeros((nbf, nbf))
    V = np.zeros((nbf, nbf))
    for i, j in itertools.product(range(nbf), repeat=2):
        for a, ca, ra in prims[i]:
            for b, cb, rb in prims[j]:
                w = ca * cb * norms[i] * norms[j]
                S[i, j] += w * overlap_prim(a, ra, b, rb)
                T[i, j] += w * kinetic_prim(a, ra, b, rb)
                for rc in centers:
                    V[i, j] += w * nuclear_prim(a, ra, b, rb, rc)

    eri = np.zeros((nbf, nbf, nbf, nbf))
    for i, j, k, l in itertools.product(range(nbf), repeat=4):
        total = 0.0
        for a, ca, ra in prims[i]:
            for b, cb, rb in prims[j]:
                for c, cc, rc in prims[k]:
                    for d, cd, rd in prims[l]:
                        total += ca * cb * cc * cd * eri_prim(a, ra, b, rb, c, rc, d, rd)
        eri[i, j, k, l] = total * norms[i] * norms[j] * norms[k] * norms[l]
    return S, T, V, eri


def restricted_hartree_fock(S, hcore, eri, n_electrons):
    """Closed-shell SCF; returns (electronic energy, MO coefficients)."""
    vals, vecs = np.linalg.eigh(S)
    x = vecs @ np.diag(vals ** -0.5) @ vecs.T
    n_occ = n_electrons // 2
    density = np.zeros_like(S)
    energy = 0.0
    for _ in range(200):
        coulomb = np.einsum("ijkl,kl->ij", eri, density)
        exchange = np.einsum("ikjl,kl->ij", eri, density)
        fock = hcore + coulomb - 0.5 * exchange
        _, c_prime = np.linalg.eigh(x @ fock @ x)
        coeffs = x @ c_prime
        new_density = 2.0 * coeffs[:, :n_occ] @ coeffs[:, :n_occ].T
        new_energy = 0.5 * np.sum(new_density * (hcore + fock))
        if abs(new_energy - energy) < 1e-12 and np.allclose(new_density, density, atol=1e-10):
            density = new_density
            energy = new_energy
            break
        density, energy = new_density, new_energy
    return energy, coeffs


def fock_space_hamiltonian(h_mo, eri_mo, e_nuc):
    """Dense 16x16 H in the occupation basis, spin orbitals interleaved.

    Spin orbital p = 2 * spatial + spin with spin 0 = alpha, so the
    bonding orbital occupies qubits 0 and 1 after encoding.
    """
    n_so = 2 * h_mo.shape[0]
    dim = 1 << n_so

    def annihilate(p):
        mat = np.zeros((dim, dim))
        for x in range(dim):
            if (x >> p) & 1:
                sign = (-1) ** bin(x & ((1 << p) - 1)).count("1")
                mat[x ^ (1 << p), x] = sign
        return mat

    a_ops = [annihilate(p) for p in range(n_so)]
    c_ops = [op.T for op in a_ops]

    ham = e_nuc * np.eye(dim)
    for p, q in itertools.product(range(n_so), repeat=2):
        if p % 2 != q % 2:
            continue
        ham += h_mo[p // 2, q // 2] * (c_ops[p] @ a_ops[q])
    for p, q, r, s in itertools.product(range(n_so), repeat=4):
        if p % 2 != r % 2 or q % 2 != s % 2:
            continue
        coeff = 0.5 * eri_mo[p // 2, r // 2, q // 2, s // 2]
        if coeff == 0.0:
            continue
        ham += coeff * (c_ops[p] @ c_ops[q] @ a_ops[s] @ a_ops[r])
    return ham


def bravyi_kitaev_permutation():
    """Basis permutation for the four-mode Bravyi-Kitaev encoding.

    Qubit bits are partial occupation parities: q0 = x0, q1 = x0^x1,
    q2 = x2, q3 = x0^x1^x2^x3.
    """
    perm = np.zeros((16, 16))
    for x in range(16):
        bits = [(x >> k) & 1 for k in range(4)]
        q0 = bits[0]
        q1 = bits[0] ^ bits[1]
        q2 = bits[2]
        q3 = bits[0] ^ bits[1] ^ bits[2] ^ bits[3]
        y = q0 | (q1 << 1) | (q2 << 2) | (q3 << 3)
        perm[y, x] = 1.0
    return perm


def pauli_decompose(matrix, n):
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    dim = 1 << n
    terms = []
    for labels in itertools.product("IXYZ", repeat=n):
        string = "".join(labels)  # character k acts on qubit k
        op = np.ones((1, 1), dtype=complex)
        for ch in reversed(string):
            op = np.kron(op, paulis[ch])
        coeff = np.trace(op.conj().T @ matrix) / dim
        assert abs(coeff.imag) < 1e-10, (string, coeff)
        if abs(coeff.real) > 1e-12:
            terms.append((coeff.real, string))
    return terms


def main():
    r_bohr = BOND_LENGTH_ANGSTROM * BOHR_PER_ANGSTROM
    centers = [np.zeros(3), np.array([0.0, 0.0, r_bohr])]
    e_nuc = 1.0 / r_bohr

    S, T, V, eri = ao_integrals(centers)
    hcore = T + V
    e_elec, coeffs = restricted_hartree_fock(S, hcore, eri, n_electrons=2)
    e_hf = e_elec + e_nuc

    h_mo = coeffs.T @ hcore @ coeffs
    eri_mo = np.einsum("ijkl,ip,jq,kr,ls->pqrs", eri, coeffs, coeffs, coeffs, coeffs)

    ham_fock = fock_space_hamiltonian(h_mo, eri_mo, e_nuc)
    perm = bravyi_kitaev_permutation()
    ham_bk = perm @ ham_fock @ perm.T

    terms = pauli_decompose(ham_bk, 4)
    terms.sort(key=lambda t: (-abs(t[0]), t[1]))

    e_fci = float(np.linalg.eigvalsh(ham_bk)[0])
    e_basis_min = float(np.diag(ham_bk).real.min())
    e_bound = -sum(abs(c) for c, _ in terms)

    # reconstruction check against the decomposition
    rebuilt = np.zeros((16, 16), dtype=complex)
    paulis = {
        "I": np.eye(2, dtype=complex),
        "X": np.array([[0, 1], [1, 0]], dtype=complex),
        "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
        "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    }
    for c, s in terms:
        op = np.ones((1, 1), dtype=complex)
        for ch in reversed(s):
            op = np.kron(op, paulis[ch])
        rebuilt += c * op
    assert np.abs(rebuilt - ham_bk).max() < 1e-10

    print(f"R = {BOND_LENGTH_ANGSTROM} A = {r_bohr:.6f} bohr, E_nuc = {e_nuc:.6f}")
    print(f"SCF electronic energy = {e_elec:.8f}")
    print(f"E_HF  = {e_hf:.8f}  (min basis state {e_basis_min:.8f})")
    print(f"E_FCI = {e_fci:.8f}")
    print(f"E_bound = {e_bound:.8f}  over {len(terms)} Pauli terms")

    assert abs(e_fci - (-1.137)) <= 1e-3, e_fci
    assert abs(e_basis_min - (-1.116)) <= 2e-3, e_basis_min
    assert abs(e_bound - (-1.985)) <= 5e-3, e_bound
    assert abs(e_basis_min - e_hf) < 1e-8

    term_list = [[c, s] for c, s in terms]
    blob = json.dumps(term_list, separators=(",", ":")).encode()
    doc = {
        "name": "H2 STO-3G Bravyi-Kitaev",
        "geometry": {
            "atoms": ["H", "H"],
            "bond_length_angstrom": BOND_LENGTH_ANGSTROM,
        },
        "basis": "STO-3G",
        "mapping": "bravyi-kitaev",
        "spin_orbital_order": "interleaved (bonding-up, bonding-down, antibonding-up, antibonding-down)",
        "n_qubits": 4,
        "terms": term_list,
        "reference": {
            "e_hf": e_hf,
            "e_fci": e_fci,
            "e_bound": e_bound,
        },
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    out = Path(__file__).resolve().parent.parent / "src" / "ansatzforge" / "data" / "h2_bk_sto3g.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
