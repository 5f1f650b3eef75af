"""Reference circular fingerprint over hand-entered graphs.

Writes fingerprint_fixture.json. Graph tables are typed in by hand so the
fixture does not depend on the C++ SMILES reader.
"""
import json
import os

MASK = (1 << 64) - 1


def fnv1a64(values):
    h = 0xCBF29CE484222325
    for v in values:
        u = v & MASK
        for k in range(8):
            h ^= (u >> (8 * k)) & 0xFF
            h = (h * 0x100000001B3) & MASK
    return h


# atoms: (Z, total_h, charge, isotope, in_ring, aromatic); bonds: (i, j, order)
GRAPHS = {
    "C": ([(6, 4, 0, 0, 0, 0)], []),
    "CCO": ([(6, 3, 0, 0, 0, 0), (6, 2, 0, 0, 0, 0), (8, 1, 0, 0, 0, 0)],
            [(0, 1, 1), (1, 2, 1)]),
    "CCN": ([(6, 3, 0, 0, 0, 0), (6, 2, 0, 0, 0, 0), (7, 2, 0, 0, 0, 0)],
            [(0, 1, 1), (1, 2, 1)]),
    "CCCO": ([(6, 3, 0, 0, 0, 0), (6, 2, 0, 0, 0, 0), (6, 2, 0, 0, 0, 0),
              (8, 1, 0, 0, 0, 0)],
             [(0, 1, 1), (1, 2, 1), (2, 3, 1)]),
}


def chain_ester(n):
    """Methyl n-phenylalkanoate: CH3-O-C(=O)-(CH2)n-C6H5."""
    atoms = [(6, 3, 0, 0, 0, 0), (8, 0, 0, 0, 0, 0), (6, 0, 0, 0, 0, 0),
             (8, 0, 0, 0, 0, 0)]
    bonds = [(0, 1, 1), (1, 2, 1), (2, 3, 2)]
    prev = 2
    for _ in range(n):
        atoms.append((6, 2, 0, 0, 0, 0))
        bonds.append((prev, len(atoms) - 1, 1))
        prev = len(atoms) - 1
    ring = len(atoms)
    atoms.append((6, 0, 0, 0, 1, 1))
    bonds.append((prev, ring, 1))
    for k in range(1, 6):
        atoms.append((6, 1, 0, 0, 1, 1))
        bonds.append((ring + k - 1, ring + k, 4))
    bonds.append((ring + 5, ring, 4))
    return atoms, bonds


def alkyl(n, last_z=6):
    """Unbranched chain of n heavy atoms; the last one may be a heteroatom."""
    atoms = []
    for k in range(n):
        z = last_z if k == n - 1 else 6
        h = {6: 2, 7: 1, 8: 0}[z] + (1 if k in (0, n - 1) else 0)
        atoms.append((z, h, 0, 0, 0, 0))
    return atoms, [(k, k + 1, 1) for k in range(n - 1)]


PAIRS = {
    # Used by the evaluation fixture: exact similarities 1/2 and 9/10.
    "octane_butylamine": (alkyl(8), alkyl(5, 7)),
    "phenylbutanoate_phenylpentanoate": (chain_ester(3), chain_ester(4)),
}


def fingerprint(atoms, bonds, radius, width):
    n = len(atoms)
    nbrs = [[] for _ in range(n)]
    for i, j, order in bonds:
        nbrs[i].append((j, order))
        nbrs[j].append((i, order))
    bits = set()
    ids = []
    for i, (z, h, q, iso, ring, arom) in enumerate(atoms):
        ids.append(fnv1a64([z, len(nbrs[i]), h, q, iso, ring, arom]))
    bits.update(x % width for x in ids)
    for r in range(1, radius + 1):
        nxt = []
        for i in range(n):
            env = sorted((order, ids[j]) for j, order in nbrs[i])
            vals = [r, ids[i]]
            for order, nid in env:
                # ids are unsigned; the C++ side hashes them as int64 bit patterns
                vals += [order, nid]
            nxt.append(fnv1a64(vals))
        bits.update(x % width for x in nxt)
        ids = nxt
    return sorted(bits)


def main():
    out = {"radius": 2, "width": 2048, "bits": {}}
    for name, (atoms, bonds) in GRAPHS.items():
        out["bits"][name] = fingerprint(atoms, bonds, 2, 2048)
    out["bits_radius0"] = {"C": fingerprint(*GRAPHS["C"], 0, 2048)}
    a = set(out["bits"]["CCO"])
    b = set(out["bits"]["CCCO"])
    c = len(a & b)
    out["tanimoto_CCO_CCCO"] = {"common": c, "union": len(a) + len(b) - c}
    a2 = set(out["bits"]["CCN"])
    c2 = len(a & a2)
    out["tanimoto_CCO_CCN"] = {"common": c2, "union": len(a) + len(a2) - c2}
    out["only_CCO_vs_CCN"] = sorted(a - a2)
    out["only_CCN_vs_CCO"] = sorted(a2 - a)
    out["pairs"] = {}
    for name, (g1, g2) in PAIRS.items():
        p = set(fingerprint(*g1, 2, 2048))
        q = set(fingerprint(*g2, 2, 2048))
        c = len(p & q)
        out["pairs"][name] = {"common": c, "union": len(p) + len(q) - c}
    here = os.path.dirname(os.path.abspath(__file__))
    with open(os.path.join(here, "..", "fingerprint_fixture.json"), "w") as f:
        json.dump(out, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
