"""Transposition circuits: bubblesort decomposition and the brick-wall form.

Run:  python demos/04_circuit_rewrites.py
"""
from matchgate_shadows import (
    braid_rewrite,
    brickwall_transform,
    bubblesort_transpositions,
    canonical_permutation,
    greedy_depth,
    inversion_count,
    perfect_matching_of,
)
from matchgate_shadows.givens import apply_transpositions

perm = (1, 6, 2, 5, 3, 4)  # canonical permutation of the matching {16, 25, 34}
n = 3
print(f"Permutation {perm} (matching {sorted(map(sorted, perfect_matching_of(perm).pairs))})")
print(f"Inversions: {inversion_count(perm)}")

axes = bubblesort_transpositions(perm)
print(f"\nBubblesort decomposition (triangular): {axes}")
print(f"  recovers the permutation: {apply_transpositions(axes, 2 * n) == perm}")
print(f"  gate count {len(axes)} = inversion count, greedy depth {greedy_depth(axes)}")

layers = brickwall_transform(axes, n)
flat = [a for layer in layers for a in layer]
print(f"\nBrick-wall form: layers {layers}")
print(f"  same permutation: {apply_transpositions(flat, 2 * n) == perm}")
print(f"  gate count {len(flat)} (never more), greedy depth {greedy_depth(flat)} <= 2n = {2 * n}")

print("\nThe sign-free braid rewrite behind the conversion,")
print("tau_i^b1 tau_(i+1)^b2 tau_i^b3 -> tau_(i+1)^b1' tau_i^b2' tau_(i+1)^b3':")
for bits in ((1, 1, 1), (1, 0, 1), (1, 1, 0), (0, 1, 0)):
    print(f"  {bits} -> {braid_rewrite(*bits)}")

canon = canonical_permutation(perfect_matching_of((4, 2, 6, 1, 3, 5)))
print(f"\nCanonicalizing the matching of (4, 2, 6, 1, 3, 5): {canon} "
      f"({inversion_count(canon)} inversions, the class minimum)")
