"""Walk through key derivation and the per-position twist."""
import numpy as np

from singularity_cipher import KeyPair
from singularity_cipher.topology import cipher_table, fnv1a64, twist_forward, twist_inverse

K = KeyPair.from_passphrase("correct horse")
print("seed for k1:", hex(fnv1a64(b"correct horse" + bytes([1]))))
print("k1 stride/offset/phase:", K.k1.stride, K.k1.offset, K.k1.phase)
print("first 16 entries of k1's permutation:", K.k1.perm.table[:16])

# the same symbol lands somewhere different at every position
x = 0x41
print("0x41 at positions 0..7:", [twist_forward(x, p, K.k1) for p in range(8)])

# each twist is undone by its inverse
assert all(twist_inverse(twist_forward(v, 5, K.k1), 5, K.k1) == v for v in range(256))

# the full two-twist cipher as a 256 x 256 lookup table, one row per position
table = cipher_table(K)
print("table shape:", table.shape)
print("every row is a permutation:", bool((np.sort(table, axis=1) == np.arange(256)).all()))
