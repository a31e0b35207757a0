"""Statistical measurements of the cipher."""
from singularity_cipher import KeyPair, analyze, avalanche_ratio, chi_square_uniformity, encrypt_symbols, keyspace_bits

K = KeyPair.from_passphrase("singularity")

# flipping one plaintext bit changes about half of the affected byte
print("avalanche, per byte:", avalanche_ratio(K, chain=False, trials=5000))
print("avalanche, chained message:", avalanche_ratio(K, chain=True, trials=500))

print("nominal key space: %.2f bits" % keyspace_bits(256))

# constant plaintext shows the per-position sweep is far from uniform
stat, df = chi_square_uniformity(encrypt_symbols(b"A" * 65536, K))
# 293.25 is the 5% critical value for 255 degrees of freedom
print("chi-square %.0f on %d df; 5%% critical value 293.25" % (stat, df))

print(analyze(K, trials=2000).to_text())
