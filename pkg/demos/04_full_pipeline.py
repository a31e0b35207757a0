"""Encrypt a message to a picture and read it back."""
from singularity_cipher import decrypt_from_svg, encrypt_to_svg

secret = "Meet at the usual place.".encode()
doc = encrypt_to_svg(secret, "hunter2", columns=24)
print("document size:", len(doc), "characters")
print("polygons:", doc.count("<polygon"))

print("right key:", decrypt_from_svg(doc, "hunter2"))
print("wrong key:", decrypt_from_svg(doc, "hunter3"))

# chain mode feeds each ciphertext byte into the next position
chained = encrypt_to_svg(secret, "hunter2", chain=True)
print("chain round trip ok:", decrypt_from_svg(chained, "hunter2", chain=True) == secret)
