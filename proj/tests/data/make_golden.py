#!/usr/bin/env python3
"""Reference encoder for the token canonical format (docs/token_wire_format.md).

Independent of the C++ implementation; regenerates token_canonical.golden.
"""
import struct

def lp(b: bytes) -> bytes:
    return struct.pack(">H", len(b)) + b

version = 1
issuer_id = b"telco-eu-01"
key_id = b"ed25519-k1"
subject_attestation = bytes(range(32))
session_nonce = bytes(range(0xA0, 0xB0))
issued_at = 1755000000
expires_at = 1755000300
mode = 0  # Plain

enc = (
    struct.pack(">B", version)
    + lp(issuer_id)
    + lp(key_id)
    + subject_attestation
    + session_nonce
    + struct.pack(">Q", issued_at)
    + struct.pack(">Q", expires_at)
    + struct.pack(">B", mode)
)

with open("token_canonical.golden", "w") as f:
    f.write(enc.hex() + "\n")
print(f"{len(enc)} bytes -> token_canonical.golden")
