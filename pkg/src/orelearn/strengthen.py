"""Generic weak-to-strong ORE conversion via per-ciphertext certificates.

The wrapper commits to the base secret key in the public parameters and
attaches to every ciphertext a certificate that the ciphertext is well
formed, i.e. that there exist m, sk', r with sigma = commit(sk'; r) and
c' = enc'(sk', m).  Decryption and comparison verify the certificate(s)
first and refuse (BOT) on any failure; otherwise they delegate to the base
scheme.  Certificate soundness then forces every accepted ciphertext into
the range of the deterministic base encryption, where weak correctness
already makes comparison agree with decryption — which is exactly strong
correctness.

Two interchangeable certifier back-ends are shipped:

* ``SignatureCertifier`` — publicly verifiable: the certificate is an
  Ed25519 signature over the canonical statement encoding, signed with a
  key generated inside gen and kept in the secret key.  Soundness is
  computational (forging a certificate means forging a signature).
* ``EscrowCertifier`` — simulation-only, perfectly sound: the certificate
  is empty and the verification key holds a sealed reference to the base
  secret key, used solely to re-encrypt the decryption and compare bytes.
  Its serialized form leaks the base key bytes to the harness; never
  deploy it.

Strengthened ciphertext layout (bit exact)::

    version=0x02 | ell (1 byte) | u32 len(c') | c' | u32 len(cert) | cert

Statement encoding (bit exact): b"ore-statement-v1" followed by the
length-prefixed fields (params', sigma, c') in that order.
"""

from __future__ import annotations

import hashlib

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .core import (
    BOT,
    CheckReport,
    KeyMaterial,
    OreScheme,
    PublicParams,
    decode_blob,
    encode_blob,
)

__all__ = [
    "commit",
    "binding_check",
    "statement_bytes",
    "SignatureCertifier",
    "EscrowCertifier",
    "StrengthenedOre",
    "StrongSecretKey",
    "StrongParams",
    "strengthen",
    "STRONG_VERSION",
]

STRONG_VERSION = 0x02
_COMMIT_LEN = 32


# ---------------------------------------------------------------------------
# Commitment
# ---------------------------------------------------------------------------


def commit(value: bytes, randomness: bytes) -> bytes:
    """Keyed collision-resistant compression of (value, randomness).

    Deterministic in both arguments.  Binding is computational in general;
    ``binding_check`` verifies it exhaustively on small test domains.
    """
    return hashlib.blake2b(
        encode_blob(value, randomness), key=b"ore-commit", digest_size=_COMMIT_LEN
    ).digest()


def binding_check(values, randomness_values) -> CheckReport:
    """Exhaustive collision search: no two distinct values may share a commitment."""
    report = CheckReport()
    seen: dict[bytes, bytes] = {}
    for v in values:
        for r in randomness_values:
            c = commit(v, r)
            report.checked += 1
            prior = seen.get(c)
            if prior is None:
                seen[c] = v
            elif prior != v:
                report.add_failure({"value_a": prior.hex(), "value_b": v.hex()})
    return report


# ---------------------------------------------------------------------------
# Certifiers
# ---------------------------------------------------------------------------

_STATEMENT_DOMAIN = b"ore-statement-v1"


def statement_bytes(base_params: bytes, sigma: bytes, base_ct: bytes) -> bytes:
    """Canonical encoding of the well-formedness statement for one ciphertext."""
    return _STATEMENT_DOMAIN + encode_blob(base_params, sigma, base_ct)


class SignatureCertifier:
    """Certificates are Ed25519 signatures over the statement encoding."""

    name = "signature"
    perfectly_sound = False

    def setup(self, base: OreScheme, base_sk, seed: bytes):
        sk = Ed25519PrivateKey.from_private_bytes(
            hashlib.blake2b(seed, key=b"cert-sign-seed", digest_size=32).digest()
        )
        vk = sk.public_key().public_bytes_raw()
        return _SignatureProvingKey(sk), _SignatureVerifyKey(vk)


class _SignatureProvingKey:
    __slots__ = ("sk",)

    needs_statement = True

    def __init__(self, sk: Ed25519PrivateKey):
        self.sk = sk

    def certify(self, statement: bytes, witness=None) -> bytes:
        return self.sk.sign(statement)


class _SignatureVerifyKey:
    __slots__ = ("vk_bytes", "_vk")

    kind = "signature"

    def __init__(self, vk_bytes: bytes):
        self.vk_bytes = vk_bytes
        self._vk = Ed25519PublicKey.from_public_bytes(vk_bytes)

    def serialize(self) -> bytes:
        return b"sig:" + self.vk_bytes

    def verify(self, statement: bytes, cert: bytes) -> bool:
        try:
            self._vk.verify(cert, statement)
            return True
        except (InvalidSignature, ValueError):
            return False


class EscrowCertifier:
    """Test-only perfectly sound certifier.

    The certificate is empty; verification holds the base secret key in
    escrow and accepts exactly when the embedded base ciphertext is the
    deterministic re-encryption of its own decryption, i.e. lies in the
    range of enc'(sk', .).  Perfectly complete and perfectly sound by
    construction.
    """

    name = "escrow"
    perfectly_sound = True

    def setup(self, base: OreScheme, base_sk, seed: bytes):
        return _EscrowProvingKey(), _EscrowVerifyKey(base, base_sk)


class _EscrowProvingKey:
    __slots__ = ()

    needs_statement = False

    def certify(self, statement: bytes, witness=None) -> bytes:
        return b""


class _EscrowVerifyKey:
    __slots__ = ("_base", "_base_sk")

    kind = "escrow"

    def __init__(self, base: OreScheme, base_sk):
        self._base = base
        self._base_sk = base_sk

    def serialize(self) -> bytes:
        # leaks the sealed key bytes; escrow mode is simulation-only
        return b"escrow:" + self._base_sk.key

    def verify(self, statement: bytes, cert: bytes) -> bool:
        if statement[: len(_STATEMENT_DOMAIN)] != _STATEMENT_DOMAIN:
            return False
        fields = decode_blob(statement[len(_STATEMENT_DOMAIN) :], 3)
        if fields is None:
            return False
        base_ct = fields[2]
        m = self._base.dec(self._base_sk, base_ct)
        if m is BOT:
            return False
        return self._base.enc(self._base_sk, m) == base_ct


# ---------------------------------------------------------------------------
# The strengthened scheme
# ---------------------------------------------------------------------------


class StrongSecretKey:
    """Base key plus commitment opening and both certifier keys.

    The verification key is kept here as well as in params (mirroring a
    common reference string available to both sides) so decryption can
    check certificates without touching public parameters.
    """

    __slots__ = ("base_sk", "base_params", "sigma", "commit_rand", "proving_key", "cert_vk")

    def __init__(self, base_sk, base_params, sigma, commit_rand, proving_key, cert_vk):
        self.base_sk = base_sk
        self.base_params = base_params
        self.sigma = sigma
        self.commit_rand = commit_rand
        self.proving_key = proving_key
        self.cert_vk = cert_vk


class StrongParams(PublicParams):
    """(base params, key commitment, certificate verification key)."""

    def __new__(cls, base_params: PublicParams, sigma: bytes, cert_vk):
        data = encode_blob(base_params.data, sigma, cert_vk.serialize())
        self = object.__new__(cls)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "ell", base_params.ell)
        object.__setattr__(self, "base_params", base_params)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "cert_vk", cert_vk)
        return self

    def __init__(self, *args, **kwargs):  # fields set in __new__
        pass


class StrengthenedOre(OreScheme):
    """Wraps a weakly correct base scheme with well-formedness certificates."""

    def __init__(self, base: OreScheme, certifier):
        self.base = base
        self.certifier = certifier
        self.lam = base.lam
        self.ell = base.ell
        self.coin_len = base.coin_len
        self.name = f"strong-{certifier.name}"
        # bounded memo of certificate verdicts; verification is a pure
        # function of (vk, statement, cert), so caching cannot change results
        self._verify_cache: dict[bytes, bool] = {}

    def gen_from_coins(self, coins: bytes) -> KeyMaterial:
        def sub(label: bytes) -> bytes:
            return hashlib.blake2b(coins, key=label, digest_size=32).digest()

        base_key = self.base.gen_from_coins(sub(b"strong-base-coins"))
        commit_rand = sub(b"strong-commit-rand")
        sigma = commit(base_key.sk.key, commit_rand)
        proving_key, cert_vk = self.certifier.setup(
            self.base, base_key.sk, sub(b"strong-cert-seed")
        )
        sk = StrongSecretKey(
            base_key.sk, base_key.params, sigma, commit_rand, proving_key, cert_vk
        )
        params = StrongParams(base_key.params, sigma, cert_vk)
        return KeyMaterial(sk=sk, params=params, coins=coins)

    def params_len(self) -> int:
        vk_len = {"signature": 4 + 32, "escrow": 7 + 32}[self.certifier.name]
        return 12 + self.base.params_len() + _COMMIT_LEN + vk_len

    # -- enc / dec / comp ---------------------------------------------------

    def enc(self, sk: StrongSecretKey, m: int) -> bytes:
        base_ct = self.base.enc(sk.base_sk, m)
        if sk.proving_key.needs_statement:
            stmt = statement_bytes(sk.base_params.data, sk.sigma, base_ct)
        else:
            stmt = b""
        cert = sk.proving_key.certify(stmt, witness=(m, sk.base_sk, sk.commit_rand))
        return bytes([STRONG_VERSION, self.ell]) + encode_blob(base_ct, cert)

    def _parse(self, ct: bytes):
        if len(ct) < 2 or ct[0] != STRONG_VERSION or ct[1] != self.ell:
            return None
        fields = decode_blob(ct[2:], 2)
        if fields is None:
            return None
        return fields[0], fields[1]

    def _verify(self, cert_vk, stmt: bytes, cert: bytes) -> bool:
        h = hashlib.blake2b(
            encode_blob(cert_vk.serialize(), stmt, cert),
            key=b"verify-memo",
            digest_size=24,
        ).digest()
        hit = self._verify_cache.get(h)
        if hit is not None:
            return hit
        ok = cert_vk.verify(stmt, cert)
        if len(self._verify_cache) > 4096:
            self._verify_cache.clear()
        self._verify_cache[h] = ok
        return ok

    def dec(self, sk: StrongSecretKey, ct: bytes):
        parsed = self._parse(ct)
        if parsed is None:
            return BOT
        base_ct, cert = parsed
        stmt = statement_bytes(sk.base_params.data, sk.sigma, base_ct)
        if not self._verify(sk.cert_vk, stmt, cert):
            return BOT
        return self.base.dec(sk.base_sk, base_ct)

    def comp(self, params: StrongParams, c0: bytes, c1: bytes):
        p0 = self._parse(c0)
        p1 = self._parse(c1)
        if p0 is None or p1 is None:
            return BOT
        for base_ct, cert in (p0, p1):
            stmt = statement_bytes(params.base_params.data, params.sigma, base_ct)
            if not self._verify(params.cert_vk, stmt, cert):
                return BOT
        return self.base.comp(params.base_params, p0[0], p1[0])


def strengthen(base: OreScheme, certifier) -> StrengthenedOre:
    """Wrap a weakly correct base scheme into a strongly correct one."""
    return StrengthenedOre(base, certifier)
