"""Flat F_p-coordinate view of a field tower, feeding the scan kernels.

Elements of F_{q^m} (q = p^k) become length m*k byte vectors over F_p.
Multiplication is a fixed bilinear tensor; multiplication by a constant,
Frobenius-polynomial actions and the trace are F_p-linear matrices.  All
tables are built once per context in pure Python; the kernels only ever see
bytes and integer arrays.
"""

from __future__ import annotations

from array import array

from ..ffield import FieldContext, FieldElement

__all__ = ["FlatField"]


class FlatField:
    def __init__(self, ctx: FieldContext):
        self.ctx = ctx
        self.p = ctx.p
        self.dim = ctx.m * ctx.k
        self.order = ctx.order
        basis = []
        F = ctx.Fqm
        for j in range(ctx.m):
            for b in range(ctx.k):
                vec = [F.base.zero] * ctx.m
                if ctx.k == 1:
                    vec[j] = F.base.one
                else:
                    inner = [F.base.base.zero] * ctx.k
                    inner[b] = 1
                    vec[j] = tuple(inner)
                basis.append(tuple(vec))
        self._basis = basis
        self._tensor = self._build_tensor()

    # --- conversions ---

    def to_flat(self, x: FieldElement) -> bytes:
        F = self.ctx.Fqm
        return bytes(F.base_coords(x.value))

    def from_flat(self, vec) -> FieldElement:
        ctx = self.ctx
        if ctx.k == 1:
            value = tuple(v % ctx.p for v in vec)
        else:
            value = tuple(
                tuple(vec[j * ctx.k + b] % ctx.p for b in range(ctx.k)) for j in range(ctx.m)
            )
        return FieldElement(ctx, value)

    def pack(self, vec) -> int:
        key = 0
        for v in reversed(vec):
            key = key * self.p + v
        return key

    def unpack(self, key: int) -> bytes:
        out = bytearray(self.dim)
        for i in range(self.dim):
            key, r = divmod(key, self.p)
            out[i] = r
        return bytes(out)

    # --- linear/bilinear tables ---

    def _build_tensor(self) -> bytes:
        F = self.ctx.Fqm
        d = self.dim
        out = bytearray(d * d * d)
        flats = [F.base_coords(b) for b in self._basis]
        for i in range(d):
            bi = self._basis[i]
            for j in range(i, d):
                prod = F.mul(bi, self._basis[j])
                coords = F.base_coords(prod)
                for t in range(d):
                    out[(i * d + j) * d + t] = coords[t]
                    out[(j * d + i) * d + t] = coords[t]
        return bytes(out)

    @property
    def tensor(self) -> bytes:
        return self._tensor

    def mul_matrix(self, c: FieldElement) -> bytes:
        """dim x dim matrix of y -> c*y, row-major (row t = output coord t)."""
        F = self.ctx.Fqm
        d = self.dim
        out = bytearray(d * d)
        for j, b in enumerate(self._basis):
            coords = F.base_coords(F.mul(c.value, b))
            for t in range(d):
                out[t * d + j] = coords[t]
        return bytes(out)

    def linear_matrix(self, func) -> bytes:
        """Matrix of an arbitrary F_p-linear map given as FieldElement -> FieldElement."""
        d = self.dim
        out = bytearray(d * d)
        for j, b in enumerate(self._basis):
            img = func(FieldElement(self.ctx, b))
            coords = self.ctx.Fqm.base_coords(img.value)
            for t in range(d):
                out[t * d + j] = coords[t]
        return bytes(out)

    def trace_matrix(self) -> bytes:
        """k x dim matrix sending flat coords to the F_p coords of Tr to F_q."""
        k = self.ctx.k
        d = self.dim
        out = bytearray(k * d)
        for j, b in enumerate(self._basis):
            t = FieldElement(self.ctx, b).trace_to_base()
            coords = self.ctx.Fq.base_coords(t) if k > 1 else (t % self.p,)
            for r in range(k):
                out[r * d + j] = coords[r]
        return bytes(out)

    def poly_coeff_rows(self, poly, lead=None) -> tuple[bytes, int]:
        """Flat coefficient rows (ascending) of a top-field polynomial."""
        F = self.ctx.Fqm
        coeffs = list(poly.coeffs) or [F.zero]
        if lead is not None:
            coeffs = [F.mul(lead, c) for c in coeffs]
        deg = len(coeffs) - 1
        out = bytearray((deg + 1) * self.dim)
        for i, c in enumerate(coeffs):
            coords = F.base_coords(c)
            for t in range(self.dim):
                out[i * self.dim + t] = coords[t]
        return bytes(out), deg

    def trace_index(self, scalar) -> int:
        """Pack an F_q scalar into [0, q) consistently with trace_matrix output."""
        if self.ctx.k == 1:
            return scalar % self.p
        coords = self.ctx.Fq.base_coords(scalar)
        key = 0
        for v in reversed(coords):
            key = key * self.p + v
        return key

    def sort_keys(self, keys: array) -> tuple[array, array]:
        """Sorted copy of keys plus the exponent permutation, for binary search."""
        order = sorted(range(len(keys)), key=keys.__getitem__)
        skeys = array("q", (keys[i] for i in order))
        exps = array("q", order)
        return skeys, exps
