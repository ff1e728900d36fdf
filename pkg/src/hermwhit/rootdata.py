"""Restricted root data for su(p,q): distinguished sl2-triples, the positive
definite invariant form, root-space decomposition of the real algebra under
the split torus, the two-step nilradicals, and the complex structure on the
half layer that underlies the Fock model.

Normalizations (asserted numerically at build time):

* e_j = E_{j, p+j}, f_j = E_{p+j, j}, h_j = E_{jj} - E_{p+j, p+j}, and
  x_j = e_j + f_j spans the split torus a; lambda_j(x_i) = 2 delta_ij.
* u_j = i(h_j - e_j + f_j) in g; E = sum_j u_j; F = theta(E).
* (x|y) = c tr(x theta(y)) with c chosen so (E|E) = rank; this is positive
  definite on g (the trace form satisfies tr(x theta x) < 0 there, so c < 0).
* J = -(1/2) ad(E) o theta on the half layer n_{1/2}; then J^2 = -1 and
  (z - iJz)/2 lies in k_C + p^+, (z + iJz)/2 in k_C + p^-.
* <z, w> = (z|w) - i(Jz|w) is the J-hermitian form, complex linear in z.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .groups import GroupSpec, get_group, theta_alg
from .matcore import as_cmatrix, mat_exp

# Eigenvalue snapping tolerance for root labels (integers in [-2, 2]).
LABEL_SNAP_TOL = 1e-6
# Numerical tolerance for the structural identities asserted at build time.
BUILD_TOL = 1e-9


def _elementary(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


@dataclass(frozen=True)
class SL2Triple:
    """Distinguished sl2-triple attached to the j-th strongly orthogonal root.

    Satisfies [h,e] = 2e, [h,f] = -2f, [e,f] = h.  x = e + f lies in the
    split torus; u = i(h - e + f) is the real central direction it grades;
    cayley = exp(-(pi/4)(e - f)) conjugates h to x.
    """

    index: int
    e: np.ndarray
    f: np.ndarray
    h: np.ndarray

    @property
    def x(self):
        return self.e + self.f

    @property
    def u(self):
        return 1j * (self.h - self.e + self.f)

    @property
    def cayley(self):
        return mat_exp(-(np.pi / 4) * (self.e - self.f))


@dataclass
class RestrictedRoot:
    """A nonzero restricted root alpha with alpha(x_j) = label[j]."""

    label: tuple
    basis: list  # orthonormal real basis of the root space in g

    @property
    def mult(self):
        return len(self.basis)


def label_name(label):
    """Human-readable name of the root with alpha(x_j) = label[j].

    alpha = (1/2) sum_j label[j] lambda_j; e.g. (2,0) -> 'l1',
    (1,1) -> '(l1+l2)/2', (1,0) -> 'l1/2', (-2,) -> '-l1'.
    """
    nz = [(j, c) for j, c in enumerate(label) if c != 0]
    if not nz:
        return "0"
    if len(nz) == 1:
        j, c = nz[0]
        half = "" if abs(c) == 2 else "/2"
        return f"{'-' if c < 0 else ''}l{j + 1}{half}"
    parts = ""
    for j, c in nz:
        sign = "+" if c > 0 else "-"
        term = f"l{j + 1}" if abs(c) == 1 else f"{abs(c)}l{j + 1}"
        parts = parts + sign + term if parts else ("-" if c < 0 else "") + term
    return f"({parts})/2"


def moore_table(p, q):
    """Expected restricted root multiplicities for su(p,q), p >= q.

    Tube case (p == q): +-lambda_i with multiplicity 1 and
    (+-lambda_i +- lambda_j)/2, i < j, with multiplicity 2.
    Non-tube adds +-lambda_i/2 with multiplicity 2(p - q).
    """
    r = q
    table = {}
    for i in range(r):
        for s in (2, -2):
            nu = [0] * r
            nu[i] = s
            table[tuple(nu)] = 1
    for i in range(r):
        for j in range(i + 1, r):
            for si in (1, -1):
                for sj in (1, -1):
                    nu = [0] * r
                    nu[i], nu[j] = si, sj
                    table[tuple(nu)] = 2
    if p > q:
        for i in range(r):
            for s in (1, -1):
                nu = [0] * r
                nu[i] = s
                table[tuple(nu)] = 2 * (p - q)
    return table


@dataclass
class NilradicalBasis:
    """Real bases of the two graded layers of the nilradical n_j.

    n_j is graded by (1/2) alpha(x_1 + ... + x_j): `half` collects the
    root spaces at grade 1/2, `one` those at grade 1 (the layer containing
    the center).  Bases are orthonormal for the invariant form.
    """

    j: int
    half_labels: list
    one_labels: list
    half_basis: list
    one_basis: list

    @property
    def dim_half(self):
        return len(self.half_basis)

    @property
    def dim_one(self):
        return len(self.one_basis)

    def jmat(self, rd):
        """Real matrix of the complex structure J in the half basis."""
        m = np.zeros((self.dim_half, self.dim_half))
        for i, b in enumerate(self.half_basis):
            jb = rd.complex_structure(b)
            for k, bk in enumerate(self.half_basis):
                m[k, i] = rd.form(jb, bk)
        return m

    def hermitian_gram(self, rd):
        """Gram matrix of <z,w> = (z|w) - i(Jz|w) on the half basis."""
        d = self.dim_half
        g = np.zeros((d, d), dtype=complex)
        for i, bi in enumerate(self.half_basis):
            jbi = rd.complex_structure(bi)
            for k, bk in enumerate(self.half_basis):
                g[i, k] = rd.form(bi, bk) - 1j * rd.form(jbi, bk)
        return g


class RootDatum:
    """All restricted-root structure of one group, built numerically once."""

    def __init__(self, spec):
        if spec.p < spec.q:
            raise ValueError("realization assumes p >= q")
        self.spec = spec
        self.p, self.q, self.n = spec.p, spec.q, spec.n
        self.rank = spec.rank
        self._build_triples()
        self._build_form()
        self._build_g_basis()
        self._build_roots()
        self._build_complex_structure()

    # -- construction -------------------------------------------------------

    def _build_triples(self):
        p, n, r = self.p, self.n, self.rank
        triples = []
        for j in range(r):
            e = _elementary(n, j, p + j)
            f = _elementary(n, p + j, j)
            h = _elementary(n, j, j) - _elementary(n, p + j, p + j)
            triples.append(SL2Triple(j, e, f, h))
        self.triples = triples
        self.E = sum(t.u for t in triples)
        self.F = theta_alg(self.spec, self.E)
        cayley = np.eye(n, dtype=complex)
        for t in triples:
            cayley = cayley @ t.cayley
        self.cayley = cayley
        self.z0 = np.diag(
            np.concatenate(
                [
                    1j * self.q / n * np.ones(self.p),
                    -1j * self.p / n * np.ones(self.q),
                ]
            )
        ).astype(complex)

    def _build_form(self):
        # (x|y) = c tr(x theta y), scaled so that (E|E) = rank.
        tr = np.trace(self.E @ theta_alg(self.spec, self.E))
        assert abs(tr.imag) < BUILD_TOL
        self.c_norm = self.rank / tr.real
        assert self.c_norm < 0  # tr(x theta x) < 0 on g

    def form_c(self, x, y):
        """Complex-bilinear extension of the invariant form to g_C."""
        return self.c_norm * np.trace(as_cmatrix(x) @ theta_alg(self.spec, y))

    def form(self, x, y):
        """The positive definite invariant form on the real algebra."""
        v = self.form_c(x, y)
        return v.real

    def e_pairing(self, x):
        """(x|E), complex-bilinear in x."""
        return self.form_c(x, self.E)

    def _build_g_basis(self):
        p, q, n = self.p, self.q, self.n
        raw = []
        # anti-hermitian generators of the two diagonal blocks
        for lo, hi in ((0, p), (p, n)):
            for i in range(lo, hi):
                for j in range(i + 1, hi):
                    raw.append(_elementary(n, i, j) - _elementary(n, j, i))
                    raw.append(1j * (_elementary(n, i, j) + _elementary(n, j, i)))
        # traceless imaginary diagonal
        for i in range(n - 1):
            raw.append(1j * (_elementary(n, i, i) - _elementary(n, i + 1, i + 1)))
        # off-diagonal blocks (B and C = B* tied together)
        for i in range(p):
            for j in range(q):
                raw.append(_elementary(n, i, p + j) + _elementary(n, p + j, i))
                raw.append(1j * (_elementary(n, i, p + j) - _elementary(n, p + j, i)))
        self.g_basis = self._orthonormalize(raw)
        assert len(self.g_basis) == n * n - 1

    def _orthonormalize(self, vectors, tol=1e-12):
        """Real Gram-Schmidt with respect to the invariant form."""
        basis = []
        for v in vectors:
            w = v.astype(complex)
            for b in basis:
                w = w - self.form(w, b) * b
            nrm = self.form(w, w)
            if nrm > tol:
                basis.append(w / np.sqrt(nrm))
        return basis

    def coords(self, x):
        """Coordinates of x in the orthonormal g-basis (complex for g_C input)."""
        return np.array([self.form_c(x, b) for b in self.g_basis])

    def from_coords(self, c):
        return sum(ci * bi for ci, bi in zip(c, self.g_basis))

    def _ad_matrix(self, y):
        dim = len(self.g_basis)
        m = np.zeros((dim, dim))
        for i, b in enumerate(self.g_basis):
            c = self.coords(y @ b - b @ y)
            assert np.max(np.abs(c.imag)) < BUILD_TOL
            m[:, i] = c.real
        return m

    def _build_roots(self):
        r = self.rank
        ads = [self._ad_matrix(t.x) for t in self.triples]
        # ad(x_j) are commuting symmetric matrices in the orthonormal basis;
        # diagonalize a generic combination and read labels off Rayleigh
        # quotients.  sqrt-prime coefficients keep distinct integer label
        # tuples separated.
        weights = np.sqrt(np.array([2.0, 3.0, 5.0, 7.0][:r]))
        generic = sum(w * m for w, m in zip(weights, ads))
        _, vecs = np.linalg.eigh(generic)
        spaces = {}
        for i in range(vecs.shape[1]):
            v = vecs[:, i]
            label = []
            for m in ads:
                val = float(v @ (m @ v))
                snapped = int(round(val))
                assert abs(val - snapped) <= LABEL_SNAP_TOL, (val, snapped)
                label.append(snapped)
            spaces.setdefault(tuple(label), []).append(self.from_coords(v))
        zero = tuple([0] * r)
        self.zero_space = self._orthonormalize(spaces.pop(zero))
        self.roots = {
            label: RestrictedRoot(label, self._orthonormalize(vs))
            for label, vs in sorted(spaces.items())
        }

    def _build_complex_structure(self):
        # J = -(1/2) ad(E) theta on the half layer; asserted to square to -1
        # and to send (z - iJz)/2 into k_C + p^+ (upper-triangular blocks).
        nil = self.nilradical()
        self._nil_top = nil
        for z in nil.half_basis:
            jz = self.complex_structure(z)
            assert np.linalg.norm(self.complex_structure(jz) + z) < BUILD_TOL
            holo = (z - 1j * jz) / 2
            assert np.linalg.norm(holo[self.p:, : self.p]) < BUILD_TOL, (
                "holomorphic projection escapes k_C + p^+"
            )
            # J is an isometry and is skew for the invariant form
            assert abs(self.form(jz, jz) - self.form(z, z)) < BUILD_TOL
            assert abs(self.form(jz, z) + self.form(z, jz)) < BUILD_TOL

    def complex_structure(self, z):
        """J z = -(1/2) [E, theta(z)] (complex linear on the complexification)."""
        tz = theta_alg(self.spec, as_cmatrix(z))
        return -0.5 * (self.E @ tz - tz @ self.E)

    # -- queries -------------------------------------------------------------

    def restricted_decompose(self, x):
        """Decompose x in g_C into restricted-root components.

        Returns a dict label -> component (the zero label collects m + a).
        Raises ValueError if x is not in the complexified algebra span.
        """
        x = as_cmatrix(x)
        comps = {}
        total = np.zeros_like(x)
        zero = tuple([0] * self.rank)
        for label, basis in [(zero, self.zero_space)] + [
            (lab, root.basis) for lab, root in self.roots.items()
        ]:
            comp = np.zeros_like(x)
            for b in basis:
                comp = comp + self.form_c(x, b) * b
            if np.linalg.norm(comp) > 1e-14 * max(1.0, np.linalg.norm(x)):
                comps[label] = comp
            total = total + comp
        if np.linalg.norm(total - x) > 1e-8 * max(1.0, np.linalg.norm(x)):
            raise ValueError("matrix is not in the complexified algebra")
        return comps

    def nilradical(self, j=None):
        """Graded basis of the nilradical n_j (default: maximal, j = rank).

        A root space g^alpha lies in n_j iff S = sum_{i <= j} alpha(x_i) > 0;
        its grade is S/2, which is 1/2 or 1.
        """
        if j is None:
            j = self.rank
        if not 1 <= j <= self.rank:
            raise ValueError(f"nilradical index must be in 1..{self.rank}")
        half_labels, one_labels, half_basis, one_basis = [], [], [], []
        for label, root in self.roots.items():
            s = sum(label[:j])
            if s <= 0:
                continue
            if s == 1:
                half_labels.append(label)
                half_basis.extend(root.basis)
            elif s == 2:
                one_labels.append(label)
                one_basis.extend(root.basis)
            else:
                raise AssertionError(f"unexpected grade {s/2} for {label}")
        return NilradicalBasis(j, half_labels, one_labels, half_basis, one_basis)

    def rho_constants(self):
        """(rho_n, rho_l, rho) as vectors indexed by the torus coordinates.

        rho_n[j] = (1/2) sum over Delta(n, a) of mult(alpha) alpha(x_j), and
        rho_l[j] likewise over the positive l-roots (lambda_i - lambda_j)/2,
        i < j.  alpha(x_j) = label[j].
        """
        r = self.rank
        rho_n = np.zeros(r)
        rho_l = np.zeros(r)
        for label, root in self.roots.items():
            s = sum(label)
            if s > 0:
                rho_n += 0.5 * root.mult * np.array(label, dtype=float)
            elif s == 0 and any(label):
                # l-root; positive iff first nonzero entry is positive
                first = next(c for c in label if c != 0)
                if first > 0:
                    rho_l += 0.5 * root.mult * np.array(label, dtype=float)
        return rho_n, rho_l, rho_n + rho_l

    def l_density_w(self, t):
        """Density w(exp H) = prod sinh(alpha(H))^mult over positive l-roots,
        H = sum t_j x_j (so alpha(H) = sum_j label[j] t_j)."""
        t = np.asarray(t, dtype=float)
        w = 1.0
        for label, root in self.roots.items():
            if sum(label) == 0 and any(label):
                first = next(c for c in label if c != 0)
                if first > 0:
                    w *= np.sinh(float(np.dot(label, t))) ** root.mult
        return w

    def observed_table(self):
        """Observed restricted roots: label -> multiplicity."""
        return {label: root.mult for label, root in self.roots.items()}

    @property
    def fock_structure(self):
        try:
            return self._fock
        except AttributeError:
            self._fock = FockStructure(self)
            return self._fock


class FockStructure:
    """Complex coordinates on the half layer and the center pairing.

    b_basis is orthonormal for the J-hermitian form <z,w> = (z|w) - i(Jz|w);
    the real isomorphism n_{1/2} = C^d it induces intertwines J with i, and
    z <-> sum_m c_m u+_m under (z - iJz)/2 with the *same* coordinates c_m,
    where u+_m = (b_m - i J b_m)/2.
    """

    def __init__(self, rd):
        self.rd = rd
        nil = rd.nilradical()
        self.nil = nil
        self.b_basis = self._complex_orthonormalize(nil.half_basis)
        self.d = len(self.b_basis)
        assert 2 * self.d == nil.dim_half
        self.jb_basis = [rd.complex_structure(b) for b in self.b_basis]
        self.u_plus_basis = [
            (b - 1j * jb) / 2 for b, jb in zip(self.b_basis, self.jb_basis)
        ]
        self.u_minus_basis = [
            (b + 1j * jb) / 2 for b, jb in zip(self.b_basis, self.jb_basis)
        ]
        self.one_basis = nil.one_basis
        self._half_solver = self._entry_solver(self.u_plus_basis + self.u_minus_basis)
        self._one_solver = self._entry_solver(self.one_basis)

    def herm(self, z, w):
        """<z, w> = (z|w) - i(Jz|w) for real z, w in the half layer."""
        rd = self.rd
        return rd.form(z, w) - 1j * rd.form(rd.complex_structure(z), w)

    def _complex_orthonormalize(self, vectors, tol=1e-12):
        rd = self.rd
        basis = []
        for v in vectors:
            w = v.astype(complex)
            for b in basis:
                c = self.herm(w, b)
                w = w - c.real * b - c.imag * rd.complex_structure(b)
            nrm = rd.form(w, w)
            if nrm > tol:
                basis.append(w / np.sqrt(nrm))
        return basis

    def _entry_solver(self, basis):
        if not basis:
            return None
        a = np.stack([b.ravel() for b in basis], axis=1)
        return np.linalg.pinv(a)

    def coords(self, z):
        """Complex coordinates c_m(z) = <z, b_m> of a real half-layer element."""
        return np.array([self.herm(z, b) for b in self.b_basis])

    def from_coords(self, c):
        """Real half-layer element with coordinates c."""
        z = np.zeros((self.rd.n, self.rd.n), dtype=complex)
        for cm, b, jb in zip(c, self.b_basis, self.jb_basis):
            z = z + cm.real * b + cm.imag * jb
        return z

    def split_half_complex(self, x, tol=1e-9):
        """Split x in the complexified half layer as sum c+_m u+_m + c-_m u-_m.

        Returns (c_plus, c_minus).  For real x, c_plus = coords(x) and
        c_minus = conj(coords(x)).
        """
        if self.d == 0:
            return np.zeros(0, dtype=complex), np.zeros(0, dtype=complex)
        sol = self._half_solver @ as_cmatrix(x).ravel()
        recon = sum(
            s * b for s, b in zip(sol, self.u_plus_basis + self.u_minus_basis)
        )
        if np.linalg.norm(recon - x) > tol * max(1.0, np.linalg.norm(x)):
            raise ValueError("matrix is not in the complexified half layer")
        return sol[: self.d], sol[self.d:]

    def one_coords(self, v, tol=1e-9):
        """Coordinates of v in the complexified center layer."""
        if not self.one_basis:
            return np.zeros(0, dtype=complex)
        sol = self._one_solver @ as_cmatrix(v).ravel()
        recon = sum(s * b for s, b in zip(sol, self.one_basis))
        if np.linalg.norm(recon - v) > tol * max(1.0, np.linalg.norm(v)):
            raise ValueError("matrix is not in the complexified center layer")
        return sol

    def from_one_coords(self, c):
        v = np.zeros((self.rd.n, self.rd.n), dtype=complex)
        for cm, b in zip(c, self.one_basis):
            v = v + cm * b
        return v


@lru_cache(maxsize=None)
def _build_cached(p, q):
    return RootDatum(GroupSpec(f"su{p}{q}", p, q))


def build_root_datum(spec_or_name):
    """Root datum for a group spec or registry name (cached by signature)."""
    spec = (
        get_group(spec_or_name) if isinstance(spec_or_name, str) else spec_or_name
    )
    return _build_cached(spec.p, spec.q)
