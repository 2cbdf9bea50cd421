//! Real-space device description: the twisted two-leg ring, its leads, and
//! the optional two-level atom.
//!
//! Site ordering is fixed for the whole crate: the upper sub-ring `a_0..a_{N-1}`
//! occupies rows `0..N`, the lower sub-ring `b_0..b_{N-1}` rows `N..2N`, and the
//! atom (when present) row `2N`.

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Real;

/// Parameters of the Möbius ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingSpec<T> {
    /// Number of rungs (cavities per sub-ring).
    pub n: usize,
    /// Cavity frequency.
    pub epsilon: T,
    /// Rung coupling between `a_j` and `b_j`.
    pub v: T,
    /// Hopping between neighbouring cavities along the ring.
    pub xi: T,
}

impl<T: Real> RingSpec<T> {
    /// Ring with `epsilon = 0`.
    pub fn new(n: usize, v: T, xi: T) -> Result<Self> {
        Self::with_epsilon(n, T::zero(), v, xi)
    }

    pub fn with_epsilon(n: usize, epsilon: T, v: T, xi: T) -> Result<Self> {
        let spec = Self { n, epsilon, v, xi };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec {
                field: "N",
                constraint: format!("N must be at least 2, got {}", self.n),
            });
        }
        if self.xi == T::zero() {
            return Err(Error::InvalidSpec {
                field: "xi",
                constraint: "xi must be nonzero".into(),
            });
        }
        for (field, x) in [("epsilon", self.epsilon), ("V", self.v), ("xi", self.xi)] {
            if !x.is_finite() {
                return Err(Error::InvalidSpec {
                    field,
                    constraint: "must be finite".into(),
                });
            }
        }
        Ok(())
    }

    /// Dimension of the bare ring matrix.
    pub fn dim(&self) -> usize {
        2 * self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    UpperA,
    LowerB,
    Atom,
}

/// A device site; maps bijectively onto a matrix row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteIndex {
    pub layer: Layer,
    pub j: usize,
}

impl SiteIndex {
    pub fn upper(j: usize) -> Self {
        Self { layer: Layer::UpperA, j }
    }

    pub fn lower(j: usize) -> Self {
        Self { layer: Layer::LowerB, j }
    }

    pub fn atom() -> Self {
        Self { layer: Layer::Atom, j: 0 }
    }

    /// Matrix row for a ring of `n` rungs.
    pub fn row(&self, n: usize) -> usize {
        match self.layer {
            Layer::UpperA => self.j,
            Layer::LowerB => n + self.j,
            Layer::Atom => 2 * n,
        }
    }

    /// Inverse of [`SiteIndex::row`].
    pub fn from_row(row: usize, n: usize) -> Option<Self> {
        match row {
            r if r < n => Some(Self::upper(r)),
            r if r < 2 * n => Some(Self::lower(r - n)),
            r if r == 2 * n => Some(Self::atom()),
            _ => None,
        }
    }
}

/// Which lead self-energy form to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfEnergyConvention {
    /// Surface self-energy of a semi-infinite chain, `-(κ²/ζ) e^{ik'}`.
    #[default]
    Surface,
    /// Magnitude-κ form `-κ e^{ik'}`.
    Literal,
}

/// One semi-infinite chain lead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadSpec<T> {
    /// Chain cavity frequency.
    pub omega: T,
    /// Chain hopping (positive).
    pub zeta: T,
    /// Coupling between the first chain cavity and the attachment site.
    pub kappa: T,
    pub attach: SiteIndex,
    pub convention: SelfEnergyConvention,
}

impl<T: Real> LeadSpec<T> {
    /// Surface-convention lead attached to `a_j`.
    pub fn new(omega: T, zeta: T, kappa: T, j: usize) -> Result<Self> {
        let lead = Self {
            omega,
            zeta,
            kappa,
            attach: SiteIndex::upper(j),
            convention: SelfEnergyConvention::Surface,
        };
        lead.validate()?;
        Ok(lead)
    }

    pub fn with_convention(mut self, convention: SelfEnergyConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > T::zero()) || !self.zeta.is_finite() {
            return Err(Error::InvalidSpec {
                field: "zeta",
                constraint: "zeta must be positive and finite".into(),
            });
        }
        if !self.omega.is_finite() || !self.kappa.is_finite() {
            return Err(Error::InvalidSpec {
                field: "lead",
                constraint: "omega and kappa must be finite".into(),
            });
        }
        if self.attach.layer != Layer::UpperA {
            return Err(Error::InvalidSpec {
                field: "attach",
                constraint: "leads attach to upper-layer sites a_j only".into(),
            });
        }
        Ok(())
    }

    /// Lead band `[ω − 2ζ, ω + 2ζ]`.
    pub fn band(&self) -> (T, T) {
        let w = T::lit(2.0) * self.zeta;
        (self.omega - w, self.omega + w)
    }

    /// Whether `energy` is a propagating energy of this lead (band edges included).
    pub fn propagates(&self, energy: T) -> bool {
        let (lo, hi) = self.band();
        energy >= lo && energy <= hi
    }
}

/// The two-level atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSpec<T> {
    pub omega_a: T,
    pub gamma: T,
    /// Host cavity `a_n`.
    pub n: usize,
}

impl<T: Real> AtomSpec<T> {
    pub fn new(omega_a: T, gamma: T, n: usize) -> Self {
        Self { omega_a, gamma, n }
    }
}

/// Real symmetric Hamiltonian of the closed device.
///
/// Every bond is written to both triangles in one call, so the matrix is
/// exactly symmetric; all couplings are real.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceMatrix<T> {
    ring_size: usize,
    dim: usize,
    atom: bool,
    entries: Vec<T>,
}

impl<T: Real> DeviceMatrix<T> {
    fn zeros(ring_size: usize, dim: usize) -> Self {
        Self {
            ring_size,
            dim,
            atom: false,
            entries: vec![T::zero(); dim * dim],
        }
    }

    /// Arbitrary real symmetric device of `dim` sites (row-major entries).
    /// Every site is addressed as an upper-layer site `a_j`, `j = row`.
    pub fn from_symmetric(dim: usize, entries: Vec<T>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidSpec {
                field: "entries",
                constraint: format!("expected {} entries for dim {dim}", dim * dim),
            });
        }
        let m = Self {
            ring_size: dim,
            dim,
            atom: false,
            entries,
        };
        if m.hermiticity_error() != T::zero() {
            return Err(Error::InvalidSpec {
                field: "entries",
                constraint: "matrix must be exactly symmetric".into(),
            });
        }
        Ok(m)
    }

    fn bond(&mut self, i: usize, j: usize, value: T) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rungs of the underlying ring.
    pub fn ring_size(&self) -> usize {
        self.ring_size
    }

    pub fn has_atom(&self) -> bool {
        self.atom
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn site(&self, a: SiteIndex, b: SiteIndex) -> T {
        self.get(a.row(self.ring_size), b.row(self.ring_size))
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// `max |H_ij − H_ji|`.
    pub fn hermiticity_error(&self) -> T {
        let n = self.dim;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .fold(T::zero(), |m, (i, j)| m.max((self.get(i, j) - self.get(j, i)).abs()))
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        linalg::symmetric_eigenvalues(self.dim, &self.entries)
    }

    /// Neighbour lists of the nonzero off-diagonal pattern.
    pub fn bond_graph(&self) -> Vec<Vec<usize>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| j != i && self.get(i, j) != T::zero())
                    .collect()
            })
            .collect()
    }
}

/// Builds the `2N × 2N` Möbius ring Hamiltonian.
///
/// The `j = N−1` hop closes the ring with a half twist: `a_{N−1}` bonds to
/// `b_0` and `b_{N−1}` bonds to `a_0`.
pub fn build_ring<T: Real>(spec: &RingSpec<T>) -> Result<DeviceMatrix<T>> {
    spec.validate()?;
    let n = spec.n;
    let mut h = ring_without_closure(spec);
    let (a, b) = (|j| SiteIndex::upper(j).row(n), |j| SiteIndex::lower(j).row(n));
    h.bond(a(n - 1), b(0), -spec.xi);
    h.bond(b(n - 1), a(0), -spec.xi);
    Ok(h)
}

/// Ordinary periodic two-leg ring, used only to contrast the twist topology.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn build_untwisted_ring<T: Real>(spec: &RingSpec<T>) -> Result<DeviceMatrix<T>> {
    spec.validate()?;
    let n = spec.n;
    let mut h = ring_without_closure(spec);
    h.bond(n - 1, 0, -spec.xi);
    h.bond(2 * n - 1, n, -spec.xi);
    Ok(h)
}

fn ring_without_closure<T: Real>(spec: &RingSpec<T>) -> DeviceMatrix<T> {
    let n = spec.n;
    let mut h = DeviceMatrix::zeros(n, 2 * n);
    for j in 0..n {
        let (a, b) = (SiteIndex::upper(j).row(n), SiteIndex::lower(j).row(n));
        h.bond(a, a, spec.epsilon);
        h.bond(b, b, spec.epsilon);
        h.bond(a, b, -spec.v);
    }
    for j in 0..n - 1 {
        h.bond(j, j + 1, -spec.xi);
        h.bond(n + j, n + j + 1, -spec.xi);
    }
    h
}

/// Appends the atom row: `Ω_A` on its diagonal and `+γ` to its host `a_n`.
pub fn embed_atom<T: Real>(h: &DeviceMatrix<T>, atom: &AtomSpec<T>) -> Result<DeviceMatrix<T>> {
    if h.has_atom() {
        return Err(Error::AtomAlreadyEmbedded);
    }
    let n = h.ring_size;
    if atom.n >= n {
        return Err(Error::AtomIndexOutOfRange {
            n: atom.n,
            ring_size: n,
        });
    }
    let dim = h.dim + 1;
    let mut out = DeviceMatrix::zeros(n, dim);
    out.atom = true;
    for i in 0..h.dim {
        out.entries[i * dim..i * dim + h.dim]
            .copy_from_slice(&h.entries[i * h.dim..(i + 1) * h.dim]);
    }
    let d = SiteIndex::atom().row(n);
    out.bond(d, d, atom.omega_a);
    out.bond(d, SiteIndex::upper(atom.n).row(n), atom.gamma);
    Ok(out)
}

/// Checked two-terminal device: ring, both leads, optional atom, and the
/// assembled Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Device<T> {
    pub ring: RingSpec<T>,
    pub left: LeadSpec<T>,
    pub right: LeadSpec<T>,
    pub atom: Option<AtomSpec<T>>,
    /// Override for the `0⁺` regulator; `None` selects the default rule.
    pub eta: Option<T>,
    hamiltonian: DeviceMatrix<T>,
}

impl<T: Real> Device<T> {
    pub fn new(
        ring: RingSpec<T>,
        left: LeadSpec<T>,
        right: LeadSpec<T>,
        atom: Option<AtomSpec<T>>,
    ) -> Result<Self> {
        validate_attachments(&ring, &left, &right)?;
        let bare = build_ring(&ring)?;
        let hamiltonian = match &atom {
            Some(a) => embed_atom(&bare, a)?,
            None => bare,
        };
        Ok(Self {
            ring,
            left,
            right,
            atom,
            eta: None,
            hamiltonian,
        })
    }

    pub fn with_eta(mut self, eta: Option<T>) -> Self {
        self.eta = eta;
        self
    }

    /// Same device with the atom replaced (or removed).
    pub fn with_atom(&self, atom: Option<AtomSpec<T>>) -> Result<Self> {
        Ok(Self::new(self.ring, self.left, self.right, atom)?.with_eta(self.eta))
    }

    pub fn hamiltonian(&self) -> &DeviceMatrix<T> {
        &self.hamiltonian
    }

    pub fn left_row(&self) -> usize {
        self.left.attach.row(self.ring.n)
    }

    pub fn right_row(&self) -> usize {
        self.right.attach.row(self.ring.n)
    }
}

/// Confirms both leads sit on distinct in-range upper-layer sites.
pub fn validate_attachments<T: Real>(
    ring: &RingSpec<T>,
    left: &LeadSpec<T>,
    right: &LeadSpec<T>,
) -> Result<()> {
    ring.validate()?;
    for (name, lead) in [("left", left), ("right", right)] {
        if lead.attach.layer != Layer::UpperA {
            return Err(Error::AttachmentNotUpper { lead: name });
        }
        if lead.attach.j >= ring.n {
            return Err(Error::AttachmentOutOfRange {
                lead: name,
                j: lead.attach.j,
                ring_size: ring.n,
            });
        }
        lead.validate()?;
    }
    if left.attach == right.attach {
        return Err(Error::DuplicateAttachment { j: left.attach.j });
    }
    Ok(())
}
