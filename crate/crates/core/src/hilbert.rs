//! Dense state vectors over named tensor-product registers.
//!
//! A [`LabeledState`] is an ordered list of [`Subsystem`]s together with a
//! row-major amplitude vector (the first subsystem is the most significant
//! index). States are not required to be normalized: lossy scattering shrinks
//! the norm and the squared norm of a heralded branch is its success
//! probability.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

/// Tolerance used when checking that an operator flagged unitary really is.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A named register of the joint Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subsystem {
    name: String,
    dim: usize,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, dim: usize) -> Result<Self> {
        let name = name.into();
        if dim == 0 {
            return Err(Error::ZeroDimension(name));
        }
        Ok(Self { name, dim })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn check_unique(labels: &[Subsystem]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].iter().any(|b| b.name == a.name) {
            return Err(Error::DuplicateLabel(a.name.clone()));
        }
    }
    Ok(())
}

fn strides(labels: &[Subsystem]) -> Vec<usize> {
    let mut out = vec![1; labels.len()];
    for i in (0..labels.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * labels[i + 1].dim;
    }
    out
}

/// How [`LabeledState::project`] reports the outcome probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probability {
    /// Squared norm of the projected component divided by the input's squared norm.
    Relative,
    /// Raw squared norm of the projected component.
    Absolute,
}

/// Possibly unnormalized pure state over labeled registers.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledState {
    labels: Vec<Subsystem>,
    amps: Vec<Complex64>,
}

impl LabeledState {
    pub fn new(labels: Vec<Subsystem>, amps: Vec<Complex64>) -> Result<Self> {
        check_unique(&labels)?;
        let expected: usize = labels.iter().map(|l| l.dim).product();
        if amps.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: amps.len(),
            });
        }
        Ok(Self { labels, amps })
    }

    /// State with no registers, i.e. a single complex amplitude.
    pub fn scalar(amplitude: Complex64) -> Self {
        Self {
            labels: Vec::new(),
            amps: vec![amplitude],
        }
    }

    /// One register with explicit real amplitudes.
    pub fn register(name: &str, amps: &[f64]) -> Result<Self> {
        Self::new(
            vec![Subsystem::new(name, amps.len())?],
            amps.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        )
    }

    /// Computational basis state `|i⟩` of a single register.
    pub fn basis(name: &str, dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                label: name.to_owned(),
                index,
                dim,
            });
        }
        let mut amps = vec![Complex64::zero(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(vec![Subsystem::new(name, dim)?], amps)
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::MissingLabel(name.to_owned()))
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.labels[self.position(name)?].dim)
    }

    /// Amplitude at the given basis indices, one per register in label order.
    pub fn amplitude(&self, indices: &[usize]) -> Result<Complex64> {
        if indices.len() != self.labels.len() {
            return Err(Error::LengthMismatch {
                expected: self.labels.len(),
                found: indices.len(),
            });
        }
        let st = strides(&self.labels);
        let mut flat = 0;
        for ((&i, l), s) in indices.iter().zip(&self.labels).zip(st) {
            if i >= l.dim {
                return Err(Error::IndexOutOfRange {
                    label: l.name.clone(),
                    index: i,
                    dim: l.dim,
                });
            }
            flat += i * s;
        }
        Ok(self.amps[flat])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        Float::sqrt(self.norm_sqr())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Sum of two states over the same registers (in possibly different order).
    pub fn add(&self, other: &Self) -> Result<Self> {
        let other = other.reordered_like(self)?;
        Ok(Self {
            labels: self.labels.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    /// Kronecker product; the registers of `other` follow those of `self`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self { labels, amps })
    }

    /// Permute registers into the given order.
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelSetMismatch);
        }
        let positions = order
            .iter()
            .map(|n| self.position(n))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<Subsystem> = positions.iter().map(|&p| self.labels[p].clone()).collect();
        check_unique(&labels)?;
        let old_strides = strides(&self.labels);
        let mut amps = vec![Complex64::zero(); self.amps.len()];
        let mut idx = vec![0usize; labels.len()];
        for amp in amps.iter_mut() {
            let src: usize = idx
                .iter()
                .zip(&positions)
                .map(|(&i, &p)| i * old_strides[p])
                .sum();
            *amp = self.amps[src];
            increment(&mut idx, &labels);
        }
        Ok(Self { labels, amps })
    }

    fn reordered_like(&self, reference: &Self) -> Result<Self> {
        if self.labels.len() != reference.labels.len() {
            return Err(Error::LabelSetMismatch);
        }
        for l in &reference.labels {
            let p = self.position(&l.name).map_err(|_| Error::LabelSetMismatch)?;
            if self.labels[p].dim != l.dim {
                return Err(Error::LabelSetMismatch);
            }
        }
        let order: Vec<&str> = reference.labels.iter().map(|l| l.name()).collect();
        self.permuted(&order)
    }

    /// `⟨self|other⟩` without normalization, after aligning register order.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        let other = other.reordered_like(self)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply `op` to its target registers, identity elsewhere.
    pub fn apply(&self, op: &LinearOperator) -> Result<Self> {
        let st = strides(&self.labels);
        let mut positions = Vec::with_capacity(op.targets.len());
        for t in &op.targets {
            let p = self.position(&t.name)?;
            if self.labels[p].dim != t.dim {
                return Err(Error::DimensionMismatch {
                    label: t.name.clone(),
                    expected: t.dim,
                    found: self.labels[p].dim,
                });
            }
            positions.push(p);
        }
        let d = op.dim;
        // offsets of every joint target index relative to a base with target coordinates zero
        let mut offsets = vec![0usize; d];
        let mut sub = vec![0usize; op.targets.len()];
        for off in offsets.iter_mut() {
            *off = sub.iter().zip(&positions).map(|(&i, &p)| i * st[p]).sum();
            increment(&mut sub, &op.targets);
        }
        let mut out = vec![Complex64::zero(); self.amps.len()];
        let mut gathered = vec![Complex64::zero(); d];
        for base in 0..self.amps.len() {
            if positions
                .iter()
                .any(|&p| !(base / st[p]).is_multiple_of(self.labels[p].dim))
            {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &op.matrix[r * d..(r + 1) * d];
                out[base + off] = row.iter().zip(&gathered).map(|(m, g)| m * g).sum();
            }
        }
        Ok(Self {
            labels: self.labels.clone(),
            amps: out,
        })
    }

    /// Project register `label` onto basis state `index` and remove it.
    ///
    /// The returned state is the unnormalized projected component.
    pub fn project(&self, label: &str, index: usize, mode: Probability) -> Result<(f64, Self)> {
        let p = self.position(label)?;
        let dim = self.labels[p].dim;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                label: label.to_owned(),
                index,
                dim,
            });
        }
        let total = self.norm_sqr();
        if total == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let st = strides(&self.labels);
        let inner = st[p];
        let outer = inner * dim;
        let mut amps = Vec::with_capacity(self.amps.len() / dim);
        for hi in (0..self.amps.len()).step_by(outer) {
            let start = hi + index * inner;
            amps.extend_from_slice(&self.amps[start..start + inner]);
        }
        let mut labels = self.labels.clone();
        labels.remove(p);
        let post = Self { labels, amps };
        let weight = post.norm_sqr();
        let prob = match mode {
            Probability::Relative => weight / total,
            Probability::Absolute => weight,
        };
        Ok((prob, post))
    }

    /// Contract `factor` (defined on a subset of the registers) against this state,
    /// returning `⟨factor|self⟩` as a state on the remaining registers.
    pub fn partial_inner(&self, factor: &Self) -> Result<Self> {
        let mut order: Vec<&str> = factor.labels.iter().map(|l| l.name()).collect();
        for l in &factor.labels {
            if self.dim_of(&l.name)? != l.dim {
                return Err(Error::DimensionMismatch {
                    label: l.name.clone(),
                    expected: l.dim,
                    found: self.dim_of(&l.name)?,
                });
            }
        }
        let rest: Vec<Subsystem> = self
            .labels
            .iter()
            .filter(|l| factor.position(&l.name).is_err())
            .cloned()
            .collect();
        order.extend(rest.iter().map(|l| l.name()));
        let aligned = self.permuted(&order)?;
        let block: usize = rest.iter().map(|l| l.dim).product();
        let mut amps = vec![Complex64::zero(); block];
        for (f, chunk) in factor.amps.iter().zip(aligned.amps.chunks(block)) {
            for (a, c) in amps.iter_mut().zip(chunk) {
                *a += f.conj() * c;
            }
        }
        Ok(Self { labels: rest, amps })
    }

    /// Reduced density matrix (row-major, unnormalized) on the registers in `keep`.
    pub fn reduced_density(&self, keep: &[&str]) -> Result<Vec<Complex64>> {
        let mut order: Vec<&str> = keep.to_vec();
        for l in &self.labels {
            if !keep.contains(&l.name()) {
                order.push(l.name());
            }
        }
        let aligned = self.permuted(&order)?;
        let mut d = 1;
        for k in keep {
            d *= self.dim_of(k)?;
        }
        let env = self.amps.len() / d;
        let mut rho = vec![Complex64::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let a = &aligned.amps[i * env..(i + 1) * env];
                let b = &aligned.amps[j * env..(j + 1) * env];
                rho[i * d + j] = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
            }
        }
        Ok(rho)
    }
}

fn increment(idx: &mut [usize], labels: &[Subsystem]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < labels[k].dim {
            return;
        }
        idx[k] = 0;
    }
}

/// Squared overlap `|⟨a|b⟩|²` of the normalized inputs.
///
/// Register order may differ between the two states; both must be defined on
/// the same set of registers with matching dimensions.
pub fn overlap2(a: &LabeledState, b: &LabeledState) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(a.inner(b)?.norm_sqr() / (na * nb))
}

/// Square matrix acting on a subset of registers.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    targets: Vec<Subsystem>,
    dim: usize,
    matrix: Vec<Complex64>,
    unitary: bool,
}

impl LinearOperator {
    /// `matrix` is row-major over the joint index of `targets` (first target most significant).
    pub fn new(targets: Vec<Subsystem>, matrix: Vec<Complex64>) -> Result<Self> {
        check_unique(&targets)?;
        let dim: usize = targets.iter().map(|t| t.dim).product();
        if matrix.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: matrix.len(),
            });
        }
        Ok(Self {
            targets,
            dim,
            matrix,
            unitary: false,
        })
    }

    /// Like [`LinearOperator::new`] but verifies `M†M = I` and sets the unitary flag.
    pub fn unitary(targets: Vec<Subsystem>, matrix: Vec<Complex64>) -> Result<Self> {
        let mut op = Self::new(targets, matrix)?;
        let dev = op.unitarity_defect();
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        op.unitary = true;
        Ok(op)
    }

    /// Real matrix on a single register.
    pub fn real(target: &str, dim: usize, rows: &[f64]) -> Result<Self> {
        Self::new(
            vec![Subsystem::new(target, dim)?],
            rows.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn identity(targets: Vec<Subsystem>) -> Result<Self> {
        let dim: usize = targets.iter().map(|t| t.dim).product();
        let mut m = vec![Complex64::zero(); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::unitary(targets, m)
    }

    /// Permutation operator sending basis state `i` to `perm[i]`.
    pub fn permutation(targets: Vec<Subsystem>, perm: &[usize]) -> Result<Self> {
        let dim: usize = targets.iter().map(|t| t.dim).product();
        if perm.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: perm.len(),
            });
        }
        let mut m = vec![Complex64::zero(); dim * dim];
        for (i, &j) in perm.iter().enumerate() {
            if j >= dim {
                return Err(Error::InvalidParameter("permutation image out of range".into()));
            }
            m[j * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::unitary(targets, m)
    }

    pub fn targets(&self) -> &[Subsystem] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// Largest entry of `|M†M − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex64::zero();
                for k in 0..d {
                    acc += self.matrix[k * d + i].conj() * self.matrix[k * d + j];
                }
                if i == j {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let unitary = self.unitary && (factor.norm() - 1.0).abs() <= UNITARY_TOLERANCE;
        Self {
            targets: self.targets.clone(),
            dim: self.dim,
            matrix: self.matrix.iter().map(|m| m * factor).collect(),
            unitary,
        }
    }

    /// Kronecker product acting on the union of disjoint targets.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let mut targets = self.targets.clone();
        targets.extend(other.targets.iter().cloned());
        check_unique(&targets)?;
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut m = vec![Complex64::zero(); d * d];
        for ra in 0..da {
            for ca in 0..da {
                let x = self.matrix[ra * da + ca];
                for rb in 0..db {
                    for cb in 0..db {
                        m[(ra * db + rb) * d + ca * db + cb] = x * other.matrix[rb * db + cb];
                    }
                }
            }
        }
        Ok(Self {
            targets,
            dim: d,
            matrix: m,
            unitary: self.unitary && other.unitary,
        })
    }

    /// Matrix product `self · other` on identical targets.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.targets != other.targets {
            return Err(Error::LabelSetMismatch);
        }
        let d = self.dim;
        let mut m = vec![Complex64::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = (0..d)
                    .map(|k| self.matrix[i * d + k] * other.matrix[k * d + j])
                    .sum();
            }
        }
        Ok(Self {
            targets: self.targets.clone(),
            dim: d,
            matrix: m,
            unitary: self.unitary && other.unitary,
        })
    }
}
