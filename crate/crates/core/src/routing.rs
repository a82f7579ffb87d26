//! Linear-optical elements on polarization and time-bin registers.
//!
//! Wave plates are taken as their basis maps (`H`, `V` indices from
//! [`crate::scattering`]). The exchange gates are applied as their net
//! permutations; the switch/delay-line bookkeeping that realizes them in the
//! lab reduces to these once a common delay is removed.

use alloc::vec;

use core::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{LabeledState, LinearOperator, Subsystem};

/// Optical time-bin register, bins `𝒯(0)` and `𝒯(1)`.
pub const OPTICAL_BINS: usize = 2;
/// Microwave time-bin register, bins `𝒯(0)`..`𝒯(3)`.
pub const MICROWAVE_BINS: usize = 4;

/// `|H⟩ → |D⟩`, `|V⟩ → −|A⟩`, i.e. `H → (H+V)/√2`, `V → (H−V)/√2`.
pub fn hadamard_operator(pol: &str) -> Result<LinearOperator> {
    let h = FRAC_1_SQRT_2;
    real_unitary(vec![Subsystem::new(pol, 2)?], &[h, h, h, -h])
}

/// `|H⟩ → −|A⟩`, `|V⟩ → |D⟩`, i.e. `H → (H−V)/√2`, `V → (H+V)/√2`.
pub fn hadamard_like_operator(pol: &str) -> Result<LinearOperator> {
    let h = FRAC_1_SQRT_2;
    real_unitary(vec![Subsystem::new(pol, 2)?], &[h, h, -h, h])
}

/// `X̂_p = |D⟩⟨A| + |A⟩⟨D|`, which is `−Z` in the `{H, V}` basis.
pub fn polarization_flip_operator(pol: &str) -> Result<LinearOperator> {
    real_unitary(vec![Subsystem::new(pol, 2)?], &[-1.0, 0.0, 0.0, 1.0])
}

fn real_unitary(targets: alloc::vec::Vec<Subsystem>, rows: &[f64]) -> Result<LinearOperator> {
    LinearOperator::unitary(targets, rows.iter().map(|&x| Complex64::new(x, 0.0)).collect())
}

pub fn hwp_hadamard(s: &LabeledState, pol: &str) -> Result<LabeledState> {
    s.apply(&hadamard_operator(pol)?)
}

pub fn hwp_hadamard_like(s: &LabeledState, pol: &str) -> Result<LabeledState> {
    s.apply(&hadamard_like_operator(pol)?)
}

pub fn polarization_flip(s: &LabeledState, pol: &str) -> Result<LabeledState> {
    s.apply(&polarization_flip_operator(pol)?)
}

fn check_bins(s: &LabeledState, label: &str, allowed: &[usize]) -> Result<usize> {
    let dim = s.dim_of(label)?;
    if !allowed.contains(&dim) {
        return Err(Error::DimensionMismatch {
            label: label.into(),
            expected: allowed[0],
            found: dim,
        });
    }
    Ok(dim)
}

/// Delay by `k` bins: `𝒯(i) → 𝒯(i+k)`.
///
/// Fails if any populated bin would be pushed outside the register.
pub fn time_shift(s: &LabeledState, bins: &str, k: isize) -> Result<LabeledState> {
    let dim = check_bins(s, bins, &[OPTICAL_BINS, MICROWAVE_BINS])?;
    let overflow = || Error::TimeBinOverflow {
        label: bins.into(),
        shift: k,
        dim,
    };
    let mut perm = vec![usize::MAX; dim];
    let mut free: alloc::vec::Vec<usize> = alloc::vec::Vec::new();
    for (i, slot) in perm.iter_mut().enumerate() {
        let j = i as isize + k;
        if (0..dim as isize).contains(&j) {
            *slot = j as usize;
        } else {
            let (_, dropped) = s.project(bins, i, crate::hilbert::Probability::Absolute)?;
            if dropped.norm_sqr() > 0.0 {
                return Err(overflow());
            }
            free.push(i);
        }
    }
    // Unpopulated bins that would leave the register wrap into the vacated slots so
    // the operator stays a permutation.
    let vacant: alloc::vec::Vec<usize> = (0..dim).filter(|j| !perm.contains(j)).collect();
    let mut vacant = vacant.into_iter();
    for i in free {
        perm[i] = vacant.next().ok_or_else(overflow)?;
    }
    s.apply(&LinearOperator::permutation(vec![Subsystem::new(bins, dim)?], &perm)?)
}

/// Exchange `𝒯(0)|V⟩ ↔ 𝒯(1)|H⟩` on an optical photon; `𝒯(0)|H⟩`, `𝒯(1)|V⟩` fixed.
pub fn us_operator(pol: &str, bins: &str) -> Result<LinearOperator> {
    // joint index bin * 2 + pol
    LinearOperator::permutation(
        vec![Subsystem::new(bins, OPTICAL_BINS)?, Subsystem::new(pol, 2)?],
        &[0, 2, 1, 3],
    )
}

pub fn us_gate(s: &LabeledState, pol: &str, bins: &str) -> Result<LabeledState> {
    check_bins(s, bins, &[OPTICAL_BINS])?;
    s.apply(&us_operator(pol, bins)?)
}

/// Exchange `𝒯(1) ↔ 𝒯(2)` on a four-bin microwave register.
pub fn um_operator(bins: &str) -> Result<LinearOperator> {
    LinearOperator::permutation(vec![Subsystem::new(bins, MICROWAVE_BINS)?], &[0, 2, 1, 3])
}

pub fn um_gate(s: &LabeledState, bins: &str) -> Result<LabeledState> {
    check_bins(s, bins, &[MICROWAVE_BINS])?;
    s.apply(&um_operator(bins)?)
}

/// Hadamard on the bin pairs `(0, 2)` and `(1, 3)`:
/// `𝒯(i) → [𝒯(i) + 𝒯(i+2)]/√2`, `𝒯(i+2) → [𝒯(i) − 𝒯(i+2)]/√2`.
pub fn mw_hadamard_operator(bins: &str) -> Result<LinearOperator> {
    let h = FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let rows = [
        h, 0.0,  h, 0.0,
        0.0, h, 0.0,  h,
        h, 0.0, -h, 0.0,
        0.0, h, 0.0, -h,
    ];
    real_unitary(vec![Subsystem::new(bins, MICROWAVE_BINS)?], &rows)
}

pub fn mw_timebin_hadamard(s: &LabeledState, bins: &str) -> Result<LabeledState> {
    check_bins(s, bins, &[MICROWAVE_BINS])?;
    s.apply(&mw_hadamard_operator(bins)?)
}
