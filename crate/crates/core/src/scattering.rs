//! Cavity reflection coefficients and the photon–emitter interfaces.
//!
//! The color-center interface is a controlled polarization flip: only the
//! `H` component enters the single-sided cavity and picks up the
//! spin-dependent reflection coefficient, `V` is routed around it. The
//! superconducting interface is an ideal controlled phase on `|1⟩|e⟩`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{LabeledState, LinearOperator, Subsystem};

/// Polarization basis indices.
pub const H: usize = 0;
pub const V: usize = 1;
/// Spin basis indices (`↑`/`g` and `↓`/`e`).
pub const UP: usize = 0;
pub const DOWN: usize = 1;

/// Spin branch of the emitter that the photon scatters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinBranch {
    Up,
    Down,
}

/// Normalized detunings and cooperativity of one cavity–emitter node.
///
/// `delta_up`/`delta_down` are `2(ω_s − ω)/γ`, `delta_cavity` is `2(ω_c − ω)/κ`
/// and `cooperativity` is `4g²/(κγ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityEmitterParams {
    pub delta_up: f64,
    pub delta_down: f64,
    pub delta_cavity: f64,
    pub cooperativity: f64,
}

impl CavityEmitterParams {
    pub fn new(delta_up: f64, delta_down: f64, delta_cavity: f64, cooperativity: f64) -> Result<Self> {
        let p = Self {
            delta_up,
            delta_down,
            delta_cavity,
            cooperativity,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta_up, self.delta_down, self.delta_cavity, self.cooperativity]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("cavity parameters must be finite".into()));
        }
        if self.cooperativity < 0.0 {
            return Err(Error::InvalidParameter("cooperativity must be non-negative".into()));
        }
        Ok(())
    }

    pub fn reflection(&self, branch: SpinBranch) -> Complex64 {
        reflection(self, branch)
    }

    pub fn reflections(&self) -> ReflectionPair {
        ReflectionPair {
            r_up: reflection(self, SpinBranch::Up),
            r_down: reflection(self, SpinBranch::Down),
        }
    }
}

/// `r(Δs) = 1 − 2(iΔs + 1) / [(iΔs + 1)(iΔc + 1) + C]`.
pub fn reflection(params: &CavityEmitterParams, branch: SpinBranch) -> Complex64 {
    let ds = match branch {
        SpinBranch::Up => params.delta_up,
        SpinBranch::Down => params.delta_down,
    };
    let emitter = Complex64::new(1.0, ds);
    let cavity = Complex64::new(1.0, params.delta_cavity);
    Complex64::new(1.0, 0.0) - emitter * 2.0 / (emitter * cavity + params.cooperativity)
}

/// Reflection coefficients for the two spin states of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionPair {
    pub r_up: Complex64,
    pub r_down: Complex64,
}

impl ReflectionPair {
    /// `r↑ = 1`, `r↓ = −1`.
    pub const IDEAL: Self = Self {
        r_up: Complex64::new(1.0, 0.0),
        r_down: Complex64::new(-1.0, 0.0),
    };

    pub fn new(r_up: Complex64, r_down: Complex64) -> Self {
        Self { r_up, r_down }
    }

    pub fn is_passive(&self) -> bool {
        self.r_up.norm() <= 1.0 + 1e-12 && self.r_down.norm() <= 1.0 + 1e-12
    }
}

fn qubit(name: &str) -> Result<Subsystem> {
    Subsystem::new(name, 2)
}

/// The scattering map as an operator on `(polarization, spin)`.
pub fn cpf_operator(pol: &str, spin: &str, r: ReflectionPair) -> Result<LinearOperator> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let diag = [r.r_up, r.r_down, one, one];
    let mut m: Vec<Complex64> = vec![zero; 16];
    for (i, d) in diag.iter().enumerate() {
        m[i * 4 + i] = *d;
    }
    let targets = vec![qubit(pol)?, qubit(spin)?];
    if (r.r_up.norm() - 1.0).abs() <= 1e-12 && (r.r_down.norm() - 1.0).abs() <= 1e-12 {
        LinearOperator::unitary(targets, m)
    } else {
        LinearOperator::new(targets, m)
    }
}

/// Controlled polarization flip: `|H⟩|s⟩ → r_s|H⟩|s⟩`, `|V⟩` untouched.
pub fn cpf_apply(s: &LabeledState, pol: &str, spin: &str, r: ReflectionPair) -> Result<LabeledState> {
    s.apply(&cpf_operator(pol, spin, r)?)
}

/// Controlled phase `|1⟩|e⟩ → −|1⟩|e⟩` where index 1 of `presence` is the one-photon state.
pub fn cphase_apply(s: &LabeledState, presence: &str, spin: &str) -> Result<LabeledState> {
    cphase_apply_routed(s, presence, &[1], spin)
}

/// Controlled phase on the spin for every basis state of `register` listed in
/// `interacting`, i.e. the components routed into the resonator.
pub fn cphase_apply_routed(
    s: &LabeledState,
    register: &str,
    interacting: &[usize],
    spin: &str,
) -> Result<LabeledState> {
    let dim = s.dim_of(register)?;
    if let Some(&bad) = interacting.iter().find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange {
            label: register.into(),
            index: bad,
            dim,
        });
    }
    let d = dim * 2;
    let mut m = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..dim {
        for sp in 0..2 {
            let i = k * 2 + sp;
            let sign = if sp == DOWN && interacting.contains(&k) { -1.0 } else { 1.0 };
            m[i * d + i] = Complex64::new(sign, 0.0);
        }
    }
    let op = LinearOperator::unitary(vec![Subsystem::new(register, dim)?, qubit(spin)?], m)?;
    s.apply(&op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::overlap2;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn params(ds: f64, dc: f64, c: f64) -> CavityEmitterParams {
        CavityEmitterParams::new(ds, ds, dc, c).unwrap()
    }

    #[test]
    fn bare_mirror_limit() {
        let r = reflection(&params(0.0, 0.0, 0.0), SpinBranch::Up);
        assert_abs_diff_eq!(r.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn strong_coupling_limit() {
        let r = reflection(&params(0.0, 0.0, 100.0), SpinBranch::Up);
        assert!((r - 1.0).norm() < 0.02);
    }

    #[test]
    fn detuned_branch_regression() {
        // 50-digit mpmath evaluation, see tests/oracle/frozen_values.py
        let p = CavityEmitterParams::new(0.0, 100.0, 1.5, 150.0).unwrap();
        let r = p.reflection(SpinBranch::Down);
        assert_abs_diff_eq!(r.re, -0.970_446_218_426_224_7, epsilon = 1e-14);
        assert_abs_diff_eq!(r.im, 0.000_291_170_261_810_593_74, epsilon = 1e-16);
        let r = p.reflection(SpinBranch::Up);
        assert_abs_diff_eq!(r.re, 0.986_756_273_776_764_3, epsilon = 1e-14);
        assert_abs_diff_eq!(r.im, 0.000_131_560_194_270_553_54, epsilon = 1e-16);
    }

    #[test]
    fn rejects_negative_cooperativity() {
        assert!(CavityEmitterParams::new(0.0, 0.0, 0.0, -1.0).is_err());
        assert!(CavityEmitterParams::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
    }

    fn pol_spin(pol: [f64; 2], spin: usize) -> LabeledState {
        LabeledState::register("p", &pol)
            .unwrap()
            .tensor(&LabeledState::basis("s", 2, spin).unwrap())
            .unwrap()
    }

    const D: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    const A: [f64; 2] = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2];

    #[test]
    fn ideal_cpf_flips_d_to_a_for_spin_down() {
        let out = cpf_apply(&pol_spin(D, DOWN), "p", "s", ReflectionPair::IDEAL).unwrap();
        let want = pol_spin(A, DOWN);
        for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ideal_cpf_leaves_spin_up_alone() {
        let inp = pol_spin(D, UP);
        let out = cpf_apply(&inp, "p", "s", ReflectionPair::IDEAL).unwrap();
        assert_eq!(out, inp);
    }

    #[test]
    fn unit_coefficients_are_identity() {
        let one = Complex64::new(1.0, 0.0);
        let inp = pol_spin([0.6, 0.8], DOWN);
        let out = cpf_apply(&inp, "p", "s", ReflectionPair::new(one, one)).unwrap();
        assert_eq!(out, inp);
    }

    #[test]
    fn lossy_cpf_does_not_increase_norm() {
        let r = CavityEmitterParams::new(0.0, 100.0, 0.5, 50.0).unwrap().reflections();
        assert!(r.is_passive());
        let inp = pol_spin(D, UP);
        let out = cpf_apply(&inp, "p", "s", r).unwrap();
        assert!(out.norm_sqr() <= inp.norm_sqr());
        assert!(!cpf_operator("p", "s", r).unwrap().is_unitary());
    }

    #[test]
    fn cphase_map() {
        let one_e = LabeledState::basis("n", 2, 1)
            .unwrap()
            .tensor(&LabeledState::basis("q", 2, DOWN).unwrap())
            .unwrap();
        let out = cphase_apply(&one_e, "n", "q").unwrap();
        assert_eq!(out, one_e.scaled(Complex64::new(-1.0, 0.0)));

        let one_g = LabeledState::basis("n", 2, 1)
            .unwrap()
            .tensor(&LabeledState::basis("q", 2, UP).unwrap())
            .unwrap();
        assert_eq!(cphase_apply(&one_g, "n", "q").unwrap(), one_g);
    }

    #[test]
    fn cphase_is_an_involution() {
        let s = LabeledState::register("n", &[0.6, 0.8])
            .unwrap()
            .tensor(&LabeledState::register("q", &[0.28, 0.96]).unwrap())
            .unwrap();
        let twice = cphase_apply(&cphase_apply(&s, "n", "q").unwrap(), "n", "q").unwrap();
        assert_abs_diff_eq!(overlap2(&twice, &s).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(twice, s);
    }

    #[test]
    fn routed_cphase_checks_indices() {
        let s = LabeledState::basis("bin", 4, 0)
            .unwrap()
            .tensor(&LabeledState::basis("q", 2, DOWN).unwrap())
            .unwrap();
        assert!(cphase_apply_routed(&s, "bin", &[4], "q").is_err());
        let out = cphase_apply_routed(&s, "bin", &[0, 1], "q").unwrap();
        assert_eq!(out, s.scaled(Complex64::new(-1.0, 0.0)));
        let out = cphase_apply_routed(&s, "bin", &[2, 3], "q").unwrap();
        assert_eq!(out, s);
    }
}
