//! Heralded distributed CNOT pipelines.
//!
//! Every pipeline builds the full joint state of photons and stationary
//! qubits, pushes it through the optical layout element by element, and then
//! projects the photonic registers onto every detector outcome. The squared
//! norm of each projected branch is its herald probability; since the input is
//! normalized and scattering is passive, the branch probabilities sum to at
//! most one and fall short of it exactly by the scattering loss.
//!
//! Spatial paths and optical switches are control flow here, not registers.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{overlap2, LabeledState, LinearOperator, Probability, Subsystem};
use crate::routing::{
    hwp_hadamard, hwp_hadamard_like, mw_timebin_hadamard, um_gate, us_gate, MICROWAVE_BINS,
    OPTICAL_BINS,
};
use crate::scattering::{cphase_apply_routed, cpf_apply, CavityEmitterParams, ReflectionPair};

pub const S1: &str = "s1";
pub const S2: &str = "s2";
pub const S3: &str = "s3";
pub const S4: &str = "s4";
pub const POL_A: &str = "pol_a";
pub const POL_B: &str = "pol_b";
pub const BIN_A: &str = "bin_a";
pub const BIN_B: &str = "bin_b";

/// Branches below this probability carry no meaningful fidelity.
pub const UNDEFINED_BELOW: f64 = 1e-14;

/// Microwave time bins routed into the resonator (upper path).
const RESONATOR_BINS: [usize; 2] = [0, 1];

/// Real initial amplitudes `α|↑⟩ + β|↓⟩` (or `α|g⟩ + β|e⟩`) of a stationary qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitInit {
    alpha: f64,
    beta: f64,
}

impl QubitInit {
    /// `alpha ∈ [0, 1]`, `beta = +√(1 − alpha²)`.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]".into()));
        }
        Ok(Self {
            alpha,
            beta: Float::sqrt((1.0 - alpha * alpha).max(0.0)),
        })
    }

    /// Explicit real pair with `alpha² + beta² = 1` to 1e-12.
    pub fn from_amplitudes(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || (alpha * alpha + beta * beta - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("qubit amplitudes must be normalized".into()));
        }
        Ok(Self { alpha, beta })
    }

    /// `|↑⟩` for `false`, `|↓⟩` for `true`.
    pub fn computational(bit: bool) -> Self {
        if bit {
            Self { alpha: 0.0, beta: 1.0 }
        } else {
            Self { alpha: 1.0, beta: 0.0 }
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn state(&self, label: &str) -> Result<LabeledState> {
        LabeledState::register(label, &[self.alpha, self.beta])
    }
}

/// Cavity parameters of the two nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeConfig {
    pub params_a: CavityEmitterParams,
    pub params_b: CavityEmitterParams,
    /// Forces `r = (1, −1)` at both nodes.
    pub ideal: bool,
}

impl NodeConfig {
    pub fn new(params_a: CavityEmitterParams, params_b: CavityEmitterParams) -> Result<Self> {
        params_a.validate()?;
        params_b.validate()?;
        Ok(Self {
            params_a,
            params_b,
            ideal: false,
        })
    }

    /// Δ↑ = 0, Δ↓ = 100 at both nodes, Δc = (1.5, 0.5), C = (150, 50).
    pub fn benchmark() -> Self {
        Self {
            params_a: CavityEmitterParams {
                delta_up: 0.0,
                delta_down: 100.0,
                delta_cavity: 1.5,
                cooperativity: 150.0,
            },
            params_b: CavityEmitterParams {
                delta_up: 0.0,
                delta_down: 100.0,
                delta_cavity: 0.5,
                cooperativity: 50.0,
            },
            ideal: false,
        }
    }

    pub fn ideal() -> Self {
        Self {
            ideal: true,
            ..Self::benchmark()
        }
    }

    pub fn with_cooperativities(mut self, c_a: f64, c_b: f64) -> Self {
        self.params_a.cooperativity = c_a;
        self.params_b.cooperativity = c_b;
        self
    }

    pub fn reflections_a(&self) -> ReflectionPair {
        if self.ideal {
            ReflectionPair::IDEAL
        } else {
            self.params_a.reflections()
        }
    }

    pub fn reflections_b(&self) -> ReflectionPair {
        if self.ideal {
            ReflectionPair::IDEAL
        } else {
            self.params_b.reflections()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn from_index(i: usize) -> Self {
        if i == 0 {
            Self::H
        } else {
            Self::V
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::H => 0,
            Self::V => 1,
        }
    }
}

/// What one detector reported for one photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonOutcome {
    pub polarization: Option<Polarization>,
    pub time_bin: Option<usize>,
}

/// Herald branch label `1..=4`, `[m]₁₀ = [ij]₂ + 1` for outcome bits `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch(u8);

impl Branch {
    pub const ALL: [Branch; 4] = [Branch(1), Branch(2), Branch(3), Branch(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(Self(index))
        } else {
            Err(Error::InvalidBranch(index))
        }
    }

    pub fn from_bits(i: usize, j: usize) -> Self {
        Self(1 + 2 * (i as u8 & 1) + (j as u8 & 1))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based position, convenient for array indexing.
    pub fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

/// The detector record and the local correction it calls for.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldRecord {
    pub photon_a: PhotonOutcome,
    pub photon_b: PhotonOutcome,
    /// Branch of the first (or only) qubit pair.
    pub branch_m: Branch,
    /// Branch of the second pair in the parallel gates.
    pub branch_n: Option<Branch>,
    pub correction: LinearOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolOutcome {
    pub herald: HeraldRecord,
    /// Unnormalized stationary-qubit state left by this detector outcome.
    pub branch_state: LabeledState,
    /// Squared norm of `branch_state`.
    pub branch_probability: f64,
    pub corrected_state: LabeledState,
    /// `|⟨ideal|corrected⟩|²`, `None` when the branch probability is below [`UNDEFINED_BELOW`].
    pub fidelity: Option<f64>,
}

/// Polarization-entangled pair emitted by the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    /// `(|HH⟩ + |VV⟩)/√2`
    PhiPlus,
    /// `(|HH⟩ − |VV⟩)/√2`
    PhiMinus,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn qubit(name: &str) -> Result<Subsystem> {
    Subsystem::new(name, 2)
}

fn polarization_pair(source: PairSource) -> Result<LabeledState> {
    let sign = match source {
        PairSource::PhiPlus => 1.0,
        PairSource::PhiMinus => -1.0,
    };
    LabeledState::new(
        vec![qubit(POL_A)?, qubit(POL_B)?],
        vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(sign * FRAC_1_SQRT_2)],
    )
}

fn spin_hadamard_operator(spin: &str) -> Result<LinearOperator> {
    let h = FRAC_1_SQRT_2;
    LinearOperator::unitary(vec![qubit(spin)?], vec![c(h), c(h), c(h), c(-h)])
}

/// `|↑⟩ → (|↑⟩ + |↓⟩)/√2`, `|↓⟩ → (|↑⟩ − |↓⟩)/√2`.
pub fn spin_hadamard(s: &LabeledState, spin: &str) -> Result<LabeledState> {
    s.apply(&spin_hadamard_operator(spin)?)
}

/// Plain CNOT on `(control, target)`: flips the target when the control is `|↑⟩`/`|g⟩`.
pub fn ideal_cnot(control: &str, target: &str) -> Result<LinearOperator> {
    LinearOperator::permutation(vec![qubit(control)?, qubit(target)?], &[1, 0, 2, 3])
}

/// Local operator that maps the branch-`m` gate `Û_{c_m}` onto `Û_{c_1}`.
///
/// `Û_{c_2} = Ẑ_c Û_{c_1}`, `Û_{c_3} = X̂_t Û_{c_1}`, `Û_{c_4} = −Ẑ_c X̂_t Û_{c_1}`.
pub fn herald_correction(branch: Branch, control: &str, target: &str) -> Result<LinearOperator> {
    let i = [1.0, 0.0, 0.0, 1.0];
    let z = [1.0, 0.0, 0.0, -1.0];
    let x = [0.0, 1.0, 1.0, 0.0];
    let (zc, xt, sign) = match branch.index() {
        1 => (i, i, 1.0),
        2 => (z, i, 1.0),
        3 => (i, x, 1.0),
        4 => (z, x, -1.0),
        other => return Err(Error::InvalidBranch(other)),
    };
    let to = |m: [f64; 4]| m.iter().map(|&v| c(v)).collect::<Vec<_>>();
    let ctrl = LinearOperator::unitary(vec![qubit(control)?], to(zc))?;
    let tgt = LinearOperator::unitary(vec![qubit(target)?], to(xt))?;
    Ok(ctrl.kron(&tgt)?.scaled(c(sign)))
}

/// `Û_{c_m}` itself, for building ideal branch outputs.
pub fn branch_gate(branch: Branch, control: &str, target: &str) -> Result<LinearOperator> {
    // every correction is self-inverse up to the sign carried by branch 4
    let corr = herald_correction(branch, control, target)?;
    corr.compose(&ideal_cnot(control, target)?)
}

fn qubits_state(qubits: &[(QubitInit, &str)]) -> Result<LabeledState> {
    let mut s = LabeledState::scalar(c(1.0));
    for (q, name) in qubits {
        s = s.tensor(&q.state(name)?)?;
    }
    Ok(s)
}

/// One color-center CNOT stage on `(control, target)` using photons A and B.
///
/// Photon B passes the Hadamard-like plate, both photons scatter off their
/// cavities (with spin Hadamards around the target's scattering) and then
/// pass a Hadamard plate ahead of the detectors.
fn color_center_stage(
    s: &LabeledState,
    control: &str,
    target: &str,
    r_a: ReflectionPair,
    r_b: ReflectionPair,
) -> Result<LabeledState> {
    let s = hwp_hadamard_like(s, POL_B)?;
    let s = cpf_apply(&s, POL_A, control, r_a)?;
    let s = spin_hadamard(&s, target)?;
    let s = cpf_apply(&s, POL_B, target, r_b)?;
    let s = spin_hadamard(&s, target)?;
    let s = hwp_hadamard(&s, POL_A)?;
    hwp_hadamard(&s, POL_B)
}

/// Superconducting-control stage: routed CPHASE on the control, CPF on the target,
/// then the microwave time-bin Hadamard and the optical Hadamard.
fn superconducting_stage(
    s: &LabeledState,
    control: &str,
    target: &str,
    r_b: ReflectionPair,
) -> Result<LabeledState> {
    let s = cphase_apply_routed(s, BIN_A, &RESONATOR_BINS, control)?;
    let s = hwp_hadamard_like(&s, POL_B)?;
    let s = spin_hadamard(&s, target)?;
    let s = cpf_apply(&s, POL_B, target, r_b)?;
    let s = spin_hadamard(&s, target)?;
    let s = mw_timebin_hadamard(&s, BIN_A)?;
    hwp_hadamard(&s, POL_B)
}

fn measure(s: &LabeledState, outcomes: &[(&str, usize)]) -> Result<LabeledState> {
    let mut post = s.clone();
    for (label, idx) in outcomes {
        post = post.project(label, *idx, Probability::Absolute)?.1;
    }
    Ok(post)
}

fn outcome(herald: HeraldRecord, branch_state: LabeledState, ideal: &LabeledState) -> Result<ProtocolOutcome> {
    let branch_probability = branch_state.norm_sqr();
    let corrected_state = branch_state.apply(&herald.correction)?;
    let fidelity = if branch_probability < UNDEFINED_BELOW {
        None
    } else {
        Some(overlap2(&corrected_state, ideal)?)
    };
    Ok(ProtocolOutcome {
        herald,
        branch_state,
        branch_probability,
        corrected_state,
        fidelity,
    })
}

/// Joint state of the single gate right before the detectors.
pub fn single_cnot_state(
    q1: QubitInit,
    q2: QubitInit,
    cfg: &NodeConfig,
    source: PairSource,
) -> Result<LabeledState> {
    let s = polarization_pair(source)?.tensor(&qubits_state(&[(q1, S1), (q2, S2)])?)?;
    color_center_stage(&s, S1, S2, cfg.reflections_a(), cfg.reflections_b())
}

/// Distributed CNOT with `s1` (node A) as control and `s2` (node B) as target.
pub fn run_single_cnot(q1: QubitInit, q2: QubitInit, cfg: &NodeConfig) -> Result<Vec<ProtocolOutcome>> {
    run_single_cnot_with_source(q1, q2, cfg, PairSource::PhiPlus)
}

/// As [`run_single_cnot`] with an explicit photon-pair state.
///
/// Corrections always follow the `|φ⁺⟩` herald table, so a `|φ⁻⟩` pair lands
/// on the partner branch.
pub fn run_single_cnot_with_source(
    q1: QubitInit,
    q2: QubitInit,
    cfg: &NodeConfig,
    source: PairSource,
) -> Result<Vec<ProtocolOutcome>> {
    let s = single_cnot_state(q1, q2, cfg, source)?;
    let ideal = qubits_state(&[(q1, S1), (q2, S2)])?.apply(&ideal_cnot(S1, S2)?)?;
    let mut out = Vec::with_capacity(4);
    for pa in 0..2 {
        for pb in 0..2 {
            let branch_state = measure(&s, &[(POL_A, pa), (POL_B, pb)])?;
            let branch_m = Branch::from_bits(pa, pb);
            let herald = HeraldRecord {
                photon_a: PhotonOutcome {
                    polarization: Some(Polarization::from_index(pa)),
                    time_bin: None,
                },
                photon_b: PhotonOutcome {
                    polarization: Some(Polarization::from_index(pb)),
                    time_bin: None,
                },
                branch_m,
                branch_n: None,
                correction: herald_correction(branch_m, S1, S2)?,
            };
            out.push(outcome(herald, branch_state, &ideal)?);
        }
    }
    Ok(out)
}

fn parallel_source() -> Result<LabeledState> {
    let bins = LabeledState::new(
        vec![Subsystem::new(BIN_A, OPTICAL_BINS)?, Subsystem::new(BIN_B, OPTICAL_BINS)?],
        vec![c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)],
    )?;
    bins.tensor(&polarization_pair(PairSource::PhiPlus)?)
}

fn four_qubits(q: &[QubitInit; 4]) -> Result<LabeledState> {
    qubits_state(&[(q[0], S1), (q[1], S2), (q[2], S3), (q[3], S4)])
}

/// Parallel-gate state after the first pair's stage and the `U_s` exchange on both photons.
pub fn parallel_state_after_reset(q: &[QubitInit; 4], cfg: &NodeConfig) -> Result<LabeledState> {
    let s = parallel_source()?.tensor(&four_qubits(q)?)?;
    let s = color_center_stage(&s, S1, S2, cfg.reflections_a(), cfg.reflections_b())?;
    let s = us_gate(&s, POL_A, BIN_A)?;
    us_gate(&s, POL_B, BIN_B)
}

fn pair_corrections(m: Branch, n: Branch, pair1: (&str, &str), pair2: (&str, &str)) -> Result<LinearOperator> {
    herald_correction(m, pair1.0, pair1.1)?.kron(&herald_correction(n, pair2.0, pair2.1)?)
}

fn parallel_ideal(q: &[QubitInit; 4]) -> Result<LabeledState> {
    four_qubits(q)?
        .apply(&ideal_cnot(S1, S2)?)?
        .apply(&ideal_cnot(S3, S4)?)
}

/// Two distributed CNOTs, `(s1, s2)` and `(s3, s4)`, sharing one photon pair.
///
/// The time bins herald the first pair's branch `m`, the polarizations the
/// second pair's branch `n`.
pub fn run_parallel_cnot(q: [QubitInit; 4], cfg: &NodeConfig) -> Result<Vec<ProtocolOutcome>> {
    let s = parallel_state_after_reset(&q, cfg)?;
    let s = color_center_stage(&s, S3, S4, cfg.reflections_a(), cfg.reflections_b())?;
    let ideal = parallel_ideal(&q)?;
    let mut out = Vec::with_capacity(16);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let branch_state = measure(&s, &[(BIN_A, i), (BIN_B, j), (POL_A, k), (POL_B, l)])?;
                    let (m, n) = (Branch::from_bits(i, j), Branch::from_bits(k, l));
                    let herald = HeraldRecord {
                        photon_a: PhotonOutcome {
                            polarization: Some(Polarization::from_index(k)),
                            time_bin: Some(i),
                        },
                        photon_b: PhotonOutcome {
                            polarization: Some(Polarization::from_index(l)),
                            time_bin: Some(j),
                        },
                        branch_m: m,
                        branch_n: Some(n),
                        correction: pair_corrections(m, n, (S1, S2), (S3, S4))?,
                    };
                    out.push(outcome(herald, branch_state, &ideal)?);
                }
            }
        }
    }
    Ok(out)
}

/// Hybrid microwave/optical source: `½ Σᵢ [𝒯_A(i)𝒯_B(i)|H⟩ + 𝒯_A(i+2)𝒯_B(i)|V⟩]`.
fn hybrid_source() -> Result<LabeledState> {
    let labels = vec![
        Subsystem::new(BIN_A, MICROWAVE_BINS)?,
        Subsystem::new(BIN_B, OPTICAL_BINS)?,
        qubit(POL_B)?,
    ];
    let mut amps = vec![c(0.0); MICROWAVE_BINS * OPTICAL_BINS * 2];
    for i in 0..OPTICAL_BINS {
        for p in 0..2 {
            let a = i + 2 * p;
            amps[(a * OPTICAL_BINS + i) * 2 + p] = c(0.5);
        }
    }
    LabeledState::new(labels, amps)
}

/// Hybrid state after the first pair's stage and the `U_m`/`U_s` exchanges.
pub fn sc_state_after_reset(q: &[QubitInit; 4], cfg: &NodeConfig) -> Result<LabeledState> {
    let s = hybrid_source()?.tensor(&four_qubits(q)?)?;
    let s = superconducting_stage(&s, S1, S2, cfg.reflections_b())?;
    let s = um_gate(&s, BIN_A)?;
    us_gate(&s, POL_B, BIN_B)
}

/// Parallel gates with superconducting controls `s1`, `s3` (microwave photon A,
/// ideal CPHASE) and color-center targets `s2`, `s4` (optical photon B, node-B cavity).
///
/// The microwave photon's four-bin outcome carries both branch bits for A:
/// the low bit belongs to the first pair and the high bit to the second.
pub fn run_sc_parallel_cnot(q: [QubitInit; 4], cfg: &NodeConfig) -> Result<Vec<ProtocolOutcome>> {
    let s = sc_state_after_reset(&q, cfg)?;
    let s = superconducting_stage(&s, S3, S4, cfg.reflections_b())?;
    let ideal = parallel_ideal(&q)?;
    let mut out = Vec::with_capacity(16);
    for a in 0..MICROWAVE_BINS {
        for b in 0..OPTICAL_BINS {
            for p in 0..2 {
                let branch_state = measure(&s, &[(BIN_A, a), (BIN_B, b), (POL_B, p)])?;
                let (m, n) = (Branch::from_bits(a & 1, b), Branch::from_bits(a >> 1, p));
                let herald = HeraldRecord {
                    photon_a: PhotonOutcome {
                        polarization: None,
                        time_bin: Some(a),
                    },
                    photon_b: PhotonOutcome {
                        polarization: Some(Polarization::from_index(p)),
                        time_bin: Some(b),
                    },
                    branch_m: m,
                    branch_n: Some(n),
                    correction: pair_corrections(m, n, (S1, S2), (S3, S4))?,
                };
                out.push(outcome(herald, branch_state, &ideal)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const R: f64 = FRAC_1_SQRT_2;

    #[test]
    fn spin_hadamard_maps() {
        let up = LabeledState::basis("s", 2, 0).unwrap();
        let down = LabeledState::basis("s", 2, 1).unwrap();
        let plus = spin_hadamard(&up, "s").unwrap();
        assert_abs_diff_eq!(plus.amplitudes()[0].re, R, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.amplitudes()[1].re, R, epsilon = 1e-15);
        let minus = spin_hadamard(&down, "s").unwrap();
        assert_abs_diff_eq!(minus.amplitudes()[0].re, R, epsilon = 1e-15);
        assert_abs_diff_eq!(minus.amplitudes()[1].re, -R, epsilon = 1e-15);
        let back = spin_hadamard(&plus, "s").unwrap();
        assert_abs_diff_eq!((back.amplitudes()[0] - 1.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qubit_init_validation() {
        assert!(QubitInit::new(1.2).is_err());
        assert!(QubitInit::from_amplitudes(0.6, 0.7).is_err());
        let q = QubitInit::new(0.6).unwrap();
        assert_abs_diff_eq!(q.beta(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn branch_bits() {
        assert_eq!(Branch::from_bits(0, 0).index(), 1);
        assert_eq!(Branch::from_bits(0, 1).index(), 2);
        assert_eq!(Branch::from_bits(1, 0).index(), 3);
        assert_eq!(Branch::from_bits(1, 1).index(), 4);
        assert_eq!(Branch::new(5), Err(Error::InvalidBranch(5)));
        assert_eq!(Branch::new(0), Err(Error::InvalidBranch(0)));
    }

    #[test]
    fn correction_table() {
        let id = herald_correction(Branch(1), S1, S2).unwrap();
        assert_eq!(id, LinearOperator::identity(vec![qubit(S1).unwrap(), qubit(S2).unwrap()]).unwrap());
        let z = herald_correction(Branch(2), S1, S2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| z.entry(i, i).re).collect();
        assert_eq!(diag, [1.0, 1.0, -1.0, -1.0]);
        let x = herald_correction(Branch(3), S1, S2).unwrap();
        assert_eq!(x.entry(1, 0).re, 1.0);
        let zx = herald_correction(Branch(4), S1, S2).unwrap();
        // −Ẑ₁X̂₂: |↑↑⟩ → −|↑↓⟩, |↓↑⟩ → +|↓↓⟩
        assert_eq!(zx.entry(1, 0).re, -1.0);
        assert_eq!(zx.entry(3, 2).re, 1.0);
        for b in Branch::ALL {
            assert!(herald_correction(b, S1, S2).unwrap().is_unitary());
        }
    }

    #[test]
    fn branch_gate_relations() {
        let cnot = ideal_cnot(S1, S2).unwrap();
        assert_eq!(branch_gate(Branch(1), S1, S2).unwrap(), cnot);
        for b in Branch::ALL {
            let back = herald_correction(b, S1, S2)
                .unwrap()
                .compose(&branch_gate(b, S1, S2).unwrap())
                .unwrap();
            for (x, y) in back.matrix().iter().zip(cnot.matrix()) {
                assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn ideal_cnot_truth_table() {
        for bits in 0..4usize {
            let (c1, t) = (bits >> 1 == 1, bits & 1 == 1);
            let outs = run_single_cnot(QubitInit::computational(c1), QubitInit::computational(t), &NodeConfig::ideal()).unwrap();
            // control |↑⟩ flips the target
            let want_t = if c1 { t } else { !t };
            let want = qubits_state(&[
                (QubitInit::computational(c1), S1),
                (QubitInit::computational(want_t), S2),
            ])
            .unwrap();
            for o in outs {
                assert_abs_diff_eq!(o.branch_probability, 0.25, epsilon = 1e-12);
                assert_abs_diff_eq!(overlap2(&o.corrected_state, &want).unwrap(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bell_state_from_superposed_control() {
        let outs = run_single_cnot(QubitInit::new(R).unwrap(), QubitInit::computational(false), &NodeConfig::ideal()).unwrap();
        // (|↑↓⟩ + |↓↑⟩)/√2
        let bell = LabeledState::new(
            vec![qubit(S1).unwrap(), qubit(S2).unwrap()],
            vec![c(0.0), c(R), c(R), c(0.0)],
        )
        .unwrap();
        for o in outs {
            assert_abs_diff_eq!(overlap2(&o.corrected_state, &bell).unwrap(), 1.0, epsilon = 1e-12);
            assert_eq!(o.fidelity.map(|f| (f - 1.0).abs() < 1e-12), Some(true));
        }
    }

    #[test]
    fn phi_minus_source_lands_on_partner_branches() {
        let (q1, q2) = (QubitInit::new(0.3).unwrap(), QubitInit::new(0.8).unwrap());
        let outs = run_single_cnot_with_source(q1, q2, &NodeConfig::ideal(), PairSource::PhiMinus).unwrap();
        let phi = qubits_state(&[(q1, S1), (q2, S2)]).unwrap();
        // HH → Û_{c3}, HV → Û_{c4}, VH → Û_{c1}, VV → Û_{c2}
        for (o, partner) in outs.iter().zip([3u8, 4, 1, 2]) {
            let want = phi.apply(&branch_gate(Branch(partner), S1, S2).unwrap()).unwrap();
            assert_abs_diff_eq!(overlap2(&o.branch_state, &want).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn realistic_branches_are_subnormalized() {
        let outs = run_single_cnot(QubitInit::new(0.4).unwrap(), QubitInit::new(0.9).unwrap(), &NodeConfig::benchmark()).unwrap();
        let total: f64 = outs.iter().map(|o| o.branch_probability).sum();
        assert!(total < 1.0 && total > 0.85);
        for o in &outs {
            assert!(o.fidelity.unwrap() > 0.99);
        }
    }

    #[test]
    fn parallel_outcome_labels() {
        let q = [QubitInit::computational(false); 4];
        let outs = run_parallel_cnot(q, &NodeConfig::ideal()).unwrap();
        assert_eq!(outs.len(), 16);
        let o = &outs[0b0110];
        assert_eq!(o.herald.photon_a.time_bin, Some(0));
        assert_eq!(o.herald.photon_b.time_bin, Some(1));
        assert_eq!(o.herald.photon_a.polarization, Some(Polarization::V));
        assert_eq!(o.herald.photon_b.polarization, Some(Polarization::H));
        assert_eq!(o.herald.branch_m.index(), 2);
        assert_eq!(o.herald.branch_n.map(Branch::index), Some(3));
    }

    #[test]
    fn sc_outcome_labels() {
        let q = [QubitInit::computational(false); 4];
        let outs = run_sc_parallel_cnot(q, &NodeConfig::ideal()).unwrap();
        assert_eq!(outs.len(), 16);
        for o in &outs {
            assert_eq!(o.herald.photon_a.polarization, None);
            assert_abs_diff_eq!(o.branch_probability, 1.0 / 16.0, epsilon = 1e-12);
        }
    }
}
