//! Closed-form branch efficiencies and fidelities, their averages over the
//! qubit amplitudes, and the imperfect-source analysis.
//!
//! For a control `α₁|↑⟩ + β₁|↓⟩`, a target `α₂|↑⟩ + β₂|↓⟩` and reflection
//! coefficients `r_A`, `r_B`, define `r₁± = r↑_A ± 1`, `r₂± = r↓_A ± 1` and
//! `ℛ± = r↑_B(α₂ + β₂) ± r↓_B(α₂ − β₂)`. Each herald branch leaves the pair in
//! an unnormalized state whose components (`↑↑, ↑↓, ↓↑, ↓↓`) are bilinear in
//! these quantities; `η_{c_m}` is its squared norm and `F_m` the squared
//! overlap with `Û_{c_m}|φ₁⟩|φ₂⟩`.
//!
//! The raw branch norms equal 16 for ideal reflections, and the detector
//! probability of a branch is the raw norm divided by 64, so
//! [`BranchMetrics::eta`] stores `η_{c_m}/64` and ideal gates give a total of one.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{overlap2, LabeledState};
use crate::protocol::{
    branch_gate, herald_correction, ideal_cnot, Branch, NodeConfig, Polarization, QubitInit, S1, S2,
    UNDEFINED_BELOW,
};
use crate::quadrature::{CompensatedSum, GaussLegendre, DEFAULT_NODES, MIN_NODES};
use crate::scattering::ReflectionPair;

/// Raw closed-form branch norms are this multiple of the herald probability.
pub const ETA_SCALE: f64 = 64.0;

/// Reflection combinations that appear in the branch amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCoefficients {
    pub r1_plus: Complex64,
    pub r1_minus: Complex64,
    pub r2_plus: Complex64,
    pub r2_minus: Complex64,
    pub big_r_plus: Complex64,
    pub big_r_minus: Complex64,
}

impl BranchCoefficients {
    pub fn new(q_tgt: QubitInit, r_a: ReflectionPair, r_b: ReflectionPair) -> Self {
        let (a, b) = (q_tgt.alpha(), q_tgt.beta());
        Self {
            r1_plus: r_a.r_up + 1.0,
            r1_minus: r_a.r_up - 1.0,
            r2_plus: r_a.r_down + 1.0,
            r2_minus: r_a.r_down - 1.0,
            big_r_plus: r_b.r_up * (a + b) + r_b.r_down * (a - b),
            big_r_minus: r_b.r_up * (a + b) - r_b.r_down * (a - b),
        }
    }
}

/// Per-branch efficiency (herald probability) and fidelity for one qubit pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchMetrics {
    pub eta: [f64; 4],
    /// `None` where the branch probability is below [`UNDEFINED_BELOW`].
    pub fidelity: [Option<f64>; 4],
    pub eta_total: f64,
}

impl BranchMetrics {
    /// Uniform mean over the branches with a defined fidelity.
    pub fn mean_fidelity(&self) -> Option<f64> {
        let defined: Vec<f64> = self.fidelity.iter().flatten().copied().collect();
        if defined.is_empty() {
            None
        } else {
            Some(defined.iter().sum::<f64>() / defined.len() as f64)
        }
    }

    /// Mean fidelity weighted by branch probability.
    pub fn weighted_fidelity(&self) -> Option<f64> {
        let mut num = 0.0;
        let mut den = 0.0;
        for (e, f) in self.eta.iter().zip(&self.fidelity) {
            if let Some(f) = f {
                num += e * f;
                den += e;
            }
        }
        if den > 0.0 {
            Some(num / den)
        } else {
            None
        }
    }

    fn fidelity_summary(&self, weighting: FidelityWeighting) -> Option<f64> {
        match weighting {
            FidelityWeighting::Uniform => self.mean_fidelity(),
            FidelityWeighting::ProbabilityWeighted => self.weighted_fidelity(),
        }
    }
}

/// Unnormalized `(↑↑, ↑↓, ↓↑, ↓↓)` amplitudes left by each herald branch.
fn branch_amplitudes(q_ctrl: QubitInit, q_tgt: QubitInit, k: &BranchCoefficients) -> [[Complex64; 4]; 4] {
    let (a1, b1) = (q_ctrl.alpha(), q_ctrl.beta());
    let (a2, b2) = (q_tgt.alpha(), q_tgt.beta());
    // control factors after the node-A scattering and Hadamard plate
    let p = [k.r1_plus * a1, k.r2_plus * b1];
    let m = [k.r1_minus * a1, k.r2_minus * b1];
    // target factors: scattered (H path) and bypassed (V path)
    let r = [k.big_r_plus, k.big_r_minus];
    let w = [Complex64::new(2.0 * a2, 0.0), Complex64::new(2.0 * b2, 0.0)];
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            let idx = 2 * i + j;
            out[0][idx] = -m[i] * w[j] + p[i] * r[j];
            out[1][idx] = m[i] * w[j] + p[i] * r[j];
            out[2][idx] = p[i] * w[j] - m[i] * r[j];
            out[3][idx] = -p[i] * w[j] - m[i] * r[j];
        }
    }
    out
}

/// Components of `Û_{c_m}|φ₁⟩|φ₂⟩` for `m = 1..4`.
fn ideal_outputs(q_ctrl: QubitInit, q_tgt: QubitInit) -> [[f64; 4]; 4] {
    let (a1, b1) = (q_ctrl.alpha(), q_ctrl.beta());
    let (a2, b2) = (q_tgt.alpha(), q_tgt.beta());
    [
        [a1 * b2, a1 * a2, b1 * a2, b1 * b2],
        [a1 * b2, a1 * a2, -b1 * a2, -b1 * b2],
        [a1 * a2, a1 * b2, b1 * b2, b1 * a2],
        [-a1 * a2, -a1 * b2, b1 * b2, b1 * a2],
    ]
}

/// Raw `η_{c_m}` as four squared moduli each.
fn raw_etas(q_ctrl: QubitInit, q_tgt: QubitInit, k: &BranchCoefficients) -> [f64; 4] {
    let (a1, b1) = (q_ctrl.alpha(), q_ctrl.beta());
    let (a2, b2) = (q_tgt.alpha(), q_tgt.beta());
    let (r1p, r1m, r2p, r2m) = (k.r1_plus, k.r1_minus, k.r2_plus, k.r2_minus);
    let (rp, rm) = (k.big_r_plus, k.big_r_minus);
    let sq = |z: Complex64| z.norm_sqr();
    [
        sq(r1m * 2.0 * a1 * a2 - r1p * a1 * rp)
            + sq(r1m * 2.0 * a1 * b2 - r1p * a1 * rm)
            + sq(r2m * 2.0 * b1 * a2 - r2p * b1 * rp)
            + sq(r2m * 2.0 * b1 * b2 - r2p * b1 * rm),
        sq(r1m * 2.0 * a1 * a2 + r1p * a1 * rp)
            + sq(r1m * 2.0 * a1 * b2 + r1p * a1 * rm)
            + sq(r2m * 2.0 * b1 * a2 + r2p * b1 * rp)
            + sq(r2m * 2.0 * b1 * b2 + r2p * b1 * rm),
        sq(r1p * 2.0 * a1 * a2 - r1m * a1 * rp)
            + sq(r1p * 2.0 * a1 * b2 - r1m * a1 * rm)
            + sq(r2p * 2.0 * b1 * a2 - r2m * b1 * rp)
            + sq(r2p * 2.0 * b1 * b2 - r2m * b1 * rm),
        sq(r1p * 2.0 * a1 * a2 + r1m * a1 * rp)
            + sq(r1p * 2.0 * a1 * b2 + r1m * a1 * rm)
            + sq(r2p * 2.0 * b1 * a2 + r2m * b1 * rp)
            + sq(r2p * 2.0 * b1 * b2 + r2m * b1 * rm),
    ]
}

/// Closed-form efficiencies and fidelities of the four herald branches.
pub fn branch_metrics(q_ctrl: QubitInit, q_tgt: QubitInit, r_a: ReflectionPair, r_b: ReflectionPair) -> BranchMetrics {
    let k = BranchCoefficients::new(q_tgt, r_a, r_b);
    let raw = raw_etas(q_ctrl, q_tgt, &k);
    let amps = branch_amplitudes(q_ctrl, q_tgt, &k);
    let ideal = ideal_outputs(q_ctrl, q_tgt);
    let mut eta = [0.0; 4];
    let mut fidelity = [None; 4];
    for m in 0..4 {
        eta[m] = raw[m] / ETA_SCALE;
        if eta[m] >= UNDEFINED_BELOW {
            let overlap: Complex64 = ideal[m].iter().zip(&amps[m]).map(|(u, a)| a * *u).sum();
            fidelity[m] = Some(overlap.norm_sqr() / raw[m]);
        }
    }
    BranchMetrics {
        eta,
        fidelity,
        eta_total: eta.iter().sum(),
    }
}

/// How branch fidelities are combined at each quadrature point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FidelityWeighting {
    /// `¼ Σ_m F_m` (`1/16 Σ_{m,n}` for the parallel gates).
    #[default]
    Uniform,
    /// `Σ_m η_m F_m / Σ_m η_m`.
    ProbabilityWeighted,
}

/// Tensor-product Gauss–Legendre settings for the amplitude averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub weighting: FidelityWeighting,
}

impl QuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidParameter(alloc::format!(
                "quadrature needs at least {MIN_NODES} nodes per dimension, got {nodes}"
            )));
        }
        Ok(Self {
            nodes,
            weighting: FidelityWeighting::Uniform,
        })
    }

    pub fn with_weighting(mut self, weighting: FidelityWeighting) -> Self {
        self.weighting = weighting;
        self
    }

    fn rule(&self) -> Result<GaussLegendre> {
        Self::new(self.nodes)?;
        GaussLegendre::new(self.nodes)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            weighting: FidelityWeighting::Uniform,
        }
    }
}

/// Average fidelity and total efficiency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Averages {
    pub fidelity: f64,
    pub efficiency: f64,
}

/// Averages of one gate over `α₁, α₂ ∈ [0, 1]` with `βᵢ = √(1 − αᵢ²)`.
pub fn average_single(cfg: &NodeConfig, quad: &QuadratureSpec) -> Result<Averages> {
    average_with_reflections(cfg.reflections_a(), cfg.reflections_b(), quad)
}

/// [`average_single`] for explicit reflection coefficients.
pub fn average_with_reflections(r_a: ReflectionPair, r_b: ReflectionPair, quad: &QuadratureSpec) -> Result<Averages> {
    let rule = quad.rule()?;
    let mut fid = CompensatedSum::default();
    let mut eff = CompensatedSum::default();
    for (x1, w1) in rule.iter() {
        let q1 = QubitInit::new(x1)?;
        for (x2, w2) in rule.iter() {
            let bm = branch_metrics(q1, QubitInit::new(x2)?, r_a, r_b);
            if let Some(f) = bm.fidelity_summary(quad.weighting) {
                fid.add(w1 * w2 * f);
            }
            eff.add(w1 * w2 * bm.eta_total);
        }
    }
    Ok(Averages {
        fidelity: fid.total(),
        efficiency: eff.total(),
    })
}

/// How [`average_parallel`] evaluates the four-dimensional average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParallelMode {
    /// The heralded output factorizes over the two pairs, so `F = F̃²`, `η = η̃²`.
    #[default]
    Factorized,
    /// Full tensor grid over `α₁..α₄` with `F_m F′_n` and `η_m η′_n` at every node.
    Direct,
}

/// Averages of the parallel gates over `α₁..α₄`.
pub fn average_parallel(cfg: &NodeConfig, quad: &QuadratureSpec, mode: ParallelMode) -> Result<Averages> {
    match mode {
        ParallelMode::Factorized => {
            let single = average_single(cfg, quad)?;
            Ok(Averages {
                fidelity: single.fidelity * single.fidelity,
                efficiency: single.efficiency * single.efficiency,
            })
        }
        ParallelMode::Direct => average_parallel_direct(cfg, quad),
    }
}

/// Parallel gates with superconducting controls: the CPHASE interface acts as
/// an ideal node-A reflection, so only node B's cavity degrades the branches.
pub fn average_sc_parallel(cfg: &NodeConfig, quad: &QuadratureSpec) -> Result<Averages> {
    let single = average_with_reflections(ReflectionPair::IDEAL, cfg.reflections_b(), quad)?;
    Ok(Averages {
        fidelity: single.fidelity * single.fidelity,
        efficiency: single.efficiency * single.efficiency,
    })
}

fn average_parallel_direct(cfg: &NodeConfig, quad: &QuadratureSpec) -> Result<Averages> {
    let rule = quad.rule()?;
    let (r_a, r_b) = (cfg.reflections_a(), cfg.reflections_b());
    let inits = rule
        .nodes()
        .iter()
        .map(|&x| QubitInit::new(x))
        .collect::<Result<Vec<_>>>()?;
    let w = rule.weights();
    let n = rule.len();
    let mut fid = CompensatedSum::default();
    let mut eff = CompensatedSum::default();
    for i1 in 0..n {
        for i2 in 0..n {
            for i3 in 0..n {
                for i4 in 0..n {
                    let first = branch_metrics(inits[i1], inits[i2], r_a, r_b);
                    let second = branch_metrics(inits[i3], inits[i4], r_a, r_b);
                    let weight = w[i1] * w[i2] * w[i3] * w[i4];
                    let mut f_num = 0.0;
                    let mut f_den = 0.0;
                    let mut e = 0.0;
                    for m in 0..4 {
                        for k in 0..4 {
                            let eta = first.eta[m] * second.eta[k];
                            e += eta;
                            if let (Some(fm), Some(fn_)) = (first.fidelity[m], second.fidelity[k]) {
                                let g = match quad.weighting {
                                    FidelityWeighting::Uniform => 1.0,
                                    FidelityWeighting::ProbabilityWeighted => eta,
                                };
                                f_num += g * fm * fn_;
                                f_den += g;
                            }
                        }
                    }
                    if f_den > 0.0 {
                        fid.add(weight * f_num / f_den);
                    }
                    eff.add(weight * e);
                }
            }
        }
    }
    Ok(Averages {
        fidelity: fid.total(),
        efficiency: eff.total(),
    })
}

/// One grid point of a cooperativity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub c_a: f64,
    pub c_b: f64,
    pub averages: Averages,
}

/// Parallel-gate averages on the grid `c_a × c_b` (row-major in `c_a`).
pub fn sweep_surface(c_a: &[f64], c_b: &[f64], base: &NodeConfig, quad: &QuadratureSpec) -> Result<Vec<SurfacePoint>> {
    if c_a.is_empty() || c_b.is_empty() {
        return Err(Error::InvalidParameter("cooperativity ranges must be non-empty".into()));
    }
    let mut out = Vec::with_capacity(c_a.len() * c_b.len());
    for &a in c_a {
        for &b in c_b {
            if a < 0.0 || b < 0.0 {
                return Err(Error::InvalidParameter("cooperativity must be non-negative".into()));
            }
            let cfg = base.with_cooperativities(a, b);
            out.push(SurfacePoint {
                c_a: a,
                c_b: b,
                averages: average_parallel(&cfg, quad, ParallelMode::Factorized)?,
            });
        }
    }
    Ok(out)
}

/// Entanglement fidelity `F₀` of the photon pair, `ρ₀ = F₀|φ⁺⟩⟨φ⁺| + (1 − F₀)|φ⁻⟩⟨φ⁻|`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SourceFidelity(f64);

impl SourceFidelity {
    pub fn new(f0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f0) {
            return Err(Error::InvalidParameter("source fidelity must lie in [0, 1]".into()));
        }
        Ok(Self(f0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Two-term qubit mixture left by one detector outcome when the source is `ρ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBranch {
    pub outcome: (Polarization, Polarization),
    /// Herald branch, which fixes the correction applied.
    pub branch: Branch,
    /// Branch gate realized by the `|φ⁺⟩` component.
    pub intended: Branch,
    /// Branch gate realized by the `|φ⁻⟩` component.
    pub error: Branch,
    /// `Û_{c_x}|φ₁⟩|φ₂⟩`, weight `F₀`.
    pub intended_state: LabeledState,
    /// `Û_{c_y}|φ₁⟩|φ₂⟩`, weight `1 − F₀`.
    pub error_state: LabeledState,
    pub weight_intended: f64,
}

impl MixedBranch {
    /// `⟨ψ|C ρ C†|ψ⟩` with `C` the herald correction and `ψ` the plain CNOT output.
    pub fn fidelity_after_correction(&self, target: &LabeledState) -> Result<f64> {
        let corr = herald_correction(self.branch, S1, S2)?;
        let good = overlap2(&self.intended_state.apply(&corr)?, target)?;
        let bad = overlap2(&self.error_state.apply(&corr)?, target)?;
        Ok(self.weight_intended * good + (1.0 - self.weight_intended) * bad)
    }
}

/// Outcome pairing under the imperfect source: `HH → f₁₃`, `HV → f₂₄`, `VH → f₃₁`, `VV → f₄₂`.
pub fn mixed_source_branches(f0: SourceFidelity, q1: QubitInit, q2: QubitInit) -> Result<Vec<MixedBranch>> {
    let phi = q1.state(S1)?.tensor(&q2.state(S2)?)?;
    let pairs = [(1u8, 3u8), (2, 4), (3, 1), (4, 2)];
    let pols = [Polarization::H, Polarization::V];
    let mut out = Vec::with_capacity(4);
    for (slot, (x, y)) in pairs.into_iter().enumerate() {
        let (x, y) = (Branch::new(x)?, Branch::new(y)?);
        out.push(MixedBranch {
            outcome: (pols[slot >> 1], pols[slot & 1]),
            branch: x,
            intended: x,
            error: y,
            intended_state: phi.apply(&branch_gate(x, S1, S2)?)?,
            error_state: phi.apply(&branch_gate(y, S1, S2)?)?,
            weight_intended: f0.value(),
        });
    }
    Ok(out)
}

/// Branch-averaged fidelity of the ideal gate driven by the mixed source.
pub fn average_mixed_fidelity(f0: SourceFidelity, quad: &QuadratureSpec) -> Result<f64> {
    let rule = quad.rule()?;
    let mut acc = CompensatedSum::default();
    for (x1, w1) in rule.iter() {
        for (x2, w2) in rule.iter() {
            let (q1, q2) = (QubitInit::new(x1)?, QubitInit::new(x2)?);
            let target = q1.state(S1)?.tensor(&q2.state(S2)?)?.apply(&ideal_cnot(S1, S2)?)?;
            let mut f = 0.0;
            for b in mixed_source_branches(f0, q1, q2)? {
                f += b.fidelity_after_correction(&target)?;
            }
            acc.add(w1 * w2 * f / 4.0);
        }
    }
    Ok(acc.total())
}

/// One round of purification: `F′₀ = F₀² / [F₀² + (1 − F₀)²]`.
pub fn purified_fidelity(f0: SourceFidelity) -> f64 {
    let f = f0.value();
    let bad = 1.0 - f;
    f * f / (f * f + bad * bad)
}
