//! Numerical checks that no four-register code corrects every
//! single-register error.
//!
//! For a length-four code with words `alpha^(i)_{pqrs}`, let `rho^(i)` be the
//! reduced density of registers 1 and 2:
//! `rho^(i)[(p'q'), (pq)] = sum_{r,s} conj(alpha^(i)_{p'q'rs}) alpha^(i)_{pqrs}`.
//! Correcting every error on registers 3 and 4 forces
//! `rho^(i) rho^(j) = 0` for `i != j`; correcting every error on registers 1
//! and 2 forces `rho^(i) = rho^(j)`. Together the `rho^(i)` would be
//! Hermitian and nilpotent, hence zero, contradicting normalization.
//!
//! The contradiction is quantitative: with `d = n^2`,
//! `1/d <= tr(rho^2) <= d * (orth + d * equal)`, so every candidate has
//! `max(orth, equal) >= 1 / (d^2 (d + 1))`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QeccError, Result};
use crate::math::{digits_of, dot, index_of, max_abs, CodeParams, QuditState, ZERO};

pub const CANDIDATE_REGISTERS: usize = 4;
/// Joint residual below which a candidate would count as a counterexample.
pub const FALSIFIER_THRESHOLD: f64 = 1e-3;

/// `n` normalized four-register words.
#[derive(Debug, Clone)]
pub struct CandidateCode4 {
    params: CodeParams,
    words: Vec<QuditState>,
}

impl CandidateCode4 {
    pub fn new(params: &CodeParams, words: Vec<QuditState>) -> Result<Self> {
        if words.len() != params.n {
            return Err(QeccError::DimensionMismatch(format!(
                "expected {} words, got {}",
                params.n,
                words.len()
            )));
        }
        for w in &words {
            if w.n() != params.n || w.registers() != CANDIDATE_REGISTERS {
                return Err(QeccError::DimensionMismatch(
                    "four-register words required".into(),
                ));
            }
            if (w.norm_sqr() - 1.0).abs() > 1e-9 {
                return Err(QeccError::DimensionMismatch(format!(
                    "word norm^2 = {}",
                    w.norm_sqr()
                )));
            }
        }
        Ok(Self {
            params: *params,
            words,
        })
    }

    /// Orthonormalized complex Gaussian vectors, deterministic in `seed`.
    pub fn random_isometry(params: &CodeParams, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = params.space_dim(CANDIDATE_REGISTERS);
        let mut words: Vec<QuditState> = Vec::with_capacity(params.n);
        while words.len() < params.n {
            let amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let mut v = QuditState::from_amps(params.n, CANDIDATE_REGISTERS, amps).expect("dim");
            for _ in 0..2 {
                for u in &words {
                    let c = dot(u.amps(), v.amps());
                    v.add_scaled(-c, u).expect("same shape");
                }
            }
            if let Ok(v) = v.normalized() {
                words.push(v);
            }
        }
        Self {
            params: *params,
            words,
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn words(&self) -> &[QuditState] {
        &self.words
    }

    /// `max |<i|j> - delta_ij|`.
    pub fn isometry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.words.iter().enumerate() {
            for (j, b) in self.words.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a.amps(), b.amps()) - target).norm());
            }
        }
        worst
    }
}

/// Reduced density of registers 1 and 2, indexed `(p'q'; pq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub rho: DMatrix<Complex64>,
}

impl ReducedDensity {
    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.rho - self.rho.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()).map(|z| z * 0.5);
        SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.rho * &self.rho).trace().re
    }
}

/// `rho^(i)` for candidate word `i`, as `conj(M) M^T` with `M[(pq), (rs)]`
/// the word reshaped to `n^2 x n^2`.
pub fn reduced_density(c: &CandidateCode4, i: usize) -> Result<ReducedDensity> {
    let word = c.words.get(i).ok_or(QeccError::LogicalIndexOutOfRange {
        k: i,
        n: c.params.n,
    })?;
    let d = c.params.n * c.params.n;
    let m = DMatrix::from_row_slice(d, d, word.amps());
    Ok(ReducedDensity {
        rho: m.conjugate() * m.transpose(),
    })
}

/// Standard reduced density `tr_rest |psi><psi|` of the registers in `keep`
/// (1-based, increasing), with `rho[a][b] = sum_t psi[a,t] conj(psi[b,t])`.
pub fn partial_trace(state: &QuditState, keep: &[usize]) -> Result<DMatrix<Complex64>> {
    let n = state.n();
    let registers = state.registers();
    check_keep(keep, registers)?;
    let kept_dim = n.pow(keep.len() as u32);
    let traced: Vec<usize> = (1..=registers).filter(|r| !keep.contains(r)).collect();
    let traced_dim = n.pow(traced.len() as u32);
    // psi reshaped to kept_dim x traced_dim
    let mut psi = DMatrix::from_element(kept_dim, traced_dim, ZERO);
    for (idx, amp) in state.amps().iter().enumerate() {
        let digits = digits_of(n, registers, idx);
        let a = keep.iter().fold(0, |acc, &r| acc * n + digits[r - 1]);
        let t = traced.iter().fold(0, |acc, &r| acc * n + digits[r - 1]);
        psi[(a, t)] = *amp;
    }
    Ok(&psi * psi.adjoint())
}

/// Partial trace of a density matrix on `registers` qudits down to `keep`.
pub fn partial_trace_density(
    rho: &DMatrix<Complex64>,
    n: usize,
    registers: usize,
    keep: &[usize],
) -> Result<DMatrix<Complex64>> {
    check_keep(keep, registers)?;
    let dim = n.pow(registers as u32);
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(QeccError::DimensionMismatch(format!(
            "density of size {}x{} for {registers} registers",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let kept_dim = n.pow(keep.len() as u32);
    let split = |idx: usize| {
        let digits = digits_of(n, registers, idx);
        let kept: Vec<usize> = keep.iter().map(|&r| digits[r - 1]).collect();
        let rest: Vec<usize> = (1..=registers)
            .filter(|r| !keep.contains(r))
            .map(|r| digits[r - 1])
            .collect();
        (index_of(n, &kept), rest)
    };
    let parts: Vec<(usize, Vec<usize>)> = (0..dim).map(split).collect();
    let mut out = DMatrix::from_element(kept_dim, kept_dim, ZERO);
    for (row, (a, rest_a)) in parts.iter().enumerate() {
        for (col, (b, rest_b)) in parts.iter().enumerate() {
            if rest_a == rest_b {
                out[(*a, *b)] += rho[(row, col)];
            }
        }
    }
    Ok(out)
}

fn check_keep(keep: &[usize], registers: usize) -> Result<()> {
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&r| r == 0 || r > registers) {
        return Err(QeccError::DimensionMismatch(format!(
            "kept registers {keep:?} of {registers}"
        )));
    }
    Ok(())
}

/// `(orth_residual, equal_residual)`:
/// `max_{i != j} ||rho^(i) rho^(j)||_max` and `max_{i != j} ||rho^(i) - rho^(j)||_max`.
pub fn kl_constraint_residuals(c: &CandidateCode4) -> Result<(f64, f64)> {
    let rhos: Vec<ReducedDensity> = (0..c.words.len())
        .map(|i| reduced_density(c, i))
        .collect::<Result<_>>()?;
    let mut orth: f64 = 0.0;
    let mut equal: f64 = 0.0;
    for (i, a) in rhos.iter().enumerate() {
        for (j, b) in rhos.iter().enumerate() {
            if i != j {
                orth = orth.max(max_abs(&(&a.rho * &b.rho)));
                equal = equal.max(max_abs(&(&a.rho - &b.rho)));
            }
        }
    }
    Ok((orth, equal))
}

/// Largest off-diagonal matrix element of any operator product on
/// registers 3 and 4 between distinct words, over matrix units:
/// `max_{i != j} |sum_{p,q} conj(alpha^(i)_{pqrs}) alpha^(j)_{pqr's'}|`.
pub fn register34_offdiag_residual(c: &CandidateCode4) -> f64 {
    let d = c.params.n * c.params.n;
    let mats: Vec<DMatrix<Complex64>> = c
        .words
        .iter()
        .map(|w| DMatrix::from_row_slice(d, d, w.amps()))
        .collect();
    let mut worst: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            if i != j {
                worst = worst.max(max_abs(&(a.adjoint() * b)));
            }
        }
    }
    worst
}

/// For Hermitian `rho`, `(rho^2)_ii = sum_j |rho_ij|^2`, so
/// `||rho||_max^2 <= ||rho^2||_max`: a vanishing square forces a vanishing
/// matrix. Returns whether that inequality holds for `rho`.
pub fn nilpotent_hermitian_is_zero(rho: &DMatrix<Complex64>) -> Result<bool> {
    if !rho.is_square() {
        return Err(QeccError::DimensionMismatch(
            "square matrix required".into(),
        ));
    }
    let scale = max_abs(rho).max(f64::MIN_POSITIVE);
    let herm = max_abs(&(rho - rho.adjoint()));
    if herm > 1e-10 * scale {
        return Err(QeccError::NotHermitian(herm));
    }
    let norm = max_abs(rho);
    let square = max_abs(&(rho * rho));
    Ok(norm * norm <= square * (1.0 + 1e-9))
}

/// `1 / (d^2 (d + 1))` with `d = n^2`: no length-four candidate can push
/// `max(orth_residual, equal_residual)` below this.
pub fn joint_residual_lower_bound(n: usize) -> f64 {
    let d = (n * n) as f64;
    1.0 / (d * d * (d + 1.0))
}

/// The two sides of `tr(rho^(0)^2) <= d (orth + d equal)` for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NilpotencyCertificate {
    pub purity: f64,
    pub purity_floor: f64,
    pub purity_ceiling: f64,
}

impl NilpotencyCertificate {
    pub fn for_candidate(c: &CandidateCode4) -> Result<Self> {
        let (orth, equal) = kl_constraint_residuals(c)?;
        let d = (c.params.n * c.params.n) as f64;
        Ok(Self {
            purity: reduced_density(c, 0)?.purity(),
            purity_floor: 1.0 / d,
            purity_ceiling: d * (orth + d * equal),
        })
    }

    pub fn holds(&self) -> bool {
        let slack = 1e-12;
        self.purity >= self.purity_floor - slack && self.purity <= self.purity_ceiling + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub n: usize,
    pub candidates: usize,
    pub min_joint_residual: f64,
    pub argmin_seed: u64,
    pub analytic_lower_bound: f64,
    pub certificates_hold: bool,
}

impl OptimalityReport {
    pub fn passes(&self) -> bool {
        self.min_joint_residual > FALSIFIER_THRESHOLD && self.certificates_hold
    }
}

/// Evaluates `count` random isometric candidates with seeds
/// `base_seed..base_seed + count`.
pub fn falsify(params: &CodeParams, count: usize, base_seed: u64) -> Result<OptimalityReport> {
    let results: Vec<(u64, f64, bool)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let c = CandidateCode4::random_isometry(params, seed);
            let (orth, equal) = kl_constraint_residuals(&c)?;
            let cert = NilpotencyCertificate::for_candidate(&c)?;
            Ok((seed, orth.max(equal), cert.holds()))
        })
        .collect::<Result<_>>()?;
    let (argmin_seed, min_joint) = results
        .iter()
        .map(|&(s, j, _)| (s, j))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .unwrap_or((base_seed, f64::INFINITY));
    Ok(OptimalityReport {
        n: params.n,
        candidates: count,
        min_joint_residual: min_joint,
        argmin_seed,
        analytic_lower_bound: joint_residual_lower_bound(params.n),
        certificates_hold: results.iter().all(|r| r.2),
    })
}

/// Outcome of [`nilpotency_search`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NilpotencySearch {
    pub trials: usize,
    pub small_square_hits: usize,
    pub counterexamples: usize,
    pub inequality_violations: usize,
}

/// Random Hermitian matrices over many scales, looking for one with
/// `||rho^2||_max < 1e-12` but `||rho||_max > 1e-6`.
pub fn nilpotency_search(trials: usize, seed: u64) -> NilpotencySearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = NilpotencySearch {
        trials,
        small_square_hits: 0,
        counterexamples: 0,
        inequality_violations: 0,
    };
    for t in 0..trials {
        let dim = rng.random_range(2..=9);
        let exponent: f64 = rng.random_range(0.0..9.0);
        let scale = 10f64.powf(-exponent);
        let rho = match t % 3 {
            // dense random Hermitian
            0 => {
                let g = DMatrix::from_fn(dim, dim, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                (&g + g.adjoint()).map(|z| z * scale)
            }
            // scaled rank-one projector
            1 => {
                let v = DMatrix::from_fn(dim, 1, |_, _| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                });
                (&v * v.adjoint()).map(|z| z * scale)
            }
            // Hermitian part of a strictly upper-triangular (nilpotent) matrix
            _ => {
                let g = DMatrix::from_fn(dim, dim, |r, c| {
                    if c > r {
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    } else {
                        ZERO
                    }
                });
                (&g + g.adjoint()).map(|z| z * scale)
            }
        };
        let norm = max_abs(&rho);
        let square = max_abs(&(&rho * &rho));
        if square < 1e-12 {
            out.small_square_hits += 1;
            if norm > 1e-6 {
                out.counterexamples += 1;
            }
        }
        if !nilpotent_hermitian_is_zero(&rho).unwrap_or(false) {
            out.inequality_violations += 1;
        }
    }
    out
}
