//! Recovery from single-register errors.
//!
//! The lambda matrix `L` of a correctable error set `{E_a}` is Hermitian
//! PSD. Writing `L = U D U^dagger`, the operators `F_m = sum_a U[a][m] E_a`
//! satisfy `<k|F_m^dagger F_l|k'> = d_m delta(m,l) delta(k,k')`, so the
//! images `F_m |k_Enc> / sqrt(d_m)` form orthonormal syndrome subspaces.
//! Decoding projects onto the subspace with the largest weight and maps its
//! basis back onto the codewords.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::code::{Codebook, CODE_REGISTERS};
use crate::error::{QeccError, Result};
use crate::kl::{error_images, lambda_from_images, Verdict};
use crate::math::{dot, inner_product, CodeParams, QuditState, ZERO};
use crate::pauli::ErrorSet;

/// Eigenvalues of the lambda matrix below this are treated as zero.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SyndromeSubspace {
    pub label: String,
    /// Eigenvalue `d_m` of the lambda matrix for this direction.
    pub weight: f64,
    /// `basis[k] = F_m |k_Enc> / sqrt(d_m)`.
    pub basis: Vec<QuditState>,
}

#[derive(Debug, Clone)]
pub struct RecoveryPlan {
    params: CodeParams,
    codewords: Vec<QuditState>,
    subspaces: Vec<SyndromeSubspace>,
    leftover_projector_rank: usize,
    spectrum: Vec<f64>,
    diagonal_lambda: bool,
}

#[derive(Debug, Clone)]
pub struct DecodeOutcome {
    pub state: QuditState,
    pub syndrome: usize,
    pub syndrome_label: String,
    /// Fraction of the input's squared norm inside the chosen subspace.
    pub selected_weight: f64,
    /// Fraction of the input's squared norm inside all syndrome subspaces.
    pub captured_weight: f64,
}

impl RecoveryPlan {
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn subspaces(&self) -> &[SyndromeSubspace] {
        &self.subspaces
    }

    /// Sum of the syndrome subspace dimensions.
    pub fn corrected_dimension(&self) -> usize {
        self.subspaces.iter().map(|s| s.basis.len()).sum()
    }

    pub fn leftover_projector_rank(&self) -> usize {
        self.leftover_projector_rank
    }

    /// Lambda eigenvalues, descending.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Whether the lambda matrix was already diagonal, so each syndrome is
    /// a single error from the set.
    pub fn is_diagonal(&self) -> bool {
        self.diagonal_lambda
    }

    /// Max deviation from orthonormality across all subspace basis vectors.
    pub fn orthonormality_residual(&self) -> f64 {
        let vectors: Vec<&QuditState> =
            self.subspaces.iter().flat_map(|s| s.basis.iter()).collect();
        (0..vectors.len())
            .into_par_iter()
            .map(|i| {
                let mut worst: f64 = 0.0;
                for j in i..vectors.len() {
                    let g = dot(vectors[i].amps(), vectors[j].amps());
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((g - target).norm());
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn decode(&self, corrupted: &QuditState) -> Result<DecodeOutcome> {
        if corrupted.n() != self.params.n || corrupted.registers() != CODE_REGISTERS {
            return Err(QeccError::DimensionMismatch("corrupted state shape".into()));
        }
        let norm_sqr = corrupted.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(QeccError::ZeroNorm);
        }
        let overlaps: Vec<Vec<Complex64>> = self
            .subspaces
            .iter()
            .map(|s| {
                s.basis
                    .iter()
                    .map(|b| dot(b.amps(), corrupted.amps()))
                    .collect()
            })
            .collect();
        let weights: Vec<f64> = overlaps
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>() / norm_sqr)
            .collect();
        let captured: f64 = weights.iter().sum();
        let mut best = 0;
        for (m, w) in weights.iter().enumerate() {
            if *w > weights[best] {
                best = m;
            }
        }
        if weights.is_empty() || weights[best] <= self.params.tol {
            return Err(QeccError::Undecodable(captured));
        }
        let mut out = QuditState::zero(self.params.n, CODE_REGISTERS);
        for (c, word) in overlaps[best].iter().zip(&self.codewords) {
            out.add_scaled(*c, word)?;
        }
        Ok(DecodeOutcome {
            state: out.normalized()?,
            syndrome: best,
            syndrome_label: self.subspaces[best].label.clone(),
            selected_weight: weights[best],
            captured_weight: captured,
        })
    }
}

/// Builds the recovery plan for a codebook that satisfies the
/// error-correction conditions for `errors`.
pub fn build_recovery(codebook: &Codebook, errors: &ErrorSet) -> Result<RecoveryPlan> {
    let params = *codebook.params();
    let images = error_images(codebook, errors)?;
    let lm = lambda_from_images(&params, errors.labels(), &images);
    if lm.verdict() != Verdict::Pass {
        return Err(QeccError::ConditionsViolated {
            diag: lm.diag_residual,
            offdiag: lm.offdiag_residual,
        });
    }
    let m = lm.lambda.nrows();
    let offdiag = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| lm.lambda[(a, b)].norm())
        .fold(0.0, f64::max);
    let diagonal_lambda = offdiag < RANK_TOL;

    // (eigenvalue, column of U)
    let mut directions: Vec<(f64, Vec<Complex64>)> = if diagonal_lambda {
        (0..m)
            .map(|a| {
                let mut col = vec![ZERO; m];
                col[a] = Complex64::new(1.0, 0.0);
                (lm.lambda[(a, a)].re, col)
            })
            .collect()
    } else {
        let herm: DMatrix<Complex64> = (&lm.lambda + lm.lambda.adjoint()).map(|z| z * 0.5);
        let eig = SymmetricEigen::new(herm);
        let mut dirs: Vec<_> = (0..m)
            .map(|j| {
                (
                    eig.eigenvalues[j],
                    eig.eigenvectors.column(j).iter().copied().collect(),
                )
            })
            .collect();
        dirs.sort_by(|a: &(f64, Vec<Complex64>), b| b.0.total_cmp(&a.0));
        dirs
    };

    let mut spectrum: Vec<f64> = directions.iter().map(|d| d.0).collect();
    spectrum.sort_by(|a, b| b.total_cmp(a));
    directions.retain(|d| d.0 > RANK_TOL);

    let labels = errors.labels();
    let nk = codebook.words().len();
    let subspaces: Vec<SyndromeSubspace> = directions
        .par_iter()
        .map(|(d, col)| {
            let scale = 1.0 / d.sqrt();
            let basis = (0..nk)
                .map(|k| {
                    let mut v = QuditState::zero(params.n, CODE_REGISTERS);
                    for (a, u) in col.iter().enumerate() {
                        if u.norm() > 1e-14 {
                            v.add_scaled(*u * scale, &images[a][k]).expect("same shape");
                        }
                    }
                    v
                })
                .collect();
            let dominant = col
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                .map_or(0, |(a, _)| a);
            let label = if diagonal_lambda {
                labels[dominant].clone()
            } else {
                format!("~{}", labels[dominant])
            };
            SyndromeSubspace {
                label,
                weight: *d,
                basis,
            }
        })
        .collect();

    let corrected: usize = subspaces.iter().map(|s| s.basis.len()).sum();
    Ok(RecoveryPlan {
        params,
        codewords: codebook.words().to_vec(),
        leftover_projector_rank: params.space_dim(CODE_REGISTERS) - corrected,
        subspaces,
        spectrum,
        diagonal_lambda,
    })
}

/// `|<a|b>|^2 / (<a|a><b|b>)`.
pub fn logical_fidelity(a: &QuditState, b: &QuditState) -> Result<f64> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(QeccError::ZeroNorm);
    }
    Ok(inner_product(a, b)?.norm_sqr() / (na * nb))
}
