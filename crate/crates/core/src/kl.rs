//! Error-correction condition sweep.
//!
//! For errors `A, B` and codewords `|k>, |k'>` the code corrects the error
//! set iff `<k|A^dagger B|k'> = lambda(A, B) delta(k, k')`. The sweep
//! precomputes every image `E|k>` once so that each matrix element is a
//! single vector dot product.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::Codebook;
use crate::error::{QeccError, Result};
use crate::math::{dot, max_abs, CodeParams, DenseOperator, QuditState, LAMBDA_TOL, ZERO};
use crate::pauli::ErrorSet;

/// Residuals above this are a definite violation; between [`LAMBDA_TOL`]
/// and this they are reported as a gray zone.
pub const HARD_FAIL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    GrayZone,
    Fail,
}

impl Verdict {
    pub fn classify(residual: f64) -> Self {
        if residual < LAMBDA_TOL {
            Verdict::Pass
        } else if residual <= HARD_FAIL_TOL {
            Verdict::GrayZone
        } else {
            Verdict::Fail
        }
    }
}

/// The matrix entry responsible for the largest violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstPair {
    pub labels: [String; 2],
    pub k: usize,
    #[serde(rename = "k'")]
    pub k_prime: usize,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct LambdaMatrix {
    pub params: CodeParams,
    pub error_labels: Vec<String>,
    /// `lambda[(a, b)]` is the `k`-average of `<k|A^dagger B|k>`.
    pub lambda: DMatrix<Complex64>,
    pub diag_residual: f64,
    pub offdiag_residual: f64,
    pub hermiticity_residual: f64,
    pub worst_pair: WorstPair,
}

impl LambdaMatrix {
    pub fn passes(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn verdict(&self) -> Verdict {
        Verdict::classify(self.diag_residual.max(self.offdiag_residual))
    }

    /// Eigenvalues of the Hermitian part of `lambda`, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let herm = (&self.lambda + self.lambda.adjoint()).map(|z| z * 0.5);
        let mut eig: Vec<f64> = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(f64::total_cmp);
        eig
    }
}

/// `images[e][k] = E_e |k_Enc>`.
pub fn error_images(codebook: &Codebook, errors: &ErrorSet) -> Result<Vec<Vec<QuditState>>> {
    check_params(codebook, errors)?;
    errors
        .errors()
        .par_iter()
        .map(|e| codebook.words().iter().map(|w| e.apply(w)).collect())
        .collect()
}

fn check_params(codebook: &Codebook, errors: &ErrorSet) -> Result<()> {
    if codebook.params().n != errors.params().n {
        return Err(QeccError::DimensionMismatch(format!(
            "codebook n = {}, error set n = {}",
            codebook.params().n,
            errors.params().n
        )));
    }
    Ok(())
}

struct RowResult {
    row: Vec<Complex64>,
    diag: (f64, usize, usize, usize),
    offdiag: (f64, usize, usize, usize),
}

pub fn compute_lambda(codebook: &Codebook, errors: &ErrorSet) -> Result<LambdaMatrix> {
    let images = error_images(codebook, errors)?;
    Ok(lambda_from_images(
        codebook.params(),
        errors.labels(),
        &images,
    ))
}

/// Builds the lambda matrix from precomputed images `images[e][k]`.
pub fn lambda_from_images(
    params: &CodeParams,
    labels: Vec<String>,
    images: &[Vec<QuditState>],
) -> LambdaMatrix {
    let m = images.len();
    let nk = images.first().map_or(0, Vec::len);
    let rows: Vec<RowResult> = (0..m)
        .into_par_iter()
        .map(|a| {
            let mut row = vec![ZERO; m];
            let mut diag = (0.0, 0, 0, 0);
            let mut offdiag = (0.0, 0, 0, 0);
            let mut gram = vec![ZERO; nk * nk];
            for (b, slot) in row.iter_mut().enumerate() {
                for k in 0..nk {
                    for kp in 0..nk {
                        gram[k * nk + kp] = dot(images[a][k].amps(), images[b][kp].amps());
                    }
                }
                let mean: Complex64 =
                    (0..nk).map(|k| gram[k * nk + k]).sum::<Complex64>() / nk as f64;
                *slot = mean;
                for k in 0..nk {
                    for kp in 0..nk {
                        let g = gram[k * nk + kp];
                        if k == kp {
                            let dev = (g - mean).norm();
                            if dev > diag.0 {
                                diag = (dev, b, k, kp);
                            }
                        } else if g.norm() > offdiag.0 {
                            offdiag = (g.norm(), b, k, kp);
                        }
                    }
                }
            }
            RowResult { row, diag, offdiag }
        })
        .collect();

    let mut lambda = DMatrix::from_element(m, m, ZERO);
    let mut diag = (0.0, 0, 0, 0, 0);
    let mut offdiag = (0.0, 0, 0, 0, 0);
    for (a, r) in rows.iter().enumerate() {
        for (b, v) in r.row.iter().enumerate() {
            lambda[(a, b)] = *v;
        }
        if r.diag.0 > diag.0 {
            diag = (r.diag.0, a, r.diag.1, r.diag.2, r.diag.3);
        }
        if r.offdiag.0 > offdiag.0 {
            offdiag = (r.offdiag.0, a, r.offdiag.1, r.offdiag.2, r.offdiag.3);
        }
    }
    let worst = if offdiag.0 >= diag.0 { offdiag } else { diag };
    let hermiticity_residual = max_abs(&(&lambda - lambda.adjoint()));
    LambdaMatrix {
        params: *params,
        worst_pair: WorstPair {
            labels: [labels[worst.1].clone(), labels[worst.2].clone()],
            k: worst.3,
            k_prime: worst.4,
            residual: worst.0,
        },
        error_labels: labels,
        lambda,
        diag_residual: diag.0,
        offdiag_residual: offdiag.0,
        hermiticity_residual,
    }
}

/// `(diag_residual, offdiag_residual)` of the error-correction conditions.
pub fn kl_residual(codebook: &Codebook, errors: &ErrorSet) -> Result<(f64, f64)> {
    let lm = compute_lambda(codebook, errors)?;
    Ok((lm.diag_residual, lm.offdiag_residual))
}

/// Serialized form of a verification sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n: usize,
    pub error_count: usize,
    pub diag_residual: f64,
    pub offdiag_residual: f64,
    pub lambda_hermiticity_residual: f64,
    pub worst_pair: WorstPair,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_seconds: Option<f64>,
}

/// Full sweep of `codebook` against `errors`, timed.
pub fn verify(
    codebook: &Codebook,
    errors: &ErrorSet,
) -> Result<(LambdaMatrix, VerificationReport)> {
    let start = Instant::now();
    let lm = compute_lambda(codebook, errors)?;
    let report = VerificationReport {
        n: codebook.params().n,
        error_count: errors.len(),
        diag_residual: lm.diag_residual,
        offdiag_residual: lm.offdiag_residual,
        lambda_hermiticity_residual: lm.hermiticity_residual,
        worst_pair: lm.worst_pair.clone(),
        verdict: lm.verdict(),
        elapsed_seconds: Some(start.elapsed().as_secs_f64()),
    };
    Ok((lm, report))
}

/// Closed-form `lambda` for `E_alpha` on register 1 and `E_beta` on
/// register 4: `(1/n^2) sum_{p,q} <p+q|E_alpha^dagger|p+q> <p|E_beta|p>`.
pub fn closed_form_lambda_14(
    params: &CodeParams,
    alpha: &DenseOperator,
    beta: &DenseOperator,
) -> Complex64 {
    let n = params.n;
    let ad = alpha.adjoint();
    let mut acc = ZERO;
    for p in 0..n {
        for q in 0..n {
            acc += ad.get((p + q) % n, (p + q) % n) * beta.get(p, p);
        }
    }
    acc / (n * n) as f64
}

/// Registers 1 and 2: `(1/n^2) sum_{x,y} <x|E_alpha^dagger|x> <y|E_beta|y>`.
pub fn closed_form_lambda_12(
    params: &CodeParams,
    alpha: &DenseOperator,
    beta: &DenseOperator,
) -> Complex64 {
    let n = params.n;
    let ad = alpha.adjoint();
    let mut acc = ZERO;
    for x in 0..n {
        for y in 0..n {
            acc += ad.get(x, x) * beta.get(y, y);
        }
    }
    acc / (n * n) as f64
}

/// Registers 2 and 3. After relabeling, the matrix elements
/// `<y|E_alpha^dagger|y+x> <z|E_beta|z+x>` carry the phase
/// `omega^(x(u+k))`; the sum over `u` keeps only `x = 0`, leaving
/// `(1/n^2) sum_{y,z} <y|E_alpha^dagger|y> <z|E_beta|z>`.
pub fn closed_form_lambda_23(
    params: &CodeParams,
    alpha: &DenseOperator,
    beta: &DenseOperator,
) -> Complex64 {
    let n = params.n;
    let ad = alpha.adjoint();
    let mut acc = ZERO;
    for y in 0..n {
        for z in 0..n {
            acc += ad.get(y, y) * beta.get(z, z);
        }
    }
    acc / (n * n) as f64
}

/// Registers 4 and 5: `(1/n^2) sum_{p,q} <p|E_alpha^dagger|p> <q|E_beta|q>`.
pub fn closed_form_lambda_45(
    params: &CodeParams,
    alpha: &DenseOperator,
    beta: &DenseOperator,
) -> Complex64 {
    let n = params.n;
    let ad = alpha.adjoint();
    let mut acc = ZERO;
    for p in 0..n {
        for q in 0..n {
            acc += ad.get(p, p) * beta.get(q, q);
        }
    }
    acc / (n * n) as f64
}

/// Both errors on the same register: every one-register marginal of a
/// codeword is maximally mixed, so `lambda = tr(E_alpha^dagger E_beta) / n`.
pub fn closed_form_lambda_same_register(
    params: &CodeParams,
    alpha: &DenseOperator,
    beta: &DenseOperator,
) -> Complex64 {
    alpha
        .adjoint()
        .compose(beta)
        .expect("matching dims")
        .trace()
        / params.n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Codebook;
    use crate::math::{embed_on_register, ONE};
    use crate::pauli::{clock_op, full_pauli_error_set, shift_op, RegisterError};

    #[test]
    fn identity_pair() {
        let params = CodeParams::new(3).unwrap();
        let book = Codebook::build(&params);
        let errors = ErrorSet::new(&params, vec![]).unwrap();
        let lm = compute_lambda(&book, &errors).unwrap();
        assert!((lm.lambda[(0, 0)] - ONE).norm() < 1e-10);
        assert!(lm.diag_residual < 1e-10);
        assert!(lm.offdiag_residual < 1e-10);
    }

    #[test]
    fn z1_z4_vanishes_for_qubits() {
        let params = CodeParams::new(2).unwrap();
        let book = Codebook::build(&params);
        let errors = ErrorSet::new(
            &params,
            vec![
                RegisterError::pauli(&params, 1, 0, 1).unwrap(),
                RegisterError::pauli(&params, 4, 0, 1).unwrap(),
            ],
        )
        .unwrap();
        let lm = compute_lambda(&book, &errors).unwrap();
        assert!(lm.lambda[(1, 2)].norm() < 1e-12);
        let z = clock_op(2);
        assert!(closed_form_lambda_14(&params, &z, &z).norm() < 1e-12);

        // brute force through materialized operators
        let a = embed_on_register(&z, 1).unwrap();
        let b = embed_on_register(&z, 4).unwrap();
        let ab = a.adjoint().compose(&b).unwrap();
        for w in book.words() {
            let v = ab.apply_vec(w.amps());
            assert!(dot(w.amps(), &v).norm() < 1e-12);
        }
    }

    #[test]
    fn n3_x_on_register_two_against_brute_force() {
        let params = CodeParams::new(3).unwrap();
        let book = Codebook::build(&params);
        let x = shift_op(3);
        let e = RegisterError::pauli(&params, 2, 1, 0).unwrap();
        let errors = ErrorSet::new(&params, vec![e]).unwrap();
        let lm = compute_lambda(&book, &errors).unwrap();

        let full = embed_on_register(&x, 2).unwrap();
        let xx = full.adjoint().compose(&full).unwrap();
        for k in 0..3 {
            for kp in 0..3 {
                let v = xx.apply_vec(book.word(kp).amps());
                let g = dot(book.word(k).amps(), &v);
                let expected = if k == kp { lm.lambda[(1, 1)] } else { ZERO };
                assert!((g - expected).norm() < 1e-10);
            }
        }
        let closed = closed_form_lambda_same_register(&params, &x, &x);
        assert!((closed - lm.lambda[(1, 1)]).norm() < 1e-10);
        assert!((closed - ONE).norm() < 1e-12);
    }

    #[test]
    fn closed_forms_of_identity_are_one() {
        let params = CodeParams::new(4).unwrap();
        let id = DenseOperator::identity(4);
        for f in [
            closed_form_lambda_14,
            closed_form_lambda_12,
            closed_form_lambda_23,
            closed_form_lambda_45,
        ] {
            assert!((f(&params, &id, &id) - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn full_sweep_small_n() {
        for n in 2..=3 {
            let params = CodeParams::new(n).unwrap();
            let book = Codebook::build(&params);
            let errors = full_pauli_error_set(&params);
            let (lm, report) = verify(&book, &errors).unwrap();
            assert!(lm.passes(), "n = {n}: {report:?}");
            assert!(lm.hermiticity_residual < 1e-10);
            assert!(lm.spectrum()[0] > -1e-9);
            assert_eq!(report.error_count, errors.len());
        }
    }

    #[test]
    fn corrupted_codebook_fails() {
        let params = CodeParams::new(2).unwrap();
        let book = Codebook::build(&params);
        let mut words = book.words().to_vec();
        let idx = words[0].amps().iter().position(|a| a.norm() > 0.1).unwrap();
        words[0].amps_mut()[idx] = ZERO;
        let bad = Codebook::from_words(&params, words).unwrap();
        let (diag, offdiag) = kl_residual(&bad, &full_pauli_error_set(&params)).unwrap();
        assert!(offdiag > 1e-3, "offdiag = {offdiag}");
        assert!(diag > 1e-3);
        let lm = compute_lambda(&bad, &full_pauli_error_set(&params)).unwrap();
        assert_eq!(lm.verdict(), Verdict::Fail);
    }

    #[test]
    fn verdict_thresholds() {
        assert_eq!(Verdict::classify(1e-12), Verdict::Pass);
        assert_eq!(Verdict::classify(1e-8), Verdict::GrayZone);
        assert_eq!(Verdict::classify(1e-3), Verdict::Fail);
    }

    #[test]
    fn mismatched_params_rejected() {
        let book = Codebook::build(&CodeParams::new(2).unwrap());
        let errors = full_pauli_error_set(&CodeParams::new(3).unwrap());
        assert!(compute_lambda(&book, &errors).is_err());
    }
}
