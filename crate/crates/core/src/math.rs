//! Modular arithmetic, roots of unity and the dense complex algebra used by
//! every other module.
//!
//! Basis states of a register chain are indexed big-endian: for digits
//! `(d1, ..., dR)` the index is `d1 * n^(R-1) + ... + dR`, so register 1 is
//! the most significant digit. This matches left-to-right ket notation
//! `|d1, d2, ..., dR>`.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{QeccError, Result};

/// Comparison tolerance for state amplitudes.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Tolerance for sums accumulated over error pairs.
pub const LAMBDA_TOL: f64 = 1e-9;
/// Largest `n` for which full `n^5 x n^5` operators are materialized.
pub const MAX_MATERIALIZE_N: usize = 4;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Qudit dimension together with its primitive root of unity and the
/// comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeParams {
    pub n: usize,
    pub omega: Complex64,
    pub tol: f64,
}

impl CodeParams {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tol(n, DEFAULT_TOL)
    }

    pub fn with_tol(n: usize, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1e-6) {
            return Err(QeccError::InvalidTolerance(tol));
        }
        let omega = primitive_root(n)?;
        Ok(Self { n, omega, tol })
    }

    /// `omega^e`, reduced modulo `n` before exponentiation.
    pub fn omega_pow(&self, e: i64) -> Complex64 {
        root_pow(self.n, e)
    }

    pub fn modn(&self, x: i64) -> usize {
        x.rem_euclid(self.n as i64) as usize
    }

    /// Dimension of a chain of `registers` qudits.
    pub fn space_dim(&self, registers: usize) -> usize {
        self.n.pow(registers as u32)
    }
}

/// `exp(2 pi i / n)`.
pub fn primitive_root(n: usize) -> Result<Complex64> {
    if n < 2 {
        return Err(QeccError::InvalidDimension(n));
    }
    Ok(root_pow(n, 1))
}

/// `exp(2 pi i e / n)` with `e` reduced modulo `n` first so large exponents
/// do not lose precision.
pub fn root_pow(n: usize, e: i64) -> Complex64 {
    let e = e.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, TAU * e / n as f64)
}

/// `sum_{m=0}^{n-1} omega_n^(m k)`, evaluated term by term.
///
/// Equals `n` when `k = 0 mod n` and vanishes otherwise.
pub fn character_sum(n: usize, k: i64) -> Complex64 {
    (0..n as i64).map(|m| root_pow(n, m * k)).sum()
}

/// Big-endian mixed-radix index of `digits` in base `n`.
pub fn index_of(n: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d % n)
}

/// Inverse of [`index_of`] for a chain of `registers` qudits.
pub fn digits_of(n: usize, registers: usize, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; registers];
    for slot in digits.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    digits
}

/// Amplitude vector over a chain of `registers` qudits of dimension `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    n: usize,
    registers: usize,
    amps: Vec<Complex64>,
}

impl QuditState {
    pub fn zero(n: usize, registers: usize) -> Self {
        Self {
            n,
            registers,
            amps: vec![ZERO; n.pow(registers as u32)],
        }
    }

    /// The computational basis ket `|digits>`.
    pub fn basis(n: usize, digits: &[usize]) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d >= n) {
            return Err(QeccError::DimensionMismatch(format!(
                "digit {d} out of range for n = {n}"
            )));
        }
        let mut state = Self::zero(n, digits.len());
        state.amps[index_of(n, digits)] = ONE;
        Ok(state)
    }

    pub fn from_amps(n: usize, registers: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = n.pow(registers as u32);
        if amps.len() != expected {
            return Err(QeccError::DimensionMismatch(format!(
                "expected {expected} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(Self { n, registers, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn registers(&self) -> usize {
        self.registers
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amp(&self, digits: &[usize]) -> Complex64 {
        self.amps[index_of(self.n, digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(QeccError::ZeroNorm);
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            registers: self.registers,
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &QuditState) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
        Ok(())
    }

    /// Number of amplitudes with modulus above `tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.amps.iter().filter(|a| a.norm() > tol).count()
    }

    pub fn max_abs_diff(&self, other: &QuditState) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn check_same_shape(&self, other: &QuditState) -> Result<()> {
        if self.n != other.n || self.registers != other.registers {
            return Err(QeccError::DimensionMismatch(format!(
                "state shapes (n={}, registers={}) and (n={}, registers={})",
                self.n, self.registers, other.n, other.registers
            )));
        }
        Ok(())
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &QuditState, b: &QuditState) -> Result<Complex64> {
    a.check_same_shape(b)?;
    Ok(dot(&a.amps, &b.amps))
}

/// Raw `sum conj(a_i) b_i` without shape checks.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// A square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    mat: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(mat: DMatrix<Complex64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(QeccError::DimensionMismatch(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(QeccError::NonFinite);
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn compose(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(QeccError::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.dim(),
                self.dim(),
                rhs.dim(),
                rhs.dim()
            )));
        }
        Ok(Self {
            mat: &self.mat * &rhs.mat,
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            mat: self.mat.map(|z| z * c),
        }
    }

    pub fn plus(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(QeccError::DimensionMismatch("operator sum".into()));
        }
        Ok(Self {
            mat: &self.mat + &rhs.mat,
        })
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// `max |self - rhs|` over entries.
    pub fn max_abs_diff(&self, rhs: &DenseOperator) -> f64 {
        max_abs(&(&self.mat - &rhs.mat))
    }

    /// `max |(U^dagger U - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        max_abs(&(gram - DMatrix::<Complex64>::identity(self.dim(), self.dim())))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        max_abs(&(&self.mat - self.mat.adjoint()))
    }

    /// Matrix-vector product on a raw amplitude vector.
    pub fn apply_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let dim = self.dim();
        (0..dim)
            .map(|r| (0..dim).map(|c| self.mat[(r, c)] * v[c]).sum())
            .collect()
    }
}

/// Max-entry norm.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_register(register: usize, registers: usize) -> Result<()> {
    if register == 0 || register > registers {
        return Err(QeccError::RegisterOutOfRange {
            register,
            registers,
        });
    }
    Ok(())
}

/// Applies a one-register operator to `register` (1-based) of `state`
/// without materializing the full tensor product.
pub fn apply_on_register(
    op: &DenseOperator,
    register: usize,
    state: &QuditState,
) -> Result<QuditState> {
    let n = state.n;
    check_register(register, state.registers)?;
    if op.dim() != n {
        return Err(QeccError::DimensionMismatch(format!(
            "operator of dim {} on register of dim {n}",
            op.dim()
        )));
    }
    let stride = n.pow((state.registers - register) as u32);
    let block = stride * n;
    let mut out = vec![ZERO; state.amps.len()];
    let mut column = vec![ZERO; n];
    for base in (0..state.amps.len()).step_by(block) {
        for offset in 0..stride {
            for (d, slot) in column.iter_mut().enumerate() {
                *slot = state.amps[base + offset + d * stride];
            }
            for row in 0..n {
                let mut acc = ZERO;
                for (col, amp) in column.iter().enumerate() {
                    acc += op.mat[(row, col)] * amp;
                }
                out[base + offset + row * stride] = acc;
            }
        }
    }
    Ok(QuditState {
        n,
        registers: state.registers,
        amps: out,
    })
}

/// `I (x) ... (x) op (x) ... (x) I` on five registers with `op` in slot
/// `register` (1-based, register 1 most significant).
pub fn embed_on_register(op: &DenseOperator, register: usize) -> Result<DenseOperator> {
    embed_on_register_of(op, register, 5)
}

/// [`embed_on_register`] for a chain of arbitrary length.
pub fn embed_on_register_of(
    op: &DenseOperator,
    register: usize,
    registers: usize,
) -> Result<DenseOperator> {
    check_register(register, registers)?;
    let n = op.dim();
    if n > MAX_MATERIALIZE_N {
        return Err(QeccError::TooLarge {
            dim: n.pow(registers as u32),
        });
    }
    let left =
        DMatrix::<Complex64>::identity(n.pow(register as u32 - 1), n.pow(register as u32 - 1));
    let right_dim = n.pow((registers - register) as u32);
    let right = DMatrix::<Complex64>::identity(right_dim, right_dim);
    let mat = left.kronecker(&op.mat).kronecker(&right);
    Ok(DenseOperator { mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn primitive_roots() {
        let w2 = primitive_root(2).unwrap();
        assert_abs_diff_eq!(w2.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w2.im, 0.0, epsilon = 1e-15);
        let w4 = primitive_root(4).unwrap();
        assert_abs_diff_eq!(w4.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w4.im, 1.0, epsilon = 1e-15);
        let w3 = primitive_root(3).unwrap();
        assert_abs_diff_eq!(w3.re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w3.im, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_eq!(primitive_root(1), Err(QeccError::InvalidDimension(1)));
        assert_eq!(primitive_root(0), Err(QeccError::InvalidDimension(0)));
    }

    #[test]
    fn roots_are_primitive() {
        for n in 2..=8 {
            let w = primitive_root(n).unwrap();
            let mut p = ONE;
            for m in 1..n {
                p *= w;
                assert!((p - ONE).norm() > 1e-6, "omega^{m} = 1 for n = {n}");
            }
            assert!((p * w - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn params_validate_tolerance() {
        assert!(CodeParams::with_tol(3, 0.0).is_err());
        assert!(CodeParams::with_tol(3, 1e-6).is_err());
        assert!(CodeParams::with_tol(3, 1e-8).is_ok());
        assert_eq!(CodeParams::new(1), Err(QeccError::InvalidDimension(1)));
    }

    #[test]
    fn character_sum_examples() {
        assert_abs_diff_eq!(
            (character_sum(5, 0) - c(5.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(character_sum(5, 3).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(character_sum(2, 1).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(character_sum(3, -3).re, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..243 {
            assert_eq!(index_of(3, &digits_of(3, 5, idx)), idx);
        }
        assert_eq!(index_of(2, &[0, 0, 0, 0, 1]), 1);
        assert_eq!(index_of(2, &[1, 0, 0, 0, 0]), 16);
    }

    fn shift(n: usize) -> DenseOperator {
        DenseOperator::from_fn(n, |r, col| if r == (col + 1) % n { ONE } else { ZERO }).unwrap()
    }

    fn clock(n: usize) -> DenseOperator {
        DenseOperator::from_fn(n, |r, col| {
            if r == col {
                root_pow(n, r as i64)
            } else {
                ZERO
            }
        })
        .unwrap()
    }

    #[test]
    fn embed_examples() {
        let id = embed_on_register(&DenseOperator::identity(2), 3).unwrap();
        assert!(id.max_abs_diff(&DenseOperator::identity(32)) < 1e-15);

        let x5 = embed_on_register(&shift(2), 5).unwrap();
        let s = QuditState::basis(2, &[0, 0, 0, 0, 0]).unwrap();
        let out = x5.apply_vec(s.amps());
        let expected = QuditState::basis(2, &[0, 0, 0, 0, 1]).unwrap();
        assert_eq!(out, expected.amps());

        let z1 = embed_on_register(&clock(3), 1).unwrap();
        let s = QuditState::basis(3, &[2, 0, 0, 0, 0]).unwrap();
        let out = QuditState::from_amps(3, 5, z1.apply_vec(s.amps())).unwrap();
        let w = primitive_root(3).unwrap();
        assert!(out.max_abs_diff(&s.scaled(w * w)).unwrap() < 1e-12);

        assert!(matches!(
            embed_on_register(&shift(2), 6),
            Err(QeccError::RegisterOutOfRange { .. })
        ));
        assert!(matches!(
            embed_on_register(&shift(5), 1),
            Err(QeccError::TooLarge { .. })
        ));
    }

    #[test]
    fn slotwise_matches_materialized() {
        let n = 3;
        let op = shift(n)
            .compose(&clock(n))
            .unwrap()
            .plus(&clock(n).scaled(c(0.3, -0.2)))
            .unwrap();
        let amps: Vec<Complex64> = (0..243)
            .map(|i| c((i as f64).sin(), (i as f64 * 0.7).cos()))
            .collect();
        let state = QuditState::from_amps(n, 5, amps).unwrap();
        for reg in 1..=5 {
            let full = embed_on_register(&op, reg).unwrap();
            let a = full.apply_vec(state.amps());
            let b = apply_on_register(&op, reg, &state).unwrap();
            let diff = a
                .iter()
                .zip(b.amps())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "register {reg}: {diff}");
        }
    }

    #[test]
    fn apply_rejects_mismatch() {
        let state = QuditState::zero(3, 5);
        assert!(apply_on_register(&shift(2), 1, &state).is_err());
        assert!(apply_on_register(&shift(3), 0, &state).is_err());
    }

    #[test]
    fn inner_product_examples() {
        let a = QuditState::basis(3, &[0, 1, 2, 0, 0]).unwrap();
        let b = QuditState::basis(3, &[0, 1, 2, 0, 1]).unwrap();
        assert_eq!(inner_product(&a, &a).unwrap(), ONE);
        assert_eq!(inner_product(&a, &b).unwrap(), ZERO);
        let wrong = QuditState::zero(3, 4);
        assert!(inner_product(&a, &wrong).is_err());
    }

    #[test]
    fn dense_operator_rejects_nan() {
        let m = DMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert_eq!(DenseOperator::new(m), Err(QeccError::NonFinite));
        let m = DMatrix::from_element(2, 3, ONE);
        assert!(DenseOperator::new(m).is_err());
    }
}
