//! Relation between the qubit (`n = 2`) instance of the five-register code
//! and the Laflamme-Miquel-Paz-Zurek perfect code.
//!
//! The transform is a register permutation followed by the diagonal phase
//! `-1` on kets where `p + r + k` is even. On a basis ket `|d1,...,d5>` of
//! the untransformed code the summation labels are recovered as
//! `p = d4`, `r = d2 - d4`, `k = d1 - d4 - d5` (mod 2), so the phase is a
//! well-defined diagonal unitary on the whole space.
//!
//! The reference family is
//! `|k> -> 8^(-1/2) sum (-1)^((p+1)(r+1) + k(p+q+r+1)) |f, p, p+r, q, q+r>`
//! where the first register `f` is written `p+q+1` in the published form.
//! [`FirstRegister`] selects between that reading and `p+q+k`.

use serde::{Deserialize, Serialize};

use crate::code::{Codebook, CODE_REGISTERS};
use crate::error::{QeccError, Result};
use crate::kl::compute_lambda;
use crate::math::{digits_of, index_of, max_abs, CodeParams, QuditState};
use crate::pauli::{full_pauli_error_set, shift_op};

/// A permutation of the five register positions.
///
/// `dest[i]` is the 0-based position that register `i + 1` moves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterPermutation {
    dest: [usize; CODE_REGISTERS],
}

impl RegisterPermutation {
    pub fn identity() -> Self {
        Self {
            dest: [0, 1, 2, 3, 4],
        }
    }

    fn from_dest(dest: [usize; CODE_REGISTERS]) -> Result<Self> {
        let mut seen = [false; CODE_REGISTERS];
        for &d in &dest {
            if d >= CODE_REGISTERS || seen[d] {
                return Err(QeccError::InvalidPermutation(format!("{dest:?}")));
            }
            seen[d] = true;
        }
        Ok(Self { dest })
    }

    /// Cycle notation over 1-based registers: each listed register moves to
    /// the position of the next one, the last wraps to the first.
    pub fn from_cycle(cycle: &[usize]) -> Result<Self> {
        let mut dest = [0, 1, 2, 3, 4];
        let mut seen = [false; CODE_REGISTERS];
        for (i, &r) in cycle.iter().enumerate() {
            if r == 0 || r > CODE_REGISTERS || seen[r - 1] {
                return Err(QeccError::InvalidPermutation(format!("cycle {cycle:?}")));
            }
            seen[r - 1] = true;
            dest[r - 1] = cycle[(i + 1) % cycle.len()] - 1;
        }
        Self::from_dest(dest)
    }

    /// One-line notation: register `i` moves to position `positions[i-1]`.
    pub fn from_destinations(positions: &[usize; CODE_REGISTERS]) -> Result<Self> {
        let mut dest = [0; CODE_REGISTERS];
        for (i, &p) in positions.iter().enumerate() {
            if p == 0 {
                return Err(QeccError::InvalidPermutation(format!("{positions:?}")));
            }
            dest[i] = p - 1;
        }
        Self::from_dest(dest)
    }

    /// One-line notation: position `i` receives register `sources[i-1]`.
    pub fn from_sources(sources: &[usize; CODE_REGISTERS]) -> Result<Self> {
        let mut dest = [usize::MAX; CODE_REGISTERS];
        for (pos, &r) in sources.iter().enumerate() {
            if r == 0 || r > CODE_REGISTERS {
                return Err(QeccError::InvalidPermutation(format!("{sources:?}")));
            }
            dest[r - 1] = pos;
        }
        Self::from_dest(dest)
    }

    pub fn inverse(&self) -> Self {
        let mut dest = [0; CODE_REGISTERS];
        for (i, &d) in self.dest.iter().enumerate() {
            dest[d] = i;
        }
        Self { dest }
    }

    /// `self` after `first`.
    pub fn after(&self, first: &RegisterPermutation) -> Self {
        let mut dest = [0; CODE_REGISTERS];
        for (i, slot) in dest.iter_mut().enumerate() {
            *slot = self.dest[first.dest[i]];
        }
        Self { dest }
    }

    /// 1-based destinations, for reports.
    pub fn destinations(&self) -> [usize; CODE_REGISTERS] {
        self.dest.map(|d| d + 1)
    }

    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        if state.registers() != CODE_REGISTERS {
            return Err(QeccError::DimensionMismatch(
                "five-register state required".into(),
            ));
        }
        let n = state.n();
        let mut out = QuditState::zero(n, CODE_REGISTERS);
        let amps = out.amps_mut();
        let mut moved = [0; CODE_REGISTERS];
        for (idx, amp) in state.amps().iter().enumerate() {
            let digits = digits_of(n, CODE_REGISTERS, idx);
            for (i, d) in digits.iter().enumerate() {
                moved[self.dest[i]] = *d;
            }
            amps[index_of(n, &moved)] = *amp;
        }
        Ok(out)
    }
}

/// The readings of the label `P(13524)` that the report tries.
pub fn candidate_readings() -> Vec<(&'static str, RegisterPermutation)> {
    let cycle = RegisterPermutation::from_cycle(&[1, 3, 5, 2, 4]).expect("valid cycle");
    vec![
        ("cycle (1 3 5 2 4)", cycle),
        ("inverse cycle", cycle.inverse()),
        (
            "register i -> position [1,3,5,2,4][i]",
            RegisterPermutation::from_destinations(&[1, 3, 5, 2, 4]).expect("valid"),
        ),
        (
            "position i <- register [1,3,5,2,4][i]",
            RegisterPermutation::from_sources(&[1, 3, 5, 2, 4]).expect("valid"),
        ),
    ]
}

/// `-1` when `p + r + k` is even, with the labels read off the digits of
/// the untransformed code.
pub fn phase_sign(digits: &[usize]) -> f64 {
    let parity = (digits[0] + digits[1] + digits[3] + digits[4]) % 2;
    if parity == 0 {
        -1.0
    } else {
        1.0
    }
}

fn require_qubits(state: &QuditState) -> Result<()> {
    if state.n() != 2 {
        return Err(QeccError::UnsupportedDimension {
            expected: 2,
            got: state.n(),
        });
    }
    if state.registers() != CODE_REGISTERS {
        return Err(QeccError::DimensionMismatch(
            "five-register state required".into(),
        ));
    }
    Ok(())
}

/// Phase on the original digits, then the register permutation.
pub fn laflamme_transform_with(
    state: &QuditState,
    perm: &RegisterPermutation,
) -> Result<QuditState> {
    require_qubits(state)?;
    let mut phased = state.clone();
    for (idx, amp) in phased.amps_mut().iter_mut().enumerate() {
        *amp *= phase_sign(&digits_of(2, CODE_REGISTERS, idx));
    }
    perm.apply(&phased)
}

/// [`laflamme_transform_with`] using the cycle reading `(1 3 5 2 4)`.
pub fn laflamme_transform(state: &QuditState) -> Result<QuditState> {
    let cycle = RegisterPermutation::from_cycle(&[1, 3, 5, 2, 4])?;
    laflamme_transform_with(state, &cycle)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FirstRegister {
    /// `|p+q+1>` for both logical states.
    Printed,
    /// `|p+q+k>`.
    LogicalShift,
}

/// Codeword `k` of the reference perfect code.
pub fn reference_word(k: usize, first: FirstRegister) -> Result<QuditState> {
    if k > 1 {
        return Err(QeccError::LogicalIndexOutOfRange { k, n: 2 });
    }
    let scale = 8f64.sqrt().recip();
    let mut state = QuditState::zero(2, CODE_REGISTERS);
    let amps = state.amps_mut();
    for p in 0..2 {
        for q in 0..2 {
            for r in 0..2 {
                let f = match first {
                    FirstRegister::Printed => p + q + 1,
                    FirstRegister::LogicalShift => p + q + k,
                };
                let exponent = (p + 1) * (r + 1) + k * (p + q + r + 1);
                let sign = if exponent.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                };
                let digits = [f % 2, p, (p + r) % 2, q, (q + r) % 2];
                amps[index_of(2, &digits)] += sign * scale;
            }
        }
    }
    Ok(state)
}

pub fn reference_codebook(first: FirstRegister) -> Result<Codebook> {
    let params = CodeParams::new(2)?;
    Codebook::from_words(
        &params,
        vec![reference_word(0, first)?, reference_word(1, first)?],
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadingComparison {
    pub reading: String,
    pub destinations: [usize; CODE_REGISTERS],
    /// `max |transformed_k - reference_k|` per `k` against the printed form.
    pub printed_max_diff: Vec<f64>,
    pub matches_printed: bool,
    /// Same against the `p+q+k` form.
    pub logical_shift_max_diff: Vec<f64>,
    pub matches_logical_shift: bool,
    /// Whether `transformed_k = X^(k-1) @ position 1` of the printed word for
    /// every `k`, i.e. the mismatch is confined to the first register.
    pub mismatch_is_first_register_shift: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeResiduals {
    pub diag_residual: f64,
    pub offdiag_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaflammeReport {
    pub readings: Vec<ReadingComparison>,
    /// First reading that reproduces the reference family exactly.
    pub matching_reading: Option<String>,
    pub transformed_code: CodeResiduals,
    pub printed_family: CodeResiduals,
    pub logical_shift_family: CodeResiduals,
    /// `max |lambda_transformed - lambda_reference|` over the full Pauli set,
    /// for the matching reading against the `p+q+k` family.
    pub lambda_max_diff_logical_shift: Option<f64>,
    /// Same against the printed family.
    pub lambda_max_diff_printed: Option<f64>,
}

const MATCH_TOL: f64 = 1e-12;

fn residuals(book: &Codebook) -> Result<CodeResiduals> {
    let params = *book.params();
    let lm = compute_lambda(book, &full_pauli_error_set(&params))?;
    Ok(CodeResiduals {
        diag_residual: lm.diag_residual,
        offdiag_residual: lm.offdiag_residual,
    })
}

/// Compares the transformed qubit code against both readings of the
/// reference family, for every candidate reading of the permutation.
pub fn laflamme_report() -> Result<LaflammeReport> {
    let params = CodeParams::new(2)?;
    let ours = Codebook::build(&params);
    let printed = reference_codebook(FirstRegister::Printed)?;
    let shifted = reference_codebook(FirstRegister::LogicalShift)?;
    let x = shift_op(2);

    let mut readings = Vec::new();
    let mut matching: Option<(String, Codebook)> = None;
    for (name, perm) in candidate_readings() {
        let words: Vec<QuditState> = ours
            .words()
            .iter()
            .map(|w| laflamme_transform_with(w, &perm))
            .collect::<Result<_>>()?;
        let mut printed_diff = Vec::new();
        let mut shifted_diff = Vec::new();
        let mut first_register_only = true;
        for (k, w) in words.iter().enumerate() {
            printed_diff.push(w.max_abs_diff(printed.word(k))?);
            shifted_diff.push(w.max_abs_diff(shifted.word(k))?);
            let candidate = if k == 1 {
                printed.word(k).clone()
            } else {
                crate::math::apply_on_register(&x, 1, printed.word(k))?
            };
            first_register_only &= w.max_abs_diff(&candidate)? < MATCH_TOL;
        }
        let matches_printed = printed_diff.iter().all(|d| *d < MATCH_TOL);
        let matches_shift = shifted_diff.iter().all(|d| *d < MATCH_TOL);
        if matching.is_none() && (matches_printed || matches_shift) {
            matching = Some((name.to_string(), Codebook::from_words(&params, words)?));
        }
        readings.push(ReadingComparison {
            reading: name.to_string(),
            destinations: perm.destinations(),
            printed_max_diff: printed_diff,
            matches_printed,
            logical_shift_max_diff: shifted_diff,
            matches_logical_shift: matches_shift,
            mismatch_is_first_register_shift: first_register_only,
        });
    }

    let errors = full_pauli_error_set(&params);
    let lambda_printed = compute_lambda(&printed, &errors)?;
    let lambda_shifted = compute_lambda(&shifted, &errors)?;
    let (diff_shift, diff_printed) = match &matching {
        Some((_, book)) => {
            let ours = compute_lambda(book, &errors)?;
            (
                Some(max_abs(&(&ours.lambda - &lambda_shifted.lambda))),
                Some(max_abs(&(&ours.lambda - &lambda_printed.lambda))),
            )
        }
        None => (None, None),
    };
    let transformed_code = match &matching {
        Some((_, book)) => residuals(book)?,
        None => {
            let words = ours
                .words()
                .iter()
                .map(laflamme_transform)
                .collect::<Result<Vec<_>>>()?;
            residuals(&Codebook::from_words(&params, words)?)?
        }
    };
    Ok(LaflammeReport {
        readings,
        matching_reading: matching.map(|(name, _)| name),
        transformed_code,
        printed_family: CodeResiduals {
            diag_residual: lambda_printed.diag_residual,
            offdiag_residual: lambda_printed.offdiag_residual,
        },
        logical_shift_family: CodeResiduals {
            diag_residual: lambda_shifted.diag_residual,
            offdiag_residual: lambda_shifted.offdiag_residual,
        },
        lambda_max_diff_logical_shift: diff_shift,
        lambda_max_diff_printed: diff_printed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_has_order_five() {
        let cycle = RegisterPermutation::from_cycle(&[1, 3, 5, 2, 4]).unwrap();
        let mut p = RegisterPermutation::identity();
        for i in 1..=5 {
            p = cycle.after(&p);
            assert_eq!(p == RegisterPermutation::identity(), i == 5);
        }
        assert_eq!(
            cycle.after(&cycle.inverse()),
            RegisterPermutation::identity()
        );
    }

    #[test]
    fn cycle_destinations() {
        let cycle = RegisterPermutation::from_cycle(&[1, 3, 5, 2, 4]).unwrap();
        assert_eq!(cycle.destinations(), [3, 4, 5, 1, 2]);
        let dest = RegisterPermutation::from_destinations(&[1, 3, 5, 2, 4]).unwrap();
        assert_eq!(
            RegisterPermutation::from_sources(&[1, 4, 2, 5, 3]).unwrap(),
            dest
        );
        assert!(RegisterPermutation::from_cycle(&[1, 1]).is_err());
        assert!(RegisterPermutation::from_destinations(&[1, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn permutation_moves_digits() {
        let perm = RegisterPermutation::from_destinations(&[1, 3, 5, 2, 4]).unwrap();
        let s = QuditState::basis(3, &[0, 1, 2, 0, 0]).unwrap();
        // register 2 -> position 3, register 3 -> position 5
        assert_eq!(
            perm.apply(&s).unwrap(),
            QuditState::basis(3, &[0, 0, 1, 0, 2]).unwrap()
        );
    }

    #[test]
    fn phase_is_an_involution() {
        let params = CodeParams::new(2).unwrap();
        let w = crate::code::encode(&params, 1).unwrap();
        let id = RegisterPermutation::identity();
        let twice =
            laflamme_transform_with(&laflamme_transform_with(&w, &id).unwrap(), &id).unwrap();
        assert!(twice.max_abs_diff(&w).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_non_qubits() {
        let params = CodeParams::new(3).unwrap();
        let w = crate::code::encode(&params, 0).unwrap();
        assert_eq!(
            laflamme_transform(&w),
            Err(QeccError::UnsupportedDimension {
                expected: 2,
                got: 3
            })
        );
    }

    #[test]
    fn reference_words_are_orthonormal() {
        for first in [FirstRegister::Printed, FirstRegister::LogicalShift] {
            let book = reference_codebook(first).unwrap();
            assert!(book.gram_residual() < 1e-12);
        }
    }
}
