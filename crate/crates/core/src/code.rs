//! The five-register codewords.
//!
//! Logical `|k>` maps to
//! `n^(-3/2) sum_{p,q,r} omega^(k(p+q+r) + p r) |p+q+k, p+r, q+r, p, q>`
//! with every sum taken modulo `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QeccError, Result};
use crate::math::{index_of, inner_product, CodeParams, QuditState};

pub const CODE_REGISTERS: usize = 5;

/// A logical basis label `0 <= k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalIndex(usize);

impl LogicalIndex {
    pub fn new(k: usize, params: &CodeParams) -> Result<Self> {
        if k >= params.n {
            return Err(QeccError::LogicalIndexOutOfRange { k, n: params.n });
        }
        Ok(Self(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// One `(p, q, r)` term of a codeword expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodingTerm {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// `k(p+q+r) + p r mod n`.
    pub phase_exponent: usize,
    /// `(p+q+k, p+r, q+r, p, q) mod n`.
    pub ket_digits: [usize; 5],
}

/// All `n^3` terms of the expansion of logical `k`, in `(p, q, r)`
/// lexicographic order.
pub fn encoding_terms(params: &CodeParams, k: LogicalIndex) -> Vec<EncodingTerm> {
    let n = params.n;
    let k = k.get();
    let mut terms = Vec::with_capacity(n * n * n);
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                terms.push(EncodingTerm {
                    p,
                    q,
                    r,
                    phase_exponent: (k * (p + q + r) + p * r) % n,
                    ket_digits: [(p + q + k) % n, (p + r) % n, (q + r) % n, p, q],
                });
            }
        }
    }
    terms
}

/// The codeword `|k_Enc>`.
pub fn encode(params: &CodeParams, k: usize) -> Result<QuditState> {
    let k = LogicalIndex::new(k, params)?;
    let n = params.n;
    let scale = (n as f64).powf(-1.5);
    let mut state = QuditState::zero(n, CODE_REGISTERS);
    let amps = state.amps_mut();
    for term in encoding_terms(params, k) {
        amps[index_of(n, &term.ket_digits)] += params.omega_pow(term.phase_exponent as i64) * scale;
    }
    Ok(state)
}

/// All `n` codewords, built once.
#[derive(Debug, Clone)]
pub struct Codebook {
    params: CodeParams,
    words: Vec<QuditState>,
}

impl Codebook {
    pub fn build(params: &CodeParams) -> Self {
        let words = (0..params.n)
            .map(|k| encode(params, k).expect("k < n by construction"))
            .collect();
        Self {
            params: *params,
            words,
        }
    }

    /// A codebook with caller-supplied words, e.g. a transformed or
    /// deliberately corrupted code.
    pub fn from_words(params: &CodeParams, words: Vec<QuditState>) -> Result<Self> {
        if words.len() != params.n {
            return Err(QeccError::DimensionMismatch(format!(
                "expected {} words, got {}",
                params.n,
                words.len()
            )));
        }
        for w in &words {
            if w.n() != params.n || w.registers() != CODE_REGISTERS {
                return Err(QeccError::DimensionMismatch(
                    "codewords must be five-register states of matching n".into(),
                ));
            }
        }
        Ok(Self {
            params: *params,
            words,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn words(&self) -> &[QuditState] {
        &self.words
    }

    pub fn word(&self, k: usize) -> &QuditState {
        &self.words[k]
    }

    /// `sum_k c_k |k_Enc>`.
    pub fn encode_superposition(&self, coeffs: &[Complex64]) -> Result<QuditState> {
        if coeffs.len() != self.words.len() {
            return Err(QeccError::DimensionMismatch(format!(
                "{} coefficients for {} codewords",
                coeffs.len(),
                self.words.len()
            )));
        }
        let mut out = QuditState::zero(self.params.n, CODE_REGISTERS);
        for (c, w) in coeffs.iter().zip(&self.words) {
            out.add_scaled(*c, w)?;
        }
        Ok(out)
    }

    /// `max |<j|k> - delta_jk|`.
    pub fn gram_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, a) in self.words.iter().enumerate() {
            for (k, b) in self.words.iter().enumerate() {
                let g = inner_product(a, b).expect("same shape");
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// JSON export of one codeword: amplitudes in basis-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodewordJson {
    pub n: usize,
    pub k: usize,
    pub amps: Vec<[f64; 2]>,
}

impl CodewordJson {
    pub fn from_state(k: usize, state: &QuditState) -> Self {
        Self {
            n: state.n(),
            k,
            amps: state.amps().iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<QuditState> {
        let amps = self
            .amps
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        QuditState::from_amps(self.n, CODE_REGISTERS, amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::digits_of;

    #[test]
    fn rejects_out_of_range_k() {
        let params = CodeParams::new(3).unwrap();
        assert_eq!(
            encode(&params, 3),
            Err(QeccError::LogicalIndexOutOfRange { k: 3, n: 3 })
        );
    }

    #[test]
    fn n3_vacuum_amplitude_comes_from_a_single_term() {
        let params = CodeParams::new(3).unwrap();
        let k = LogicalIndex::new(0, &params).unwrap();
        let hits: Vec<_> = encoding_terms(&params, k)
            .into_iter()
            .filter(|t| t.ket_digits == [0; 5])
            .collect();
        assert_eq!(hits.len(), 1);
        assert_eq!((hits[0].p, hits[0].q, hits[0].r), (0, 0, 0));
        let word = encode(&params, 0).unwrap();
        let a = word.amp(&[0, 0, 0, 0, 0]);
        assert!((a.re - 3f64.powf(-1.5)).abs() < 1e-12 && a.im.abs() < 1e-12);
    }

    #[test]
    fn ket_digits_recover_term_and_logical_label() {
        for n in 2..=5 {
            let params = CodeParams::new(n).unwrap();
            let mut seen = std::collections::HashSet::new();
            for k in 0..n {
                let k = LogicalIndex::new(k, &params).unwrap();
                for t in encoding_terms(&params, k) {
                    let [d1, d2, d3, d4, d5] = t.ket_digits;
                    assert_eq!(d3, (d5 + t.r) % n);
                    let r = (d2 + n - d4) % n;
                    let kk = (d1 + 2 * n - d4 - d5) % n;
                    assert_eq!((d4, d5, r, kk), (t.p, t.q, t.r, k.get()));
                    assert!(seen.insert(t.ket_digits), "duplicate ket across codebook");
                }
            }
            assert_eq!(seen.len(), n.pow(4));
        }
    }

    #[test]
    fn codebook_census() {
        for n in 2..=5 {
            let params = CodeParams::new(n).unwrap();
            let book = Codebook::build(&params);
            assert!(book.gram_residual() < 1e-10, "n = {n}");
            let modulus = (n as f64).powf(-1.5);
            for w in book.words() {
                assert_eq!(w.support_size(1e-10), n.pow(3));
                for a in w.amps().iter().filter(|a| a.norm() > 1e-10) {
                    assert!((a.norm() - modulus).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let params = CodeParams::new(2).unwrap();
        let w = encode(&params, 1).unwrap();
        let json = serde_json::to_string(&CodewordJson::from_state(1, &w)).unwrap();
        let back: CodewordJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k, 1);
        assert_eq!(back.to_state().unwrap(), w);
        assert_eq!(digits_of(2, 5, 16), vec![1, 0, 0, 0, 0]);
        assert_eq!(back.amps[16], [0.125f64.sqrt(), 0.0]);
    }

    #[test]
    fn from_words_validates() {
        let params = CodeParams::new(3).unwrap();
        let book = Codebook::build(&params);
        assert!(Codebook::from_words(&params, book.words()[..2].to_vec()).is_err());
        let wrong = vec![QuditState::zero(3, 4); 3];
        assert!(Codebook::from_words(&params, wrong).is_err());
    }
}
