//! Single-register errors: generalized Pauli (shift/clock) products,
//! matrix units and arbitrary one-register operators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::code::CODE_REGISTERS;
use crate::error::{QeccError, Result};
use crate::math::{
    apply_on_register, dot, root_pow, CodeParams, DenseOperator, QuditState, ONE, ZERO,
};

/// `|m> -> |m+1 mod n>`.
pub fn shift_op(n: usize) -> DenseOperator {
    DenseOperator::from_fn(n, |row, col| if row == (col + 1) % n { ONE } else { ZERO })
        .expect("finite entries")
}

/// `|m> -> omega^m |m>`.
pub fn clock_op(n: usize) -> DenseOperator {
    DenseOperator::from_fn(n, |row, col| {
        if row == col {
            root_pow(n, row as i64)
        } else {
            ZERO
        }
    })
    .expect("finite entries")
}

/// `X^a Z^b`, i.e. `|m> -> omega^(b m) |m + a>`.
pub fn pauli_op(n: usize, a: usize, b: usize) -> DenseOperator {
    DenseOperator::from_fn(n, |row, col| {
        if row == (col + a) % n {
            root_pow(n, (b * col) as i64)
        } else {
            ZERO
        }
    })
    .expect("finite entries")
}

/// The matrix unit `|i0><j0|`.
pub fn matrix_unit(n: usize, i0: usize, j0: usize) -> DenseOperator {
    DenseOperator::from_fn(
        n,
        |row, col| if row == i0 && col == j0 { ONE } else { ZERO },
    )
    .expect("finite entries")
}

#[derive(Debug, Clone, PartialEq)]
pub enum ErrorKind {
    Pauli { a: usize, b: usize },
    MatrixUnit { i0: usize, j0: usize },
    Arbitrary(DenseOperator),
}

/// An operator acting on one register (1-based) of the five-register chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterError {
    register: usize,
    kind: ErrorKind,
    label: String,
    op: DenseOperator,
}

impl RegisterError {
    pub fn identity(params: &CodeParams) -> Self {
        Self {
            register: 1,
            kind: ErrorKind::Pauli { a: 0, b: 0 },
            label: "I".into(),
            op: DenseOperator::identity(params.n),
        }
    }

    pub fn pauli(params: &CodeParams, register: usize, a: usize, b: usize) -> Result<Self> {
        check_register(register)?;
        let n = params.n;
        let (a, b) = (a % n, b % n);
        Ok(Self {
            register,
            kind: ErrorKind::Pauli { a, b },
            label: format!("X^{a} Z^{b} @ reg {register}"),
            op: pauli_op(n, a, b),
        })
    }

    pub fn matrix_unit(params: &CodeParams, register: usize, i0: usize, j0: usize) -> Result<Self> {
        check_register(register)?;
        if i0 >= params.n || j0 >= params.n {
            return Err(QeccError::DimensionMismatch(format!(
                "matrix unit ({i0},{j0}) for n = {}",
                params.n
            )));
        }
        Ok(Self {
            register,
            kind: ErrorKind::MatrixUnit { i0, j0 },
            label: format!("E({i0},{j0}) @ reg {register}"),
            op: matrix_unit(params.n, i0, j0),
        })
    }

    pub fn arbitrary(
        params: &CodeParams,
        register: usize,
        op: DenseOperator,
        name: &str,
    ) -> Result<Self> {
        check_register(register)?;
        if op.dim() != params.n {
            return Err(QeccError::DimensionMismatch(format!(
                "operator of dim {} for n = {}",
                op.dim(),
                params.n
            )));
        }
        Ok(Self {
            register,
            kind: ErrorKind::Arbitrary(op.clone()),
            label: format!("{name} @ reg {register}"),
            op,
        })
    }

    pub fn register(&self) -> usize {
        self.register
    }

    pub fn kind(&self) -> &ErrorKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The `n x n` operator acting on [`Self::register`].
    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, ErrorKind::Pauli { a: 0, b: 0 })
    }

    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        apply_on_register(&self.op, self.register, state)
    }
}

fn check_register(register: usize) -> Result<()> {
    if register == 0 || register > CODE_REGISTERS {
        return Err(QeccError::RegisterOutOfRange {
            register,
            registers: CODE_REGISTERS,
        });
    }
    Ok(())
}

/// Ordered error list with the global identity first.
#[derive(Debug, Clone)]
pub struct ErrorSet {
    params: CodeParams,
    errors: Vec<RegisterError>,
}

impl ErrorSet {
    /// Builds a set from `errors`, prepending the identity and rejecting
    /// duplicates.
    pub fn new(params: &CodeParams, errors: Vec<RegisterError>) -> Result<Self> {
        let mut all = vec![RegisterError::identity(params)];
        for e in errors {
            if e.is_identity() {
                continue;
            }
            if e.operator().dim() != params.n {
                return Err(QeccError::DimensionMismatch(format!("error {}", e.label())));
            }
            if all
                .iter()
                .any(|o| o.register == e.register && o.kind == e.kind && !o.is_identity())
            {
                return Err(QeccError::DimensionMismatch(format!(
                    "duplicate error {}",
                    e.label()
                )));
            }
            all.push(e);
        }
        Ok(Self {
            params: *params,
            errors: all,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn errors(&self) -> &[RegisterError] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.errors.iter().map(|e| e.label.clone()).collect()
    }
}

/// `{I} u {X^a Z^b @ reg i : 1 <= i <= 5, (a, b) != (0, 0)}`, registers
/// outermost and `(a, b)` in lexicographic order. Size `1 + 5(n^2 - 1)`.
pub fn full_pauli_error_set(params: &CodeParams) -> ErrorSet {
    let n = params.n;
    let mut errors = Vec::with_capacity(5 * (n * n - 1));
    for register in 1..=CODE_REGISTERS {
        for a in 0..n {
            for b in 0..n {
                if (a, b) != (0, 0) {
                    errors.push(
                        RegisterError::pauli(params, register, a, b).expect("valid register"),
                    );
                }
            }
        }
    }
    ErrorSet::new(params, errors).expect("distinct Paulis")
}

/// Gram-Schmidt on a seeded complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> DenseOperator {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        // two passes keep the columns orthogonal to rounding
        for _ in 0..2 {
            for u in &cols {
                let proj = dot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    DenseOperator::from_fn(n, |row, col| cols[col][row]).expect("finite entries")
}

/// A random unitary on a uniformly chosen register, deterministic in `seed`.
pub fn random_single_register_error(params: &CodeParams, seed: u64) -> RegisterError {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let register = rng.random_range(1..=CODE_REGISTERS);
    let op = random_unitary(params.n, &mut rng);
    RegisterError::arbitrary(params, register, op, &format!("U[seed={seed}]"))
        .expect("valid register and dimension")
}
