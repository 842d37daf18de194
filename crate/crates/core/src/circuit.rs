//! Gate-level encoder.
//!
//! Starting from `|k,0,0,0,0>` the circuit
//!
//! 1. copies register 1 into registers 3, 4, 5 (`|k,0,k,k,k>`),
//! 2. applies the DFT `|m> -> n^(-1/2) sum_j omega^(m j) |j>` to registers
//!    3, 4, 5, binding register 3 to `r`, 4 to `p` and 5 to `q`,
//! 3. adds the phase `omega^(p r)` between registers 4 and 3,
//! 4. copies register 4 into register 2 (`|k,p,r,p,q>`),
//! 5. adds `reg1 += reg4 + reg5`, `reg2 += reg3`, `reg3 += reg5`, giving
//!    `|p+q+k, p+r, q+r, p, q>`.
//!
//! Every copy and addition is a generalized CNOT
//! `|c>|t> -> |c>|t + sign c mod n>`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::code::CODE_REGISTERS;
use crate::error::{QeccError, Result};
use crate::math::{
    apply_on_register, digits_of, dot, index_of, CodeParams, DenseOperator, QuditState, ZERO,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// `|c>|t> -> |c>|t + sign * c>`, `sign` is `+1` or `-1`.
    GenCnot {
        control: usize,
        target: usize,
        sign: i8,
    },
    QuditDft {
        target: usize,
    },
    /// `|a>|b> -> omega^(a b) |a>|b>`.
    CtrlPhase {
        reg_a: usize,
        reg_b: usize,
    },
    /// `|m> -> |perm[m]>`.
    LocalPerm {
        target: usize,
        perm: Vec<usize>,
    },
    /// Arbitrary one-register matrix; not necessarily unitary.
    Local {
        target: usize,
        op: DenseOperator,
    },
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::GenCnot { .. } => "gen_cnot",
            Gate::QuditDft { .. } => "qudit_dft",
            Gate::CtrlPhase { .. } => "ctrl_phase",
            Gate::LocalPerm { .. } => "local_perm",
            Gate::Local { .. } => "local",
        }
    }

    fn registers_used(&self) -> Vec<usize> {
        match self {
            Gate::GenCnot {
                control, target, ..
            } => vec![*control, *target],
            Gate::QuditDft { target }
            | Gate::LocalPerm { target, .. }
            | Gate::Local { target, .. } => {
                vec![*target]
            }
            Gate::CtrlPhase { reg_a, reg_b } => vec![*reg_a, *reg_b],
        }
    }

    pub fn to_json(&self) -> GateJson {
        let args = match self {
            Gate::GenCnot {
                control,
                target,
                sign,
            } => vec![json!(control), json!(target), json!(sign)],
            Gate::QuditDft { target } => vec![json!(target)],
            Gate::CtrlPhase { reg_a, reg_b } => vec![json!(reg_a), json!(reg_b)],
            Gate::LocalPerm { target, perm } => vec![json!(target), json!(perm)],
            Gate::Local { target, op } => {
                let rows: Vec<Vec<[f64; 2]>> = (0..op.dim())
                    .map(|r| {
                        (0..op.dim())
                            .map(|c| [op.get(r, c).re, op.get(r, c).im])
                            .collect()
                    })
                    .collect();
                vec![json!(target), json!(rows)]
            }
        };
        GateJson {
            gate: self.name().to_string(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateJson {
    pub gate: String,
    pub args: Vec<Value>,
}

/// The DFT matrix `F[j][m] = n^(-1/2) omega^(m j)`.
pub fn dft_op(params: &CodeParams) -> DenseOperator {
    let n = params.n;
    let scale = 1.0 / (n as f64).sqrt();
    DenseOperator::from_fn(n, |j, m| params.omega_pow((m * j) as i64) * scale)
        .expect("finite entries")
}

fn check_registers(gate: &Gate, registers: usize) -> Result<()> {
    let used = gate.registers_used();
    for &r in &used {
        if r == 0 || r > registers {
            return Err(QeccError::RegisterOutOfRange {
                register: r,
                registers,
            });
        }
    }
    if used.len() == 2 && used[0] == used[1] {
        return Err(QeccError::DimensionMismatch(format!(
            "{} needs two distinct registers",
            gate.name()
        )));
    }
    Ok(())
}

/// Applies `gate` to `state`.
pub fn apply_gate(params: &CodeParams, gate: &Gate, state: &QuditState) -> Result<QuditState> {
    let n = params.n;
    if state.n() != n {
        return Err(QeccError::DimensionMismatch(format!(
            "state n = {}, circuit n = {n}",
            state.n()
        )));
    }
    let registers = state.registers();
    check_registers(gate, registers)?;
    match gate {
        Gate::GenCnot {
            control,
            target,
            sign,
        } => {
            if *sign != 1 && *sign != -1 {
                return Err(QeccError::DimensionMismatch(format!(
                    "gen_cnot sign {sign}"
                )));
            }
            let sign = *sign as i64;
            Ok(permute_basis(state, |digits| {
                let c = digits[control - 1] as i64;
                let t = digits[target - 1] as i64;
                digits[target - 1] = params.modn(t + sign * c);
            }))
        }
        Gate::LocalPerm { target, perm } => {
            let mut seen = vec![false; n];
            if perm.len() != n
                || perm
                    .iter()
                    .any(|&m| m >= n || std::mem::replace(&mut seen[m], true))
            {
                return Err(QeccError::InvalidPermutation(format!(
                    "{perm:?} for n = {n}"
                )));
            }
            Ok(permute_basis(state, |digits| {
                digits[target - 1] = perm[digits[target - 1]];
            }))
        }
        Gate::QuditDft { target } => apply_on_register(&dft_op(params), *target, state),
        Gate::Local { target, op } => apply_on_register(op, *target, state),
        Gate::CtrlPhase { reg_a, reg_b } => {
            let mut out = state.clone();
            for (idx, amp) in out.amps_mut().iter_mut().enumerate() {
                if *amp == ZERO {
                    continue;
                }
                let digits = digits_of(n, registers, idx);
                *amp *= params.omega_pow((digits[reg_a - 1] * digits[reg_b - 1]) as i64);
            }
            Ok(out)
        }
    }
}

fn permute_basis(state: &QuditState, mut relabel: impl FnMut(&mut [usize])) -> QuditState {
    let n = state.n();
    let registers = state.registers();
    let mut out = QuditState::zero(n, registers);
    let amps = out.amps_mut();
    for (idx, amp) in state.amps().iter().enumerate() {
        if *amp == ZERO {
            continue;
        }
        let mut digits = digits_of(n, registers, idx);
        relabel(&mut digits);
        amps[index_of(n, &digits)] += *amp;
    }
    out
}

/// Ordered gate list over the five registers.
#[derive(Debug, Clone)]
pub struct Circuit {
    params: CodeParams,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(params: &CodeParams, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            check_registers(g, CODE_REGISTERS)?;
        }
        Ok(Self {
            params: *params,
            gates,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        check_registers(&gate, CODE_REGISTERS)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn apply(&self, state: &QuditState) -> Result<QuditState> {
        self.gates
            .iter()
            .try_fold(state.clone(), |s, g| apply_gate(&self.params, g, &s))
    }

    pub fn to_json(&self) -> Vec<GateJson> {
        self.gates.iter().map(Gate::to_json).collect()
    }
}

/// Number of gates in [`build_encoding_circuit`], independent of `n`.
pub const ENCODING_GATE_COUNT: usize = 12;

pub fn build_encoding_circuit(params: &CodeParams) -> Circuit {
    let cnot = |control, target| Gate::GenCnot {
        control,
        target,
        sign: 1,
    };
    let gates = vec![
        cnot(1, 3),
        cnot(1, 4),
        cnot(1, 5),
        Gate::QuditDft { target: 3 },
        Gate::QuditDft { target: 4 },
        Gate::QuditDft { target: 5 },
        Gate::CtrlPhase { reg_a: 4, reg_b: 3 },
        cnot(4, 2),
        cnot(4, 1),
        cnot(5, 1),
        cnot(3, 2),
        cnot(5, 3),
    ];
    Circuit::new(params, gates).expect("registers in range")
}

/// Max deviation of the circuit's column Gram matrix from the identity.
///
/// Every column is checked for `n <= 4`; for larger `n` a fixed sample of
/// 64 columns is used.
pub fn circuit_unitary_check(circuit: &Circuit) -> Result<f64> {
    let n = circuit.params.n;
    let dim = n.pow(CODE_REGISTERS as u32);
    let columns: Vec<usize> = if n <= crate::math::MAX_MATERIALIZE_N {
        (0..dim).collect()
    } else {
        let step = dim / 64;
        (0..64).map(|i| i * step + i % step).collect()
    };
    let images: Vec<QuditState> = columns
        .iter()
        .map(|&c| {
            let digits = digits_of(n, CODE_REGISTERS, c);
            circuit.apply(&QuditState::basis(n, &digits)?)
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (i, a) in images.iter().enumerate() {
        for (j, b) in images.iter().enumerate().skip(i) {
            let g = dot(a.amps(), b.amps());
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{inner_product, ONE};
    use num_complex::Complex64;

    #[test]
    fn gen_cnot_copies() {
        let params = CodeParams::new(3).unwrap();
        let s = QuditState::basis(3, &[2, 0, 0, 0, 0]).unwrap();
        let g = Gate::GenCnot {
            control: 1,
            target: 3,
            sign: 1,
        };
        let out = apply_gate(&params, &g, &s).unwrap();
        assert_eq!(out, QuditState::basis(3, &[2, 0, 2, 0, 0]).unwrap());
        let undo = Gate::GenCnot {
            control: 1,
            target: 3,
            sign: -1,
        };
        assert_eq!(apply_gate(&params, &undo, &out).unwrap(), s);
    }

    #[test]
    fn dft_of_zero_is_uniform() {
        for n in 2..=5 {
            let params = CodeParams::new(n).unwrap();
            let s = QuditState::basis(n, &[0, 0, 0, 0, 0]).unwrap();
            let out = apply_gate(&params, &Gate::QuditDft { target: 2 }, &s).unwrap();
            for j in 0..n {
                let a = out.amp(&[0, j, 0, 0, 0]);
                assert!((a - Complex64::new(1.0 / (n as f64).sqrt(), 0.0)).norm() < 1e-12);
            }
            assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ctrl_phase_n4() {
        let params = CodeParams::new(4).unwrap();
        let s = QuditState::basis(4, &[0, 0, 1, 1, 0]).unwrap();
        let out = apply_gate(&params, &Gate::CtrlPhase { reg_a: 4, reg_b: 3 }, &s).unwrap();
        assert!((out.amp(&[0, 0, 1, 1, 0]) - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn local_perm_and_validation() {
        let params = CodeParams::new(3).unwrap();
        let s = QuditState::basis(3, &[0, 1, 0, 0, 0]).unwrap();
        let g = Gate::LocalPerm {
            target: 2,
            perm: vec![2, 0, 1],
        };
        assert_eq!(
            apply_gate(&params, &g, &s).unwrap(),
            QuditState::basis(3, &[0, 0, 0, 0, 0]).unwrap()
        );
        let bad = Gate::LocalPerm {
            target: 2,
            perm: vec![0, 0, 1],
        };
        assert!(apply_gate(&params, &bad, &s).is_err());
        let out_of_range = Gate::QuditDft { target: 6 };
        assert!(apply_gate(&params, &out_of_range, &s).is_err());
        let same = Gate::GenCnot {
            control: 2,
            target: 2,
            sign: 1,
        };
        assert!(apply_gate(&params, &same, &s).is_err());
    }

    #[test]
    fn intermediate_state_after_copy_and_dft() {
        let n = 3;
        let params = CodeParams::new(n).unwrap();
        let circuit = build_encoding_circuit(&params);
        let partial = Circuit::new(&params, circuit.gates()[..6].to_vec()).unwrap();
        for k in 0..n {
            let out = partial
                .apply(&QuditState::basis(n, &[k, 0, 0, 0, 0]).unwrap())
                .unwrap();
            let scale = (n as f64).powf(-1.5);
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        let expected = params.omega_pow((k * (p + q + r)) as i64) * scale;
                        assert!((out.amp(&[k, 0, r, p, q]) - expected).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn encoding_circuit_is_unitary_n2() {
        let params = CodeParams::new(2).unwrap();
        let circuit = build_encoding_circuit(&params);
        assert_eq!(circuit.gates().len(), ENCODING_GATE_COUNT);
        assert!(circuit_unitary_check(&circuit).unwrap() < 1e-10);
    }

    #[test]
    fn single_cnot_is_exactly_unitary() {
        let params = CodeParams::new(3).unwrap();
        let c = Circuit::new(
            &params,
            vec![Gate::GenCnot {
                control: 2,
                target: 5,
                sign: 1,
            }],
        )
        .unwrap();
        assert!(circuit_unitary_check(&c).unwrap() < 1e-15);
    }

    #[test]
    fn scaled_row_breaks_unitarity() {
        let params = CodeParams::new(2).unwrap();
        let mut c = build_encoding_circuit(&params);
        let op = DenseOperator::from_fn(2, |r, col| {
            if r != col {
                ZERO
            } else if r == 0 {
                Complex64::new(2.0, 0.0)
            } else {
                ONE
            }
        })
        .unwrap();
        c.push(Gate::Local { target: 1, op }).unwrap();
        assert!(circuit_unitary_check(&c).unwrap() > 0.5);
    }

    #[test]
    fn json_form() {
        let params = CodeParams::new(2).unwrap();
        let json = build_encoding_circuit(&params).to_json();
        assert_eq!(json.len(), ENCODING_GATE_COUNT);
        assert_eq!(json[0].gate, "gen_cnot");
        assert_eq!(json[0].args, vec![json!(1), json!(3), json!(1)]);
        assert_eq!(json[6].gate, "ctrl_phase");
    }

    #[test]
    fn matches_formula_small() {
        let params = CodeParams::new(3).unwrap();
        let circuit = build_encoding_circuit(&params);
        for k in 0..3 {
            let out = circuit
                .apply(&QuditState::basis(3, &[k, 0, 0, 0, 0]).unwrap())
                .unwrap();
            let word = crate::code::encode(&params, k).unwrap();
            let overlap = inner_product(&word, &out).unwrap();
            assert!((overlap - ONE).norm() < 1e-10);
        }
    }
}
