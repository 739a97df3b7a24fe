//! Observable spectra from weighted Pauli strings.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{JawsError, Result};

pub const MAX_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pauli {
    I,
    X,
    Y,
    Z,
}

fn parse_string(s: &str, line: usize) -> Result<Vec<Pauli>> {
    s.chars()
        .enumerate()
        .map(|(i, ch)| match ch {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            _ => Err(JawsError::PauliParse {
                line,
                column: i + 1,
                message: format!("unexpected character {ch:?}, expected one of I, X, Y, Z"),
            }),
        })
        .collect()
}

/// Parses `coeff pauli_string` lines; blank lines and `#` comments are skipped.
pub fn parse_pauli_text(text: &str) -> Result<Vec<(f64, String)>> {
    let mut terms = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let start = line.len() - line.trim_start().len();
        let body = line.trim();
        let mut parts = body.split_whitespace();
        let coeff_tok = parts.next().unwrap_or("");
        let coeff: f64 = coeff_tok.parse().map_err(|_| JawsError::PauliParse {
            line: ln + 1,
            column: start + 1,
            message: format!("cannot parse coefficient {coeff_tok:?}"),
        })?;
        let Some(word) = parts.next() else {
            return Err(JawsError::PauliParse {
                line: ln + 1,
                column: start + coeff_tok.len() + 1,
                message: "missing Pauli string".into(),
            });
        };
        let word_col = line.find(word).unwrap_or(0) + 1;
        parse_string(word, ln + 1).map_err(|e| match e {
            JawsError::PauliParse { line, column, message } => JawsError::PauliParse {
                line,
                column: word_col + column - 1,
                message,
            },
            other => other,
        })?;
        if let Some(extra) = parts.next() {
            return Err(JawsError::PauliParse {
                line: ln + 1,
                column: line.find(extra).unwrap_or(0) + 1,
                message: format!("unexpected trailing token {extra:?}"),
            });
        }
        terms.push((coeff, word.to_string()));
    }
    Ok(terms)
}

/// Eigenvalues, sorted non-decreasing, of `Σ c_k P_k` on `n ≤ 12` qubits.
///
/// Sums of `I`/`Z` strings are diagonal and skip the dense eigensolver.
/// Qubit 0 is the leftmost character and the most significant bit.
pub fn spectrum_from_pauli(terms: &[(f64, String)]) -> Result<Vec<f64>> {
    if terms.is_empty() {
        return Err(JawsError::PauliParse {
            line: 0,
            column: 0,
            message: "no Pauli terms".into(),
        });
    }
    let parsed: Vec<(f64, Vec<Pauli>)> = terms
        .iter()
        .enumerate()
        .map(|(k, (c, s))| Ok((*c, parse_string(s, k + 1)?)))
        .collect::<Result<_>>()?;
    let n = parsed[0].1.len();
    if let Some(k) = parsed.iter().position(|(_, p)| p.len() != n) {
        return Err(JawsError::PauliParse {
            line: k + 1,
            column: parsed[k].1.len().min(n) + 1,
            message: format!("string has {} qubits, the first term has {n}", parsed[k].1.len()),
        });
    }
    if n == 0 || n > MAX_QUBITS {
        return Err(JawsError::PauliParse {
            line: 1,
            column: 1,
            message: format!("qubit count {n} outside 1..={MAX_QUBITS}"),
        });
    }
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);

    let mut eig = if parsed.iter().all(|(_, p)| p.iter().all(|x| matches!(x, Pauli::I | Pauli::Z))) {
        let mut d = vec![0.0; dim];
        for (c, p) in &parsed {
            for (b, v) in d.iter_mut().enumerate() {
                let odd = p
                    .iter()
                    .enumerate()
                    .filter(|(q, x)| **x == Pauli::Z && b & bit(*q) != 0)
                    .count()
                    % 2;
                *v += if odd == 1 { -c } else { *c };
            }
        }
        d
    } else {
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (c, p) in &parsed {
            // P|b⟩ = phase(b) |b ⊕ flip⟩
            let flip: usize = p
                .iter()
                .enumerate()
                .filter(|(_, x)| matches!(x, Pauli::X | Pauli::Y))
                .map(|(q, _)| bit(q))
                .sum();
            for b in 0..dim {
                let mut ph = Complex64::new(*c, 0.0);
                for (q, x) in p.iter().enumerate() {
                    let one = b & bit(q) != 0;
                    match x {
                        Pauli::Z if one => ph = -ph,
                        Pauli::Y => ph *= if one { Complex64::new(0.0, -1.0) } else { Complex64::new(0.0, 1.0) },
                        _ => {}
                    }
                }
                m[(b ^ flip, b)] += ph;
            }
        }
        SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
    };
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}
