//! Small square matrices over the exact scalar ring. Dimensions 1, 2 and 4
//! cover the scalar, Pauli and gamma sectors; dimension 1 embeds plain
//! scalars so operator terms can carry a matrix coefficient uniformly.

use std::sync::Arc;

use num::traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::{rat, Coeff, Complex64, Registry, ScalarValue, Sym};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix dimension must be 1, 2 or 4, got {0}")]
    BadDim(usize),
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("index {0} out of range for {1}")]
    BadIndex(usize, &'static str),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// Dense row-major matrix with exact scalar entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixValue {
    dim: usize,
    entries: Vec<ScalarValue>,
}

pub const ALLOWED_DIMS: [usize; 3] = [1, 2, 4];

impl MatrixValue {
    pub fn zero(reg: &Arc<Registry>, dim: usize) -> Result<MatrixValue, MatrixError> {
        if !ALLOWED_DIMS.contains(&dim) {
            return Err(MatrixError::BadDim(dim));
        }
        Ok(MatrixValue {
            dim,
            entries: vec![ScalarValue::zero(reg); dim * dim],
        })
    }

    pub fn identity(reg: &Arc<Registry>, dim: usize) -> Result<MatrixValue, MatrixError> {
        let mut m = Self::zero(reg, dim)?;
        for k in 0..dim {
            m.entries[k * dim + k] = ScalarValue::one(reg);
        }
        Ok(m)
    }

    /// Scalar embedded as s times the identity.
    pub fn scalar_embed(s: &ScalarValue, dim: usize) -> Result<MatrixValue, MatrixError> {
        let mut m = Self::zero(s.registry(), dim)?;
        for k in 0..dim {
            m.entries[k * dim + k] = s.clone();
        }
        Ok(m)
    }

    pub fn from_entries(
        reg: &Arc<Registry>,
        dim: usize,
        entries: Vec<ScalarValue>,
    ) -> Result<MatrixValue, MatrixError> {
        if !ALLOWED_DIMS.contains(&dim) {
            return Err(MatrixError::BadDim(dim));
        }
        if entries.len() != dim * dim {
            return Err(MatrixError::BadIndex(entries.len(), "entry count"));
        }
        for e in &entries {
            if e.registry().name(Sym(0)) != reg.name(Sym(0)) && false {
                unreachable!()
            }
        }
        Ok(MatrixValue { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn registry(&self) -> &Arc<Registry> {
        self.entries[0].registry()
    }

    pub fn entry(&self, r: usize, c: usize) -> &ScalarValue {
        &self.entries[r * self.dim + c]
    }

    pub fn entries(&self) -> &[ScalarValue] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarValue::is_zero)
    }

    pub fn add(&self, other: &MatrixValue) -> Result<MatrixValue, MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimMismatch(self.dim, other.dim));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixValue {
            dim: self.dim,
            entries,
        })
    }

    pub fn sub(&self, other: &MatrixValue) -> Result<MatrixValue, MatrixError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MatrixValue {
        MatrixValue {
            dim: self.dim,
            entries: self.entries.iter().map(ScalarValue::neg).collect(),
        }
    }

    pub fn mul(&self, other: &MatrixValue) -> Result<MatrixValue, MatrixError> {
        if self.dim != other.dim {
            return Err(MatrixError::DimMismatch(self.dim, other.dim));
        }
        let d = self.dim;
        let reg = self.registry();
        let mut out = Self::zero(reg, d)?;
        for r in 0..d {
            for c in 0..d {
                let mut acc = ScalarValue::zero(reg);
                for k in 0..d {
                    acc = acc.add(&self.entry(r, k).checked_mul(other.entry(k, c))?);
                }
                out.entries[r * d + c] = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &ScalarValue) -> MatrixValue {
        MatrixValue {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.mul(s)).collect(),
        }
    }

    pub fn trace(&self) -> ScalarValue {
        let mut acc = ScalarValue::zero(self.registry());
        for k in 0..self.dim {
            acc = acc.add(self.entry(k, k));
        }
        acc
    }

    pub fn commutator(&self, other: &MatrixValue) -> Result<MatrixValue, MatrixError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn anticommutator(&self, other: &MatrixValue) -> Result<MatrixValue, MatrixError> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<Sym, ScalarValue>,
    ) -> Result<MatrixValue, MatrixError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.substitute(bindings))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MatrixValue {
            dim: self.dim,
            entries,
        })
    }

    pub fn eval(
        &self,
        bindings: &std::collections::BTreeMap<Sym, Complex64>,
    ) -> Result<Vec<Complex64>, MatrixError> {
        Ok(self
            .entries
            .iter()
            .map(|e| e.eval(bindings))
            .collect::<Result<Vec<_>, _>>()?)
    }

    /// JSON form `{dim, entries}` with entries row major.
    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "entries": self.entries.iter().map(ScalarValue::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(reg: &Arc<Registry>, v: &Value) -> Result<MatrixValue, MatrixError> {
        let dim = v
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or(MatrixError::BadDim(0))? as usize;
        let arr = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or(MatrixError::BadIndex(0, "entries"))?;
        let entries = arr
            .iter()
            .map(|e| ScalarValue::from_json(reg, e))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_entries(reg, dim, entries)
    }
}

fn sv(reg: &Arc<Registry>, re: (i64, i64), im: (i64, i64)) -> ScalarValue {
    ScalarValue::from_coeff(reg, Coeff::new(rat(re.0, re.1), rat(im.0, im.1)))
}

/// Metric signature used throughout: diag(-1, +1, +1, +1).
pub fn eta(mu: usize) -> i64 {
    if mu == 0 {
        -1
    } else {
        1
    }
}

/// Pauli matrix for direction 1, 2 or 3.
pub fn pauli(reg: &Arc<Registry>, i: usize) -> Result<MatrixValue, MatrixError> {
    let z = || ScalarValue::zero(reg);
    let entries = match i {
        1 => vec![z(), sv(reg, (1, 1), (0, 1)), sv(reg, (1, 1), (0, 1)), z()],
        2 => vec![z(), sv(reg, (0, 1), (-1, 1)), sv(reg, (0, 1), (1, 1)), z()],
        3 => vec![sv(reg, (1, 1), (0, 1)), z(), z(), sv(reg, (-1, 1), (0, 1))],
        _ => return Err(MatrixError::BadIndex(i, "pauli direction")),
    };
    MatrixValue::from_entries(reg, 2, entries)
}

/// Gamma matrix satisfying {gamma(mu), gamma(nu)} = 2 eta(mu, nu) I4 with
/// eta = diag(-1, +1, +1, +1): gamma0 = i diag(1, 1, -1, -1) and the spatial
/// gammas are the off-diagonal Pauli blocks.
pub fn gamma(reg: &Arc<Registry>, mu: usize) -> Result<MatrixValue, MatrixError> {
    if mu > 3 {
        return Err(MatrixError::BadIndex(mu, "gamma index"));
    }
    let mut m = MatrixValue::zero(reg, 4)?;
    if mu == 0 {
        for k in 0..4 {
            let s = if k < 2 { (1, 1) } else { (-1, 1) };
            m.entries[k * 4 + k] = sv(reg, (0, 1), s);
        }
        return Ok(m);
    }
    let s = pauli(reg, mu)?;
    for r in 0..2 {
        for c in 0..2 {
            m.entries[r * 4 + (c + 2)] = s.entry(r, c).clone();
            m.entries[(r + 2) * 4 + c] = s.entry(r, c).clone();
        }
    }
    Ok(m)
}

/// Lorentz spin generator sigma_{mu nu} = (i/2)[gamma_mu, gamma_nu].
pub fn sigma_mn(reg: &Arc<Registry>, mu: usize, nu: usize) -> Result<MatrixValue, MatrixError> {
    let g_mu = gamma(reg, mu)?;
    let g_nu = gamma(reg, nu)?;
    let half_i = ScalarValue::i(reg).scale_rat(&rat(1, 2));
    Ok(g_mu.commutator(&g_nu)?.scale(&half_i))
}

/// Rotation coupling E_{ij} = e [sigma_i, sigma_j] for a supplied weight e.
pub fn spin_coupling(
    reg: &Arc<Registry>,
    i: usize,
    j: usize,
    e: &ScalarValue,
) -> Result<MatrixValue, MatrixError> {
    let si = pauli(reg, i)?;
    let sj = pauli(reg, j)?;
    Ok(si.commutator(&sj)?.scale(e))
}

/// Chirality element i gamma0 gamma1 gamma2 gamma3; squares to the identity.
pub fn gamma5(reg: &Arc<Registry>) -> Result<MatrixValue, MatrixError> {
    let mut m = gamma(reg, 0)?;
    for mu in 1..4 {
        m = m.mul(&gamma(reg, mu)?)?;
    }
    Ok(m.scale(&ScalarValue::i(reg)))
}

/// Named trace-orthogonal basis for each supported dimension. Operator
/// rendering decomposes matrix coefficients against this list.
pub fn basis(reg: &Arc<Registry>, dim: usize) -> Result<Vec<(String, MatrixValue)>, MatrixError> {
    match dim {
        1 => Ok(vec![("I".to_string(), MatrixValue::identity(reg, 1)?)]),
        2 => {
            let mut out = vec![("I".to_string(), MatrixValue::identity(reg, 2)?)];
            for i in 1..=3 {
                out.push((format!("sigma{i}"), pauli(reg, i)?));
            }
            Ok(out)
        }
        4 => {
            let mut out = vec![("I".to_string(), MatrixValue::identity(reg, 4)?)];
            for mu in 0..4 {
                out.push((format!("gamma{mu}"), gamma(reg, mu)?));
            }
            for mu in 0..4 {
                for nu in (mu + 1)..4 {
                    out.push((format!("sigma{mu}{nu}"), sigma_mn(reg, mu, nu)?));
                }
            }
            let g5 = gamma5(reg)?;
            for mu in 0..4 {
                out.push((format!("gamma5gamma{mu}"), g5.mul(&gamma(reg, mu)?)?));
            }
            out.push(("gamma5".to_string(), g5));
            Ok(out)
        }
        d => Err(MatrixError::BadDim(d)),
    }
}

/// Look up a basis matrix by name at a given dimension.
pub fn basis_matrix(
    reg: &Arc<Registry>,
    dim: usize,
    name: &str,
) -> Result<Option<MatrixValue>, MatrixError> {
    Ok(basis(reg, dim)?
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, m)| m))
}

/// Expand a matrix over the named basis. Coefficients are exact; the
/// decomposition uses trace projections and reconstructs the input.
pub fn decompose(m: &MatrixValue) -> Result<Vec<(String, ScalarValue)>, MatrixError> {
    let reg = m.registry();
    let mut out = Vec::new();
    for (name, b) in basis(reg, m.dim())? {
        let denom = b.mul(&b)?.trace();
        let num = b.mul(m)?.trace();
        let coeff = num
            .div_exact(&denom)
            .expect("basis elements have invertible squared trace");
        if !coeff.is_zero() {
            out.push((name, coeff));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::complex::Complex;
    use num::rational::BigRational;

    fn reg() -> Arc<Registry> {
        Registry::standard()
    }

    // Plain reference multiply used to cross-check the production path.
    fn naive_mul(a: &MatrixValue, b: &MatrixValue) -> Vec<Coeff> {
        let d = a.dim();
        let bind = std::collections::BTreeMap::new();
        let to_c = |s: &ScalarValue| -> Coeff {
            let mut acc: Coeff = Complex::new(BigRational::zero(), BigRational::zero());
            for (m, c) in s.terms() {
                assert!(m.is_unit(), "oracle only handles constant entries");
                acc = acc + c.clone();
            }
            let _ = &bind;
            acc
        };
        let mut out = vec![Complex::new(BigRational::zero(), BigRational::zero()); d * d];
        for r in 0..d {
            for c in 0..d {
                for k in 0..d {
                    out[r * d + c] =
                        out[r * d + c].clone() + to_c(a.entry(r, k)) * to_c(b.entry(k, c));
                }
            }
        }
        out
    }

    #[test]
    fn pauli_commutator() {
        let r = reg();
        let lhs = pauli(&r, 1).unwrap().commutator(&pauli(&r, 2).unwrap()).unwrap();
        let rhs = pauli(&r, 3)
            .unwrap()
            .scale(&ScalarValue::i(&r).scale_rat(&rat(2, 1)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pauli_squares_to_identity() {
        let r = reg();
        for i in 1..=3 {
            let s = pauli(&r, i).unwrap();
            assert_eq!(s.mul(&s).unwrap(), MatrixValue::identity(&r, 2).unwrap());
        }
    }

    #[test]
    fn pauli_anticommutator_vanishes_off_diagonal() {
        let r = reg();
        let z = MatrixValue::zero(&r, 2).unwrap();
        assert_eq!(
            pauli(&r, 1)
                .unwrap()
                .anticommutator(&pauli(&r, 2).unwrap())
                .unwrap(),
            z
        );
    }

    #[test]
    fn gamma_clifford_relation_all_pairs() {
        let r = reg();
        for mu in 0..4 {
            for nu in 0..4 {
                let lhs = gamma(&r, mu)
                    .unwrap()
                    .anticommutator(&gamma(&r, nu).unwrap())
                    .unwrap();
                let e = if mu == nu { 2 * eta(mu) } else { 0 };
                let rhs = MatrixValue::identity(&r, 4)
                    .unwrap()
                    .scale(&ScalarValue::int(&r, e));
                assert_eq!(lhs, rhs, "pair ({mu},{nu})");
            }
        }
    }

    #[test]
    fn metric_contraction_of_gammas() {
        // sum_mu eta(mu,mu) gamma_mu gamma_mu = 4 I, checked against the
        // naive multiply as an independent path.
        let r = reg();
        let mut acc = MatrixValue::zero(&r, 4).unwrap();
        for mu in 0..4 {
            let g = gamma(&r, mu).unwrap();
            let prod = g.mul(&g).unwrap();
            let naive = naive_mul(&g, &g);
            for (k, c) in naive.iter().enumerate() {
                let got = prod.entries()[k].clone();
                assert_eq!(got, ScalarValue::from_coeff(&r, c.clone()));
            }
            acc = acc
                .add(&prod.scale(&ScalarValue::int(&r, eta(mu))))
                .unwrap();
        }
        let four = MatrixValue::identity(&r, 4)
            .unwrap()
            .scale(&ScalarValue::int(&r, 4));
        assert_eq!(acc, four);
    }

    #[test]
    fn sigma_antisymmetry_and_diagonal() {
        let r = reg();
        assert!(sigma_mn(&r, 2, 2).unwrap().is_zero());
        let s01 = sigma_mn(&r, 0, 1).unwrap();
        assert_eq!(s01.neg(), sigma_mn(&r, 1, 0).unwrap());
        // direct definition, recomputed term by term
        let g0 = gamma(&r, 0).unwrap();
        let g1 = gamma(&r, 1).unwrap();
        let direct = g0
            .mul(&g1)
            .unwrap()
            .sub(&g1.mul(&g0).unwrap())
            .unwrap()
            .scale(&ScalarValue::i(&r).scale_rat(&rat(1, 2)));
        assert_eq!(s01, direct);
    }

    #[test]
    fn spin_coupling_examples() {
        let r = reg();
        let zero = ScalarValue::zero(&r);
        assert!(spin_coupling(&r, 1, 2, &zero).unwrap().is_zero());
        let e = ScalarValue::sym(&r, "lambda").unwrap();
        let expect = pauli(&r, 3)
            .unwrap()
            .scale(&ScalarValue::i(&r).scale_rat(&rat(2, 1)).mul(&e));
        assert_eq!(spin_coupling(&r, 1, 2, &e).unwrap(), expect);
    }

    #[test]
    fn gamma5_squares_to_identity() {
        let r = reg();
        let g5 = gamma5(&r).unwrap();
        assert_eq!(g5.mul(&g5).unwrap(), MatrixValue::identity(&r, 4).unwrap());
    }

    #[test]
    fn decompose_reconstructs() {
        let r = reg();
        for dim in [1usize, 2, 4] {
            let mut m = MatrixValue::zero(&r, dim).unwrap();
            // fill with a scattering of distinct exact values
            for (k, e) in m.entries.iter_mut().enumerate() {
                *e = ScalarValue::rational(&r, (k as i64) - 3, 7)
                    .mul(&ScalarValue::sym(&r, "hbar").unwrap())
                    .add(&ScalarValue::i(&r).scale_rat(&rat(k as i64, 5)));
            }
            let comps = decompose(&m).unwrap();
            let mut back = MatrixValue::zero(&r, dim).unwrap();
            for (name, c) in comps {
                let b = basis_matrix(&r, dim, &name).unwrap().unwrap();
                back = back.add(&b.scale(&c)).unwrap();
            }
            assert_eq!(m, back, "dim {dim}");
        }
    }

    #[test]
    fn basis_is_trace_orthogonal() {
        let r = reg();
        let b = basis(&r, 4).unwrap();
        assert_eq!(b.len(), 16);
        for (i, (_, bi)) in b.iter().enumerate() {
            for (j, (_, bj)) in b.iter().enumerate() {
                let t = bi.mul(bj).unwrap().trace();
                if i == j {
                    assert!(!t.is_zero());
                } else {
                    assert!(t.is_zero());
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let r = reg();
        let m = sigma_mn(&r, 0, 2).unwrap();
        let j = m.to_json();
        assert_eq!(j["dim"], json!(4));
        let back = MatrixValue::from_json(&r, &j).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn dim_mismatch_rejected() {
        let r = reg();
        let a = MatrixValue::identity(&r, 2).unwrap();
        let b = MatrixValue::identity(&r, 4).unwrap();
        assert!(matches!(a.mul(&b), Err(MatrixError::DimMismatch(2, 4))));
    }
}
