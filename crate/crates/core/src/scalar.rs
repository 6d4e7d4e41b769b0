//! Exact scalar coefficients: Gaussian-rational numbers attached to Laurent
//! monomials in a fixed set of named parameters. Values form a commutative
//! ring; division is only defined where it is exact.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::bigint::BigInt;
use num::complex::Complex;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

/// Exact complex rational: real and imaginary parts are arbitrary-precision rationals.
pub type Coeff = Complex<BigRational>;

/// Complex double used when exact values are pushed to the numeric layer.
pub type Complex64 = Complex<f64>;

/// Parameters every registry starts with, in declaration order.
pub const STANDARD_PARAMS: [&str; 12] = [
    "hbar", "c", "v", "m", "aNR", "aUR", "q", "Q", "lambda", "phi1", "phi2", "phi3",
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("values belong to different symbol registries")]
    RegistryMismatch,
    #[error("unknown parameter symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` has no binding")]
    UnboundSymbol(String),
    #[error("cannot invert `{0}`: only single-term values with nonzero coefficient are invertible")]
    NotInvertible(String),
    #[error("duplicate parameter symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("malformed value: {0}")]
    Malformed(String),
}

/// Interned parameter symbol. Only meaningful together with its registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub(crate) u16);

/// Immutable set of parameter names. Values created from different registries
/// never mix, even when the name lists coincide only partially.
#[derive(Debug)]
pub struct Registry {
    names: Vec<String>,
    index: BTreeMap<String, u16>,
}

impl Registry {
    /// Registry holding exactly the standard parameters.
    pub fn standard() -> Arc<Registry> {
        Self::extended(&[]).expect("standard names are distinct")
    }

    /// Standard registry extended with user parameters. Duplicates are rejected.
    pub fn extended(extra: &[&str]) -> Result<Arc<Registry>, ScalarError> {
        let mut names: Vec<String> = STANDARD_PARAMS.iter().map(|s| s.to_string()).collect();
        for e in extra {
            names.push(e.to_string());
        }
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i as u16).is_some() {
                return Err(ScalarError::DuplicateSymbol(n.clone()));
            }
        }
        Ok(Arc::new(Registry { names, index }))
    }

    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied().map(Sym)
    }

    pub fn require(&self, name: &str) -> Result<Sym, ScalarError> {
        self.lookup(name)
            .ok_or_else(|| ScalarError::UnknownSymbol(name.to_string()))
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.names[sym.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    fn same(a: &Arc<Registry>, b: &Arc<Registry>) -> bool {
        Arc::ptr_eq(a, b) || a.names == b.names
    }
}

/// Exponent vector of a Laurent monomial: sorted (symbol, nonzero exponent) pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono(Vec<(u16, i32)>);

impl Mono {
    pub fn unit() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(sym: Sym, exp: i32) -> Mono {
        if exp == 0 {
            Mono::unit()
        } else {
            Mono(vec![(sym.0, exp)])
        }
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exps(&self) -> impl Iterator<Item = (Sym, i32)> + '_ {
        self.0.iter().map(|&(s, e)| (Sym(s), e))
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            if j == other.0.len() || (i < self.0.len() && self.0[i].0 < other.0[j].0) {
                out.push(self.0[i]);
                i += 1;
            } else if i == self.0.len() || other.0[j].0 < self.0[i].0 {
                out.push(other.0[j]);
                j += 1;
            } else {
                let e = self.0[i].1 + other.0[j].1;
                if e != 0 {
                    out.push((self.0[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Mono(out)
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|&(s, e)| (s, -e)).collect())
    }
}

// Lexicographic order on the dense exponent vector (missing symbols count as 0).
// This order is translation invariant, which exact division relies on.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(&(_, ea)), None) => return ea.cmp(&0),
                (None, Some(&(_, eb))) => return 0.cmp(&eb),
                (Some(&(sa, ea)), Some(&(sb, eb))) => {
                    if sa < sb {
                        match ea.cmp(&0) {
                            Ordering::Equal => i += 1,
                            ord => return ord,
                        }
                    } else if sb < sa {
                        match 0.cmp(&eb) {
                            Ordering::Equal => j += 1,
                            ord => return ord,
                        }
                    } else {
                        match ea.cmp(&eb) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            ord => return ord,
                        }
                    }
                }
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sum of Gaussian-rational coefficients times Laurent monomials.
/// The term map never stores zero coefficients.
#[derive(Debug, Clone)]
pub struct ScalarValue {
    registry: Arc<Registry>,
    terms: BTreeMap<Mono, Coeff>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn cplx(re: BigRational, im: BigRational) -> Coeff {
    Complex::new(re, im)
}

impl ScalarValue {
    pub fn zero(reg: &Arc<Registry>) -> ScalarValue {
        ScalarValue {
            registry: reg.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(reg: &Arc<Registry>) -> ScalarValue {
        Self::int(reg, 1)
    }

    pub fn int(reg: &Arc<Registry>, n: i64) -> ScalarValue {
        Self::from_coeff(reg, cplx(rat(n, 1), BigRational::zero()))
    }

    pub fn rational(reg: &Arc<Registry>, n: i64, d: i64) -> ScalarValue {
        Self::from_coeff(reg, cplx(rat(n, d), BigRational::zero()))
    }

    /// The imaginary unit.
    pub fn i(reg: &Arc<Registry>) -> ScalarValue {
        Self::from_coeff(reg, cplx(BigRational::zero(), BigRational::one()))
    }

    pub fn from_coeff(reg: &Arc<Registry>, c: Coeff) -> ScalarValue {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::unit(), c);
        }
        ScalarValue {
            registry: reg.clone(),
            terms,
        }
    }

    pub fn sym(reg: &Arc<Registry>, name: &str) -> Result<ScalarValue, ScalarError> {
        Self::sym_pow(reg, name, 1)
    }

    pub fn sym_pow(reg: &Arc<Registry>, name: &str, exp: i32) -> Result<ScalarValue, ScalarError> {
        let s = reg.require(name)?;
        Ok(Self::monomial(reg, cplx(BigRational::one(), BigRational::zero()), Mono::var(s, exp)))
    }

    pub fn monomial(reg: &Arc<Registry>, c: Coeff, m: Mono) -> ScalarValue {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ScalarValue {
            registry: reg.clone(),
            terms,
        }
    }

    /// i times hbar, the ubiquitous bracket prefactor.
    pub fn i_hbar(reg: &Arc<Registry>) -> ScalarValue {
        let h = reg.require("hbar").expect("standard registry symbol");
        Self::monomial(reg, cplx(BigRational::zero(), BigRational::one()), Mono::var(h, 1))
    }

    pub fn registry(&self) -> &Arc<Registry> {
        &self.registry
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Mono::unit())
                .map(|c| c.re.is_one() && c.im.is_zero())
                .unwrap_or(false)
    }

    /// Single-term values are the invertible elements of the ring.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn insert_term(terms: &mut BTreeMap<Mono, Coeff>, m: Mono, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn checked_add(&self, other: &ScalarValue) -> Result<ScalarValue, ScalarError> {
        if !Registry::same(&self.registry, &other.registry) {
            return Err(ScalarError::RegistryMismatch);
        }
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Ok(ScalarValue {
            registry: self.registry.clone(),
            terms,
        })
    }

    pub fn checked_mul(&self, other: &ScalarValue) -> Result<ScalarValue, ScalarError> {
        if !Registry::same(&self.registry, &other.registry) {
            return Err(ScalarError::RegistryMismatch);
        }
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                Self::insert_term(&mut terms, ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(ScalarValue {
            registry: self.registry.clone(),
            terms,
        })
    }

    pub fn add(&self, other: &ScalarValue) -> ScalarValue {
        self.checked_add(other).expect("registry mismatch in add")
    }

    pub fn sub(&self, other: &ScalarValue) -> ScalarValue {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ScalarValue) -> ScalarValue {
        self.checked_mul(other).expect("registry mismatch in mul")
    }

    pub fn neg(&self) -> ScalarValue {
        ScalarValue {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> ScalarValue {
        if r.is_zero() {
            return Self::zero(&self.registry);
        }
        let f = cplx(r.clone(), BigRational::zero());
        ScalarValue {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * f.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ScalarValue {
        let mut acc = Self::one(&self.registry);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact inverse, defined for single-term values only.
    pub fn try_inv(&self) -> Result<ScalarValue, ScalarError> {
        if self.terms.len() != 1 {
            return Err(ScalarError::NotInvertible(self.to_string()));
        }
        let (m, c) = self.terms.iter().next().expect("one term");
        let inv_c = Coeff::one() / c.clone();
        Ok(ScalarValue::monomial(&self.registry, inv_c, m.inv()))
    }

    /// Integer power allowing negative exponents; negative needs invertibility.
    pub fn pow_i(&self, n: i32) -> Result<ScalarValue, ScalarError> {
        if n >= 0 {
            Ok(self.pow(n as u32))
        } else {
            Ok(self.try_inv()?.pow((-n) as u32))
        }
    }

    /// Exact division. Returns None when `self` is not a multiple of `div`.
    pub fn div_exact(&self, div: &ScalarValue) -> Option<ScalarValue> {
        if !Registry::same(&self.registry, &div.registry) || div.is_zero() {
            return None;
        }
        let (lead_m, lead_c) = div.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = ScalarValue::zero(&self.registry);
        // Each round cancels the remainder's leading term; for exact multiples
        // this finishes in as many rounds as the quotient has terms. The bound
        // guards the non-divisible case, where leading terms can walk downward
        // without ever reaching zero.
        let mut guard = self.terms.len() * div.terms.len() + 64;
        while !rem.is_zero() {
            if guard == 0 {
                return None;
            }
            guard -= 1;
            let (rm, rc) = rem.terms.iter().next_back().expect("nonzero");
            let qm = rm.mul(&lead_m.inv());
            let qc = rc.clone() / lead_c.clone();
            let qt = ScalarValue::monomial(&self.registry, qc, qm);
            rem = rem.sub(&qt.mul(div));
            quot = quot.add(&qt);
        }
        Some(quot)
    }

    /// Replace bound symbols by values; unbound symbols pass through.
    /// Negative exponents require the binding to be invertible.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<Sym, ScalarValue>,
    ) -> Result<ScalarValue, ScalarError> {
        for v in bindings.values() {
            if !Registry::same(&self.registry, v.registry()) {
                return Err(ScalarError::RegistryMismatch);
            }
        }
        let mut out = ScalarValue::zero(&self.registry);
        for (m, c) in &self.terms {
            let mut residual = Vec::new();
            let mut factor = ScalarValue::from_coeff(&self.registry, c.clone());
            for (s, e) in m.exps() {
                match bindings.get(&s) {
                    Some(val) => factor = factor.mul(&val.pow_i(e)?),
                    None => residual.push((s.0, e)),
                }
            }
            let term = factor.mul(&ScalarValue::monomial(
                &self.registry,
                Coeff::one(),
                Mono(residual),
            ));
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Evaluate to a complex double. Every symbol that appears must be bound.
    /// Terms are summed in the canonical monomial order.
    pub fn eval(&self, bindings: &BTreeMap<Sym, Complex64>) -> Result<Complex64, ScalarError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(
                c.re.to_f64().ok_or_else(|| ScalarError::Malformed("overflow".into()))?,
                c.im.to_f64().ok_or_else(|| ScalarError::Malformed("overflow".into()))?,
            );
            for (s, e) in m.exps() {
                let v = bindings
                    .get(&s)
                    .ok_or_else(|| ScalarError::UnboundSymbol(self.registry.name(s).to_string()))?;
                t *= v.powi(e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// JSON form: array of terms sorted by symbol names then exponents, each
    /// `{"coeff": [num_re, den_re, num_im, den_im], "exps": {name: exp}}` with
    /// the four integers as decimal strings so round-trips are bit exact.
    pub fn to_json(&self) -> Value {
        let mut items: Vec<(Vec<(String, i32)>, &Coeff)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut key: Vec<(String, i32)> = m
                    .exps()
                    .map(|(s, e)| (self.registry.name(s).to_string(), e))
                    .collect();
                key.sort();
                (key, c)
            })
            .collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        Value::Array(
            items
                .into_iter()
                .map(|(key, c)| {
                    let exps: serde_json::Map<String, Value> = key
                        .into_iter()
                        .map(|(n, e)| (n, json!(e)))
                        .collect();
                    json!({
                        "coeff": [
                            c.re.numer().to_string(),
                            c.re.denom().to_string(),
                            c.im.numer().to_string(),
                            c.im.denom().to_string(),
                        ],
                        "exps": Value::Object(exps),
                    })
                })
                .collect(),
        )
    }

    pub fn from_json(reg: &Arc<Registry>, v: &Value) -> Result<ScalarValue, ScalarError> {
        let arr = v
            .as_array()
            .ok_or_else(|| ScalarError::Malformed("expected array of terms".into()))?;
        let mut out = ScalarValue::zero(reg);
        for t in arr {
            let coeff = t
                .get("coeff")
                .and_then(Value::as_array)
                .ok_or_else(|| ScalarError::Malformed("term lacks coeff".into()))?;
            if coeff.len() != 4 {
                return Err(ScalarError::Malformed("coeff must have 4 entries".into()));
            }
            let mut ints = Vec::with_capacity(4);
            for c in coeff {
                let s = c
                    .as_str()
                    .ok_or_else(|| ScalarError::Malformed("coeff entries are strings".into()))?;
                ints.push(
                    BigInt::from_str(s)
                        .map_err(|e| ScalarError::Malformed(format!("bad integer: {e}")))?,
                );
            }
            let c = cplx(
                BigRational::new(ints[0].clone(), ints[1].clone()),
                BigRational::new(ints[2].clone(), ints[3].clone()),
            );
            let mut pairs = Vec::new();
            if let Some(exps) = t.get("exps").and_then(Value::as_object) {
                for (name, e) in exps {
                    let s = reg.require(name)?;
                    let e = e
                        .as_i64()
                        .ok_or_else(|| ScalarError::Malformed("exponent must be integer".into()))?;
                    pairs.push((s.0, e as i32));
                }
            }
            pairs.sort();
            out = out.add(&ScalarValue::monomial(reg, c, Mono(pairs)));
        }
        Ok(out)
    }
}

impl PartialEq for ScalarValue {
    fn eq(&self, other: &Self) -> bool {
        Registry::same(&self.registry, &other.registry) && self.terms == other.terms
    }
}

impl Eq for ScalarValue {}

fn rat_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Render one coefficient. `lead` controls whether a unit coefficient may be
/// dropped (the caller appends the monomial part).
fn coeff_str(c: &Coeff, has_tail: bool) -> String {
    if c.im.is_zero() {
        if has_tail && c.re.is_one() {
            return String::new();
        }
        if has_tail && (-c.re.clone()).is_one() {
            return "-".to_string();
        }
        return rat_str(&c.re);
    }
    if c.re.is_zero() {
        if c.im.is_one() {
            return "i".to_string();
        }
        if (-c.im.clone()).is_one() {
            return "-i".to_string();
        }
        return format!("{}*i", rat_str(&c.im));
    }
    let im = if c.im.is_positive() {
        format!(" + {}*i", rat_str(&c.im))
    } else {
        format!(" - {}*i", rat_str(&c.im.abs()))
    };
    format!("({}{})", rat_str(&c.re), im)
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors: Vec<String> = Vec::new();
            let cs = coeff_str(c, !m.is_unit());
            if cs == "-" {
                // unit-magnitude negative coefficient folds into the first factor
            } else if !cs.is_empty() {
                factors.push(cs.clone());
            }
            for (s, e) in m.exps() {
                let n = self.registry.name(s);
                if e == 1 {
                    factors.push(n.to_string());
                } else {
                    factors.push(format!("{n}^{e}"));
                }
            }
            if factors.is_empty() {
                factors.push("1".to_string());
            }
            let mut body = factors.join("*");
            if cs == "-" {
                body = format!("-{body}");
            }
            parts.push(body);
        }
        write!(f, "{}", parts.join(" + "))
    }
}
