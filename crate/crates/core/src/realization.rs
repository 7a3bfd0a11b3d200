//! Realizations `(V, {α_s^∨}, {α_s})` over an exact field, the graded
//! polynomial ring `R = Sym(V*)` and Demazure operators.
//!
//! Coordinates: `V = k^n`, the polynomial variables `x_0, …, x_{n-1}` are the
//! coordinate functionals on `V`, and each root `α_s` is a linear form in them.
//! Each `x_i` has degree 2.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::coxeter::{CoxeterSystem, Gen, Order};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::{count_monomials, monomials, Mono, Poly, MAX_VARS};

/// One line of a validation report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ValidationReport {
    pub field: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "[{}] {} ({})", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

type Matrix<F> = Vec<Vec<F>>;

fn mat_mul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(F::zero(), |acc, l| acc.add(&a[i][l].mul(&b[l][j]))))
                .collect()
        })
        .collect()
}

fn is_identity<F: Field>(a: &Matrix<F>) -> bool {
    a.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() }))
}

/// Multiplicative order of a square matrix, if at most `cap`.
fn matrix_order<F: Field>(a: &Matrix<F>, cap: u32) -> Option<u32> {
    let mut p = a.clone();
    for k in 1..=cap {
        if is_identity(&p) {
            return Some(k);
        }
        p = mat_mul(&p, a);
    }
    None
}

const ORDER_CAP: u32 = 64;

/// A realization together with memoized reflection and Demazure data.
pub struct Realization<F: Field> {
    sys: Arc<CoxeterSystem>,
    dim: usize,
    coroots: Vec<Vec<F>>,
    roots: Vec<Vec<F>>,
    alpha: Vec<Poly<F>>,
    delta: Vec<Poly<F>>,
    reflected_vars: Vec<Vec<Poly<F>>>,
    report: ValidationReport,
    degree_cap: u32,
    memo: RwLock<HashMap<(Gen, Mono), (Poly<F>, Poly<F>)>>,
    bases: RwLock<HashMap<u32, Arc<DegreeBasis>>>,
}

/// The monomial basis of one polynomial degree.
#[derive(Debug)]
pub struct DegreeBasis {
    pub monos: Vec<Mono>,
    pub index: HashMap<Mono, usize>,
}

impl<F: Field> fmt::Debug for Realization<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Realization")
            .field("field", &F::name())
            .field("dim", &self.dim)
            .field("coroots", &self.coroots)
            .field("roots", &self.roots)
            .finish()
    }
}

impl<F: Field> Realization<F> {
    /// Runs the validation checks without building the realization.
    pub fn validate_data(sys: &CoxeterSystem, dim: usize, coroots: &[Vec<F>], roots: &[Vec<F>]) -> ValidationReport {
        let n = sys.rank();
        let mut checks = Vec::new();
        let shape_ok = dim <= MAX_VARS
            && coroots.len() == n
            && roots.len() == n
            && coroots.iter().all(|c| c.len() == dim)
            && roots.iter().all(|r| r.len() == dim);
        checks.push(Check {
            name: "shape".into(),
            passed: shape_ok,
            detail: format!("{n} roots and coroots of length dim V = {dim} (at most {MAX_VARS})"),
        });
        if !shape_ok {
            return ValidationReport { field: F::name(), checks };
        }
        let pair = |s: usize, t: usize| (0..dim).fold(F::zero(), |acc, j| acc.add(&roots[s][j].mul(&coroots[t][j])));
        let label = |s: usize| sys.labels()[s].clone();
        for s in 0..n {
            let p = pair(s, s);
            checks.push(Check {
                name: format!("balanced {}", label(s)),
                passed: p == F::from_i64(2),
                detail: format!("<alpha_{0}, alpha_{0}^v> = {p}", label(s)),
            });
            let nz = roots[s].iter().any(|x| !x.is_zero()) && coroots[s].iter().any(|x| !x.is_zero());
            checks.push(Check {
                name: format!("Demazure surjectivity {}", label(s)),
                passed: nz,
                detail: if nz {
                    "root and coroot nonzero, a functional with pairing 1 exists".into()
                } else {
                    "zero root or coroot".into()
                },
            });
        }
        let refl = |s: usize| -> Matrix<F> {
            (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| {
                            let id = if i == j { F::one() } else { F::zero() };
                            id.sub(&coroots[s][i].mul(&roots[s][j]))
                        })
                        .collect()
                })
                .collect()
        };
        for s in 0..n {
            for t in s + 1..n {
                let prod = mat_mul(&refl(s), &refl(t));
                let order = matrix_order(&prod, ORDER_CAP);
                let want: Order = sys.m(s as Gen, t as Gen);
                let passed = order == want;
                let found = order.map_or(format!("> {ORDER_CAP}"), |o| o.to_string());
                let expected = want.map_or("inf".to_string(), |m| m.to_string());
                checks.push(Check {
                    name: format!("braid order {}{}", label(s), label(t)),
                    passed,
                    detail: format!("order of st on V is {found}, m = {expected}"),
                });
            }
        }
        ValidationReport { field: F::name(), checks }
    }

    /// Validates and builds a realization.
    pub fn new(sys: Arc<CoxeterSystem>, dim: usize, coroots: Vec<Vec<F>>, roots: Vec<Vec<F>>) -> Result<Self> {
        let report = Self::validate_data(&sys, dim, &coroots, &roots);
        if !report.passed() {
            return Err(Error::InvalidRealization(report.failures()));
        }
        let n = sys.rank();
        let alpha: Vec<Poly<F>> = roots.iter().map(|r| Poly::linear(r)).collect();
        let two_inv = F::from_i64(2).inv();
        let delta: Vec<Poly<F>> = (0..n)
            .map(|s| match &two_inv {
                Some(h) => alpha[s].scale(h),
                None => {
                    let i = coroots[s].iter().position(|x| !x.is_zero()).expect("nonzero coroot");
                    Poly::var(i).scale(&coroots[s][i].inv().expect("nonzero"))
                }
            })
            .collect();
        let reflected_vars = (0..n)
            .map(|s| (0..dim).map(|j| Poly::var(j).sub(&alpha[s].scale(&coroots[s][j]))).collect())
            .collect();
        Ok(Realization {
            sys,
            dim,
            coroots,
            roots,
            alpha,
            delta,
            reflected_vars,
            report,
            degree_cap: 40,
            memo: RwLock::new(HashMap::new()),
            bases: RwLock::new(HashMap::new()),
        })
    }

    /// The Cartan-matrix realization on `V = k^{|S|}` with coroots the
    /// standard basis and `⟨α_s, α_t^∨⟩ = cartan[s][t]`.
    pub fn cartan(sys: Arc<CoxeterSystem>, cartan: &[Vec<i64>]) -> Result<Self> {
        let n = sys.rank();
        let coroots = (0..n).map(|s| (0..n).map(|t| F::from_i64(i64::from(s == t))).collect()).collect();
        let roots = cartan.iter().map(|row| row.iter().map(|&a| F::from_i64(a)).collect()).collect();
        Self::new(sys, n, coroots, roots)
    }

    /// Built-in Cartan realizations: `A1`, `A2`, `A3`, `B2`, `G2`, `A1xA1`,
    /// `I2(inf)`.
    pub fn standard(name: &str) -> Result<Self> {
        let sys = Arc::new(CoxeterSystem::of_type(name)?);
        let n = sys.rank();
        let mut c = vec![vec![0i64; n]; n];
        for (s, row) in c.iter_mut().enumerate() {
            row[s] = 2;
        }
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                c[s][t] = match sys.m(s as Gen, t as Gen) {
                    Some(2) => 0,
                    Some(3) => -1,
                    Some(4) => {
                        if s < t {
                            -2
                        } else {
                            -1
                        }
                    }
                    Some(6) => {
                        if s < t {
                            -3
                        } else {
                            -1
                        }
                    }
                    None => -2,
                    Some(m) => return Err(Error::InvalidRealization(vec![format!("no rational Cartan data for m = {m}")])),
                };
            }
        }
        Self::cartan(sys, &c)
    }

    pub fn system(&self) -> &Arc<CoxeterSystem> {
        &self.sys
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn report(&self) -> &ValidationReport {
        &self.report
    }
    pub fn coroot(&self, s: Gen) -> &[F] {
        &self.coroots[s as usize]
    }
    pub fn root_coords(&self, s: Gen) -> &[F] {
        &self.roots[s as usize]
    }
    pub fn alpha(&self, s: Gen) -> &Poly<F> {
        &self.alpha[s as usize]
    }
    pub fn delta(&self, s: Gen) -> &Poly<F> {
        &self.delta[s as usize]
    }

    pub fn with_degree_cap(mut self, cap: u32) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn var_names(&self) -> Vec<String> {
        (0..self.dim).map(|i| format!("x{i}")).collect()
    }

    pub fn display_poly(&self, p: &Poly<F>) -> String {
        p.display_with(&self.var_names())
    }

    /// `⟨α_s, α_t^∨⟩`.
    pub fn pairing(&self, s: Gen, t: Gen) -> F {
        (0..self.dim).fold(F::zero(), |acc, j| acc.add(&self.roots[s as usize][j].mul(&self.coroots[t as usize][j])))
    }

    fn mono_data(&self, s: Gen, m: Mono) -> Result<(Poly<F>, Poly<F>)> {
        if let Some(d) = self.memo.read().get(&(s, m)) {
            return Ok(d.clone());
        }
        let p = Poly::term(m, F::one());
        let sm = p.substitute(&self.reflected_vars[s as usize]);
        let dm = p.sub(&sm).div_linear(self.alpha(s)).ok_or(Error::DivisionNotExact)?;
        self.memo.write().insert((s, m), (sm.clone(), dm.clone()));
        Ok((sm, dm))
    }

    /// The action of `s` on `R`.
    pub fn reflect(&self, f: &Poly<F>, s: Gen) -> Poly<F> {
        let mut out = Poly::zero();
        for (m, c) in f.terms() {
            let (sm, _) = self.mono_data(s, *m).expect("reflection is always defined");
            out.add_assign(&sm.scale(c));
        }
        out
    }

    /// `∂_s(f) = (f − s(f))/α_s`.
    pub fn demazure(&self, f: &Poly<F>, s: Gen) -> Result<Poly<F>> {
        let mut out = Poly::zero();
        for (m, c) in f.terms() {
            let (_, dm) = self.mono_data(s, *m)?;
            out.add_assign(&dm.scale(c));
        }
        Ok(out)
    }

    /// `f = g + δ_s·h` with `g, h ∈ R^s`.
    pub fn invariant_decompose(&self, f: &Poly<F>, s: Gen) -> (Poly<F>, Poly<F>) {
        let h = self.demazure(f, s).expect("Demazure division is exact on a validated realization");
        let g = f.sub(&self.delta(s).mul(&h));
        (g, h)
    }

    /// `dim R^d` for the grading with `deg V* = 2`.
    pub fn graded_dim(&self, d: i32) -> usize {
        if d < 0 || d % 2 != 0 {
            0
        } else {
            count_monomials(self.dim, (d / 2) as u32)
        }
    }

    /// Monomial basis of polynomial degree `k` (grading `2k`).
    pub fn basis(&self, k: u32) -> Arc<DegreeBasis> {
        if let Some(b) = self.bases.read().get(&k) {
            return b.clone();
        }
        let monos = monomials(self.dim, k);
        let index = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let b = Arc::new(DegreeBasis { monos, index });
        self.bases.write().insert(k, b.clone());
        b
    }

    /// Monomial bases of all gradings `0, 2, …, ≤ d`.
    pub fn truncated_ring(&self, d: u32) -> Result<Vec<Arc<DegreeBasis>>> {
        if d > self.degree_cap {
            return Err(Error::DegreeBoundTooLarge(d as i32));
        }
        Ok((0..=d / 2).map(|k| self.basis(k)).collect())
    }
}

/// Supported coefficient fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    Rational,
    Prime(u64),
}

impl FieldKind {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "Q" | "QQ" | "rational" | "rationals" => Ok(FieldKind::Rational),
            _ => {
                let digits = t.trim_start_matches("GF").trim_start_matches('F').trim_start_matches('p');
                let digits = digits.trim_start_matches('(').trim_end_matches(')');
                match digits.parse::<u64>() {
                    Ok(p) if [2, 3, 5, 7, 11, 13].contains(&p) => Ok(FieldKind::Prime(p)),
                    _ => Err(Error::Parse(format!("unsupported field {s:?}; use Q or F2, F3, F5, F7, F11, F13"))),
                }
            }
        }
    }
}

/// A Coxeter entry in a config: a positive integer, `0` or `"inf"` for ∞.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum MatrixEntry {
    Int(u32),
    Text(String),
}

impl MatrixEntry {
    fn order(&self) -> Result<Order> {
        match self {
            MatrixEntry::Int(0) => Ok(None),
            MatrixEntry::Int(m) => Ok(Some(*m)),
            MatrixEntry::Text(t) if t == "inf" || t == "∞" => Ok(None),
            MatrixEntry::Text(t) => t.parse::<u32>().map(Some).map_err(|_| Error::Parse(format!("bad Coxeter entry {t:?}"))),
        }
    }
}

/// The realization section of a configuration document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct RealizationConfig {
    #[serde(default)]
    pub field: Option<String>,
    /// A built-in type such as `A2`; used when no explicit data is given.
    #[serde(default, rename = "type")]
    pub cartan_type: Option<String>,
    #[serde(default)]
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub coxeter_matrix: Option<Vec<Vec<MatrixEntry>>>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub coroots: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub roots: Option<Vec<Vec<String>>>,
    /// Declared finiteness; contradicting the classification is an error.
    #[serde(default)]
    pub finite: Option<bool>,
}

impl RealizationConfig {
    pub fn field_kind(&self) -> Result<FieldKind> {
        FieldKind::parse(self.field.as_deref().unwrap_or("Q"))
    }

    pub fn coxeter_system(&self) -> Result<CoxeterSystem> {
        let sys = match (&self.generators, &self.coxeter_matrix) {
            (Some(g), Some(m)) => {
                let matrix = m.iter().map(|row| row.iter().map(MatrixEntry::order).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
                CoxeterSystem::new(g.clone(), matrix)?
            }
            _ => CoxeterSystem::of_type(
                self.cartan_type.as_deref().ok_or_else(|| Error::Parse("config needs a type or generators and coxeter_matrix".into()))?,
            )?,
        };
        if let Some(f) = self.finite {
            if f != sys.is_finite() {
                return Err(Error::InvalidRealization(vec![format!(
                    "declared finite = {f} but the Coxeter graph is of type {}",
                    sys.type_name()
                )]));
            }
        }
        Ok(sys)
    }

    pub fn build<F: Field>(&self) -> Result<Realization<F>> {
        let sys = Arc::new(self.coxeter_system()?);
        match (&self.coroots, &self.roots) {
            (Some(c), Some(r)) => {
                let parse = |rows: &Vec<Vec<String>>| -> Result<Vec<Vec<F>>> {
                    rows.iter().map(|row| row.iter().map(|x| F::parse(x)).collect()).collect()
                };
                let coroots = parse(c)?;
                let roots = parse(r)?;
                let dim = self.dim.unwrap_or_else(|| coroots.first().map_or(0, |v| v.len()));
                Realization::new(sys, dim, coroots, roots)
            }
            _ => {
                let name = self
                    .cartan_type
                    .clone()
                    .ok_or_else(|| Error::Parse("config needs roots and coroots or a built-in type".into()))?;
                let r = Realization::<F>::standard(&name)?;
                if r.sys.labels() != sys.labels() || r.sys.matrix() != sys.matrix() {
                    return Err(Error::InvalidRealization(vec!["built-in type does not match the Coxeter data".into()]));
                }
                Ok(r)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Rational, F2};

    type R = Realization<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn a2_validates() {
        let r = R::standard("A2").unwrap();
        assert!(r.report().passed());
        assert!(r.report().checks.iter().any(|c| c.name == "braid order st" && c.detail.contains("is 3")));
    }

    #[test]
    fn unbalanced_rejected() {
        let sys = Arc::new(CoxeterSystem::of_type("A1").unwrap());
        let err = R::new(sys, 1, vec![vec![q(1)]], vec![vec![q(3)]]).unwrap_err();
        match err {
            Error::InvalidRealization(f) => assert!(f.iter().any(|m| m.starts_with("balanced"))),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn b2_over_f2_reports_order() {
        let sys = CoxeterSystem::of_type("B2").unwrap();
        let coroots = vec![vec![F2::from_i64(1), F2::from_i64(0)], vec![F2::from_i64(0), F2::from_i64(1)]];
        let roots = vec![vec![F2::from_i64(2), F2::from_i64(-2)], vec![F2::from_i64(-1), F2::from_i64(2)]];
        let rep = Realization::<F2>::validate_data(&sys, 2, &coroots, &roots);
        let braid = rep.checks.iter().find(|c| c.name.starts_with("braid")).unwrap();
        assert!(!braid.passed);
        assert!(braid.detail.contains("is 2"), "{}", braid.detail);
    }

    #[test]
    fn demazure_examples() {
        let r = R::standard("A2").unwrap();
        assert_eq!(r.demazure(r.alpha(0), 0).unwrap(), Poly::constant(q(2)));
        assert_eq!(r.demazure(r.alpha(1), 0).unwrap(), Poly::constant(q(-1)));
        assert_eq!(r.demazure(&Poly::constant(q(7)), 0).unwrap(), Poly::zero());
    }

    #[test]
    fn invariant_decompose_examples() {
        let r = R::standard("A2").unwrap();
        let (g, h) = r.invariant_decompose(&r.delta(0).clone(), 0);
        assert_eq!((g, h), (Poly::zero(), Poly::one()));
        let (g, h) = r.invariant_decompose(&r.alpha(0).clone(), 0);
        assert_eq!((g, h), (Poly::zero(), Poly::constant(q(2))));
        let inv = r.alpha(0).add(&r.alpha(1).scale(&q(2)));
        assert_eq!(r.invariant_decompose(&inv, 0), (inv.clone(), Poly::zero()));
    }

    #[test]
    fn graded_dims() {
        let r = R::standard("A2").unwrap();
        assert_eq!((r.graded_dim(0), r.graded_dim(2), r.graded_dim(4), r.graded_dim(3)), (1, 2, 3, 0));
        let t = r.truncated_ring(4).unwrap();
        assert_eq!(t.iter().map(|b| b.monos.len()).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(r.truncated_ring(1000).is_err());
    }

    #[test]
    fn delta_in_characteristic_two() {
        let r = Realization::<F2>::standard("A2").unwrap();
        for s in 0..2 {
            assert!(r.demazure(r.delta(s), s).unwrap() == Poly::one());
        }
    }

    #[test]
    fn config_parsing() {
        let text = r#"{"field":"Q","generators":["s","t"],"coxeter_matrix":[[1,3],[3,1]],
            "coroots":[["1","0"],["0","1"]],"roots":[["2","-1"],["-1","2"]]}"#;
        let cfg: RealizationConfig = serde_json::from_str(text).unwrap();
        let r: R = cfg.build().unwrap();
        assert_eq!(r.pairing(0, 1), q(-1));
        let bad: RealizationConfig = serde_json::from_str(r#"{"generators":["s","t"],"coxeter_matrix":[[1,3],[2,1]],"roots":[],"coroots":[]}"#).unwrap();
        assert!(bad.build::<Rational>().is_err());
        let typed: RealizationConfig = serde_json::from_str(r#"{"type":"B2","field":"Q"}"#).unwrap();
        assert!(typed.build::<Rational>().is_ok());
    }
}
