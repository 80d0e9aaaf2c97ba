//! Roots of hyperbolic lattices and Vinberg's algorithm.
//!
//! Sign conventions: the form has signature `(n, 1)`, the controlling vector
//! `v0` has `Q(v0) < 0`, and every accepted root `r` points away from `v0`,
//! i.e. `B(r, v0) <= 0`. The polyhedron is `{x : B(x, r) <= 0}` and accepted
//! roots pairwise satisfy `B(r, r') <= 0`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coxeter::{build_diagram, finite_volume_check, CoxeterDiagram};
use crate::forms::{candidate_root_norms, QuadraticForm};
use crate::{Error, Result};

/// A primitive lattice vector of positive norm whose reflection preserves the
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root {
    pub vector: Vec<BigInt>,
    pub norm: BigInt,
}

impl Root {
    pub fn new(form: &QuadraticForm, vector: Vec<BigInt>) -> Result<Self> {
        let norm = form.norm(&vector);
        if !norm.is_positive() || !is_root(form, &vector, &norm) {
            return Err(Error::InvalidInput(format!("{} is not a root", fmt_vector(&vector))));
        }
        Ok(Self { vector, norm })
    }

    pub fn from_ints(form: &QuadraticForm, coords: &[i64]) -> Result<Self> {
        Self::new(form, coords.iter().map(|&c| BigInt::from(c)).collect())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} norm={}", fmt_vector(&self.vector), self.norm)
    }
}

pub(crate) fn fmt_vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// `Q(v) = k`, `v` primitive, and `2B(v, e_i) = 0 mod k` for every `i`.
pub fn is_root(form: &QuadraticForm, v: &[BigInt], k: &BigInt) -> bool {
    if !k.is_positive() || v.len() != form.dim() || form.norm(v) != *k {
        return false;
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    g.is_one() && form.apply(v).iter().all(|c| (c * BigInt::from(2)).is_multiple_of(k))
}

/// `x - (2B(r, x)/Q(r)) r`.
pub fn reflect(form: &QuadraticForm, r: &Root, x: &[BigInt]) -> Vec<BigInt> {
    let coeff: BigInt = form.inner(&r.vector, x) * 2;
    debug_assert!(coeff.is_multiple_of(&r.norm), "crystallographic condition violated");
    let coeff = coeff / &r.norm;
    x.iter().zip(&r.vector).map(|(xi, ri)| xi - &coeff * ri).collect()
}

/// Fincke-Pohst data for the positive definite majorant
/// `P(x) = Q(x) - 2 B(x, v0)^2 / Q(v0)`, written as
/// `P(x) = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2`.
struct Majorant {
    diag: Vec<BigRational>,
    mu: Vec<Vec<BigRational>>,
}

impl Majorant {
    fn new(form: &QuadraticForm, v0: &[BigInt]) -> Self {
        let n = form.dim();
        let gv = form.apply(v0);
        let qv = BigRational::from_integer(form.norm(v0));
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        BigRational::from_integer(form.gram()[i][j].clone())
                            - BigRational::from_integer(&gv[i] * &gv[j] * 2) / &qv
                    })
                    .collect()
            })
            .collect();
        let mut diag = vec![BigRational::zero(); n];
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut d = a[i][i].clone();
            for k in 0..i {
                d -= &diag[k] * &mu[k][i] * &mu[k][i];
            }
            assert!(d.is_positive(), "majorant of a Lorentzian form is positive definite");
            for j in i + 1..n {
                let mut s = a[i][j].clone();
                for k in 0..i {
                    s -= &diag[k] * &mu[k][i] * &mu[k][j];
                }
                mu[i][j] = s / &d;
            }
            diag[i] = d;
        }
        Self { diag, mu }
    }

    /// All integer `x` with `P(x) = target`.
    fn level_set(&self, target: &BigRational) -> Vec<Vec<BigInt>> {
        let n = self.diag.len();
        let mut out = Vec::new();
        let mut x = vec![BigInt::zero(); n];
        self.search(n - 1, &mut x, target.clone(), &mut out);
        out
    }

    fn search(&self, i: usize, x: &mut Vec<BigInt>, remaining: BigRational, out: &mut Vec<Vec<BigInt>>) {
        let shift: BigRational = (i + 1..x.len())
            .map(|j| &self.mu[i][j] * BigRational::from_integer(x[j].clone()))
            .sum();
        let budget = &remaining / &self.diag[i];
        // (x_i + shift)^2 <= budget; t bounds sqrt(budget) from above.
        let t: BigInt = Roots::sqrt(&budget.floor().to_integer()) + 1;
        let center = -&shift;
        let lo = center.floor().to_integer() - &t;
        let hi = center.ceil().to_integer() + &t;
        let mut xi = lo;
        while xi <= hi {
            let d = BigRational::from_integer(xi.clone()) + &shift;
            let sq = &d * &d;
            if sq <= budget {
                let rest = &remaining - &self.diag[i] * sq;
                x[i] = xi.clone();
                if i == 0 {
                    if rest.is_zero() {
                        out.push(x.clone());
                    }
                } else {
                    self.search(i - 1, x, rest, out);
                }
            }
            xi += 1;
        }
        x[i] = BigInt::zero();
    }
}

/// All roots with `Q(r) = k` and `B(r, v0) = a`, in lexicographic order.
///
/// Finite because `P(r) = k - 2a^2/Q(v0)` is fixed and `P` is positive
/// definite.
pub fn enumerate_roots(form: &QuadraticForm, v0: &[BigInt], k: &BigInt, a: &BigInt) -> Vec<Root> {
    enumerate_with(&Majorant::new(form, v0), form, v0, k, a)
}

fn enumerate_with(majorant: &Majorant, form: &QuadraticForm, v0: &[BigInt], k: &BigInt, a: &BigInt) -> Vec<Root> {
    let qv = BigRational::from_integer(form.norm(v0));
    let target = BigRational::from_integer(k.clone()) - BigRational::from_integer(a * a * 2) / qv;
    let mut roots: Vec<Root> = majorant
        .level_set(&target)
        .into_iter()
        .filter(|x| form.inner(x, v0) == *a && is_root(form, x, k))
        .map(|vector| Root { vector, norm: k.clone() })
        .collect();
    roots.sort_by(|p, q| p.vector.cmp(&q.vector));
    roots
}

fn check_lorentzian(form: &QuadraticForm, v0: &[BigInt]) -> Result<()> {
    if v0.len() != form.dim() {
        return Err(Error::DimensionMismatch { expected: form.dim(), found: v0.len() });
    }
    if !form.signature().is_lorentzian() {
        return Err(Error::InvalidInput(format!(
            "form {form} has signature {}, expected (n,1)",
            form.signature()
        )));
    }
    if !form.norm(v0).is_negative() {
        return Err(Error::InvalidInput(format!(
            "controlling vector {} must have negative norm",
            fmt_vector(v0)
        )));
    }
    Ok(())
}

/// A primitive vector of negative norm: the first basis vector with negative
/// norm if there is one, otherwise the lexicographically first vector in a
/// small box.
pub fn default_controlling_vector(form: &QuadraticForm) -> Result<Vec<BigInt>> {
    let n = form.dim();
    if let Some(i) = (0..n).find(|&i| form.gram()[i][i].is_negative()) {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        return Ok(v);
    }
    const RADIUS: i64 = 3;
    let mut v = vec![-RADIUS; n];
    loop {
        let vector: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
        let content = vector.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if content.is_one() && form.norm(&vector).is_negative() {
            return Ok(vector);
        }
        match v.iter().rposition(|&c| c < RADIUS) {
            Some(i) => {
                v[i] += 1;
                v[i + 1..].iter_mut().for_each(|c| *c = -RADIUS);
            }
            None => break,
        }
    }
    Err(Error::InvalidInput(format!("no vector of negative norm found for {form}")))
}

fn is_lex_positive(v: &[BigInt]) -> bool {
    v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_positive())
}

/// Simple roots of the finite root system orthogonal to `v0`.
///
/// Positive roots are the lexicographically positive ones; the simple roots
/// are the positive roots that are not a sum of two positive roots.
pub fn initial_chamber(form: &QuadraticForm, v0: &[BigInt]) -> Result<Vec<Root>> {
    check_lorentzian(form, v0)?;
    let majorant = Majorant::new(form, v0);
    let zero = BigInt::zero();
    let positive: Vec<Root> = candidate_root_norms(form)
        .iter()
        .flat_map(|k| enumerate_with(&majorant, form, v0, k, &zero))
        .filter(|r| is_lex_positive(&r.vector))
        .collect();
    let lookup: HashSet<&[BigInt]> = positive.iter().map(|r| r.vector.as_slice()).collect();
    let mut simple: Vec<Root> = positive
        .iter()
        .filter(|r| {
            !positive.iter().any(|s| {
                let diff: Vec<BigInt> = r.vector.iter().zip(&s.vector).map(|(x, y)| x - y).collect();
                lookup.contains(diff.as_slice())
            })
        })
        .cloned()
        .collect();
    simple.sort_by(|p, q| p.vector.cmp(&q.vector));
    Ok(simple)
}

/// Stopping limits for [`run_vinberg`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VinbergLimits {
    /// Largest height `B(r, v0)^2 / Q(r)` that will be examined.
    pub max_height: u64,
    /// Largest number of accepted roots, initial chamber included.
    pub max_roots: usize,
}

impl Default for VinbergLimits {
    fn default() -> Self {
        Self { max_height: 100, max_roots: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcceptedRoot {
    pub root: Root,
    /// `B(r, v0)`, always `<= 0`.
    pub inner_with_v0: BigInt,
    /// `B(r, v0)^2 / Q(r)`.
    #[serde(with = "crate::table::rational_str")]
    pub height: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VinbergState {
    pub form: QuadraticForm,
    pub v0: Vec<BigInt>,
    pub accepted: Vec<AcceptedRoot>,
    /// Every candidate of height at most this value has been examined.
    pub frontier: BigRational,
    pub complete: bool,
}

impl VinbergState {
    pub fn roots(&self) -> Vec<Root> {
        self.accepted.iter().map(|a| a.root.clone()).collect()
    }

    pub fn diagram(&self) -> Result<CoxeterDiagram> {
        build_diagram(&self.roots(), &self.form)
    }

    /// Dimension `n` of the hyperbolic space.
    pub fn hyperbolic_dim(&self) -> usize {
        self.form.dim() - 1
    }

    fn incomplete(self, reason: String) -> Error {
        Error::Incomplete { reason, state: Box::new(self) }
    }

    fn accept(&mut self, root: Root, limits: &VinbergLimits) -> Result<(), String> {
        if self.accepted.len() >= limits.max_roots {
            return Err(format!("root limit {} reached", limits.max_roots));
        }
        let inner_with_v0 = self.form.inner(&root.vector, &self.v0);
        let height = BigRational::new(&inner_with_v0 * &inner_with_v0, root.norm.clone());
        self.accepted.push(AcceptedRoot { root, inner_with_v0, height });
        Ok(())
    }
}

/// `(height, k, a)` for every `a < 0` and candidate norm `k` with
/// `a^2 / k <= max_height`, ordered by height and then by norm.
fn height_schedule(norms: &[BigInt], max_height: u64) -> Vec<(BigRational, BigInt, BigInt)> {
    let bound = BigRational::from_integer(BigInt::from(max_height));
    let mut schedule = Vec::new();
    for k in norms {
        let mut a = BigInt::one();
        loop {
            let h = BigRational::new(&a * &a, k.clone());
            if h > bound {
                break;
            }
            schedule.push((h, k.clone(), -&a));
            a += 1;
        }
    }
    schedule.sort_by(|x, y| x.0.cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    schedule
}

/// Vinberg's algorithm from the controlling vector `v0`.
///
/// Candidates are examined in increasing height, then increasing norm, then
/// lexicographic order; a candidate is accepted iff it has nonpositive inner
/// product with every accepted root. The finite-volume criterion is tested
/// after every acceptance.
pub fn run_vinberg(form: &QuadraticForm, v0: &[BigInt], limits: &VinbergLimits) -> Result<VinbergState> {
    check_lorentzian(form, v0)?;
    let n = form.dim() - 1;
    let mut state = VinbergState {
        form: form.clone(),
        v0: v0.to_vec(),
        accepted: Vec::new(),
        frontier: BigRational::zero(),
        complete: false,
    };
    for root in initial_chamber(form, v0)? {
        if let Err(reason) = state.accept(root, limits) {
            return Err(state.incomplete(reason));
        }
    }
    if finite_volume_check(&state.diagram()?, n) {
        state.complete = true;
        return Ok(state);
    }

    let majorant = Majorant::new(form, v0);
    let schedule = height_schedule(&candidate_root_norms(form), limits.max_height);
    let mut start = 0;
    while start < schedule.len() {
        let height = schedule[start].0.clone();
        let end = schedule[start..].iter().position(|s| s.0 != height).map_or(schedule.len(), |p| start + p);
        // Norms at this height are enumerated independently; the collected
        // order (by norm, then lexicographic) is fixed.
        let batch: Vec<Root> = schedule[start..end]
            .par_iter()
            .map(|(_, k, a)| enumerate_with(&majorant, form, v0, k, a))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect();
        for candidate in batch {
            let compatible = state
                .accepted
                .iter()
                .all(|acc| !form.inner(&candidate.vector, &acc.root.vector).is_positive());
            if !compatible {
                continue;
            }
            if let Err(reason) = state.accept(candidate, limits) {
                return Err(state.incomplete(reason));
            }
            if finite_volume_check(&state.diagram()?, n) {
                state.frontier = height;
                state.complete = true;
                return Ok(state);
            }
        }
        state.frontier = height;
        start = end;
    }
    let reason = format!("height limit {} exhausted", limits.max_height);
    Err(state.incomplete(reason))
}

/// Largest height among accepted roots, as `f64`, for display.
pub fn max_height(state: &VinbergState) -> f64 {
    state
        .accepted
        .iter()
        .map(|a| a.height.to_f64().unwrap_or(f64::NAN))
        .fold(0.0, f64::max)
}
