//! Integral quadratic forms, exact signatures and discriminant data.
//!
//! Everything here is exact. Signatures come from congruent diagonalization
//! over the rationals (or over `Q(sqrt 3)` for forms with entries in
//! `Z[sqrt 3]`); no eigenvalues are ever computed.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Counts of positive and negative squares of a nondegenerate form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn new(positive: usize, negative: usize) -> Self {
        Self { positive, negative }
    }

    pub fn dim(&self) -> usize {
        self.positive + self.negative
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.negative, self.positive)
    }

    /// `(n, 1)`: the negative cone models real hyperbolic `n`-space.
    pub fn is_lorentzian(&self) -> bool {
        self.negative == 1 && self.positive >= 1
    }

    /// Sorted pair `(min, max)`, forgetting which sign is which.
    fn unoriented(&self) -> (usize, usize) {
        (self.positive.min(self.negative), self.positive.max(self.negative))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.positive, self.negative)
    }
}

/// Field elements whose sign can be decided exactly.
pub trait ExactSign {
    fn exact_sign(&self) -> Ordering;
}

impl ExactSign for BigRational {
    fn exact_sign(&self) -> Ordering {
        self.cmp(&BigRational::zero())
    }
}

/// Signature of a symmetric matrix by congruent diagonalization.
///
/// Diagonal pivots are used when available; otherwise a nonzero off-diagonal
/// entry `a[p][q]` (with `a[p][p] = a[q][q] = 0`) is turned into the pivot
/// `2 a[p][q]` by adding row and column `q` to row and column `p`.
pub fn congruence_signature<T>(mut a: Vec<Vec<T>>) -> Result<Signature>
where
    T: Clone + Zero + Sub<Output = T> + Mul<Output = T> + Div<Output = T> + ExactSign,
{
    let n = a.len();
    for row in &a {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    let (mut positive, mut negative) = (0, 0);
    for k in 0..n {
        if let Some(p) = (k..n).find(|&p| !a[p][p].is_zero()) {
            swap_symmetric(&mut a, k, p);
        } else {
            let pair = (k..n)
                .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
                .find(|&(p, q)| !a[p][q].is_zero());
            let Some((p, q)) = pair else {
                return Err(Error::Degenerate);
            };
            for j in 0..n {
                let v = a[p][j].clone() + a[q][j].clone();
                a[p][j] = v;
            }
            for row in a.iter_mut() {
                let v = row[p].clone() + row[q].clone();
                row[p] = v;
            }
            swap_symmetric(&mut a, k, p);
        }
        let pivot = a[k][k].clone();
        match pivot.exact_sign() {
            Ordering::Greater => positive += 1,
            Ordering::Less => negative += 1,
            Ordering::Equal => unreachable!("pivot selection guarantees a nonzero pivot"),
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone() / pivot.clone();
            for j in k + 1..n {
                let v = a[i][j].clone() - factor.clone() * a[k][j].clone();
                a[i][j] = v;
            }
        }
    }
    Ok(Signature { positive, negative })
}

fn swap_symmetric<T>(a: &mut [Vec<T>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn check_symmetric<T: PartialEq>(gram: &[Vec<T>]) -> Result<()> {
    let n = gram.len();
    if n == 0 {
        return Err(Error::InvalidInput("form must have positive dimension".into()));
    }
    for row in gram {
        if row.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if gram[i][j] != gram[j][i] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// A nondegenerate integral quadratic form given by its symmetric Gram matrix.
///
/// `B(x, y) = x^T G y` and `Q(x) = B(x, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    gram: Vec<Vec<BigInt>>,
    signature: Signature,
}

impl QuadraticForm {
    pub fn new(gram: Vec<Vec<BigInt>>) -> Result<Self> {
        check_symmetric(&gram)?;
        let signature = signature(&gram)?;
        Ok(Self { gram, signature })
    }

    pub fn from_diagonal(entries: Vec<BigInt>) -> Result<Self> {
        let n = entries.len();
        let gram = entries
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let mut row = vec![BigInt::zero(); n];
                row[i] = d;
                row
            })
            .collect();
        Self::new(gram)
    }

    /// Shorthand for small diagonal forms, e.g. `diagonal(&[-1, 3, 3, 1, 1])`.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        Self::from_diagonal(entries.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<BigInt>] {
        &self.gram
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|i| (0..self.dim()).all(|j| i == j || self.gram[i][j].is_zero()))
    }

    pub fn diagonal_entries(&self) -> Option<Vec<BigInt>> {
        self.is_diagonal()
            .then(|| (0..self.dim()).map(|i| self.gram[i][i].clone()).collect())
    }

    /// `G x`, so that `B(x, e_i)` is the `i`-th entry.
    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.gram
            .iter()
            .map(|row| row.iter().zip(x).map(|(g, xi)| g * xi).sum())
            .collect()
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        self.apply(x).iter().zip(y).map(|(gx, yi)| gx * yi).sum()
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.inner(x, x)
    }

    /// The congruent form `U^T G U`.
    pub fn transform(&self, u: &[Vec<BigInt>]) -> Result<Self> {
        let n = self.dim();
        if u.len() != n || u.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: u.len() });
        }
        let gu: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &self.gram[i][k] * &u[k][j]).sum()).collect())
            .collect();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| &u[k][i] * &gu[k][j]).sum()).collect())
            .collect();
        Self::new(gram)
    }

    /// Parses the form text format: `dim n`, then `diag a1 .. an` or `n` rows.
    pub fn from_text(text: &str) -> Result<Self> {
        let rows = parse_matrix_text(text)?;
        let gram = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(line, tok)| {
                        BigInt::from_str(&tok).map_err(|_| Error::Parse {
                            line,
                            message: format!("`{tok}` is not an integer"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(gram)
    }

    pub fn to_text(&self) -> String {
        write_matrix_text(&self.gram, self.is_diagonal())
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.diagonal_entries() {
            Some(d) => {
                let parts: Vec<String> = d.iter().map(|x| x.to_string()).collect();
                write!(f, "diag({})", parts.join(","))
            }
            None => {
                let rows: Vec<String> = self
                    .gram
                    .iter()
                    .map(|r| {
                        let parts: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                        format!("[{}]", parts.join(","))
                    })
                    .collect();
                write!(f, "[{}]", rows.join(","))
            }
        }
    }
}

/// Signature of an integer symmetric matrix, exact.
pub fn signature(gram: &[Vec<BigInt>]) -> Result<Signature> {
    let rational = gram
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    congruence_signature(rational)
}

/// Smith invariant factors `d_1 | d_2 | ... ` of an integer matrix, nonnegative.
pub fn smith_invariants(matrix: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let size = rows.min(cols);
    for t in 0..size {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by(|&(a, b), &(c, d)| m[a][b].abs().cmp(&m[c][d].abs()));
            let Some((pi, pj)) = pivot else {
                return finish_invariants(m, size);
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let q = m[i][t].div_floor(&m[t][t]);
                if !q.is_zero() {
                    for j in t..cols {
                        let v = &m[i][j] - &q * &m[t][j];
                        m[i][j] = v;
                    }
                }
                clean &= m[i][t].is_zero();
            }
            for j in t + 1..cols {
                let q = m[t][j].div_floor(&m[t][t]);
                if !q.is_zero() {
                    for row in m.iter_mut().skip(t) {
                        let v = &row[j] - &q * &row[t];
                        row[j] = v;
                    }
                }
                clean &= m[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&m[t][t])));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let v = &m[t][j] + &m[i][j];
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
    }
    finish_invariants(m, size)
}

fn finish_invariants(m: Vec<Vec<BigInt>>, size: usize) -> Vec<BigInt> {
    (0..size).map(|i| m[i][i].abs()).collect()
}

/// Exponent of the discriminant group `L^* / L`: the largest invariant factor.
pub fn discriminant_exponent(form: &QuadraticForm) -> BigInt {
    smith_invariants(form.gram())
        .into_iter()
        .max()
        .expect("forms have positive dimension")
}

/// Norms a crystallographic root can have: the divisors of `2e`.
///
/// If `r` is primitive with `Q(r) = k` and `2B(r, x)/k` is integral for all
/// `x`, then `(2/k) r` lies in `L^*`, so `k` divides `2e`.
pub fn candidate_root_norms(form: &QuadraticForm) -> Vec<BigInt> {
    divisors(&(discriminant_exponent(form) * 2))
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if n.is_multiple_of(&d) {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// `a + b sqrt(3)` with integer `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRingElement {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuadRingElement {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn integer(a: impl Into<BigInt>) -> Self {
        Self::new(a, 0)
    }

    /// Galois conjugate `a - b sqrt(3)`.
    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -&self.b }
    }

    /// Sign of the real number `a + b sqrt(3)`.
    pub fn sign(&self) -> Ordering {
        sqrt3_sign(&self.a, &self.b)
    }
}

/// Sign of `a + b sqrt(3)` by comparing `a^2` with `3 b^2`.
fn sqrt3_sign<T>(a: &T, b: &T) -> Ordering
where
    T: Signed + Ord + Clone,
{
    let zero = T::zero();
    match (a.cmp(&zero), b.cmp(&zero)) {
        (sa, Ordering::Equal) => sa,
        (Ordering::Equal, sb) => sb,
        (sa, sb) if sa == sb => sa,
        (sa, sb) => {
            let a2 = a.clone() * a.clone();
            let three = T::one() + T::one() + T::one();
            let b2 = b.clone() * b.clone() * three;
            if a2 > b2 {
                sa
            } else {
                sb
            }
        }
    }
}

impl fmt::Display for QuadRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.b.is_negative() {
            write!(f, "{}-{}*r3", self.a, -&self.b)
        } else {
            write!(f, "{}+{}*r3", self.a, self.b)
        }
    }
}

impl FromStr for QuadRingElement {
    type Err = String;

    /// Accepts `a`, `b*r3`, `a+b*r3` and `a-b*r3` (also `r3`, `-r3`).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let bad = || format!("`{s}` is not of the form a+b*r3");
        let Some(stripped) = s.strip_suffix("r3") else {
            return BigInt::from_str(s).map(Self::integer).map_err(|_| bad());
        };
        let head = stripped.strip_suffix('*').unwrap_or(stripped);
        // The split point is the last sign that is not the leading one.
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (a_part, b_part) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let a = BigInt::from_str(a_part).map_err(|_| bad())?;
        let b = match b_part {
            "" | "+" => BigInt::one(),
            "-" => -BigInt::one(),
            other => BigInt::from_str(other.strip_prefix('+').unwrap_or(other)).map_err(|_| bad())?,
        };
        Ok(Self { a, b })
    }
}

/// Element `a + b sqrt(3)` of the field `Q(sqrt 3)`, used for exact pivoting.
#[derive(Clone, Debug, PartialEq)]
struct Sqrt3Field {
    a: BigRational,
    b: BigRational,
}

impl From<&QuadRingElement> for Sqrt3Field {
    fn from(x: &QuadRingElement) -> Self {
        Self {
            a: BigRational::from_integer(x.a.clone()),
            b: BigRational::from_integer(x.b.clone()),
        }
    }
}

impl Add for Sqrt3Field {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for Sqrt3Field {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for Sqrt3Field {
    type Output = Self;
    fn neg(self) -> Self {
        Self { a: -self.a, b: -self.b }
    }
}

impl Mul for Sqrt3Field {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let three = BigRational::from_integer(3.into());
        Self {
            a: &self.a * &o.a + three * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Div for Sqrt3Field {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // (a + b r)/(c + d r) = (a + b r)(c - d r)/(c^2 - 3 d^2)
        let three = BigRational::from_integer(3.into());
        let norm = &o.a * &o.a - three * &o.b * &o.b;
        let num = self * Self { a: o.a, b: -o.b };
        Self { a: num.a / &norm, b: num.b / norm }
    }
}

impl Zero for Sqrt3Field {
    fn zero() -> Self {
        Self { a: BigRational::zero(), b: BigRational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl ExactSign for Sqrt3Field {
    fn exact_sign(&self) -> Ordering {
        sqrt3_sign(&self.a, &self.b)
    }
}

/// Symmetric form with entries in `Z[sqrt 3]` whose two real embeddings are
/// both nondegenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadRingForm {
    gram: Vec<Vec<QuadRingElement>>,
    embeddings: (Signature, Signature),
}

impl QuadRingForm {
    pub fn new(gram: Vec<Vec<QuadRingElement>>) -> Result<Self> {
        check_symmetric(&gram)?;
        let plus = embedded_signature(&gram)?;
        let conjugated: Vec<Vec<QuadRingElement>> = gram
            .iter()
            .map(|row| row.iter().map(QuadRingElement::conjugate).collect())
            .collect();
        let minus = embedded_signature(&conjugated)?;
        Ok(Self { gram, embeddings: (plus, minus) })
    }

    pub fn diagonal(entries: Vec<QuadRingElement>) -> Result<Self> {
        let n = entries.len();
        let gram = entries
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let mut row = vec![QuadRingElement::integer(0); n];
                row[i] = d;
                row
            })
            .collect();
        Self::new(gram)
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<QuadRingElement>] {
        &self.gram
    }

    /// Applies `sqrt 3 -> -sqrt 3` to every entry.
    pub fn conjugate(&self) -> Self {
        Self {
            gram: self
                .gram
                .iter()
                .map(|row| row.iter().map(QuadRingElement::conjugate).collect())
                .collect(),
            embeddings: (self.embeddings.1, self.embeddings.0),
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let rows = parse_matrix_text(text)?;
        let gram = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|(line, tok)| {
                        QuadRingElement::from_str(&tok).map_err(|message| Error::Parse { line, message })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(gram)
    }

    pub fn to_text(&self) -> String {
        let n = self.dim();
        let diagonal = (0..n).all(|i| {
            (0..n).all(|j| i == j || (self.gram[i][j].a.is_zero() && self.gram[i][j].b.is_zero()))
        });
        write_matrix_text(&self.gram, diagonal)
    }
}

fn embedded_signature(gram: &[Vec<QuadRingElement>]) -> Result<Signature> {
    let field = gram
        .iter()
        .map(|row| row.iter().map(Sqrt3Field::from).collect())
        .collect();
    congruence_signature(field)
}

/// Signatures under `sqrt 3 -> +sqrt 3` and `sqrt 3 -> -sqrt 3`.
pub fn conjugate_signature_pair(form: &QuadRingForm) -> (Signature, Signature) {
    form.embeddings
}

/// Whether a rank-5 form satisfies the Galois-conjugation hypothesis: one
/// embedding is Lorentzian (signature `(4,1)` up to orientation) and the other
/// has signature `(3,2)` up to orientation.
pub fn nonarithmeticity_witness(form: &QuadRingForm) -> Result<bool> {
    if form.dim() != 5 {
        return Err(Error::DimensionMismatch { expected: 5, found: form.dim() });
    }
    let (plus, minus) = conjugate_signature_pair(form);
    let hyperbolic = (1, 4);
    let mixed = (2, 3);
    Ok((plus.unoriented() == hyperbolic && minus.unoriented() == mixed)
        || (plus.unoriented() == mixed && minus.unoriented() == hyperbolic))
}

/// Tokens of a form file with their line numbers, `diag` expanded to rows.
fn parse_matrix_text(text: &str) -> Result<Vec<Vec<(usize, String)>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty form file".into() })?;
    let dim = header
        .strip_prefix("dim")
        .and_then(|rest| rest.trim().parse::<usize>().ok())
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Parse { line, message: format!("expected `dim <n>`, found `{header}`") })?;

    let body: Vec<(usize, &str)> = lines.collect();
    let tokens = |line: usize, s: &str| -> Vec<(usize, String)> {
        s.split_whitespace().map(|t| (line, t.to_string())).collect()
    };
    let check_len = |line: usize, found: usize| {
        if found == dim {
            Ok(())
        } else {
            Err(Error::Parse { line, message: format!("expected {dim} entries, found {found}") })
        }
    };

    if let Some(&(line, first)) = body.first() {
        if let Some(rest) = first.strip_prefix("diag") {
            if body.len() > 1 {
                return Err(Error::Parse { line: body[1].0, message: "unexpected content after `diag`".into() });
            }
            let entries = tokens(line, rest);
            check_len(line, entries.len())?;
            let zero = |line| (line, "0".to_string());
            return Ok((0..dim)
                .map(|i| (0..dim).map(|j| if i == j { entries[i].clone() } else { zero(line) }).collect())
                .collect());
        }
    }
    if body.len() != dim {
        let line = body.last().map_or(line, |&(l, _)| l);
        return Err(Error::Parse { line, message: format!("expected {dim} Gram rows, found {}", body.len()) });
    }
    body.into_iter()
        .map(|(line, s)| {
            let row = tokens(line, s);
            check_len(line, row.len())?;
            Ok(row)
        })
        .collect()
}

fn write_matrix_text<T: fmt::Display>(gram: &[Vec<T>], diagonal: bool) -> String {
    let mut out = format!("dim {}\n", gram.len());
    if diagonal {
        let entries: Vec<String> = (0..gram.len()).map(|i| gram[i][i].to_string()).collect();
        out.push_str(&format!("diag {}\n", entries.join(" ")));
    } else {
        for row in gram {
            let entries: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&entries.join(" "));
            out.push('\n');
        }
    }
    out
}
