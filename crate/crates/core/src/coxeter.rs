//! Coxeter diagrams of acute-angled polyhedra.
//!
//! Bonds follow the usual conventions: no bond for a right angle, a bond of
//! multiplicity 1, 2, 3 for angles `pi/3`, `pi/4`, `pi/6`, a heavy bond for
//! mirrors parallel at infinity and a dashed bond (carrying its weight
//! `g^2 = cosh^2 d`) for ultraparallel mirrors. Labels are derived from the
//! exact value `g^2 = B(r, s)^2 / (Q(r) Q(s))`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::forms::QuadraticForm;
use crate::roots::Root;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BondLabel {
    /// Orthogonal mirrors.
    None,
    /// Dihedral angle `pi/m`, `m >= 3`.
    Finite(u32),
    /// Parallel at infinity.
    Heavy,
    /// Ultraparallel, with `g^2 > 1`.
    Dashed(BigRational),
}

impl BondLabel {
    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// The normalized squared inner product, when it is rational.
    pub fn g2(&self) -> Option<BigRational> {
        match self {
            BondLabel::None => Some(BigRational::zero()),
            BondLabel::Finite(3) => Some(Self::ratio(1, 4)),
            BondLabel::Finite(4) => Some(Self::ratio(1, 2)),
            BondLabel::Finite(6) => Some(Self::ratio(3, 4)),
            BondLabel::Finite(_) => None,
            BondLabel::Heavy => Some(BigRational::one()),
            BondLabel::Dashed(w) => Some(w.clone()),
        }
    }

    /// Label of a pair of mirrors with the given `g^2`, if it is admissible.
    pub fn from_g2(g2: &BigRational) -> Option<Self> {
        let one = BigRational::one();
        if g2.is_zero() {
            Some(BondLabel::None)
        } else if *g2 == Self::ratio(1, 4) {
            Some(BondLabel::Finite(3))
        } else if *g2 == Self::ratio(1, 2) {
            Some(BondLabel::Finite(4))
        } else if *g2 == Self::ratio(3, 4) {
            Some(BondLabel::Finite(6))
        } else if *g2 == one {
            Some(BondLabel::Heavy)
        } else if *g2 > one {
            Some(BondLabel::Dashed(g2.clone()))
        } else {
            None
        }
    }

    pub fn is_bond(&self) -> bool {
        !matches!(self, BondLabel::None)
    }

    /// Dihedral angle order `m` (2 for no bond), if the mirrors meet.
    pub fn order(&self) -> Option<u32> {
        match self {
            BondLabel::None => Some(2),
            BondLabel::Finite(m) => Some(*m),
            _ => None,
        }
    }
}

impl fmt::Display for BondLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BondLabel::None => write!(f, "2"),
            BondLabel::Finite(m @ (3 | 4 | 6)) => write!(f, "{m}"),
            BondLabel::Finite(m) => write!(f, "m:{m}"),
            BondLabel::Heavy => write!(f, "inf"),
            BondLabel::Dashed(w) => write!(f, "dashed:{}/{}", w.numer(), w.denom()),
        }
    }
}

impl FromStr for BondLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let finite = |m: u32| match m {
            2 => Ok(BondLabel::None),
            m if m >= 3 => Ok(BondLabel::Finite(m)),
            _ => Err(format!("bond order {m} must be at least 2")),
        };
        match s {
            "inf" => Ok(BondLabel::Heavy),
            _ if s.starts_with("dashed:") => {
                let w = BigRational::from_str(&s["dashed:".len()..])
                    .map_err(|_| format!("bad dashed weight in `{s}`"))?;
                if w <= BigRational::one() {
                    return Err(format!("dashed weight must exceed 1, found {w}"));
                }
                Ok(BondLabel::Dashed(w))
            }
            _ if s.starts_with("m:") => finite(s[2..].parse().map_err(|_| format!("bad bond order `{s}`"))?),
            _ => finite(s.parse().map_err(|_| format!("unknown bond label `{s}`"))?),
        }
    }
}

/// Nodes carry the norm of their root (1 for hand-built diagrams); bonds are
/// a symmetric label matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterDiagram {
    norms: Vec<BigInt>,
    bonds: Vec<Vec<BondLabel>>,
}

impl CoxeterDiagram {
    pub fn new(norms: Vec<BigInt>) -> Self {
        let n = norms.len();
        Self { norms, bonds: vec![vec![BondLabel::None; n]; n] }
    }

    /// `n` nodes of norm 1 with the given bonds.
    pub fn from_bonds(n: usize, bonds: &[(usize, usize, BondLabel)]) -> Self {
        let mut d = Self::new(vec![BigInt::one(); n]);
        for (i, j, label) in bonds {
            d.set_bond(*i, *j, label.clone());
        }
        d
    }

    pub fn set_bond(&mut self, i: usize, j: usize, label: BondLabel) {
        assert_ne!(i, j, "a node cannot bond to itself");
        self.bonds[i][j] = label.clone();
        self.bonds[j][i] = label;
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn norm(&self, i: usize) -> &BigInt {
        &self.norms[i]
    }

    pub fn norms(&self) -> &[BigInt] {
        &self.norms
    }

    pub fn bond(&self, i: usize, j: usize) -> &BondLabel {
        &self.bonds[i][j]
    }

    /// All bonds `(i, j, label)` with `i < j`.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize, &BondLabel)> + '_ {
        (0..self.len()).flat_map(move |i| {
            (i + 1..self.len()).filter(move |&j| self.bonds[i][j].is_bond()).map(move |j| (i, j, &self.bonds[i][j]))
        })
    }

    /// The exact `g^2` table, present when every label has a rational `g^2`.
    pub fn g2_table(&self) -> Option<Vec<Vec<BigRational>>> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .map(|j| if i == j { Some(BigRational::one()) } else { self.bonds[i][j].g2() })
                    .collect()
            })
            .collect()
    }

    /// Rebuilds labels from a `g^2` table.
    pub fn from_g2_table(norms: Vec<BigInt>, g2: &[Vec<BigRational>]) -> Result<Self> {
        let mut d = Self::new(norms);
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                let label = BondLabel::from_g2(&g2[i][j])
                    .ok_or_else(|| Error::NonCrystallographicAngle { i, j, g2: g2[i][j].clone() })?;
                d.set_bond(i, j, label);
            }
        }
        Ok(d)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, k) in self.norms.iter().enumerate() {
            out.push_str(&format!("node {i} norm={k}\n"));
        }
        for (i, j, label) in self.bonds() {
            out.push_str(&format!("bond {i} {j} {label}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut norms = Vec::new();
        let mut bonds = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line, message };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            match tokens.as_slice() {
                ["node", i, norm] => {
                    let i: usize = i.parse().map_err(|_| err(format!("bad node index `{i}`")))?;
                    if i != norms.len() {
                        return Err(err(format!("expected node {}, found node {i}", norms.len())));
                    }
                    let k = norm
                        .strip_prefix("norm=")
                        .and_then(|k| BigInt::from_str(k).ok())
                        .ok_or_else(|| err(format!("expected `norm=<k>`, found `{norm}`")))?;
                    norms.push(k);
                }
                ["bond", i, j, label] => {
                    let i: usize = i.parse().map_err(|_| err(format!("bad node index `{i}`")))?;
                    let j: usize = j.parse().map_err(|_| err(format!("bad node index `{j}`")))?;
                    let label = BondLabel::from_str(label).map_err(err)?;
                    bonds.push((line, i, j, label));
                }
                _ => return Err(err(format!("unrecognized line `{content}`"))),
            }
        }
        let mut d = Self::new(norms);
        for (line, i, j, label) in bonds {
            if i >= d.len() || j >= d.len() || i == j {
                return Err(Error::Parse { line, message: format!("bond {i} {j} refers to missing nodes") });
            }
            d.set_bond(i, j, label);
        }
        Ok(d)
    }

    /// Graphviz description; bond multiplicity as edge label, heavy and
    /// dashed bonds styled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph coxeter {\n  node [shape=circle];\n");
        for (i, k) in self.norms.iter().enumerate() {
            out.push_str(&format!("  n{i} [label=\"{i}\\nk={k}\"];\n"));
        }
        for (i, j, label) in self.bonds() {
            let attrs = match label {
                BondLabel::Finite(3) => "label=\"1\"".to_string(),
                BondLabel::Finite(4) => "label=\"2\"".to_string(),
                BondLabel::Finite(6) => "label=\"3\"".to_string(),
                BondLabel::Finite(m) => format!("label=\"m={m}\""),
                BondLabel::Heavy => "label=\"inf\", style=bold, penwidth=3".to_string(),
                BondLabel::Dashed(w) => format!("label=\"{}/{}\", style=dashed", w.numer(), w.denom()),
                BondLabel::None => unreachable!(),
            };
            out.push_str(&format!("  n{i} -- n{j} [{attrs}];\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Diagram of a set of roots. Roots must pairwise have `B <= 0`.
pub fn build_diagram(roots: &[Root], form: &QuadraticForm) -> Result<CoxeterDiagram> {
    let mut d = CoxeterDiagram::new(roots.iter().map(|r| r.norm.clone()).collect());
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let b = form.inner(&roots[i].vector, &roots[j].vector);
            if b.is_positive() {
                return Err(Error::InvalidInput(format!("roots {i} and {j} have positive inner product {b}")));
            }
            let g2 = BigRational::new(&b * &b, &roots[i].norm * &roots[j].norm);
            let label = BondLabel::from_g2(&g2).ok_or(Error::NonCrystallographicAngle { i, j, g2 })?;
            d.set_bond(i, j, label);
        }
    }
    Ok(d)
}

/// Irreducible finite (spherical) and affine Coxeter diagrams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    E(usize),
    F4,
    G2,
    H3,
    H4,
    I2(u32),
    AffineA(usize),
    AffineB(usize),
    AffineC(usize),
    AffineD(usize),
    AffineE(usize),
    AffineF4,
    AffineG2,
}

impl CoxeterType {
    pub fn is_affine(&self) -> bool {
        use CoxeterType::*;
        matches!(self, AffineA(_) | AffineB(_) | AffineC(_) | AffineD(_) | AffineE(_) | AffineF4 | AffineG2)
    }

    /// Rank of the type: node count for finite types, one less for affine.
    pub fn rank(&self) -> usize {
        use CoxeterType::*;
        match self {
            A(n) | B(n) | D(n) | E(n) => *n,
            AffineA(n) | AffineB(n) | AffineC(n) | AffineD(n) | AffineE(n) => *n,
            F4 | H4 | AffineF4 => 4,
            H3 => 3,
            G2 | I2(_) | AffineG2 => 2,
        }
    }

    pub fn node_count(&self) -> usize {
        if self.is_affine() {
            self.rank() + 1
        } else {
            self.rank()
        }
    }

    /// Order of the finite Coxeter group, `None` for affine types.
    pub fn group_order(&self) -> Option<BigInt> {
        use CoxeterType::*;
        let factorial = |n: usize| (1..=n).fold(BigInt::one(), |acc, i| acc * i);
        let pow2 = |n: usize| BigInt::one() << n;
        Some(match self {
            A(n) => factorial(n + 1),
            B(n) => pow2(*n) * factorial(*n),
            D(n) => pow2(n - 1) * factorial(*n),
            E(6) => 51_840.into(),
            E(7) => 2_903_040.into(),
            E(8) => 696_729_600.into(),
            E(_) => unreachable!("E_n only exists for n = 6, 7, 8"),
            F4 => 1152.into(),
            G2 => 12.into(),
            H3 => 120.into(),
            H4 => 14_400.into(),
            I2(m) => BigInt::from(2 * m),
            _ => return None,
        })
    }

    /// The catalog diagram: node count and bonds.
    fn bonds(&self) -> (usize, Vec<(usize, usize, BondLabel)>) {
        use BondLabel::{Finite, Heavy};
        use CoxeterType::*;
        let path = |len: usize| -> Vec<(usize, usize, BondLabel)> {
            (1..len).map(|i| (i - 1, i, Finite(3))).collect()
        };
        let with_last = |mut bonds: Vec<(usize, usize, BondLabel)>, label| {
            if let Some(last) = bonds.last_mut() {
                last.2 = label;
            }
            bonds
        };
        let n = self.node_count();
        let bonds = match *self {
            A(_) => path(n),
            B(_) => with_last(path(n), Finite(4)),
            D(_) => {
                let mut b = path(n - 1);
                b.push((n - 3, n - 1, Finite(3)));
                b
            }
            E(_) => {
                let mut b = path(n - 1);
                b.push((2, n - 1, Finite(3)));
                b
            }
            F4 => vec![(0, 1, Finite(3)), (1, 2, Finite(4)), (2, 3, Finite(3))],
            G2 => vec![(0, 1, Finite(6))],
            H3 => vec![(0, 1, Finite(5)), (1, 2, Finite(3))],
            H4 => vec![(0, 1, Finite(5)), (1, 2, Finite(3)), (2, 3, Finite(3))],
            I2(m) => vec![(0, 1, Finite(m))],
            AffineA(1) => vec![(0, 1, Heavy)],
            AffineA(_) => {
                let mut b = path(n);
                b.push((0, n - 1, Finite(3)));
                b
            }
            AffineB(_) => {
                // Fork {0, 1} at node 2, path 2 .. n-1 ending in a double bond.
                let mut b: Vec<_> = (2..n).map(|i| (i - 1, i, Finite(3))).collect();
                b[0] = (0, 2, Finite(3));
                b.insert(0, (1, 2, Finite(3)));
                with_last(b, Finite(4))
            }
            AffineC(_) => {
                let mut b = with_last(path(n), Finite(4));
                b[0].2 = Finite(4);
                b
            }
            AffineD(_) => {
                // Path 1 .. n-2 with forks {0} at 2 and {n-1} at n-3.
                let mut b: Vec<_> = (2..n - 1).map(|i| (i - 1, i, Finite(3))).collect();
                b.push((0, 2, Finite(3)));
                b.push((n - 3, n - 1, Finite(3)));
                b
            }
            AffineE(6) => {
                let mut b = path(5);
                b.push((2, 5, Finite(3)));
                b.push((5, 6, Finite(3)));
                b
            }
            AffineE(7) => {
                let mut b = path(7);
                b.push((3, 7, Finite(3)));
                b
            }
            AffineE(8) => {
                let mut b = path(8);
                b.push((2, 8, Finite(3)));
                b
            }
            AffineE(_) => unreachable!("affine E_n only exists for n = 6, 7, 8"),
            AffineF4 => vec![(0, 1, Finite(3)), (1, 2, Finite(3)), (2, 3, Finite(4)), (3, 4, Finite(3))],
            AffineG2 => vec![(0, 1, Finite(3)), (1, 2, Finite(6))],
        };
        (n, bonds)
    }

    /// Catalog entries with `nodes` nodes. `label` is the bond of a two-node
    /// component and selects the dihedral type.
    fn candidates(nodes: usize, label: Option<&BondLabel>) -> Vec<CoxeterType> {
        use CoxeterType::*;
        match nodes {
            0 => vec![],
            1 => vec![A(1)],
            2 => match label {
                Some(BondLabel::Finite(3)) => vec![A(2)],
                Some(BondLabel::Finite(4)) => vec![B(2)],
                Some(BondLabel::Finite(6)) => vec![G2],
                Some(BondLabel::Finite(m)) => vec![I2(*m)],
                Some(BondLabel::Heavy) => vec![AffineA(1)],
                _ => vec![],
            },
            s => {
                let mut c = vec![A(s), B(s), AffineA(s - 1), AffineC(s - 1)];
                if s >= 4 {
                    c.extend([D(s), AffineB(s - 1)]);
                }
                if s >= 5 {
                    c.push(AffineD(s - 1));
                }
                match s {
                    3 => c.extend([H3, AffineG2]),
                    4 => c.extend([F4, H4]),
                    5 => c.push(AffineF4),
                    6 => c.push(E(6)),
                    7 => c.extend([E(7), AffineE(6)]),
                    8 => c.extend([E(8), AffineE(7)]),
                    9 => c.push(AffineE(8)),
                    _ => {}
                }
                c
            }
        }
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CoxeterType::*;
        match self {
            A(n) => write!(f, "A{n}"),
            B(n) => write!(f, "B{n}"),
            D(n) => write!(f, "D{n}"),
            E(n) => write!(f, "E{n}"),
            F4 => write!(f, "F4"),
            G2 => write!(f, "G2"),
            H3 => write!(f, "H3"),
            H4 => write!(f, "H4"),
            I2(m) => write!(f, "I2({m})"),
            AffineA(n) => write!(f, "~A{n}"),
            AffineB(n) => write!(f, "~B{n}"),
            AffineC(n) => write!(f, "~C{n}"),
            AffineD(n) => write!(f, "~D{n}"),
            AffineE(n) => write!(f, "~E{n}"),
            AffineF4 => write!(f, "~F4"),
            AffineG2 => write!(f, "~G2"),
        }
    }
}

/// Labeled graph used for isomorphism and automorphism searches.
struct LabeledGraph {
    labels: Vec<Vec<BondLabel>>,
    colors: Vec<BigInt>,
    degrees: Vec<usize>,
}

impl LabeledGraph {
    fn new(labels: Vec<Vec<BondLabel>>, colors: Vec<BigInt>) -> Self {
        let degrees = labels.iter().map(|row| row.iter().filter(|l| l.is_bond()).count()).collect();
        Self { labels, colors, degrees }
    }

    fn induced(diagram: &CoxeterDiagram, nodes: &[usize], with_norms: bool) -> Self {
        let labels = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| diagram.bonds[i][j].clone()).collect())
            .collect();
        let colors = if with_norms {
            nodes.iter().map(|&i| diagram.norms[i].clone()).collect()
        } else {
            vec![BigInt::zero(); nodes.len()]
        };
        Self::new(labels, colors)
    }

    fn catalog(t: CoxeterType) -> Self {
        let (n, bonds) = t.bonds();
        let mut labels = vec![vec![BondLabel::None; n]; n];
        for (i, j, l) in bonds {
            labels[i][j] = l.clone();
            labels[j][i] = l;
        }
        Self::new(labels, vec![BigInt::zero(); n])
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn label_multiset(&self) -> Vec<String> {
        let mut m: Vec<String> = (0..self.len())
            .flat_map(|i| (i + 1..self.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.labels[i][j].is_bond())
            .map(|(i, j)| self.labels[i][j].to_string())
            .collect();
        m.sort();
        m
    }

    /// Number of label- and color-preserving bijections `self -> other`,
    /// stopping once `limit` have been found.
    fn count_isomorphisms(&self, other: &Self, limit: usize) -> usize {
        if self.len() != other.len() {
            return 0;
        }
        let mut sorted_a = self.degrees.clone();
        let mut sorted_b = other.degrees.clone();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        if sorted_a != sorted_b {
            return 0;
        }
        let mut image = vec![usize::MAX; self.len()];
        let mut used = vec![false; self.len()];
        let mut count = 0;
        self.extend(other, 0, &mut image, &mut used, &mut count, limit);
        count
    }

    fn extend(
        &self,
        other: &Self,
        i: usize,
        image: &mut [usize],
        used: &mut [bool],
        count: &mut usize,
        limit: usize,
    ) {
        if *count >= limit {
            return;
        }
        if i == self.len() {
            *count += 1;
            return;
        }
        for cand in 0..other.len() {
            if used[cand] || other.colors[cand] != self.colors[i] || other.degrees[cand] != self.degrees[i] {
                continue;
            }
            if (0..i).any(|p| self.labels[i][p] != other.labels[cand][image[p]]) {
                continue;
            }
            image[i] = cand;
            used[cand] = true;
            self.extend(other, i + 1, image, used, count, limit);
            used[cand] = false;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubdiagramKind {
    Elliptic,
    Parabolic,
    Other,
}

/// Classification of an induced subdiagram.
///
/// For elliptic subdiagrams the rank is the node count; for parabolic ones it
/// is the node count minus the number of components. `components` lists the
/// recognized component types (all of them unless the kind is `Other`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdiagramClass {
    pub kind: SubdiagramKind,
    pub components: Vec<CoxeterType>,
    pub rank: usize,
}

impl fmt::Display for SubdiagramClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{:?} [{}] rank {}", self.kind, parts.join(", "), self.rank)
    }
}

fn mask_nodes(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// An elliptic subdiagram with the order of its finite group.
#[derive(Clone, Debug)]
pub struct EllipticSubset {
    pub mask: u64,
    pub size: usize,
    pub order: BigInt,
}

#[derive(Clone, Debug)]
pub struct ParabolicSubset {
    pub mask: u64,
    pub rank: usize,
}

/// Cached classification of the subdiagrams of one diagram.
pub struct SubdiagramAnalysis<'a> {
    diagram: &'a CoxeterDiagram,
    neighbours: Vec<u64>,
    cache: RefCell<HashMap<u64, Option<CoxeterType>>>,
}

impl<'a> SubdiagramAnalysis<'a> {
    pub fn new(diagram: &'a CoxeterDiagram) -> Self {
        assert!(diagram.len() <= 64, "subset masks hold at most 64 nodes");
        let neighbours = (0..diagram.len())
            .map(|i| {
                (0..diagram.len())
                    .filter(|&j| diagram.bonds[i][j].is_bond())
                    .fold(0u64, |m, j| m | 1 << j)
            })
            .collect();
        Self { diagram, neighbours, cache: RefCell::new(HashMap::new()) }
    }

    fn components(&self, mask: u64) -> Vec<u64> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let i = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.neighbours[i] & mask & !comp;
                comp |= new;
                frontier |= new;
            }
            rest &= !comp;
            out.push(comp);
        }
        out
    }

    /// Catalog type of a connected node set.
    fn component_type(&self, mask: u64) -> Option<CoxeterType> {
        if let Some(t) = self.cache.borrow().get(&mask) {
            return *t;
        }
        let nodes = mask_nodes(mask);
        let graph = LabeledGraph::induced(self.diagram, &nodes, false);
        let label = (nodes.len() == 2).then(|| &self.diagram.bonds[nodes[0]][nodes[1]]);
        let found = CoxeterType::candidates(nodes.len(), label).into_iter().find(|&t| {
            let cat = LabeledGraph::catalog(t);
            cat.label_multiset() == graph.label_multiset() && graph.count_isomorphisms(&cat, 1) == 1
        });
        self.cache.borrow_mut().insert(mask, found);
        found
    }

    pub fn classify(&self, mask: u64) -> SubdiagramClass {
        let comps = self.components(mask);
        let types: Vec<Option<CoxeterType>> = comps.iter().map(|&c| self.component_type(c)).collect();
        let nodes = mask.count_ones() as usize;
        let components: Vec<CoxeterType> = types.iter().flatten().copied().collect();
        let kind = if types.iter().all(|t| t.is_some_and(|t| !t.is_affine())) {
            SubdiagramKind::Elliptic
        } else if types.iter().all(|t| t.is_some_and(|t| t.is_affine())) {
            SubdiagramKind::Parabolic
        } else {
            SubdiagramKind::Other
        };
        let rank = match kind {
            SubdiagramKind::Elliptic => nodes,
            SubdiagramKind::Parabolic => nodes - comps.len(),
            SubdiagramKind::Other => 0,
        };
        SubdiagramClass { kind, components, rank }
    }

    /// All elliptic subsets, the empty set included, in order of size.
    ///
    /// Subsets of elliptic diagrams are elliptic, so every elliptic set is
    /// reached by adding nodes in increasing index order.
    pub fn elliptic_subsets(&self) -> Vec<EllipticSubset> {
        let n = self.diagram.len();
        let mut out = vec![EllipticSubset { mask: 0, size: 0, order: BigInt::one() }];
        let mut layer_start = 0;
        while layer_start < out.len() {
            let layer_end = out.len();
            for idx in layer_start..layer_end {
                let mask = out[idx].mask;
                let first = if mask == 0 { 0 } else { 64 - mask.leading_zeros() as usize };
                for v in first..n {
                    let grown = mask | 1 << v;
                    let class = self.classify(grown);
                    if class.kind == SubdiagramKind::Elliptic {
                        out.push(EllipticSubset {
                            mask: grown,
                            size: class.rank,
                            order: finite_group_order(&class).expect("elliptic"),
                        });
                    }
                }
            }
            layer_start = layer_end;
        }
        out
    }

    /// Connected affine subdiagrams: elliptic `S` plus one node beyond `max(S)`.
    fn affine_components(&self, elliptic: &[EllipticSubset]) -> Vec<u64> {
        let n = self.diagram.len();
        let mut out = Vec::new();
        for e in elliptic.iter().filter(|e| e.mask != 0) {
            let first = 64 - e.mask.leading_zeros() as usize;
            for v in first..n {
                let grown = e.mask | 1 << v;
                if self.components(grown).len() == 1 && self.component_type(grown).is_some_and(|t| t.is_affine()) {
                    out.push(grown);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// All parabolic subsets: unions of disjoint, mutually orthogonal affine
    /// components.
    pub fn parabolic_subsets(&self, elliptic: &[EllipticSubset]) -> Vec<ParabolicSubset> {
        let affine = self.affine_components(elliptic);
        let mut out = Vec::new();
        self.combine(&affine, 0, 0, 0, &mut out);
        out
    }

    fn combine(&self, affine: &[u64], from: usize, mask: u64, comps: usize, out: &mut Vec<ParabolicSubset>) {
        for (idx, &c) in affine.iter().enumerate().skip(from) {
            if c & mask != 0 || mask_nodes(c).iter().any(|&i| self.neighbours[i] & mask != 0) {
                continue;
            }
            let grown = mask | c;
            let rank = grown.count_ones() as usize - (comps + 1);
            out.push(ParabolicSubset { mask: grown, rank });
            self.combine(affine, idx + 1, grown, comps + 1, out);
        }
    }
}

/// Classifies the subdiagram induced on `subset`.
pub fn classify_subdiagram(diagram: &CoxeterDiagram, subset: &[usize]) -> SubdiagramClass {
    let mask = subset.iter().fold(0u64, |m, &i| m | 1 << i);
    SubdiagramAnalysis::new(diagram).classify(mask)
}

/// Order of the finite Coxeter group of an elliptic subdiagram.
pub fn finite_group_order(class: &SubdiagramClass) -> Result<BigInt> {
    if class.kind != SubdiagramKind::Elliptic {
        return Err(Error::NotElliptic);
    }
    Ok(class
        .components
        .iter()
        .map(|c| c.group_order().expect("elliptic components are finite"))
        .product())
}

/// Vinberg's criterion for an `n`-dimensional polyhedron to have finite
/// volume: some vertex (ordinary or ideal) exists, and every edge, i.e. every
/// elliptic subdiagram of rank `n - 1`, has exactly two ends, i.e. extends to
/// exactly two elliptic subdiagrams of rank `n` or parabolic subdiagrams of
/// rank `n - 1`.
pub fn finite_volume_check(diagram: &CoxeterDiagram, n: usize) -> bool {
    if n == 0 {
        return false;
    }
    let analysis = SubdiagramAnalysis::new(diagram);
    let elliptic = analysis.elliptic_subsets();
    let parabolic = analysis.parabolic_subsets(&elliptic);
    let vertices: Vec<u64> = elliptic
        .iter()
        .filter(|e| e.size == n)
        .map(|e| e.mask)
        .chain(parabolic.iter().filter(|p| p.rank == n - 1).map(|p| p.mask))
        .collect();
    if vertices.is_empty() {
        return false;
    }
    elliptic
        .iter()
        .filter(|e| e.size == n - 1)
        .all(|edge| vertices.iter().filter(|&&v| v & edge.mask == edge.mask).count() == 2)
}

/// Number of node permutations preserving node norms and bond labels
/// (dashed weights included, so the exact `g^2` table is preserved).
pub fn diagram_automorphism_order(diagram: &CoxeterDiagram) -> u64 {
    let nodes: Vec<usize> = (0..diagram.len()).collect();
    let graph = LabeledGraph::induced(diagram, &nodes, true);
    graph.count_isomorphisms(&graph, usize::MAX) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use BondLabel::{Dashed, Finite, Heavy};

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn chain(labels: &[BondLabel]) -> CoxeterDiagram {
        let bonds: Vec<_> = labels.iter().enumerate().map(|(i, l)| (i, i + 1, l.clone())).collect();
        CoxeterDiagram::from_bonds(labels.len() + 1, &bonds)
    }

    fn all(d: &CoxeterDiagram) -> Vec<usize> {
        (0..d.len()).collect()
    }

    pub(crate) fn triangle(p: u32, q: u32, r: u32) -> CoxeterDiagram {
        let label = |m: u32| if m == 2 { BondLabel::None } else { Finite(m) };
        CoxeterDiagram::from_bonds(3, &[(0, 1, label(p)), (1, 2, label(q)), (0, 2, label(r))])
    }

    #[test]
    fn labels_from_g2() {
        let f = QuadraticForm::diagonal(&[-1, 1, 1, 1, 1]).unwrap();
        let root = |c: &[i64]| Root::from_ints(&f, c).unwrap();
        let d = build_diagram(&[root(&[0, 1, 0, 0, 0]), root(&[0, 0, 1, 0, 0])], &f).unwrap();
        assert_eq!(d.bond(0, 1), &BondLabel::None);
        let d = build_diagram(&[root(&[0, 1, -1, 0, 0]), root(&[0, 0, 1, -1, 0])], &f).unwrap();
        assert_eq!(d.bond(0, 1), &Finite(3));
        let d = build_diagram(&[root(&[0, 1, 0, 0, 0]), root(&[0, -1, 1, 0, 0])], &f).unwrap();
        assert_eq!(d.bond(0, 1), &Finite(4));
        assert_eq!(d.norms(), &ints(&[1, 2])[..]);
        let d = build_diagram(&[root(&[0, 0, 0, 0, 1]), root(&[1, 0, 0, -1, -1])], &f).unwrap();
        assert_eq!(d.bond(0, 1), &Heavy);
        let d = build_diagram(&[root(&[0, 0, 0, 0, 1]), root(&[2, 1, 0, 0, -2])], &f).unwrap();
        assert_eq!(d.bond(0, 1), &Dashed(BigRational::from_integer(4.into())));
    }

    #[test]
    fn non_crystallographic_angles_are_reported() {
        // Hand-made "roots" in diag(1, 1) at angle with g^2 = 1/5.
        let f = QuadraticForm::diagonal(&[-1, 1, 1]).unwrap();
        let r = Root { vector: ints(&[0, 1, 0]), norm: 1.into() };
        let s = Root { vector: ints(&[0, -1, 2]), norm: 5.into() };
        match build_diagram(&[r, s], &f) {
            Err(Error::NonCrystallographicAngle { i: 0, j: 1, g2 }) => {
                assert_eq!(g2, BigRational::new(1.into(), 5.into()))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn relabelling_from_g2_is_stable() {
        let d = CoxeterDiagram::from_bonds(
            4,
            &[(0, 1, Finite(3)), (1, 2, Finite(4)), (2, 3, Heavy), (0, 3, Dashed(BigRational::new(4.into(), 3.into())))],
        );
        let table = d.g2_table().unwrap();
        assert_eq!(CoxeterDiagram::from_g2_table(d.norms().to_vec(), &table).unwrap(), d);
        assert!(triangle(2, 3, 7).g2_table().is_none());
    }

    #[test]
    fn classify_examples() {
        let single = CoxeterDiagram::from_bonds(1, &[]);
        let c = classify_subdiagram(&single, &[0]);
        assert_eq!((c.kind, c.components.clone(), c.rank), (SubdiagramKind::Elliptic, vec![CoxeterType::A(1)], 1));

        let heavy = CoxeterDiagram::from_bonds(2, &[(0, 1, Heavy)]);
        let c = classify_subdiagram(&heavy, &[0, 1]);
        assert_eq!((c.kind, c.components.clone(), c.rank), (SubdiagramKind::Parabolic, vec![CoxeterType::AffineA(1)], 1));

        let b4 = chain(&[Finite(3), Finite(3), Finite(4)]);
        let c = classify_subdiagram(&b4, &all(&b4));
        assert_eq!((c.kind, c.components.clone(), c.rank), (SubdiagramKind::Elliptic, vec![CoxeterType::B(4)], 4));

        let cycle = CoxeterDiagram::from_bonds(3, &[(0, 1, Finite(3)), (1, 2, Finite(3)), (0, 2, Finite(3))]);
        let c = classify_subdiagram(&cycle, &[0, 1, 2]);
        assert_eq!((c.kind, c.components.clone(), c.rank), (SubdiagramKind::Parabolic, vec![CoxeterType::AffineA(2)], 2));

        let dashed = CoxeterDiagram::from_bonds(2, &[(0, 1, Dashed(BigRational::from_integer(2.into())))]);
        assert_eq!(classify_subdiagram(&dashed, &[0, 1]).kind, SubdiagramKind::Other);
        assert_eq!(classify_subdiagram(&dashed, &[1]).kind, SubdiagramKind::Elliptic);

        let mixed = CoxeterDiagram::from_bonds(3, &[(0, 1, Heavy)]);
        assert_eq!(classify_subdiagram(&mixed, &[0, 1, 2]).kind, SubdiagramKind::Other);

        let empty = classify_subdiagram(&b4, &[]);
        assert_eq!((empty.kind, empty.rank), (SubdiagramKind::Elliptic, 0));
    }

    #[test]
    fn every_catalog_diagram_classifies_as_itself() {
        use CoxeterType::*;
        let mut types = vec![F4, G2, H3, H4, I2(5), I2(8), AffineF4, AffineG2, E(6), E(7), E(8)];
        types.extend([AffineE(6), AffineE(7), AffineE(8), AffineA(1)]);
        for n in 1..=9 {
            types.push(A(n));
        }
        for n in 2..=9 {
            types.extend([B(n), AffineA(n), AffineC(n)]);
        }
        for n in 3..=8 {
            types.push(AffineB(n));
        }
        for n in 4..=8 {
            types.extend([D(n), AffineD(n)]);
        }
        for t in types {
            let (n, bonds) = t.bonds();
            let d = CoxeterDiagram::from_bonds(n, &bonds);
            let class = classify_subdiagram(&d, &all(&d));
            assert_eq!(class.components, vec![t], "{t}");
            assert_eq!(class.rank, t.rank(), "{t}");
            assert_eq!(class.kind == SubdiagramKind::Parabolic, t.is_affine(), "{t}");
            // Affine diagrams become elliptic after deleting any node.
            if t.is_affine() {
                for drop in 0..n {
                    let rest: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
                    assert_eq!(classify_subdiagram(&d, &rest).kind, SubdiagramKind::Elliptic, "{t} - {drop}");
                }
            }
        }
    }

    #[test]
    fn non_catalog_components_are_other() {
        // A 4-4-3 chain is neither finite nor affine.
        let c = chain(&[Finite(4), Finite(4), Finite(3)]);
        assert_eq!(classify_subdiagram(&c, &all(&c)).kind, SubdiagramKind::Other);
        let cycle = CoxeterDiagram::from_bonds(3, &[(0, 1, Finite(3)), (1, 2, Finite(3)), (0, 2, Finite(4))]);
        assert_eq!(classify_subdiagram(&cycle, &all(&cycle)).kind, SubdiagramKind::Other);
        // A fork with a double bond on the third arm is ~B3, not "other".
        let fork = CoxeterDiagram::from_bonds(4, &[(0, 1, Finite(3)), (0, 2, Finite(3)), (0, 3, Finite(4))]);
        assert_eq!(classify_subdiagram(&fork, &all(&fork)).components, vec![CoxeterType::AffineB(3)]);
        let long_heavy = chain(&[Heavy, Finite(3)]);
        assert_eq!(classify_subdiagram(&long_heavy, &all(&long_heavy)).kind, SubdiagramKind::Other);
    }

    #[test]
    fn group_orders() {
        let order = |d: &CoxeterDiagram| finite_group_order(&classify_subdiagram(d, &all(d))).unwrap();
        assert_eq!(order(&chain(&vec![Finite(3); 3])), BigInt::from(120));
        assert_eq!(order(&chain(&[Finite(3), Finite(3), Finite(4)])), BigInt::from(384));
        assert_eq!(order(&CoxeterDiagram::from_bonds(2, &[])), BigInt::from(4));
        assert_eq!(order(&chain(&[Finite(3), Finite(4), Finite(3)])), BigInt::from(1152));
        let d4 = CoxeterDiagram::from_bonds(4, &[(0, 1, Finite(3)), (1, 2, Finite(3)), (1, 3, Finite(3))]);
        assert_eq!(order(&d4), BigInt::from(192));
        let heavy = CoxeterDiagram::from_bonds(2, &[(0, 1, Heavy)]);
        assert!(matches!(
            finite_group_order(&classify_subdiagram(&heavy, &[0, 1])),
            Err(Error::NotElliptic)
        ));
    }

    #[test]
    fn finite_group_order_is_multiplicative() {
        let d = CoxeterDiagram::from_bonds(
            7,
            &[(0, 1, Finite(3)), (1, 2, Finite(4)), (3, 4, Finite(6)), (5, 6, Finite(5))],
        );
        let order = |s: &[usize]| finite_group_order(&classify_subdiagram(&d, s)).unwrap();
        assert_eq!(order(&all(&d)), order(&[0, 1, 2]) * order(&[3, 4]) * order(&[5, 6]));
        assert_eq!(order(&all(&d)), BigInt::from(48 * 12 * 10));
    }

    #[test]
    fn finite_volume_examples() {
        assert!(finite_volume_check(&triangle(2, 3, 7), 2));
        assert!(!finite_volume_check(&CoxeterDiagram::from_bonds(2, &[]), 2));
        assert!(!finite_volume_check(&CoxeterDiagram::new(vec![]), 4));
        // Ideal triangle: three heavy bonds.
        let ideal = CoxeterDiagram::from_bonds(3, &[(0, 1, Heavy), (1, 2, Heavy), (0, 2, Heavy)]);
        assert!(finite_volume_check(&ideal, 2));
        // (2, 3, inf): the modular group.
        let modular = CoxeterDiagram::from_bonds(3, &[(0, 1, Finite(3)), (1, 2, Heavy)]);
        assert!(finite_volume_check(&modular, 2));
        // Ultraparallel pair: infinite-area strip.
        let strip = CoxeterDiagram::from_bonds(3, &[(0, 1, Finite(3)), (1, 2, Dashed(BigRational::from_integer(2.into())))]);
        assert!(!finite_volume_check(&strip, 2));
    }

    #[test]
    fn elliptic_enumeration_matches_brute_force() {
        let diagrams = [
            triangle(2, 3, 7),
            chain(&[Finite(3), Finite(4), Finite(3), Finite(3)]),
            CoxeterDiagram::from_bonds(5, &[(0, 1, Heavy), (1, 2, Finite(3)), (2, 3, Finite(3)), (3, 4, Finite(6)), (0, 4, Dashed(BigRational::from_integer(3.into())))]),
        ];
        for d in &diagrams {
            let analysis = SubdiagramAnalysis::new(d);
            let elliptic = analysis.elliptic_subsets();
            let mut fast: Vec<u64> = elliptic.iter().map(|e| e.mask).collect();
            let mut fast_par: Vec<u64> = analysis.parabolic_subsets(&elliptic).iter().map(|p| p.mask).collect();
            fast.sort_unstable();
            fast_par.sort_unstable();
            let mut slow = Vec::new();
            let mut slow_par = Vec::new();
            for mask in 0..1u64 << d.len() {
                match classify_subdiagram(d, &mask_nodes(mask)).kind {
                    SubdiagramKind::Elliptic => slow.push(mask),
                    SubdiagramKind::Parabolic if mask != 0 => slow_par.push(mask),
                    _ => {}
                }
            }
            assert_eq!(fast, slow);
            assert_eq!(fast_par, slow_par);
        }
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(diagram_automorphism_order(&chain(&[Finite(3), Finite(3)])), 2);
        let mut b3 = chain(&[Finite(3), Finite(4)]);
        b3.norms = ints(&[2, 2, 1]);
        assert_eq!(diagram_automorphism_order(&b3), 1);
        assert_eq!(diagram_automorphism_order(&CoxeterDiagram::from_bonds(2, &[])), 2);
        // Different dashed weights break the symmetry of a square.
        let w = |n: i64| Dashed(BigRational::from_integer(n.into()));
        let square = CoxeterDiagram::from_bonds(4, &[(0, 1, w(2)), (1, 2, w(2)), (2, 3, w(2)), (3, 0, w(2))]);
        assert_eq!(diagram_automorphism_order(&square), 8);
        let skew = CoxeterDiagram::from_bonds(4, &[(0, 1, w(2)), (1, 2, w(3)), (2, 3, w(2)), (3, 0, w(3))]);
        assert_eq!(diagram_automorphism_order(&skew), 4);
    }

    #[test]
    fn text_format_round_trip() {
        let mut d = CoxeterDiagram::from_bonds(
            4,
            &[(0, 1, Finite(3)), (1, 2, Finite(7)), (2, 3, Heavy), (0, 3, Dashed(BigRational::new(9.into(), 7.into())))],
        );
        d.norms = ints(&[1, 2, 2, 6]);
        let text = d.to_text();
        assert!(text.contains("bond 1 2 m:7\n"));
        assert!(text.contains("bond 0 3 dashed:9/7\n"));
        assert_eq!(CoxeterDiagram::from_text(&text).unwrap(), d);
        assert!(matches!(CoxeterDiagram::from_text("node 1 norm=1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(CoxeterDiagram::from_text("node 0 norm=1\nbond 0 1 3"), Err(Error::Parse { line: 2, .. })));
        assert!(CoxeterDiagram::from_text("node 0 norm=1\nnode 1 norm=1\nbond 0 1 dashed:1/2").is_err());
        let dot = d.to_dot();
        assert!(dot.contains("n2 -- n3 [label=\"inf\", style=bold"));
        assert!(dot.contains("n0 -- n1 [label=\"1\"]"));
    }
}
