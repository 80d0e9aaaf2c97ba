//! The Eisenstein lattice `E^{4,1}`, its diagonal anti-involutions and their
//! fixed `Z`-lattices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::forms::QuadraticForm;
use crate::{Error, Result};

/// `a + b w` with `w = exp(2 pi i / 3)`, so `w^2 = -1 - w`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EisensteinInt {
    pub a: BigInt,
    pub b: BigInt,
}

impl EisensteinInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn omega() -> Self {
        Self::new(0, 1)
    }

    /// `theta = w - conj(w) = 1 + 2w = sqrt(-3)`.
    pub fn theta() -> Self {
        Self::new(1, 2)
    }

    /// Complex conjugation: `a + b w -> (a - b) - b w`.
    pub fn conj(&self) -> Self {
        Self { a: &self.a - &self.b, b: -&self.b }
    }

    /// `|z|^2 = a^2 - ab + b^2`.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Whether the value is a rational integer.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }
}

impl Add for &EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: &EisensteinInt) -> EisensteinInt {
        let bd = &self.b * &o.b;
        EisensteinInt {
            a: &self.a * &o.a - &bd,
            b: &self.a * &o.b + &self.b * &o.a - bd,
        }
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt { a: -&self.a, b: -&self.b }
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}w", self.b),
            (false, false) if self.b.is_negative() => write!(f, "{}-{}w", self.a, -&self.b),
            (false, false) => write!(f, "{}+{}w", self.a, self.b),
        }
    }
}

/// The Hermitian lattice `E^{n,1}` with `h(x, y) = -x0 conj(y0) + sum xi conj(yi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianLattice {
    signs: Vec<i8>,
}

impl HermitianLattice {
    /// `E^{4,1}`.
    pub fn standard() -> Self {
        Self::lorentzian(4)
    }

    pub fn lorentzian(n: usize) -> Self {
        let mut signs = vec![1; n + 1];
        signs[0] = -1;
        Self { signs }
    }

    pub fn rank(&self) -> usize {
        self.signs.len()
    }

    pub fn inner(&self, x: &[EisensteinInt], y: &[EisensteinInt]) -> Result<EisensteinInt> {
        for v in [x, y] {
            if v.len() != self.rank() {
                return Err(Error::DimensionMismatch { expected: self.rank(), found: v.len() });
            }
        }
        Ok(self.signs.iter().zip(x.iter().zip(y)).fold(EisensteinInt::zero(), |acc, (&s, (xi, yi))| {
            let term = xi * &yi.conj();
            if s < 0 {
                &acc - &term
            } else {
                &acc + &term
            }
        }))
    }
}

/// `h(x, y)` on `E^{4,1}`.
pub fn hermitian_inner(x: &[EisensteinInt], y: &[EisensteinInt]) -> Result<EisensteinInt> {
    HermitianLattice::standard().inner(x, y)
}

/// `z -> (e0 conj(z0), ..., e4 conj(z4))` with `e0 = +1` and `ei = +-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AntiInvolution {
    epsilons: [i8; 5],
}

impl AntiInvolution {
    pub fn new(epsilons: [i8; 5]) -> Result<Self> {
        if epsilons[0] != 1 {
            return Err(Error::NotInvolution(format!("epsilon_0 must be +1, found {}", epsilons[0])));
        }
        if let Some(bad) = epsilons.iter().find(|e| e.abs() != 1) {
            return Err(Error::NotInvolution(format!("epsilons must be +1 or -1, found {bad}")));
        }
        Ok(Self { epsilons })
    }

    pub fn epsilons(&self) -> [i8; 5] {
        self.epsilons
    }

    /// Number of `-1` entries.
    pub fn index(&self) -> usize {
        self.epsilons.iter().filter(|&&e| e < 0).count()
    }

    pub fn apply(&self, z: &[EisensteinInt]) -> Vec<EisensteinInt> {
        z.iter()
            .zip(self.epsilons)
            .map(|(zi, e)| if e < 0 { -&zi.conj() } else { zi.conj() })
            .collect()
    }

    /// Generator of the fixed module `{z : e conj(z) = z}` in coordinate `i`.
    ///
    /// This is the kernel of the `Z`-linear map `(a, b) -> e conj(z) - z`,
    /// which has rank one on `E = Z + Zw`.
    fn fixed_generator(&self, i: usize) -> EisensteinInt {
        let e = BigInt::from(self.epsilons[i]);
        // conj(1) = 1, conj(w) = -1 - w; columns are images of 1 and w.
        let m = [[&e - 1, -&e], [BigInt::zero(), -&e - 1]];
        let row = if m[0][0].is_zero() && m[0][1].is_zero() { &m[1] } else { &m[0] };
        let (a, b) = (-&row[1], row[0].clone());
        let g = a.gcd(&b);
        let (a, b) = (a / &g, b / &g);
        // Normalize so the first nonzero coordinate is positive.
        if a.is_negative() || (a.is_zero() && b.is_negative()) {
            EisensteinInt::new(-a, -b)
        } else {
            EisensteinInt::new(a, b)
        }
    }

    /// `Z`-basis of `Lambda^chi`: `e_i` or `theta e_i` per coordinate.
    pub fn fixed_basis(&self) -> Vec<Vec<EisensteinInt>> {
        (0..5)
            .map(|i| {
                let mut v = vec![EisensteinInt::zero(); 5];
                v[i] = self.fixed_generator(i);
                v
            })
            .collect()
    }
}

impl fmt::Display for AntiInvolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.epsilons.iter().map(|&e| if e < 0 { "-1" } else { "+1" }).collect();
        write!(f, "chi_{} [{}]", self.index(), parts.join(" "))
    }
}

/// The five representatives `chi_0 .. chi_4`; `chi_j` negates the last `j`
/// coordinates.
pub fn anti_involution_classes() -> Vec<AntiInvolution> {
    (0..=4)
        .map(|j| {
            let mut eps = [1i8; 5];
            for e in eps.iter_mut().skip(5 - j) {
                *e = -1;
            }
            AntiInvolution::new(eps).expect("representatives are involutions")
        })
        .collect()
}

/// Gram matrix of `q(v) = h(v, v)` on the fixed lattice of `chi`.
pub fn fixed_lattice_form(chi: &AntiInvolution) -> Result<QuadraticForm> {
    let lattice = HermitianLattice::standard();
    let basis = chi.fixed_basis();
    for v in &basis {
        if chi.apply(v) != *v {
            return Err(Error::NotInvolution(format!("basis vector not fixed by {chi}")));
        }
    }
    let mut gram = vec![vec![BigInt::zero(); 5]; 5];
    for (i, u) in basis.iter().enumerate() {
        for (j, v) in basis.iter().enumerate() {
            let h = lattice.inner(u, v)?;
            if !h.is_rational() {
                return Err(Error::InvalidInput(format!("h(b{i}, b{j}) = {h} is not rational")));
            }
            gram[i][j] = h.a;
        }
    }
    QuadraticForm::new(gram)
}
