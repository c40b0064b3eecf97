//! Dimensional analysis over length/time with exact rational exponents.
//!
//! Quantities in the stationary-flow setting carry dimensions `L^a T^b`
//! (mass never appears: the pressure is already divided by density). The
//! checker evaluates expression trees of products, powers, derivatives,
//! Lebesgue norms over `R^d` and Fourier transforms over `R^d`, and compares
//! both sides of an identity as exact rationals.

use serde::Serialize;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational with i64 numerator/denominator, always normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Rational {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn int(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Physical dimension `L^length_exp T^time_exp` with exact exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Dimension {
    pub length_exp: Rational,
    pub time_exp: Rational,
}

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension {
        length_exp: Rational::ZERO,
        time_exp: Rational::ZERO,
    };

    pub fn new(length_exp: Rational, time_exp: Rational) -> Self {
        Dimension {
            length_exp,
            time_exp,
        }
    }

    /// `L^l T^t` with integer exponents.
    pub fn lt(l: i64, t: i64) -> Self {
        Dimension::new(Rational::int(l), Rational::int(t))
    }

    /// Velocity `L T^-1` (the dimension of the flow field).
    pub fn velocity() -> Self {
        Dimension::lt(1, -1)
    }

    /// Kinematic viscosity `L^2 T^-1` (the stokes).
    pub fn viscosity() -> Self {
        Dimension::lt(2, -1)
    }

    /// Pressure divided by density, `L^2 T^-2`.
    pub fn kinematic_pressure() -> Self {
        Dimension::lt(2, -2)
    }

    /// Wavevector `L^-1`.
    pub fn wavevector() -> Self {
        Dimension::lt(-1, 0)
    }

    pub fn pow(self, e: Rational) -> Self {
        Dimension::new(self.length_exp * e, self.time_exp * e)
    }

    pub fn inv(self) -> Self {
        self.pow(Rational::int(-1))
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        Dimension::new(
            self.length_exp + rhs.length_exp,
            self.time_exp + rhs.time_exp,
        )
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L^{} T^{}", self.length_exp, self.time_exp)
    }
}

/// Expression tree for the units audit.
#[derive(Debug, Clone)]
pub enum UnitsExpr {
    /// A base quantity with a known dimension.
    Quantity(Dimension),
    Product(Vec<UnitsExpr>),
    Power(Box<UnitsExpr>, Rational),
    /// One spatial derivative: multiplies by `L^-1`.
    Derivative(Box<UnitsExpr>),
    /// `Lp` norm over physical `R^dim` (measure `L^dim`): multiplies by
    /// `L^{dim/p}`.
    LpNorm {
        of: Box<UnitsExpr>,
        p: Rational,
        dim: u32,
    },
    /// `Lp` norm over frequency `R^dim` (measure `L^{-dim}`): multiplies by
    /// `L^{-dim/p}`.
    LpNormFreq {
        of: Box<UnitsExpr>,
        p: Rational,
        dim: u32,
    },
    /// Fourier transform over `R^dim`: multiplies by `L^{dim}`.
    Fourier {
        of: Box<UnitsExpr>,
        dim: u32,
    },
}

impl UnitsExpr {
    pub fn quantity(d: Dimension) -> Self {
        UnitsExpr::Quantity(d)
    }

    pub fn product(items: Vec<UnitsExpr>) -> Self {
        UnitsExpr::Product(items)
    }

    pub fn power(self, e: Rational) -> Self {
        UnitsExpr::Power(Box::new(self), e)
    }

    pub fn derivative(self) -> Self {
        UnitsExpr::Derivative(Box::new(self))
    }

    /// n-th spatial derivative (e.g. the Laplacian is `derivatives(2)`).
    pub fn derivatives(self, n: u32) -> Self {
        let mut e = self;
        for _ in 0..n {
            e = e.derivative();
        }
        e
    }

    pub fn lp_norm(self, p: Rational, dim: u32) -> Self {
        UnitsExpr::LpNorm {
            of: Box::new(self),
            p,
            dim,
        }
    }

    pub fn lp_norm_freq(self, p: Rational, dim: u32) -> Self {
        UnitsExpr::LpNormFreq {
            of: Box::new(self),
            p,
            dim,
        }
    }

    pub fn fourier(self, dim: u32) -> Self {
        UnitsExpr::Fourier {
            of: Box::new(self),
            dim,
        }
    }

    pub fn eval(&self) -> Dimension {
        match self {
            UnitsExpr::Quantity(d) => *d,
            UnitsExpr::Product(items) => items
                .iter()
                .fold(Dimension::DIMENSIONLESS, |acc, e| acc * e.eval()),
            UnitsExpr::Power(e, r) => e.eval().pow(*r),
            UnitsExpr::Derivative(e) => e.eval() * Dimension::lt(-1, 0),
            UnitsExpr::LpNorm { of, p, dim } => {
                let inv_p = Rational::new(p.den(), p.num());
                of.eval() * Dimension::new(Rational::int(*dim as i64) * inv_p, Rational::ZERO)
            }
            UnitsExpr::LpNormFreq { of, p, dim } => {
                let inv_p = Rational::new(p.den(), p.num());
                of.eval() * Dimension::new(Rational::int(-(*dim as i64)) * inv_p, Rational::ZERO)
            }
            UnitsExpr::Fourier { of, dim } => of.eval() * Dimension::lt(*dim as i64, 0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = Rational::new(3, 2);
        let b = Rational::new(-1, 6);
        assert_eq!(a + b, Rational::new(4, 3));
        assert_eq!(a * b, Rational::new(-1, 4));
        assert_eq!(Rational::new(2, -4), Rational::new(-1, 2));
    }

    #[test]
    fn viscous_term_dimension() {
        // [nu Lap v] = L^2 T^-1 . L^-2 . L T^-1 = L T^-2
        let e = UnitsExpr::product(vec![
            UnitsExpr::quantity(Dimension::viscosity()),
            UnitsExpr::quantity(Dimension::velocity()).derivatives(2),
        ]);
        assert_eq!(e.eval(), Dimension::lt(1, -2));
    }

    #[test]
    fn l2_norm_of_curl() {
        // [||curl v||_{L^2(R^3)}] = L^-1 . L T^-1 . L^{3/2} = L^{3/2} T^-1
        let e = UnitsExpr::quantity(Dimension::velocity())
            .derivative()
            .lp_norm(Rational::int(2), 3);
        assert_eq!(
            e.eval(),
            Dimension::new(Rational::new(3, 2), Rational::int(-1))
        );
    }
}
