//! Forward-mode dual numbers.
//!
//! A [`Dual`] carries a value and one directional derivative. Nesting
//! (`Dual<Dual<f64>>`) yields second derivatives, and so on. All coordinate
//! expressions in the catalog are written once, generically over [`Real`],
//! and evaluated at `f64` or at any dual depth.

use std::fmt::{self, Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

/// Scalar type usable in catalog expressions: `f64` and nested duals.
pub trait Real:
    Copy
    + Debug
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + 'static
{
    fn cst(v: f64) -> Self;
    /// The underlying real value, stripped of every derivative part.
    fn re(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn asin(self) -> Self;
    fn atan2(self, other: Self) -> Self;

    fn powi(self, n: i32) -> Self {
        let mut acc = Self::one();
        let base = if n < 0 { Self::one() / self } else { self };
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        acc
    }

    fn abs(self) -> Self {
        if self.re() < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Real for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn atan2(self, other: Self) -> Self {
        f64::atan2(self, other)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

/// Value plus one tangent component.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Dual<T> {
    pub v: T,
    pub d: T,
}

impl<T: Real> Dual<T> {
    pub fn new(v: T, d: T) -> Self {
        Dual { v, d }
    }

    pub fn constant(v: T) -> Self {
        Dual { v, d: T::zero() }
    }

    pub fn variable(v: T) -> Self {
        Dual { v, d: T::one() }
    }
}

impl<T: Debug> Debug for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dual({:?}, {:?})", self.v, self.d)
    }
}

impl<T: Display> Display for Dual<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ε", self.v, self.d)
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.v;
        Dual::new(self.v * inv, (self.d * o.v - self.v * o.d) * inv * inv)
    }
}

// Only meaningful on the value part; present to satisfy `Num`.
impl<T: Real> Rem for Dual<T> {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        Dual::new(self.v % o.v, self.d)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.v, -self.d)
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Dual::new(self.v + o, self.d)
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Dual::new(self.v - o, self.d)
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Dual::new(self.v * o, self.d * o)
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Dual::new(self.v / o, self.d / o)
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl<T: Real> $tr for Dual<T> {
            fn $m(&mut self, o: Self) {
                *self = *self $op o;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /);

impl<T: Real> Sum for Dual<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Real> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::new(T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.d.is_zero()
    }
}

impl<T: Real> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Real> Num for Dual<T> {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, ()> {
        s.parse::<f64>().map(|v| Dual::constant(T::cst(v))).map_err(|_| ())
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(v: f64) -> Self {
        Dual::constant(T::cst(v))
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sin(self) -> Self {
        Dual::new(self.v.sin(), self.d * self.v.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.v.cos(), -(self.d * self.v.sin()))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        Dual::new(e, self.d * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.v.ln(), self.d / self.v)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Dual::new(s, self.d / (s * 2.0))
    }
    fn asin(self) -> Self {
        let v = self.v;
        Dual::new(v.asin(), self.d / (T::one() - v * v).sqrt())
    }
    fn atan2(self, other: Self) -> Self {
        // atan2(y, x) with y = self
        let (y, x) = (self.v, other.v);
        let r2 = x * x + y * y;
        Dual::new(y.atan2(x), (x * self.d - y * other.d) / r2)
    }
}

/// Lift a slice of constants into any [`Real`].
pub fn lift<T: Real>(xs: &[f64]) -> Vec<T> {
    xs.iter().map(|&v| T::cst(v)).collect()
}

/// Seed a point for a directional derivative: value `x`, tangent `dir`.
pub fn seed<T: Real>(x: &[T], dir: &[T]) -> Vec<Dual<T>> {
    x.iter().zip(dir).map(|(&v, &d)| Dual::new(v, d)).collect()
}

/// Seed coordinate `k` of `x`.
pub fn seed_axis<T: Real>(x: &[T], k: usize) -> Vec<Dual<T>> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| if i == k { Dual::variable(v) } else { Dual::constant(v) })
        .collect()
}

pub fn values<T: Real>(xs: &[Dual<T>]) -> Vec<T> {
    xs.iter().map(|d| d.v).collect()
}

pub fn tangents<T: Real>(xs: &[Dual<T>]) -> Vec<T> {
    xs.iter().map(|d| d.d).collect()
}
