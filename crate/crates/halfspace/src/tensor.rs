use crate::scalar::Real;
use num_complex::Complex;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// 2×2 complex matrix, row-major `[[11, 12], [21, 22]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Tensor2<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Tensor2 { m: [[z, z], [z, z]] }
    }

    pub fn identity() -> Self {
        let mut t = Self::zero();
        t.m[0][0] = Complex::new(T::one(), T::zero());
        t.m[1][1] = Complex::new(T::one(), T::zero());
        t
    }

    pub fn new(a11: Complex<T>, a12: Complex<T>, a21: Complex<T>, a22: Complex<T>) -> Self {
        Tensor2 {
            m: [[a11, a12], [a21, a22]],
        }
    }

    pub fn from_real(a11: T, a12: T, a21: T, a22: T) -> Self {
        let c = |v: T| Complex::new(v, T::zero());
        Self::new(c(a11), c(a12), c(a21), c(a22))
    }

    pub fn diag(a: Complex<T>, b: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new(a, z, z, b)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.m[i][j]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn mul_vec(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Conjugation by `P = diag(1, -1)`: flips the sign of the off-diagonal entries.
    pub fn parity(&self) -> Self {
        Self::new(self.m[0][0], -self.m[0][1], -self.m[1][0], self.m[1][1])
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let mut s = T::zero();
        for r in &self.m {
            for z in r {
                s += z.norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        let mut s = T::zero();
        for r in &self.m {
            for z in r {
                s = s.max(z.norm());
            }
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_array(&self) -> [Complex<T>; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn from_array(a: [Complex<T>; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    /// Real `v vᵀ` outer product.
    pub fn outer_re(v: [T; 2]) -> Self {
        Self::from_real(v[0] * v[0], v[0] * v[1], v[1] * v[0], v[1] * v[1])
    }
}

impl<T: Real> Add for Tensor2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }
}

impl<T: Real> AddAssign for Tensor2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Tensor2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Tensor2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|z| -z)
    }
}

impl<T: Real> Mul for Tensor2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.matmul(&o)
    }
}

impl<T: Real> Mul<Complex<T>> for Tensor2<T> {
    type Output = Self;
    fn mul(self, s: Complex<T>) -> Self {
        self.scale(s)
    }
}
