//! Dense mode vectors and the nested summation kernels over `I = {1 ≤ |k| ≤ N}`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::fourier::FourierField;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients `−N..=N`, no symmetry assumed.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Modes {
    pub n: i64,
    pub c: Vec<Complex64>,
}

impl Modes {
    pub fn zeros(n: usize) -> Self {
        Self {
            n: n as i64,
            c: vec![ZERO; 2 * n + 1],
        }
    }

    /// `f(k)` on `I`, zero at `k = 0`.
    pub fn from_fn(n: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for k in in_range(m.n) {
            m.c[(k + m.n) as usize] = f(k);
        }
        m
    }

    pub fn from_field(u: &FourierField) -> Self {
        Self::from_fn(u.n(), |k| u.get(k))
    }

    pub fn to_field(&self) -> FourierField {
        FourierField::from_coeffs_unchecked(self.c.clone())
    }

    #[inline]
    pub fn at(&self, k: i64) -> Complex64 {
        if k.abs() > self.n {
            ZERO
        } else {
            self.c[(k + self.n) as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, k: i64, v: Complex64) {
        self.c[(k + self.n) as usize] = v;
    }

    pub fn zip(&self, o: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn l2(&self) -> f64 {
        self.c.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Add for &Modes {
    type Output = Modes;
    fn add(self, o: &Modes) -> Modes {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &Modes {
    type Output = Modes;
    fn sub(self, o: &Modes) -> Modes {
        self.zip(o, |a, b| a - b)
    }
}

/// Pointwise product.
impl Mul for &Modes {
    type Output = Modes;
    fn mul(self, o: &Modes) -> Modes {
        self.zip(o, |a, b| a * b)
    }
}

#[inline]
pub(crate) fn in_set(k: i64, n: i64) -> bool {
    k != 0 && k.abs() <= n
}

pub(crate) fn in_range(n: i64) -> impl Iterator<Item = i64> {
    (-n..=n).filter(|&k| k != 0)
}

/// `out_k = Σ_{k₁+k₂=k; k,k₁,k₂∈I} f(k₁, k₂)`.
pub(crate) fn sum2(n: i64, f: impl Fn(i64, i64) -> Complex64) -> Modes {
    let mut out = Modes::zeros(n as usize);
    for k in in_range(n) {
        let mut acc = ZERO;
        for k1 in in_range(n) {
            let k2 = k - k1;
            if in_set(k2, n) {
                acc += f(k1, k2);
            }
        }
        out.set(k, acc);
    }
    out
}

/// `out_k = Σ_{k₁+k₂+k₃=k; k,k₁,k₂,k₃∈I} f(k₁, k₂, k₃)`.
pub(crate) fn sum3(n: i64, f: impl Fn(i64, i64, i64) -> Complex64) -> Modes {
    let mut out = Modes::zeros(n as usize);
    for k in in_range(n) {
        let mut acc = ZERO;
        for k1 in in_range(n) {
            for k2 in in_range(n) {
                let k3 = k - k1 - k2;
                if in_set(k3, n) {
                    acc += f(k1, k2, k3);
                }
            }
        }
        out.set(k, acc);
    }
    out
}

/// `W_p = Σ_{k₃+k₄=p; k₃,k₄,p∈I} a_{k₃} b_{k₄}`.
pub(crate) fn pair_sums(a: &Modes, b: &Modes) -> Modes {
    sum2(a.n, |k3, k4| a.at(k3) * b.at(k4))
}
