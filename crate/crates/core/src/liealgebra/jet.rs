//! Second-order truncated Taylor arithmetic in the eight canonical variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Number of canonical variables (φ, g, h, λ, Φ, G, H, Λ).
pub const DIM: usize = 8;

/// Value, gradient and Hessian of a scalar field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; DIM],
    pub hess: [[f64; DIM]; DIM],
}

impl Jet2 {
    pub const fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: [0.0; DIM],
            hess: [[0.0; DIM]; DIM],
        }
    }

    /// Independent variable number `index` evaluated at `value`.
    pub fn variable(index: usize, value: f64) -> Self {
        let mut jet = Jet2::constant(value);
        jet.grad[index] = 1.0;
        jet
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    #[inline]
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Jet2::constant(f);
        for i in 0..DIM {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..DIM {
            let gi = d2f * self.grad[i];
            for j in 0..DIM {
                out.hess[i][j] = df * self.hess[i][j] + gi * self.grad[j];
            }
        }
        out
    }

    pub fn max_hessian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..i {
                worst = worst.max((self.hess[i][j] - self.hess[j][i]).abs());
            }
        }
        worst
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.value += rhs.value;
        for i in 0..DIM {
            self.grad[i] += rhs.grad[i];
            for j in 0..DIM {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.value -= rhs.value;
        for i in 0..DIM {
            self.grad[i] -= rhs.grad[i];
            for j in 0..DIM {
                self.hess[i][j] -= rhs.hess[i][j];
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (self.value, rhs.value);
        let mut out = Jet2::constant(a * b);
        for i in 0..DIM {
            out.grad[i] = a * rhs.grad[i] + b * self.grad[i];
        }
        for i in 0..DIM {
            let (sa, sb) = (self.grad[i], rhs.grad[i]);
            for j in 0..DIM {
                out.hess[i][j] =
                    a * rhs.hess[i][j] + b * self.hess[i][j] + sa * rhs.grad[j] + sb * self.grad[j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(mut self) -> Jet2 {
        self.value = -self.value;
        for i in 0..DIM {
            self.grad[i] = -self.grad[i];
            for j in 0..DIM {
                self.hess[i][j] = -self.hess[i][j];
            }
        }
        self
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(mut self, rhs: f64) -> Jet2 {
        self.value *= rhs;
        for i in 0..DIM {
            self.grad[i] *= rhs;
            for j in 0..DIM {
                self.hess[i][j] *= rhs;
            }
        }
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Scalar for Jet2 {
    fn cst(x: f64) -> Self {
        Jet2::constant(x)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn with_value(mut self, value: f64) -> Self {
        self.value = value;
        self
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.value;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.value.sin_cos();
        (self.chain(s, c, -s), self.chain(c, -s, -c))
    }

    fn atan(self) -> Self {
        let z = self.value;
        let d = 1.0 / (1.0 + z * z);
        self.chain(z.atan(), d, -2.0 * z * d * d)
    }

    fn atan2(self, x: Self) -> Self {
        // atan2(y0 + dy, x0 + dx) = atan2(y0, x0) + atan((x0 dy − y0 dx) / (x0 x + y0 y))
        let (y0, x0) = (self.value, x.value);
        let dy = self - y0;
        let dx = x - x0;
        let num = dy * x0 - dx * y0;
        let den = x * x0 + self * y0;
        (num / den).atan() + y0.atan2(x0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(point: &[f64; DIM]) -> [Jet2; DIM] {
        std::array::from_fn(|i| Jet2::variable(i, point[i]))
    }

    // A smooth composition exercising every primitive.
    fn field<S: Scalar>(x: &[S; DIM]) -> S {
        let a = (x[0] * x[4] + x[1].sin() * 2.0).sqrt();
        let b = (x[2] - x[5]).cos() / (x[6].sq() + 1.5);
        let c = x[3].atan2(x[7] + 2.0) * x[0].powi(3);
        let d = (x[1] * 0.3).atan() - x[4].recip();
        a * b + c - d * x[7]
    }

    fn finite_gradient(point: &[f64; DIM], h: f64) -> [f64; DIM] {
        std::array::from_fn(|i| {
            let mut p = *point;
            p[i] += h;
            let fp = field(&p);
            p[i] -= 2.0 * h;
            let fm = field(&p);
            (fp - fm) / (2.0 * h)
        })
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let mut state = 12345u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 1.4 + 0.3
        };
        for _ in 0..50 {
            let point: [f64; DIM] = std::array::from_fn(|_| next());
            let jet = field(&seed(&point));
            assert!((jet.value - field(&point)).abs() < 1e-14);
            let fd = finite_gradient(&point, 1e-6);
            for i in 0..DIM {
                assert!(
                    rel_err(jet.grad[i], fd[i]) < 1e-6,
                    "grad {i}: {} vs {}",
                    jet.grad[i],
                    fd[i]
                );
            }
            let h = 1e-4;
            for i in 0..DIM {
                let mut p = point;
                p[i] += h;
                let gp = finite_gradient(&p, 1e-6);
                p[i] -= 2.0 * h;
                let gm = finite_gradient(&p, 1e-6);
                for j in 0..DIM {
                    let fd2 = (gp[j] - gm[j]) / (2.0 * h);
                    assert!(
                        rel_err(jet.hess[i][j], fd2) < 1e-4,
                        "hess {i},{j}: {} vs {}",
                        jet.hess[i][j],
                        fd2
                    );
                }
            }
            assert!(jet.max_hessian_asymmetry() < 1e-12);
        }
    }

    #[test]
    fn atan2_covers_all_quadrants() {
        for (y, x) in [
            (1.0, 1.0),
            (1.0, -1.0),
            (-1.0, -1.0),
            (-1.0, 1.0),
            (0.3, -2.0),
        ] {
            let jy = Jet2::variable(0, y);
            let jx = Jet2::variable(1, x);
            let t = jy.atan2(jx);
            assert!((t.value - f64::atan2(y, x)).abs() < 1e-15);
            let r2 = x * x + y * y;
            assert!((t.grad[0] - x / r2).abs() < 1e-15);
            assert!((t.grad[1] + y / r2).abs() < 1e-15);
        }
    }
}
