//! Truncated Taylor series ("jets") in one variable, order 4.
//!
//! A `Jet` holds the coefficients c_k = f^(k)(s)/k! of a function expanded at
//! a point. Products and quotients are truncated convolutions. The kernel
//! module uses these to push the Millison recurrence through the even-n
//! descent integral analytically: each recurrence step is
//! `h -> h'/sinh`, which is a derivative shift followed by a jet division.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; 5],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet {
            c: [v, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// Build from raw derivatives f, f', f'', f''', f''''.
    pub fn from_derivs(d: [f64; 5]) -> Self {
        Jet {
            c: [d[0], d[1], d[2] / 2.0, d[3] / 6.0, d[4] / 24.0],
        }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Jet of the derivative (loses the top coefficient).
    pub fn derivative(&self) -> Jet {
        let mut c = [0.0; 5];
        for k in 0..4 {
            c[k] = (k as f64 + 1.0) * self.c[k + 1];
        }
        Jet { c }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let mut c = self.c;
        for (ci, oi) in c.iter_mut().zip(other.c.iter()) {
            *ci += oi;
        }
        Jet { c }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let mut c = [0.0; 5];
        for i in 0..5 {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..5 - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    /// self / other; panics on division by a jet with zero constant term.
    pub fn div(&self, other: &Jet) -> Jet {
        let inv0 = 1.0 / other.c[0];
        let mut q = [0.0; 5];
        for k in 0..5 {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= q[j] * other.c[k - j];
            }
            q[k] = acc * inv0;
        }
        Jet { c: q }
    }
}
