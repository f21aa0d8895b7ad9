//! Unit quaternions as SU(2): `(w, x, y, z)` stands for `w I - i(x X + y Y + z Z)`.
//! Matrix products become Hamilton products.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, GateKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2 {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Mul for Su2 {
    type Output = Su2;

    fn mul(self, o: Su2) -> Su2 {
        Su2 {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }
}

impl Su2 {
    pub const IDENTITY: Su2 = Su2 {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Su2 {
        Su2 { w, x, y, z }.normalized()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Su2 {
        Su2 {
            w: a[0],
            x: a[1],
            y: a[2],
            z: a[3],
        }
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Su2 {
        let n = self.norm();
        Su2 {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn adjoint(self) -> Su2 {
        Su2 {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn neg(self) -> Su2 {
        Su2 {
            w: -self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Rotation `exp(-i angle/2 n.sigma)` about a unit axis.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Su2 {
        let (s, c) = (angle / 2.0).sin_cos();
        Su2 {
            w: c,
            x: s * axis[0],
            y: s * axis[1],
            z: s * axis[2],
        }
    }

    pub fn ry(angle: f64) -> Su2 {
        Su2::rotation([0.0, 1.0, 0.0], angle)
    }

    pub fn rz(angle: f64) -> Su2 {
        Su2::rotation([0.0, 0.0, 1.0], angle)
    }

    /// Rotation angle in `[0, 2 pi]` and unit axis (arbitrary for the identity).
    pub fn angle_axis(self) -> (f64, [f64; 3]) {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        let angle = 2.0 * v.atan2(self.w);
        if v < 1e-300 {
            (angle, [0.0, 0.0, 1.0])
        } else {
            (angle, [self.x / v, self.y / v, self.z / v])
        }
    }

    /// `min_phi ||U - e^{i phi} V||`, which for SU(2) is `min(|q - p|, |q + p|)`.
    pub fn distance(self, other: Su2) -> f64 {
        let d = |s: f64| {
            let (a, b, c, e) = (
                self.w - s * other.w,
                self.x - s * other.x,
                self.y - s * other.y,
                self.z - s * other.z,
            );
            (a * a + b * b + c * c + e * e).sqrt()
        };
        d(1.0).min(d(-1.0))
    }

    /// Gate as an SU(2) element, up to global phase.
    pub fn of_gate(kind: GateKind) -> Su2 {
        let (s8, c8) = FRAC_PI_8.sin_cos();
        let (s4, c4) = FRAC_PI_4.sin_cos();
        let zero = Su2::IDENTITY;
        match kind {
            GateKind::H => Su2 {
                w: 0.0,
                x: FRAC_1_SQRT_2,
                y: 0.0,
                z: FRAC_1_SQRT_2,
            },
            GateKind::T => Su2 {
                w: c8,
                z: s8,
                ..zero
            },
            GateKind::Tdg => Su2 {
                w: c8,
                z: -s8,
                ..zero
            },
            GateKind::S => Su2 {
                w: c4,
                z: s4,
                ..zero
            },
            GateKind::Sdg => Su2 {
                w: c4,
                z: -s4,
                ..zero
            },
            GateKind::X => Su2 {
                w: 0.0,
                x: 1.0,
                y: 0.0,
                z: 0.0,
            },
            GateKind::Cnot => panic!("CNOT is not a single-qubit gate"),
        }
    }

    /// Product for a word listed in application order.
    pub fn of_word(word: &[GateKind]) -> Su2 {
        word.iter()
            .fold(Su2::IDENTITY, |acc, &g| Su2::of_gate(g) * acc)
    }

    /// Projects a 2x2 unitary onto SU(2) by removing `sqrt(det)`.
    pub fn from_matrix(u: &CMatrix) -> Result<Su2> {
        if u.nrows() != 2 || u.ncols() != 2 {
            return Err(Error::InvalidArgument(format!(
                "expected a 2x2 matrix, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        if det.norm() < 1e-12 {
            return Err(Error::NotUnitary {
                deviation: 1.0 - det.norm(),
            });
        }
        let root = det.sqrt();
        let s = u.map(|a| a / root);
        let (a, b, c, d) = (s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]);
        Ok(Su2 {
            w: (a.re + d.re) / 2.0,
            x: -(b.im + c.im) / 2.0,
            y: (c.re - b.re) / 2.0,
            z: (d.im - a.im) / 2.0,
        }
        .normalized())
    }

    pub fn to_matrix(self) -> CMatrix {
        let c = Complex64::new;
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c(self.w, -self.z),
                c(-self.y, -self.x),
                c(self.y, -self.x),
                c(self.w, self.z),
            ],
        )
    }

    /// Image of `|0>` as a Bloch vector.
    pub fn bloch_of_zero(self) -> [f64; 3] {
        let Su2 { w, x, y, z } = self;
        [
            2.0 * (w * y + x * z),
            2.0 * (y * z - w * x),
            w * w + z * z - x * x - y * y,
        ]
    }
}

/// `V = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zyz {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

pub fn zyz(v: &CMatrix) -> Result<Zyz> {
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    let alpha = det.arg() / 2.0;
    let phase = Complex64::from_polar(1.0, -alpha);
    let w00 = v[(0, 0)] * phase;
    let w10 = v[(1, 0)] * phase;
    let w11 = v[(1, 1)] * phase;
    if det.norm() < 1e-12 {
        return Err(Error::NotUnitary {
            deviation: 1.0 - det.norm(),
        });
    }
    let gamma = 2.0 * w10.norm().atan2(w00.norm());
    let sum = if w11.norm() > 1e-12 {
        2.0 * w11.arg()
    } else {
        0.0
    };
    let diff = if w10.norm() > 1e-12 {
        2.0 * w10.arg()
    } else {
        0.0
    };
    Ok(Zyz {
        alpha,
        beta: (sum + diff) / 2.0,
        gamma,
        delta: (sum - diff) / 2.0,
    })
}
