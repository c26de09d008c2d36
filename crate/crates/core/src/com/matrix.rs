//! Small complex matrices used by the acoustic cascade.
//!
//! A [`TransmissionMatrix2`] maps the wave amplitudes `(W+, W-)` on the
//! right-hand reference plane of a block to those on its left-hand plane,
//! so a chain of blocks read left to right multiplies in the same order.

use std::ops::Mul;

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionMatrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl TransmissionMatrix2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const fn identity() -> Self {
        Self::new([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diagonal(a: Complex64, b: Complex64) -> Self {
        Self::new([[a, ZERO], [ZERO, b]])
    }

    pub fn determinant(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det.norm() == 0.0 {
            return None;
        }
        let [[a, b], [c, d]] = self.m;
        Some(Self::new([[d / det, -b / det], [-c / det, a / det]]))
    }

    /// The same block seen from the other side (left and right swapped).
    pub fn mirrored(&self) -> Option<Self> {
        let inv = self.inverse()?;
        let [[a, b], [c, d]] = inv.m;
        Some(Self::new([[d, c], [b, a]]))
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Reflection seen by a wave arriving from the left with nothing
    /// incident from the right: `W-_L / W+_L`.
    pub fn reflection_left(&self) -> Complex64 {
        self.m[1][0] / self.m[0][0]
    }

    /// Reflection seen by a wave arriving from the right: `W+_R / W-_R`.
    pub fn reflection_right(&self) -> Complex64 {
        -self.m[0][1] / self.m[0][0]
    }

    /// Left-to-right transmission, `W+_R / W+_L`.
    pub fn transmission(&self) -> Complex64 {
        ONE / self.m[0][0]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for TransmissionMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let a = self.m;
        let b = rhs.m;
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(out)
    }
}

/// Mixed acoustic/electric matrix of a transducer:
///
/// ```text
/// [W+_L]   [ t11 t12 t13 ] [W+_R]
/// [W-_L] = [ t21 t22 t23 ] [W-_R]
/// [ I  ]   [ t31 t32 t33 ] [ V  ]
/// ```
///
/// The upper-left 2x2 block is the acoustic through path, the third column
/// is the voltage-driven source term `tau`, and the last row gives the
/// terminal current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedMatrix3 {
    pub m: [[Complex64; 3]; 3],
}

impl MixedMatrix3 {
    pub fn acoustic(&self) -> TransmissionMatrix2 {
        TransmissionMatrix2::new([[self.m[0][0], self.m[0][1]], [self.m[1][0], self.m[1][1]]])
    }

    /// Source column: acoustic amplitudes on the left plane per volt applied.
    pub fn coupling(&self) -> [Complex64; 2] {
        [self.m[0][2], self.m[1][2]]
    }

    /// Terminal current for right-plane amplitudes `w` and voltage `v`.
    pub fn current(&self, w: [Complex64; 2], v: Complex64) -> Complex64 {
        self.m[2][0] * w[0] + self.m[2][1] * w[1] + self.m[2][2] * v
    }

    /// Left-plane amplitudes for right-plane amplitudes `w` and voltage `v`.
    pub fn propagate(&self, w: [Complex64; 2], v: Complex64) -> [Complex64; 2] {
        let through = self.acoustic().apply(w);
        let tau = self.coupling();
        [through[0] + tau[0] * v, through[1] + tau[1] * v]
    }
}
