//! Small fixed-size helpers for surface tensors: 2×2 component matrices and
//! fourth-order 2×2×2×2 arrays.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub type Vec3 = Vector3<f64>;
pub type Mat2 = Matrix2<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;

/// Component array `T[α][β][γ][δ]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tensor4(pub [[[[f64; 2]; 2]; 2]; 2]);

#[inline]
pub fn idx4(a: usize, b: usize) -> usize {
    2 * a + b
}

impl Tensor4 {
    pub fn zero() -> Self {
        Tensor4::default()
    }

    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = [[[[0.0; 2]; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        t[a][b][c][d] = f(a, b, c, d);
                    }
                }
            }
        }
        Tensor4(t)
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.0[a][b][c][d]
    }

    /// `X^{αβ} Y^{γδ}`
    pub fn outer(x: &Mat2, y: &Mat2) -> Self {
        Self::from_fn(|a, b, c, d| x[(a, b)] * y[(c, d)])
    }

    /// `½ (X^{αγ} Y^{βδ} + X^{αδ} Y^{βγ})`
    pub fn sym_product(x: &Mat2, y: &Mat2) -> Self {
        Self::from_fn(|a, b, c, d| 0.5 * (x[(a, c)] * y[(b, d)] + x[(a, d)] * y[(b, c)]))
    }

    /// Symmetrised identity `½ (δ^α_γ δ^β_δ + δ^α_δ δ^β_γ)`.
    pub fn sym_identity() -> Self {
        Self::sym_product(&Mat2::identity(), &Mat2::identity())
    }

    /// `∂a^{αβ}/∂a_{γδ} = −½ (a^{αγ} a^{βδ} + a^{αδ} a^{βγ})`
    pub fn inverse_derivative(a_con: &Mat2) -> Self {
        -Self::sym_product(a_con, a_con)
    }

    /// `T^{αβγδ} M_{γδ}`
    pub fn contract(&self, m: &Mat2) -> Mat2 {
        let mut r = Mat2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let mut s = 0.0;
                for c in 0..2 {
                    for d in 0..2 {
                        s += self.0[a][b][c][d] * m[(c, d)];
                    }
                }
                r[(a, b)] = s;
            }
        }
        r
    }

    /// `M_{αβ} T^{αβγδ}`
    pub fn contract_left(&self, m: &Mat2) -> Mat2 {
        self.transpose_major().contract(m)
    }

    pub fn transpose_major(&self) -> Self {
        Self::from_fn(|a, b, c, d| self.0[c][d][a][b])
    }

    /// Symmetrise in both index pairs.
    pub fn sym_minor(&self) -> Self {
        Self::from_fn(|a, b, c, d| {
            0.25 * (self.0[a][b][c][d] + self.0[b][a][c][d] + self.0[a][b][d][c] + self.0[b][a][d][c])
        })
    }

    /// 4×4 matrix with rows/columns ordered (11, 12, 21, 22).
    pub fn to_mat4(&self) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i / 2][i % 2][j / 2][j % 2])
    }

    pub fn from_mat4(m: &Mat4) -> Self {
        Self::from_fn(|a, b, c, d| m[(idx4(a, b), idx4(c, d))])
    }

    /// `(S T)^{αβγδ} = S^{αβμν} T^{μνγδ}`
    pub fn compose(&self, other: &Tensor4) -> Self {
        Self::from_mat4(&(self.to_mat4() * other.to_mat4()))
    }

    pub fn norm(&self) -> f64 {
        self.to_mat4().norm()
    }
}

impl Add for Tensor4 {
    type Output = Tensor4;
    fn add(self, o: Tensor4) -> Tensor4 {
        Tensor4::from_fn(|a, b, c, d| self.0[a][b][c][d] + o.0[a][b][c][d])
    }
}

impl AddAssign for Tensor4 {
    fn add_assign(&mut self, o: Tensor4) {
        *self = *self + o;
    }
}

impl Sub for Tensor4 {
    type Output = Tensor4;
    fn sub(self, o: Tensor4) -> Tensor4 {
        Tensor4::from_fn(|a, b, c, d| self.0[a][b][c][d] - o.0[a][b][c][d])
    }
}

impl Neg for Tensor4 {
    type Output = Tensor4;
    fn neg(self) -> Tensor4 {
        self * -1.0
    }
}

impl Mul<f64> for Tensor4 {
    type Output = Tensor4;
    fn mul(self, s: f64) -> Tensor4 {
        Tensor4::from_fn(|a, b, c, d| self.0[a][b][c][d] * s)
    }
}

impl Mul<Tensor4> for f64 {
    type Output = Tensor4;
    fn mul(self, t: Tensor4) -> Tensor4 {
        t * self
    }
}

/// Closed-form 2×2 inverse via the adjugate.
pub fn inv2(m: &Mat2) -> Option<Mat2> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

pub fn det2(m: &Mat2) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Full contraction `X^{αβ} Y_{αβ}`.
pub fn ddot(x: &Mat2, y: &Mat2) -> f64 {
    x.component_mul(y).sum()
}

/// Symmetric 2×2 matrix from its three stored components (11, 12, 22).
pub fn sym_from3(v: [f64; 3]) -> Mat2 {
    Mat2::new(v[0], v[1], v[1], v[2])
}

pub fn sym_to3(m: &Mat2) -> [f64; 3] {
    [m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]]
}

/// Skew matrix with `skew(v) w = v × w`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}
