//! Small fixed-size linear algebra for phase-space (z, p) calculations.
//!
//! Everything in the toolkit lives in a two-dimensional phase space, so the
//! few operations needed (products, symmetric eigenpairs, Cholesky factors,
//! matrix exponentials) are written out in closed form instead of pulling in
//! a general linear-algebra dependency.

/// Column vector (z, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }
}

/// General 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a11: 1.0, a12: 0.0, a21: 0.0, a22: 1.0 };

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a21 * v.x + self.a22 * v.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    /// Congruence M S Mᵀ of a symmetric matrix, returned symmetric.
    pub fn congruence(&self, s: &SymMat2) -> SymMat2 {
        // first N = M S
        let n11 = self.a11 * s.vz + self.a12 * s.czp;
        let n12 = self.a11 * s.czp + self.a12 * s.vp;
        let n21 = self.a21 * s.vz + self.a22 * s.czp;
        let n22 = self.a21 * s.czp + self.a22 * s.vp;
        SymMat2 {
            vz: n11 * self.a11 + n12 * self.a12,
            vp: n21 * self.a21 + n22 * self.a22,
            czp: n11 * self.a21 + n12 * self.a22,
        }
    }

    /// Matrix exponential exp(self * t) via the Cayley–Hamilton closed form.
    pub fn expm(&self, t: f64) -> Mat2 {
        let m = 0.5 * self.trace();
        // traceless part B = A - m I satisfies B² = Δ I with Δ = m² - det A
        let delta = m * m - self.det();
        let (ch, shq) = cosh_sinhc(delta * t * t);
        let emt = (m * t).exp();
        let f = emt * shq * t;
        Mat2::new(
            emt * ch + f * (self.a11 - m),
            f * self.a12,
            f * self.a21,
            emt * ch + f * (self.a22 - m),
        )
    }
}

/// Returns (cosh(sqrt(x)), sinh(sqrt(x))/sqrt(x)) continued analytically to x < 0,
/// where it becomes (cos(sqrt(-x)), sin(sqrt(-x))/sqrt(-x)).
fn cosh_sinhc(x: f64) -> (f64, f64) {
    if x.abs() < 1e-12 {
        // series: cosh ≈ 1 + x/2, sinhc ≈ 1 + x/6
        (1.0 + 0.5 * x, 1.0 + x / 6.0)
    } else if x > 0.0 {
        let q = x.sqrt();
        (q.cosh(), q.sinh() / q)
    } else {
        let q = (-x).sqrt();
        (q.cos(), q.sin() / q)
    }
}

/// Symmetric 2x2 covariance matrix in phase-space ordering (z, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymMat2 {
    pub vz: f64,
    pub vp: f64,
    pub czp: f64,
}

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 { vz: 0.0, vp: 0.0, czp: 0.0 };

    pub fn new(vz: f64, vp: f64, czp: f64) -> Self {
        SymMat2 { vz, vp, czp }
    }

    pub fn diag(vz: f64, vp: f64) -> Self {
        SymMat2 { vz, vp, czp: 0.0 }
    }

    pub fn det(&self) -> f64 {
        self.vz * self.vp - self.czp * self.czp
    }

    pub fn trace(&self) -> f64 {
        self.vz + self.vp
    }

    pub fn add(&self, o: &SymMat2) -> SymMat2 {
        SymMat2::new(self.vz + o.vz, self.vp + o.vp, self.czp + o.czp)
    }

    pub fn sub(&self, o: &SymMat2) -> SymMat2 {
        SymMat2::new(self.vz - o.vz, self.vp - o.vp, self.czp - o.czp)
    }

    pub fn scale(&self, f: f64) -> SymMat2 {
        SymMat2::new(self.vz * f, self.vp * f, self.czp * f)
    }

    /// Rank-one matrix v vᵀ.
    pub fn outer(v: Vec2) -> SymMat2 {
        SymMat2::new(v.x * v.x, v.y * v.y, v.x * v.y)
    }

    /// Eigenvalues ordered (max, min).
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * self.trace();
        let rad = (0.25 * (self.vz - self.vp).powi(2) + self.czp * self.czp).sqrt();
        (m + rad, m - rad)
    }

    /// Angle of the major axis relative to the z axis, in (-pi/2, pi/2].
    pub fn tilt(&self) -> f64 {
        if self.czp == 0.0 && self.vz == self.vp {
            return 0.0;
        }
        let theta = 0.5 * (2.0 * self.czp).atan2(self.vz - self.vp);
        if theta <= -std::f64::consts::FRAC_PI_2 {
            theta + std::f64::consts::PI
        } else {
            theta
        }
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        let (hi, lo) = self.eigenvalues();
        hi.abs().max(lo.abs())
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.vz * self.vz + self.vp * self.vp + 2.0 * self.czp * self.czp).sqrt()
    }

    /// R(θ) diag(a, b) R(θ)ᵀ with R the rotation by θ.
    pub fn from_eigen(theta: f64, a: f64, b: f64) -> SymMat2 {
        let (s, c) = theta.sin_cos();
        SymMat2::new(
            a * c * c + b * s * s,
            a * s * s + b * c * c,
            (a - b) * s * c,
        )
    }

    /// Lower Cholesky factor [[l11, 0], [l21, l22]]. Tolerates zero and
    /// slightly negative diagonals from rounding (clamped to zero).
    pub fn cholesky(&self) -> (f64, f64, f64) {
        let l11 = self.vz.max(0.0).sqrt();
        let l21 = if l11 > 0.0 { self.czp / l11 } else { 0.0 };
        let l22 = (self.vp - l21 * l21).max(0.0).sqrt();
        (l11, l21, l22)
    }
}

/// Solve the n x n symmetric positive-definite system A x = b in place using
/// Gaussian elimination with partial pivoting. Returns None when a pivot is
/// smaller than `min_pivot` times the largest diagonal entry.
pub fn solve_dense(a: &mut Vec<Vec<f64>>, b: &mut Vec<f64>, min_pivot: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .enumerate()
        .map(|(i, row)| row[i].abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pivot_val < min_pivot * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in (row + 1)..n {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Invert a small dense matrix by solving against the identity columns.
pub fn invert_dense(a: &[Vec<f64>], min_pivot: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for col in 0..n {
        let mut work = a.to_vec();
        let mut rhs = vec![0.0; n];
        rhs[col] = 1.0;
        let x = solve_dense(&mut work, &mut rhs, min_pivot)?;
        for row in 0..n {
            out[row][col] = x[row];
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn congruence_matches_explicit_product() {
        let m = Mat2::new(0.3, -1.2, 2.0, 0.7);
        let s = SymMat2::new(2.0, 0.5, -0.3);
        let got = m.congruence(&s);
        // explicit M S Mᵀ
        let sm = Mat2::new(s.vz, s.czp, s.czp, s.vp);
        let full = m.mul(&sm).mul(&Mat2::new(m.a11, m.a21, m.a12, m.a22));
        assert_relative_eq!(got.vz, full.a11, max_relative = 1e-14);
        assert_relative_eq!(got.vp, full.a22, max_relative = 1e-14);
        assert_relative_eq!(got.czp, full.a12, max_relative = 1e-14);
        assert_relative_eq!(full.a12, full.a21, max_relative = 1e-12);
    }

    #[test]
    fn expm_of_rotation_generator() {
        // exp(t [[0, w], [-w, 0]]) is a rotation by w t
        let w = 3.0;
        let g = Mat2::new(0.0, w, -w, 0.0);
        let t = 0.4;
        let e = g.expm(t);
        assert_relative_eq!(e.a11, (w * t).cos(), epsilon = 1e-14);
        assert_relative_eq!(e.a12, (w * t).sin(), epsilon = 1e-14);
        assert_relative_eq!(e.a21, -(w * t).sin(), epsilon = 1e-14);
        assert_relative_eq!(e.det(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn expm_against_scaling_and_squaring() {
        let a = Mat2::new(-0.8, 2.5, -1.1, 0.2);
        // reference: exp(A) = (exp(A/2^k))^(2^k) with small-angle closed form
        let k = 20;
        let mut r = a.expm(1.0 / f64::from(1 << k));
        for _ in 0..k {
            r = r.mul(&r);
        }
        let e = a.expm(1.0);
        assert_relative_eq!(e.a11, r.a11, max_relative = 1e-10);
        assert_relative_eq!(e.a12, r.a12, max_relative = 1e-10);
        assert_relative_eq!(e.a21, r.a21, max_relative = 1e-10);
        assert_relative_eq!(e.a22, r.a22, max_relative = 1e-10);
    }

    #[test]
    fn eigen_roundtrip() {
        let s = SymMat2::from_eigen(0.6, 3.0, 0.4);
        let (hi, lo) = s.eigenvalues();
        assert_relative_eq!(hi, 3.0, epsilon = 1e-12);
        assert_relative_eq!(lo, 0.4, epsilon = 1e-12);
        assert_relative_eq!(s.tilt(), 0.6, epsilon = 1e-12);
    }

    #[test]
    fn cholesky_reconstructs() {
        let s = SymMat2::new(1.5, 2.0, -0.8);
        let (l11, l21, l22) = s.cholesky();
        assert_relative_eq!(l11 * l11, s.vz, epsilon = 1e-14);
        assert_relative_eq!(l11 * l21, s.czp, epsilon = 1e-14);
        assert_relative_eq!(l21 * l21 + l22 * l22, s.vp, epsilon = 1e-14);
    }

    #[test]
    fn dense_solver_small_system() {
        let a = vec![
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ];
        let x_true = [1.0, -2.0, 0.5];
        let b: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(x_true.iter()).map(|(c, x)| c * x).sum())
            .collect();
        let x = solve_dense(&mut a.clone(), &mut b.clone(), 1e-12).unwrap();
        for (got, want) in x.iter().zip(x_true.iter()) {
            assert_relative_eq!(got, want, epsilon = 1e-12);
        }
        let inv = invert_dense(&a, 1e-12).unwrap();
        // A * A⁻¹ = I
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert_relative_eq!(s, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
    }
}
