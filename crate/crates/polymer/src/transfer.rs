//! 2x2 transfer-matrix algebra: single-site and polymer matrices, products
//! over configurations with overflow-safe log scaling, exact energy
//! derivatives, and the complex-energy perturbation bound.

use crate::model::{Configuration, JacobiWindow, Polymer, PolymerEnsemble};
use crate::{Error, Result};
use num_complex::Complex64;

/// Real 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 ::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn rotation(eta: f64) -> Self {
        let (s, c) = eta.sin_cos();
        Self::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    /// Inverse via adjugate over determinant.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22
    }

    /// Spectral (operator) norm in closed form from the singular values.
    pub fn norm(&self) -> f64 {
        let f = self.frobenius_sq();
        let d = self.det();
        let disc = (f * f - 4.0 * d * d).max(0.0);
        (0.5 * (f + disc.sqrt())).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .abs()
            .max(self.a12.abs())
            .max(self.a21.abs())
            .max(self.a22.abs())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn to_complex(&self) -> CMat2 {
        CMat2::new(
            Complex64::new(self.a11, 0.0),
            Complex64::new(self.a12, 0.0),
            Complex64::new(self.a21, 0.0),
            Complex64::new(self.a22, 0.0),
        )
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::mul(&self, &rhs)
    }
}

/// Complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl CMat2 {
    pub fn identity() -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a11 * v[0] + self.a12 * v[1],
            self.a21 * v[0] + self.a22 * v[1],
        ]
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        let f = self.frobenius_sq();
        let d = self.det().norm_sqr();
        let disc = (f * f - 4.0 * d).max(0.0);
        (0.5 * (f + disc.sqrt())).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .norm()
            .max(self.a12.norm())
            .max(self.a21.norm())
            .max(self.a22.norm())
    }
}

/// Behaviour shared by the two entry types of a scaled product.
pub trait Entries2x2: Copy {
    fn one() -> Self;
    fn max_abs(&self) -> f64;
    fn norm(&self) -> f64;
    fn log_abs_det(&self) -> f64;
    fn scale_entries(&self, s: f64) -> Self;
    fn left_mul(&self, lhs: &Self) -> Self;
    fn adjugate(&self) -> Self;
}

impl Entries2x2 for Mat2 {
    fn one() -> Self {
        Mat2::IDENTITY
    }
    fn max_abs(&self) -> f64 {
        Mat2::max_abs(self)
    }
    fn norm(&self) -> f64 {
        Mat2::norm(self)
    }
    fn log_abs_det(&self) -> f64 {
        self.det().abs().ln()
    }
    fn scale_entries(&self, s: f64) -> Self {
        self.scale(s)
    }
    fn left_mul(&self, lhs: &Self) -> Self {
        lhs.mul(self)
    }
    fn adjugate(&self) -> Self {
        Mat2::new(self.a22, -self.a12, -self.a21, self.a11)
    }
}

impl Entries2x2 for CMat2 {
    fn one() -> Self {
        CMat2::identity()
    }
    fn max_abs(&self) -> f64 {
        CMat2::max_abs(self)
    }
    fn norm(&self) -> f64 {
        CMat2::norm(self)
    }
    fn log_abs_det(&self) -> f64 {
        self.det().norm().ln()
    }
    fn scale_entries(&self, s: f64) -> Self {
        self.scale(s)
    }
    fn left_mul(&self, lhs: &Self) -> Self {
        lhs.mul(self)
    }
    fn adjugate(&self) -> Self {
        CMat2::new(self.a22, -self.a12, -self.a21, self.a11)
    }
}

const RENORM_HI: f64 = 1048576.0; // 2^20
const RENORM_LO: f64 = 1.0 / 1048576.0;

/// A 2x2 matrix held as `exp(log_scale) * matrix`. The running factor is
/// renormalized whenever its largest entry leaves `[2^-20, 2^20]`;
/// `finalize` rescales so the stored matrix has unit spectral norm.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProduct<M: Entries2x2> {
    pub matrix: M,
    pub log_scale: f64,
}

pub type ScaledMat2 = ScaledProduct<Mat2>;
pub type ScaledCMat2 = ScaledProduct<CMat2>;

impl<M: Entries2x2> ScaledProduct<M> {
    pub fn identity() -> Self {
        Self {
            matrix: M::one(),
            log_scale: 0.0,
        }
    }

    /// Left-multiplies by `m` and renormalizes if needed.
    pub fn push(&mut self, m: &M) {
        self.matrix = self.matrix.left_mul(m);
        let a = self.matrix.max_abs();
        if !(RENORM_LO..=RENORM_HI).contains(&a) && a > 0.0 && a.is_finite() {
            self.matrix = self.matrix.scale_entries(1.0 / a);
            self.log_scale += a.ln();
        }
    }

    /// log of the spectral norm of the represented matrix.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + self.matrix.norm().ln()
    }

    /// `log |det|` of the represented matrix (0 for unimodular products).
    pub fn log_abs_det(&self) -> f64 {
        2.0 * self.log_scale + self.matrix.log_abs_det()
    }

    /// Rescales the stored matrix to unit spectral norm.
    pub fn finalize(mut self) -> Self {
        let n = self.matrix.norm();
        if n > 0.0 && n.is_finite() {
            self.matrix = self.matrix.scale_entries(1.0 / n);
            self.log_scale += n.ln();
        }
        self
    }

    /// Inverse of the represented matrix, assuming it is unimodular (true
    /// for transfer products): the inverse is the adjugate at the same
    /// scale, so no division by a possibly ill-conditioned determinant
    /// happens.
    pub fn inverse(&self) -> Self {
        Self {
            matrix: self.matrix.adjugate(),
            log_scale: self.log_scale,
        }
        .finalize()
    }
}

impl ScaledMat2 {
    /// The represented matrix in plain form; only valid when the scale is
    /// representable.
    pub fn dense(&self) -> Mat2 {
        self.matrix.scale(self.log_scale.exp())
    }
}

impl ScaledCMat2 {
    pub fn dense(&self) -> CMat2 {
        self.matrix.scale(self.log_scale.exp())
    }
}

/// Single-site transfer matrix `(1/t) [[v - E, -t^2], [1, 0]]`.
pub fn site_matrix(v: f64, t: f64, e: f64) -> Result<Mat2> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHopping(t));
    }
    Ok(Mat2::new((v - e) / t, -t, 1.0 / t, 0.0))
}

/// Complex-energy single-site transfer matrix.
pub fn site_matrix_z(v: f64, t: f64, z: Complex64) -> Result<CMat2> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveHopping(t));
    }
    Ok(CMat2::new(
        (Complex64::new(v, 0.0) - z) / t,
        Complex64::new(-t, 0.0),
        Complex64::new(1.0 / t, 0.0),
        Complex64::new(0.0, 0.0),
    ))
}

/// `d/dE` of the single-site matrix: `(1/t) [[-1, 0], [0, 0]]`.
pub fn site_matrix_derivative(t: f64) -> Mat2 {
    Mat2::new(-1.0 / t, 0.0, 0.0, 0.0)
}

/// Transfer matrix of one polymer block; the rightmost factor is site 0.
pub fn polymer_matrix(p: &Polymer, e: f64) -> Mat2 {
    let mut m = Mat2::IDENTITY;
    for j in 0..p.len() {
        let site = site_matrix(p.potential()[j], p.hopping()[j], e).expect("validated polymer");
        m = site.mul(&m);
    }
    m
}

pub fn polymer_matrix_z(p: &Polymer, z: Complex64) -> CMat2 {
    let mut m = CMat2::identity();
    for j in 0..p.len() {
        let site = site_matrix_z(p.potential()[j], p.hopping()[j], z).expect("validated polymer");
        m = site.mul(&m);
    }
    m
}

/// Exact `d/dE` of the block matrix via the product rule over site factors.
/// Agrees with central finite differences to O(h^2).
pub fn polymer_matrix_derivative(p: &Polymer, e: f64) -> Mat2 {
    let n = p.len();
    let mut sites = Vec::with_capacity(n);
    for j in 0..n {
        sites.push(site_matrix(p.potential()[j], p.hopping()[j], e).expect("validated polymer"));
    }
    // suffix[j] = T_{n-1} ... T_{j+1}, prefix[j] = T_{j-1} ... T_0
    let mut result = Mat2::new(0.0, 0.0, 0.0, 0.0);
    for j in 0..n {
        let mut left = Mat2::IDENTITY;
        for s in sites.iter().skip(j + 1) {
            left = s.mul(&left);
        }
        let mut right = Mat2::IDENTITY;
        for s in sites.iter().take(j) {
            right = s.mul(&right);
        }
        let d = site_matrix_derivative(p.hopping()[j]);
        let term = left.mul(&d).mul(&right);
        result = Mat2::new(
            result.a11 + term.a11,
            result.a12 + term.a12,
            result.a21 + term.a21,
            result.a22 + term.a22,
        );
    }
    result
}

/// Transfer matrix over polymer blocks `m..k` of a configuration
/// (`T(k, m) = T_{sign_{k-1}} ... T_{sign_m}`, identity for `k == m`,
/// inverse for `k < m`).
pub fn product(
    config: &Configuration,
    ensemble: &PolymerEnsemble,
    e: f64,
    k: i64,
    m: i64,
) -> Result<ScaledMat2> {
    if k < m {
        return Ok(product(config, ensemble, e, m, k)?.inverse());
    }
    let t_plus = polymer_matrix(ensemble.polymer(crate::model::Sign::Plus), e);
    let t_minus = polymer_matrix(ensemble.polymer(crate::model::Sign::Minus), e);
    let mut acc = ScaledMat2::identity();
    for j in m..k {
        match config.sign(j)? {
            crate::model::Sign::Plus => acc.push(&t_plus),
            crate::model::Sign::Minus => acc.push(&t_minus),
        }
    }
    Ok(acc.finalize())
}

/// Site-by-site transfer matrix of a window at complex energy `z`, from site
/// `k` to site `n` (identity on `n == k`, inverse for `n < k`).
pub fn operator_transfer(window: &JacobiWindow, z: Complex64, n: i64, k: i64) -> Result<ScaledCMat2> {
    if n < k {
        return Ok(operator_transfer(window, z, k, n)?.inverse());
    }
    let mut acc = ScaledCMat2::identity();
    for l in k..n {
        let site = site_matrix_z(window.v(l)?, window.t(l)?, z)?;
        acc.push(&site);
    }
    Ok(acc.finalize())
}

/// Outcome of the complex-energy perturbation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationBound {
    /// `C / (1 - C D |zeta| m)` is a valid sup bound.
    Bound(f64),
    /// `C D |zeta| m >= 1`: the estimate gives no information.
    Infeasible,
}

/// Perturbative sup-norm bound: if transfer norms up to length `m` at energy
/// `z` are bounded by `C` and `D` bounds the inverse hoppings, then at
/// `z + zeta` they are bounded by `C / (1 - C D |zeta| m)` as long as
/// `C D |zeta| m < 1`.
pub fn perturbation_bound(c: f64, d: f64, zeta_abs: f64, m: usize) -> PerturbationBound {
    let q = c * d * zeta_abs * m as f64;
    if q < 1.0 {
        PerturbationBound::Bound(c / (1.0 - q))
    } else {
        PerturbationBound::Infeasible
    }
}
