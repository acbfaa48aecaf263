//! Gaussian-state algebra: states as (first moments, covariance), symplectic
//! operations, loss channels and homodyne statistics.
//!
//! Conventions: quadrature ordering is x1, p1, x2, p2, ..., the vacuum
//! quadrature variance is 1/2 and the symplectic form is block-diagonal
//! [[0, 1], [-1, 0]] per mode.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

/// Vacuum quadrature variance.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Tolerance for symplectic / symmetry checks.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Slack allowed on the uncertainty bound (symplectic eigenvalues >= 1/2 - UNCERTAINTY_TOL).
pub const UNCERTAINTY_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GaussianError {
    #[error("mode index {mode} out of range for {num_modes}-mode state")]
    InvalidMode { mode: usize, num_modes: usize },
    #[error("squeezing parameter z = {0} outside (0, 1]")]
    InvalidSqueeze(f64),
    #[error("transmissivity {0} outside [0, 1]")]
    InvalidTransmissivity(f64),
    #[error("beam splitter requires two distinct modes")]
    DuplicateModes,
    #[error("partial trace requires a non-empty set of valid modes")]
    EmptyKeep,
    #[error("squeezing level {0} dB must be <= 0")]
    PositiveDb(f64),
    #[error("matrix of size {0} is not a valid even-dimensional symplectic candidate")]
    BadDimension(usize),
}

/// A Gaussian state of `n` optical modes: mean vector of length 2n and a
/// symmetric 2n x 2n covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// n-mode vacuum: zero mean, cov = 1/2 I.
    pub fn vacuum(num_modes: usize) -> Self {
        assert!(num_modes > 0, "state must have at least one mode");
        let dim = 2 * num_modes;
        GaussianState {
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * VACUUM_VARIANCE,
        }
    }

    /// Single-mode coherent state |alpha>: mean (sqrt2 Re a, sqrt2 Im a), cov 1/2 I.
    pub fn coherent(alpha_re: f64, alpha_im: f64) -> Self {
        let mut s = GaussianState::vacuum(1);
        s.mean[0] = std::f64::consts::SQRT_2 * alpha_re;
        s.mean[1] = std::f64::consts::SQRT_2 * alpha_im;
        s
    }

    /// Single-mode squeezed vacuum S(z)|0>: cov diag(z^2/2, 1/(2 z^2)).
    pub fn squeezed_vacuum(z: f64) -> Result<Self, GaussianError> {
        GaussianState::vacuum(1).squeeze(0, z)
    }

    pub fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        assert_eq!(mean.len() % 2, 0);
        assert_eq!(cov.nrows(), mean.len());
        assert_eq!(cov.ncols(), mean.len());
        GaussianState { mean, cov }
    }

    pub fn num_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Tensor product: `self` takes the lower mode indices.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (da, db) = (self.mean.len(), other.mean.len());
        let mut mean = DVector::zeros(da + db);
        mean.rows_mut(0, da).copy_from(&self.mean);
        mean.rows_mut(da, db).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        GaussianState { mean, cov }
    }

    /// Apply a symplectic operation on the full state.
    pub fn apply(&self, op: &SymplecticOp) -> GaussianState {
        let s = op.matrix();
        GaussianState {
            mean: s * &self.mean,
            cov: s * &self.cov * s.transpose(),
        }
    }

    fn check_mode(&self, mode: usize) -> Result<(), GaussianError> {
        if mode >= self.num_modes() {
            Err(GaussianError::InvalidMode {
                mode,
                num_modes: self.num_modes(),
            })
        } else {
            Ok(())
        }
    }

    /// Single-mode squeezing S(z) = diag(z, 1/z) on `mode`, z in (0, 1].
    pub fn squeeze(&self, mode: usize, z: f64) -> Result<GaussianState, GaussianError> {
        self.check_mode(mode)?;
        if !(z > 0.0 && z <= 1.0) {
            return Err(GaussianError::InvalidSqueeze(z));
        }
        Ok(self.apply(&SymplecticOp::squeezer(self.num_modes(), mode, z)))
    }

    /// Phase rotation by `theta` on `mode`.
    pub fn rotate(&self, mode: usize, theta: f64) -> Result<GaussianState, GaussianError> {
        self.check_mode(mode)?;
        Ok(self.apply(&SymplecticOp::rotation(self.num_modes(), mode, theta)))
    }

    /// Two-mode beam splitter with cos^2(theta) = eta. The transmitted port is
    /// `mode_a` (mean picks up cos(theta) of its own input plus sin(theta) of
    /// `mode_b`'s input).
    pub fn beam_splitter(
        &self,
        mode_a: usize,
        mode_b: usize,
        eta: f64,
    ) -> Result<GaussianState, GaussianError> {
        self.check_mode(mode_a)?;
        self.check_mode(mode_b)?;
        if mode_a == mode_b {
            return Err(GaussianError::DuplicateModes);
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::InvalidTransmissivity(eta));
        }
        Ok(self.apply(&SymplecticOp::beam_splitter(
            self.num_modes(),
            mode_a,
            mode_b,
            eta,
        )))
    }

    /// Pure-loss channel of transmissivity `eta` on `mode`: mean scales by
    /// sqrt(eta), variances map v -> eta v + (1 - eta)/2. Equivalent to a beam
    /// splitter with a fresh vacuum ancilla followed by a partial trace.
    pub fn attenuate(&self, mode: usize, eta: f64) -> Result<GaussianState, GaussianError> {
        self.check_mode(mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(GaussianError::InvalidTransmissivity(eta));
        }
        let mut out = self.clone();
        let root = eta.sqrt();
        let (x, p) = (2 * mode, 2 * mode + 1);
        out.mean[x] *= root;
        out.mean[p] *= root;
        for k in 0..self.mean.len() {
            if k == x || k == p {
                continue;
            }
            // cross-covariances with other modes scale by sqrt(eta)
            out.cov[(x, k)] *= root;
            out.cov[(k, x)] *= root;
            out.cov[(p, k)] *= root;
            out.cov[(k, p)] *= root;
        }
        for &i in &[x, p] {
            for &j in &[x, p] {
                out.cov[(i, j)] = eta * self.cov[(i, j)]
                    + if i == j { (1.0 - eta) * VACUUM_VARIANCE } else { 0.0 };
            }
        }
        Ok(out)
    }

    /// Marginal state on the modes listed in `keep` (order preserved).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<GaussianState, GaussianError> {
        if keep.is_empty() {
            return Err(GaussianError::EmptyKeep);
        }
        for &m in keep {
            self.check_mode(m)?;
        }
        let dim = 2 * keep.len();
        let mut mean = DVector::zeros(dim);
        let mut cov = DMatrix::zeros(dim, dim);
        for (a, &ma) in keep.iter().enumerate() {
            for da in 0..2 {
                mean[2 * a + da] = self.mean[2 * ma + da];
                for (b, &mb) in keep.iter().enumerate() {
                    for db in 0..2 {
                        cov[(2 * a + da, 2 * b + db)] = self.cov[(2 * ma + da, 2 * mb + db)];
                    }
                }
            }
        }
        Ok(GaussianState { mean, cov })
    }

    /// Mean and variance of the homodyne quadrature x_phi = cos(phi) x + sin(phi) p
    /// on `mode`.
    pub fn homodyne_stats(&self, mode: usize, phi: f64) -> Result<HomodyneResult, GaussianError> {
        self.check_mode(mode)?;
        let (c, s) = (phi.cos(), phi.sin());
        let (x, p) = (2 * mode, 2 * mode + 1);
        let mean = c * self.mean[x] + s * self.mean[p];
        let variance = c * c * self.cov[(x, x)]
            + 2.0 * c * s * self.cov[(x, p)]
            + s * s * self.cov[(p, p)];
        Ok(HomodyneResult {
            mean,
            variance,
            sample: None,
        })
    }

    /// Draw one homodyne outcome on `mode` along phi.
    pub fn homodyne_sample<R: Rng>(
        &self,
        mode: usize,
        phi: f64,
        rng: &mut R,
    ) -> Result<f64, GaussianError> {
        let stats = self.homodyne_stats(mode, phi)?;
        let normal = Normal::new(stats.mean, stats.variance.sqrt())
            .expect("homodyne variance must be positive");
        Ok(normal.sample(rng))
    }

    /// Couple a single-mode state into a squeezed vacuum through a beam splitter
    /// of transmissivity `coupler_eta` (the squeezer side), keeping the bright
    /// output port. The input enters the (1 - coupler_eta) port, so for the
    /// 99/1 coupler the amplitude shrinks by a factor 0.1 and the covariance
    /// becomes 1/2 diag(0.01 + 0.99 z^2, 0.01 + 0.99 z^-2).
    ///
    /// `theta` orients the squeezing: the reduced-variance quadrature is
    /// x_theta (theta = 0 squeezes along x).
    pub fn mix_with_squeezed_vacuum(
        &self,
        z: f64,
        coupler_eta: f64,
        theta: f64,
    ) -> Result<GaussianState, GaussianError> {
        if self.num_modes() != 1 {
            return Err(GaussianError::BadDimension(self.mean.len()));
        }
        if !(0.0..=1.0).contains(&coupler_eta) {
            return Err(GaussianError::InvalidTransmissivity(coupler_eta));
        }
        // rotate(t) moves the squeezed axis to the quadrature x_{-t}, so the
        // ancilla is rotated by -theta to put the reduced variance along
        // x_theta
        let ancilla = GaussianState::squeezed_vacuum(z)?.rotate(0, -theta)?;
        let joint = ancilla.tensor(self).beam_splitter(0, 1, coupler_eta)?;
        joint.partial_trace(&[0])
    }

    /// Symplectic eigenvalues of the covariance matrix (moduli of the
    /// eigenvalues of Omega * cov, each value listed once per conjugate pair).
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        // With cov = L L^T (Cholesky), Omega * cov is similar to the
        // antisymmetric matrix L^T Omega L, whose eigenvalues are +-i nu, so
        // the nu are its singular values. This avoids the unsymmetric
        // eigenvalue iteration (which can stall on degenerate spectra) and
        // the symmetric eigendecomposition.
        let dim = self.mean.len();
        let symmetrized = (&self.cov + self.cov.transpose()) * 0.5;
        let jitter = 1e-12 * (1.0 + symmetrized.amax());
        let chol = symmetrized
            .clone()
            .cholesky()
            .or_else(|| (symmetrized + DMatrix::identity(dim, dim) * jitter).cholesky());
        let Some(chol) = chol else {
            // not positive definite even with jitter: report a hard
            // uncertainty violation
            return vec![0.0; self.num_modes()];
        };
        let l = chol.l();
        let h = l.transpose() * symplectic_form(self.num_modes()) * &l;
        let mut nus: Vec<f64> = h.svd(false, false).singular_values.iter().cloned().collect();
        nus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // singular values come in equal pairs, one per mode
        nus.into_iter().step_by(2).collect()
    }

    /// True when the covariance is symmetric and every symplectic eigenvalue
    /// respects the uncertainty bound.
    pub fn is_physical(&self) -> bool {
        let sym_ok = (&self.cov - self.cov.transpose()).amax() < SYMPLECTIC_TOL;
        sym_ok
            && self
                .symplectic_eigenvalues()
                .iter()
                .all(|&nu| nu >= VACUUM_VARIANCE - UNCERTAINTY_TOL)
    }
}

/// Homodyne measurement statistics, optionally carrying a drawn sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneResult {
    pub mean: f64,
    pub variance: f64,
    pub sample: Option<f64>,
}

/// A linear symplectic transform on 2n quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    description: String,
}

impl SymplecticOp {
    pub fn new(matrix: DMatrix<f64>, description: impl Into<String>) -> Result<Self, GaussianError> {
        let n = matrix.nrows();
        if n == 0 || n % 2 != 0 || matrix.ncols() != n {
            return Err(GaussianError::BadDimension(n));
        }
        let op = SymplecticOp {
            matrix,
            description: description.into(),
        };
        debug_assert!(op.symplectic_defect() < SYMPLECTIC_TOL, "not symplectic");
        Ok(op)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// || S Omega S^T - Omega ||_inf
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.matrix.nrows() / 2);
        (&self.matrix * &omega * self.matrix.transpose() - omega).amax()
    }

    /// S(z) = diag(z, 1/z) on `mode`, identity elsewhere.
    pub fn squeezer(num_modes: usize, mode: usize, z: f64) -> Self {
        let mut m = DMatrix::identity(2 * num_modes, 2 * num_modes);
        m[(2 * mode, 2 * mode)] = z;
        m[(2 * mode + 1, 2 * mode + 1)] = 1.0 / z;
        SymplecticOp {
            matrix: m,
            description: format!("squeeze(mode {mode}, z={z})"),
        }
    }

    /// Phase rotation on `mode`: x -> cos t x + sin t p, p -> -sin t x + cos t p.
    pub fn rotation(num_modes: usize, mode: usize, theta: f64) -> Self {
        let mut m = DMatrix::identity(2 * num_modes, 2 * num_modes);
        let (c, s) = (theta.cos(), theta.sin());
        let (x, p) = (2 * mode, 2 * mode + 1);
        m[(x, x)] = c;
        m[(x, p)] = s;
        m[(p, x)] = -s;
        m[(p, p)] = c;
        SymplecticOp {
            matrix: m,
            description: format!("rotation(mode {mode}, theta={theta})"),
        }
    }

    /// Beam splitter on (mode_a, mode_b) with cos^2(theta) = eta:
    /// a -> cos t a + sin t b, b -> -sin t a + cos t b, acting identically on
    /// both quadratures.
    pub fn beam_splitter(num_modes: usize, mode_a: usize, mode_b: usize, eta: f64) -> Self {
        let mut m = DMatrix::identity(2 * num_modes, 2 * num_modes);
        let c = eta.sqrt();
        let s = (1.0 - eta).sqrt();
        for d in 0..2 {
            let (ia, ib) = (2 * mode_a + d, 2 * mode_b + d);
            m[(ia, ia)] = c;
            m[(ia, ib)] = s;
            m[(ib, ia)] = -s;
            m[(ib, ib)] = c;
        }
        SymplecticOp {
            matrix: m,
            description: format!("beam_splitter({mode_a},{mode_b}, eta={eta})"),
        }
    }
}

/// The standard symplectic form, block-diagonal [[0,1],[-1,0]] per mode.
pub fn symplectic_form(num_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * num_modes, 2 * num_modes);
    for m in 0..num_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// The paper's squeezing-parameter mapping z = 10^(dB/10), dB <= 0.
pub fn db_to_z(squeezing_db: f64) -> Result<f64, GaussianError> {
    if squeezing_db > 0.0 {
        return Err(GaussianError::PositiveDb(squeezing_db));
    }
    Ok(10f64.powf(squeezing_db / 10.0))
}

/// Alternate amplitude convention z = 10^(dB/20), for sensitivity analysis.
pub fn db_to_z_amplitude(squeezing_db: f64) -> Result<f64, GaussianError> {
    if squeezing_db > 0.0 {
        return Err(GaussianError::PositiveDb(squeezing_db));
    }
    Ok(10f64.powf(squeezing_db / 20.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn coherent_state_moments() {
        let s = GaussianState::coherent(1.0, 0.0);
        assert_abs_diff_eq!(s.mean()[0], 1.41421356, epsilon = 1e-8);
        assert_abs_diff_eq!(s.mean()[1], 0.0);
        assert_abs_diff_eq!(s.cov()[(0, 0)], 0.5);
        assert_abs_diff_eq!(s.cov()[(1, 1)], 0.5);

        let v = GaussianState::coherent(0.0, 0.0);
        assert_eq!(v, GaussianState::vacuum(1));

        let s = GaussianState::coherent(0.3, 0.4);
        assert_abs_diff_eq!(s.mean()[0], 0.42426407, epsilon = 1e-8);
        assert_abs_diff_eq!(s.mean()[1], 0.56568542, epsilon = 1e-8);
    }

    #[test]
    fn squeeze_examples() {
        let v = GaussianState::vacuum(1);
        assert_eq!(v.squeeze(0, 1.0).unwrap(), v);

        let s = v.squeeze(0, 0.5).unwrap();
        assert_abs_diff_eq!(s.cov()[(0, 0)], 0.125);
        assert_abs_diff_eq!(s.cov()[(1, 1)], 2.0);

        let c = GaussianState::coherent(1.0, 0.0).squeeze(0, 0.5).unwrap();
        assert_abs_diff_eq!(c.mean()[0], 0.70710678, epsilon = 1e-8);
        assert_abs_diff_eq!(c.cov()[(0, 0)], 0.125);
        assert_abs_diff_eq!(c.cov()[(1, 1)], 2.0);

        assert!(v.squeeze(0, 0.0).is_err());
        assert!(v.squeeze(0, 1.5).is_err());
        assert!(v.squeeze(0, -0.1).is_err());
    }

    #[test]
    fn squeeze_preserves_determinant() {
        let s = GaussianState::coherent(0.7, -0.2).squeeze(0, 0.3).unwrap();
        let det = s.cov()[(0, 0)] * s.cov()[(1, 1)] - s.cov()[(0, 1)] * s.cov()[(1, 0)];
        assert_abs_diff_eq!(det, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn beam_splitter_examples() {
        let two_vac = GaussianState::vacuum(2);
        let out = two_vac.beam_splitter(0, 1, 0.5).unwrap();
        assert_abs_diff_eq!((out.cov() - two_vac.cov()).amax(), 0.0, epsilon = 1e-12);

        let joint = GaussianState::coherent(1.0, 0.0).tensor(&GaussianState::vacuum(1));
        let out = joint.beam_splitter(0, 1, 0.99).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 0.99f64.sqrt() * std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(out.mean()[0], 1.40712, epsilon = 1e-5);

        // squeezed vacuum mixed with vacuum: transmitted x-variance 1/2 (1 - eta (1 - z^2))
        let z = 0.4;
        let eta = 0.7;
        let joint = GaussianState::squeezed_vacuum(z)
            .unwrap()
            .tensor(&GaussianState::vacuum(1));
        let out = joint.beam_splitter(0, 1, eta).unwrap().partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(
            out.cov()[(0, 0)],
            0.5 * (1.0 - eta * (1.0 - z * z)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn beam_splitter_identity_at_unit_eta() {
        let joint = GaussianState::coherent(0.4, 0.9)
            .squeeze(0, 0.6)
            .unwrap()
            .tensor(&GaussianState::vacuum(1));
        let out = joint.beam_splitter(0, 1, 1.0).unwrap();
        let marg = out.partial_trace(&[0]).unwrap();
        let orig = joint.partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!((marg.mean() - orig.mean()).amax(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((marg.cov() - orig.cov()).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn attenuate_examples() {
        let s = GaussianState::coherent(0.5, -1.2).squeeze(0, 0.8).unwrap();
        let same = s.attenuate(0, 1.0).unwrap();
        assert_abs_diff_eq!((same.cov() - s.cov()).amax(), 0.0, epsilon = 1e-12);

        let sq = GaussianState::squeezed_vacuum(0.5).unwrap();
        let out = sq.attenuate(0, 0.5).unwrap();
        assert_abs_diff_eq!(out.cov()[(0, 0)], 0.3125);

        let c = GaussianState::coherent(1.0, 0.0).attenuate(0, 0.25).unwrap();
        assert_abs_diff_eq!(c.mean()[0], 0.70710678, epsilon = 1e-8);
        assert_abs_diff_eq!(c.cov()[(0, 0)], 0.5);
        assert_abs_diff_eq!(c.cov()[(1, 1)], 0.5);
    }

    #[test]
    fn attenuate_matches_ancilla_route() {
        // direct loss formula vs beam splitter with vacuum ancilla + trace
        let s = GaussianState::coherent(0.9, 0.3).squeeze(0, 0.4).unwrap();
        for &eta in &[0.0, 0.13, 0.5, 0.87, 1.0] {
            let direct = s.attenuate(0, eta).unwrap();
            let routed = s
                .tensor(&GaussianState::vacuum(1))
                .beam_splitter(0, 1, eta)
                .unwrap()
                .partial_trace(&[0])
                .unwrap();
            assert_abs_diff_eq!((direct.mean() - routed.mean()).amax(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!((direct.cov() - routed.cov()).amax(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn loss_composition() {
        let s = GaussianState::coherent(2.0, -0.7).squeeze(0, 0.55).unwrap();
        let a = s.attenuate(0, 0.6).unwrap().attenuate(0, 0.45).unwrap();
        let b = s.attenuate(0, 0.6 * 0.45).unwrap();
        assert_abs_diff_eq!((a.mean() - b.mean()).amax(), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!((a.cov() - b.cov()).amax(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_trace_examples() {
        let a = GaussianState::coherent(1.0, 2.0).squeeze(0, 0.7).unwrap();
        let b = GaussianState::coherent(-0.5, 0.1);
        let joint = a.tensor(&b);
        assert_eq!(joint.partial_trace(&[0]).unwrap(), a);
        assert_eq!(joint.partial_trace(&[1]).unwrap(), b);
        assert_eq!(joint.partial_trace(&[0, 1]).unwrap(), joint);
        assert!(joint.partial_trace(&[]).is_err());

        // tapped-mode marginal picks up sqrt(1 - eta) of the input amplitude
        let eta = 0.36;
        let sig = GaussianState::coherent(1.5, 0.0);
        let tapped = sig
            .tensor(&GaussianState::vacuum(1))
            .beam_splitter(1, 0, eta)
            .unwrap()
            .partial_trace(&[1])
            .unwrap();
        assert_abs_diff_eq!(
            tapped.mean()[0],
            (1.0 - eta).sqrt() * sig.mean()[0],
            epsilon = 1e-12
        );
    }

    #[test]
    fn homodyne_stats_examples() {
        let c = GaussianState::coherent(1.0, 0.0);
        let h = c.homodyne_stats(0, 0.0).unwrap();
        assert_abs_diff_eq!(h.mean, 1.41421356, epsilon = 1e-8);
        assert_abs_diff_eq!(h.variance, 0.5);

        let h = c.homodyne_stats(0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(h.mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h.variance, 0.5, epsilon = 1e-12);

        let sq = c.squeeze(0, 0.5).unwrap();
        assert_abs_diff_eq!(sq.homodyne_stats(0, 0.0).unwrap().variance, 0.125);
    }

    #[test]
    fn homodyne_sampling_moments() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let v = GaussianState::vacuum(1);
        let n = 100_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| v.homodyne_sample(0, 0.0, &mut rng).unwrap())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n as f64;
        let se_mean = (0.5 / n as f64).sqrt();
        let se_var = 0.5 * (2.0 / n as f64).sqrt();
        assert!(mean.abs() < 5.0 * se_mean, "mean {mean} vs se {se_mean}");
        assert!((var - 0.5).abs() < 5.0 * se_var, "var {var} vs se {se_var}");
    }

    #[test]
    fn homodyne_sampling_deterministic() {
        let s = GaussianState::coherent(0.8, 0.2);
        let draw = |seed: u64| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| s.homodyne_sample(0, 0.3, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(42), draw(42));
        assert_ne!(draw(42), draw(43));
    }

    #[test]
    fn homodyne_sampling_tracks_small_variance() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let z = 0.05;
        let s = GaussianState::squeezed_vacuum(z).unwrap();
        let n = 20_000;
        let var = (0..n)
            .map(|_| s.homodyne_sample(0, 0.0, &mut rng).unwrap().powi(2))
            .sum::<f64>()
            / n as f64;
        let expect = 0.5 * z * z;
        assert!((var - expect).abs() < 5.0 * expect * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn db_conversion() {
        assert_abs_diff_eq!(db_to_z(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(db_to_z(-3.0).unwrap(), 0.50118723, epsilon = 1e-8);
        assert_abs_diff_eq!(db_to_z(-10.0).unwrap(), 0.1, epsilon = 1e-12);
        assert!(db_to_z(0.5).is_err());
        assert_abs_diff_eq!(db_to_z_amplitude(-10.0).unwrap(), 10f64.powf(-0.5));
    }

    #[test]
    fn mix_with_squeezed_vacuum_examples() {
        let s = GaussianState::coherent(10.0 / std::f64::consts::SQRT_2, 0.0);
        let out = s.mix_with_squeezed_vacuum(1.0, 0.99, 0.0).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.cov()[(0, 0)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.cov()[(1, 1)], 0.5, epsilon = 1e-12);

        let z = 0.37;
        let s = GaussianState::coherent(1.2, -0.4);
        let out = s.mix_with_squeezed_vacuum(z, 0.99, 0.0).unwrap();
        assert_abs_diff_eq!(out.mean()[0], 0.1 * s.mean()[0], epsilon = 1e-12);
        assert_abs_diff_eq!(out.mean()[1], 0.1 * s.mean()[1], epsilon = 1e-12);
        assert_abs_diff_eq!(out.cov()[(0, 0)], 0.5 * (0.01 + 0.99 * z * z), epsilon = 1e-12);
        assert_abs_diff_eq!(
            out.cov()[(1, 1)],
            0.5 * (0.01 + 0.99 / (z * z)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mix_orientation_follows_theta() {
        // the reduced-variance quadrature must track theta: homodyne variance
        // along theta equals the theta=0 x-variance for every angle
        let z = 0.5;
        for &theta in &[0.0, 0.7, std::f64::consts::FRAC_PI_2, 2.4] {
            let s = GaussianState::coherent(0.8, -0.3);
            let out = s.mix_with_squeezed_vacuum(z, 0.99, theta).unwrap();
            let along = out.homodyne_stats(0, theta).unwrap().variance;
            let across = out
                .homodyne_stats(0, theta + std::f64::consts::FRAC_PI_2)
                .unwrap()
                .variance;
            assert_abs_diff_eq!(along, 0.5 * (0.01 + 0.99 * z * z), epsilon = 1e-12);
            assert_abs_diff_eq!(across, 0.5 * (0.01 + 0.99 / (z * z)), epsilon = 1e-12);
        }
    }

    #[test]
    fn mix_with_unit_z_equals_attenuation() {
        let s = GaussianState::coherent(3.0, 1.0);
        let mixed = s.mix_with_squeezed_vacuum(1.0, 0.99, 0.0).unwrap();
        let lossy = s.attenuate(0, 0.01).unwrap();
        assert_abs_diff_eq!((mixed.mean() - lossy.mean()).amax(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((mixed.cov() - lossy.cov()).amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn symplectic_condition() {
        for op in [
            SymplecticOp::squeezer(2, 1, 0.3),
            SymplecticOp::rotation(2, 0, 1.1),
            SymplecticOp::beam_splitter(2, 0, 1, 0.42),
        ] {
            assert!(op.symplectic_defect() < SYMPLECTIC_TOL, "{}", op.description());
        }
    }

    #[test]
    fn vacuum_symplectic_eigenvalues() {
        let nus = GaussianState::vacuum(2).symplectic_eigenvalues();
        assert_eq!(nus.len(), 2);
        for nu in nus {
            assert_abs_diff_eq!(nu, 0.5, epsilon = 1e-12);
        }
        assert!(GaussianState::vacuum(2).is_physical());
    }
}
