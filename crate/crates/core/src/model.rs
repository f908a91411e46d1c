//! The underlying system `y = A x + v` and the assumed partial model
//! `y = A_S x_S + z`.

use crate::error::{Error, Result};
use crate::numkit::{
    sample_gaussian_matrix, select, select_columns, CovarianceMatrix, GaussianSampler, Matrix,
    RandomStream, Vector,
};

/// Ground truth: `p` unknowns with covariance `K_x`, white noise of variance
/// `σ_v²` per sample and identity-covariance Gaussian regressors.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    p: usize,
    k_x: CovarianceMatrix,
    noise_variance: f64,
}

impl SystemSpec {
    pub fn new(k_x: CovarianceMatrix, noise_variance: f64) -> Result<Self> {
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be finite and nonnegative, got {noise_variance}"
            )));
        }
        if k_x.dim() == 0 {
            return Err(Error::InvalidArgument("system needs at least one unknown".into()));
        }
        Ok(SystemSpec {
            p: k_x.dim(),
            k_x,
            noise_variance,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k_x(&self) -> &CovarianceMatrix {
        &self.k_x
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }
}

/// `K_x` split along an index set `S` and its complement `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedCovariance {
    s_indices: Vec<usize>,
    c_indices: Vec<usize>,
    k_xs: CovarianceMatrix,
    k_xc: CovarianceMatrix,
    /// `K_{x_C x_S}`, `p_C × p_S`.
    k_xc_xs: Matrix,
}

impl PartitionedCovariance {
    pub fn p(&self) -> usize {
        self.s_indices.len() + self.c_indices.len()
    }

    pub fn p_s(&self) -> usize {
        self.s_indices.len()
    }

    pub fn p_c(&self) -> usize {
        self.c_indices.len()
    }

    pub fn s_indices(&self) -> &[usize] {
        &self.s_indices
    }

    pub fn c_indices(&self) -> &[usize] {
        &self.c_indices
    }

    pub fn k_xs(&self) -> &CovarianceMatrix {
        &self.k_xs
    }

    pub fn k_xc(&self) -> &CovarianceMatrix {
        &self.k_xc
    }

    pub fn k_xc_xs(&self) -> &Matrix {
        &self.k_xc_xs
    }

    pub fn k_xs_xc(&self) -> Matrix {
        self.k_xc_xs.transpose()
    }

    pub fn tr_k_xs(&self) -> f64 {
        self.k_xs.trace()
    }

    pub fn tr_k_xc(&self) -> f64 {
        self.k_xc.trace()
    }

    /// Rebuilds `K_x` in the original index order.
    pub fn assemble(&self) -> Matrix {
        let p = self.p();
        let mut k = Matrix::zeros(p, p);
        for (a, &i) in self.s_indices.iter().enumerate() {
            for (b, &j) in self.s_indices.iter().enumerate() {
                k[(i, j)] = self.k_xs[(a, b)];
            }
            for (b, &j) in self.c_indices.iter().enumerate() {
                k[(i, j)] = self.k_xc_xs[(b, a)];
                k[(j, i)] = self.k_xc_xs[(b, a)];
            }
        }
        for (a, &i) in self.c_indices.iter().enumerate() {
            for (b, &j) in self.c_indices.iter().enumerate() {
                k[(i, j)] = self.k_xc[(a, b)];
            }
        }
        k
    }

    /// `(A_S, A_C)` for a regressor matrix with `p` columns.
    pub fn split_columns(&self, a: &Matrix) -> Result<(Matrix, Matrix)> {
        if a.ncols() != self.p() {
            return Err(Error::dims(
                "split_columns",
                format!("A has {} columns, partition covers {}", a.ncols(), self.p()),
            ));
        }
        Ok((
            select_columns(a, &self.s_indices),
            select_columns(a, &self.c_indices),
        ))
    }

    /// `(x_S, x_C)` for a length-`p` vector.
    pub fn split_vector(&self, x: &Vector) -> Result<(Vector, Vector)> {
        if x.len() != self.p() {
            return Err(Error::dims(
                "split_vector",
                format!("vector has length {}, partition covers {}", x.len(), self.p()),
            ));
        }
        Ok((
            Vector::from_iterator(self.p_s(), self.s_indices.iter().map(|&i| x[i])),
            Vector::from_iterator(self.p_c(), self.c_indices.iter().map(|&i| x[i])),
        ))
    }
}

/// Partition with `S` = the leading `p_S` unknowns.
pub fn partition(spec: &SystemSpec, p_s: usize) -> Result<PartitionedCovariance> {
    if p_s == 0 || p_s > spec.p {
        return Err(Error::InvalidArgument(format!(
            "p_S must lie in 1..={}, got {p_s}",
            spec.p
        )));
    }
    let s: Vec<usize> = (0..p_s).collect();
    partition_by_indices(spec, &s)
}

/// Partition with an arbitrary estimated index set. `C` is the complement in
/// increasing order.
pub fn partition_by_indices(spec: &SystemSpec, s_indices: &[usize]) -> Result<PartitionedCovariance> {
    let p = spec.p;
    let mut seen = vec![false; p];
    for &i in s_indices {
        if i >= p {
            return Err(Error::InvalidArgument(format!("index {i} out of range for p={p}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidArgument(format!("index {i} repeated")));
        }
    }
    if s_indices.is_empty() {
        return Err(Error::InvalidArgument("estimated index set is empty".into()));
    }
    let c_indices: Vec<usize> = (0..p).filter(|&i| !seen[i]).collect();
    let k = spec.k_x.as_matrix();
    Ok(PartitionedCovariance {
        k_xs: spec.k_x.principal_block(s_indices),
        k_xc: spec.k_x.principal_block(&c_indices),
        k_xc_xs: select(k, &c_indices, s_indices),
        s_indices: s_indices.to_vec(),
        c_indices,
    })
}

/// What the mismatched estimator believes: `p_S` unknowns with covariance
/// `K̂_{x_S}` and white noise of variance `σ̂_z²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumedModelSpec {
    p_s: usize,
    k_hat_xs: CovarianceMatrix,
    noise_variance: f64,
}

impl AssumedModelSpec {
    pub fn new(k_hat_xs: CovarianceMatrix, assumed_noise_variance: f64) -> Result<Self> {
        if !(assumed_noise_variance >= 0.0 && assumed_noise_variance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "assumed noise variance must be finite and nonnegative, got {assumed_noise_variance}"
            )));
        }
        Ok(AssumedModelSpec {
            p_s: k_hat_xs.dim(),
            k_hat_xs,
            noise_variance: assumed_noise_variance,
        })
    }

    /// `K̂_{x_S} = I`, the belief used in every experiment scenario.
    pub fn identity(p_s: usize, assumed_noise_variance: f64) -> Result<Self> {
        Self::new(CovarianceMatrix::identity(p_s), assumed_noise_variance)
    }

    pub fn p_s(&self) -> usize {
        self.p_s
    }

    pub fn k_hat_xs(&self) -> &CovarianceMatrix {
        &self.k_hat_xs
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// `K̂_{x_S} = I` and `σ̂_z = 0`: the closed-form expected MSE applies.
    pub fn closed_form_applies(&self) -> bool {
        self.noise_variance == 0.0 && self.k_hat_xs.is_identity()
    }
}

/// One realization of the underlying system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDraw {
    pub a: Matrix,
    pub x: Vector,
    pub v: Vector,
    pub y: Vector,
}

impl SystemDraw {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Leading `p_S` columns of `A`.
    pub fn a_s(&self, p_s: usize) -> Matrix {
        self.a.columns(0, p_s).into_owned()
    }

    /// Columns after the leading `p_S`.
    pub fn a_c(&self, p_s: usize) -> Matrix {
        self.a.columns(p_s, self.a.ncols() - p_s).into_owned()
    }
}

/// Draws `A` with i.i.d. standard normal entries, then `x ~ N(0, K_x)`,
/// then `v ~ N(0, σ_v² I_n)`, and forms `y = A x + v`.
///
/// `A` comes first so that a stream shared with a regressors-only consumer
/// yields the same `A`.
pub fn draw_system(spec: &SystemSpec, n: usize, rng: &mut RandomStream) -> Result<SystemDraw> {
    let sampler = GaussianSampler::new(&spec.k_x)?;
    draw_system_with(spec, &sampler, n, rng)
}

/// [`draw_system`] with a precomputed factor of `K_x`.
pub fn draw_system_with(
    spec: &SystemSpec,
    sampler: &GaussianSampler,
    n: usize,
    rng: &mut RandomStream,
) -> Result<SystemDraw> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if sampler.dim() != spec.p {
        return Err(Error::dims(
            "draw_system",
            format!("sampler has dim {}, system has p={}", sampler.dim(), spec.p),
        ));
    }
    let a = sample_gaussian_matrix(n, spec.p, rng)?;
    let x = sampler.sample(rng);
    let sigma_v = spec.noise_variance.sqrt();
    let v = Vector::from_fn(n, |_, _| sigma_v * rng.standard_normal());
    let y = &a * &x + &v;
    Ok(SystemDraw { a, x, v, y })
}
