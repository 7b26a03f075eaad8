//! Per-pathway kernel matrices.
//!
//! Every kernel scales by the pathway size `p_m`: the rbf bandwidth is
//! `γ_m = 1/p_m`, and the inner-product kernels divide `uᵀv` by `p_m` unless
//! [`KernelSpec::scale_inner_product`] is off.

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ExpressionDataset, PathwayCollection};
use crate::error::{PkbError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum KernelKind {
    /// `exp(-‖u−v‖² / p_m)`
    Rbf,
    /// `(uᵀv / p_m + 1)^degree`
    Polynomial { degree: u32 },
    /// `uᵀv / p_m`
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub scale_inner_product: bool,
}

impl KernelSpec {
    pub fn rbf() -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            scale_inner_product: true,
        }
    }

    pub fn poly3() -> Self {
        Self::polynomial(3)
    }

    pub fn polynomial(degree: u32) -> Self {
        KernelSpec {
            kind: KernelKind::Polynomial { degree },
            scale_inner_product: true,
        }
    }

    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            scale_inner_product: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            KernelKind::Polynomial { degree: 0 } => {
                Err(PkbError::InvalidConfig("polynomial degree must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Kernel value for two equal-length pathway sub-vectors; no length check.
    #[inline]
    pub(crate) fn eval(&self, u: &[f64], v: &[f64], p_m: usize) -> f64 {
        let p = p_m as f64;
        match self.kind {
            KernelKind::Rbf => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / p).exp()
            }
            KernelKind::Polynomial { degree } => {
                let ip = self.inner(u, v, p);
                (ip + 1.0).powi(degree as i32)
            }
            KernelKind::Linear => self.inner(u, v, p),
        }
    }

    #[inline]
    fn inner(&self, u: &[f64], v: &[f64], p: f64) -> f64 {
        let ip: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        if self.scale_inner_product {
            ip / p
        } else {
            ip
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::rbf()
    }
}

pub fn kernel_value(u: &[f64], v: &[f64], spec: &KernelSpec, p_m: usize) -> Result<f64> {
    if u.len() != v.len() || u.len() != p_m || p_m == 0 {
        return Err(PkbError::DimensionMismatch(format!(
            "kernel arguments of length {} and {} for pathway size {p_m}",
            u.len(),
            v.len()
        )));
    }
    Ok(spec.eval(u, v, p_m))
}

/// Symmetric kernel over the rows of a row-major `n × p_m` slice.
/// The upper triangle is computed and mirrored.
pub fn gram_matrix(slice: &[f64], p_m: usize, spec: &KernelSpec) -> Mat<f64> {
    let n = slice.len() / p_m;
    let row = |i: usize| &slice[i * p_m..(i + 1) * p_m];
    let mut k = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let v = spec.eval(row(i), row(j), p_m);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// Kernel between training rows (matrix rows) and new rows (matrix columns).
pub fn build_cross_kernel(train: &[f64], new: &[f64], spec: &KernelSpec, p_m: usize) -> Result<Mat<f64>> {
    if p_m == 0 || train.len() % p_m != 0 || new.len() % p_m != 0 {
        return Err(PkbError::DimensionMismatch(format!(
            "slices of length {} and {} do not have {p_m} columns",
            train.len(),
            new.len()
        )));
    }
    let (n, n_new) = (train.len() / p_m, new.len() / p_m);
    Ok(Mat::from_fn(n, n_new, |i, j| {
        spec.eval(&train[i * p_m..(i + 1) * p_m], &new[j * p_m..(j + 1) * p_m], p_m)
    }))
}

/// One kernel matrix per pathway, in collection order.
#[derive(Debug, Clone)]
pub struct KernelSet {
    matrices: Vec<Mat<f64>>,
    names: Vec<String>,
    spec: KernelSpec,
}

impl KernelSet {
    pub fn from_matrices(matrices: Vec<Mat<f64>>, names: Vec<String>, spec: KernelSpec) -> Result<Self> {
        if matrices.is_empty() || matrices.len() != names.len() {
            return Err(PkbError::DimensionMismatch(format!(
                "{} kernel matrices for {} names",
                matrices.len(),
                names.len()
            )));
        }
        let n = matrices[0].nrows();
        if matrices.iter().any(|k| k.nrows() != n || k.ncols() != n) {
            return Err(PkbError::DimensionMismatch("kernel matrices must share one square size".into()));
        }
        Ok(KernelSet { matrices, names, spec })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn n_samples(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrix(&self, m: usize) -> &Mat<f64> {
        &self.matrices[m]
    }

    pub fn matrices(&self) -> &[Mat<f64>] {
        &self.matrices
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Kernels restricted to `rows × cols` of every matrix.
    pub fn block(&self, m: usize, rows: &[usize], cols: &[usize]) -> Mat<f64> {
        let k = &self.matrices[m];
        Mat::from_fn(rows.len(), cols.len(), |i, j| k[(rows[i], cols[j])])
    }

    /// Kernel set over a subset of the samples.
    pub fn subset(&self, samples: &[usize]) -> KernelSet {
        KernelSet {
            matrices: (0..self.len()).map(|m| self.block(m, samples, samples)).collect(),
            names: self.names.clone(),
            spec: self.spec,
        }
    }
}

pub fn build_kernel_set(data: &ExpressionDataset, pathways: &PathwayCollection, spec: &KernelSpec) -> Result<KernelSet> {
    spec.validate()?;
    let matrices = pathways
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|pw| gram_matrix(&data.slice_columns(&pw.genes), pw.genes.len(), spec))
        .collect();
    KernelSet::from_matrices(matrices, pathways.names(), *spec)
}
