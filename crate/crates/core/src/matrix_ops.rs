//! Matrix primitives: ordered spectra, Ky-Fan norms, the symmetric
//! vectorization isometry, inertia, and support projectors.
//!
//! Spectra are stored descending throughout the crate; callers that index
//! "i-th smallest" use the explicit [`Spectrum::increasing`] view.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative symmetry tolerance for operations requiring symmetric input.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Default relative rank cutoff against the largest singular value.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Default relative zero-eigenvalue cutoff against the spectral norm.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Singular,
    Eigen,
}

/// Ordered spectrum of a matrix, stored descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    kind: SpectrumKind,
    values: Vec<f64>,
}

impl Spectrum {
    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values in descending order (sigma_1 >= ... or lambda_1 >= ...).
    pub fn descending(&self) -> &[f64] {
        &self.values
    }

    /// Reversed view matching the increasing storage convention used by
    /// the per-sample width bounds ("i-th smallest" indexing).
    pub fn increasing(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.reverse();
        v
    }
}

pub(crate) fn is_symmetric(x: &DMatrix<f64>, rel_tol: f64) -> bool {
    if !x.is_square() {
        return false;
    }
    let scale = x.norm();
    if scale == 0.0 {
        return true;
    }
    let mut acc = 0.0f64;
    for j in 0..x.ncols() {
        for i in (j + 1)..x.nrows() {
            let d = x[(i, j)] - x[(j, i)];
            acc += d * d;
        }
    }
    (2.0 * acc).sqrt() <= rel_tol * scale
}

/// Singular value decomposition with values sorted descending and the
/// column permutation applied to both factor matrices.
///
/// nalgebra's bidiagonal iteration can converge to a wrong decomposition
/// on rank-deficient input at some tolerances, so the result is verified
/// against the reconstruction X = U S V^T and recomputed at a different
/// eps if it fails.
pub(crate) fn sorted_svd(x: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let scale = x.norm();
    let mut best: Option<(nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>, f64)> = None;
    for eps in [1e-14, f64::EPSILON, 1e-12] {
        let Some(svd) = x.clone().try_svd(true, true, eps, 0) else {
            continue;
        };
        let err = {
            let u = svd.u.as_ref().unwrap();
            let vt = svd.v_t.as_ref().unwrap();
            let mut scaled = vt.clone();
            for (i, s) in svd.singular_values.iter().enumerate() {
                scaled.row_mut(i).scale_mut(*s);
            }
            (x - u * scaled).norm()
        };
        if err <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            best = Some((svd, err));
            break;
        }
        if best.as_ref().is_none_or(|(_, e)| err < *e) {
            best = Some((svd, err));
        }
    }
    if let Some((svd, err)) = best {
        if err <= 1e-10 * scale.max(f64::MIN_POSITIVE) {
            let u = svd.u.expect("svd requested u");
            let vt = svd.v_t.expect("svd requested v_t");
            let s: Vec<f64> = svd.singular_values.iter().copied().collect();
            let mut order: Vec<usize> = (0..s.len()).collect();
            order.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap());
            let su = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
            let sv = DMatrix::from_fn(vt.ncols(), order.len(), |i, j| vt[(order[j], i)]);
            let ss: Vec<f64> = order.iter().map(|&i| s[i]).collect();
            return (su, ss, sv);
        }
    }
    jacobi_svd(x)
}

/// One-sided Jacobi SVD: slow but reliably accurate, used when the
/// bidiagonal iteration fails verification. Columns with zero singular
/// value come back as zero vectors, which every caller scales by sigma.
fn jacobi_svd(x: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    if x.nrows() < x.ncols() {
        let (u, s, v) = jacobi_svd(&x.transpose());
        return (v, s, u);
    }
    let n = x.ncols();
    let mut u = x.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let up = u.column(p);
                let uq = u.column(q);
                let a = up.dot(&up);
                let b = uq.dot(&uq);
                let c = up.dot(&uq);
                if c.abs() <= tol * (a * b).sqrt() || a == 0.0 || b == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * c);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..u.nrows() {
                    let (ip, iq) = (u[(i, p)], u[(i, q)]);
                    u[(i, p)] = cs * ip - sn * iq;
                    u[(i, q)] = sn * ip + cs * iq;
                }
                for i in 0..n {
                    let (ip, iq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = cs * ip - sn * iq;
                    v[(i, q)] = sn * ip + cs * iq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<(f64, usize)> = (0..n).map(|j| (u.column(j).norm(), j)).collect();
    sv.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let floor = sv.first().map_or(0.0, |m| m.0) * 1e-18;
    let mut su = DMatrix::zeros(u.nrows(), n);
    let mut out_v = DMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (k, &(sigma, j)) in sv.iter().enumerate() {
        if sigma > floor {
            s.push(sigma);
            let col = u.column(j) / sigma;
            su.set_column(k, &col);
        } else {
            s.push(0.0);
        }
        out_v.set_column(k, &v.column(j));
    }
    (su, s, out_v)
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
pub(crate) fn sorted_symmetric_eigen(x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(x.clone());
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let vecs = DMatrix::from_fn(x.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    let sorted: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    (sorted, vecs)
}

/// Descending singular or eigen spectrum. `Eigen` requires symmetric input.
pub fn ordered_spectrum(x: &DMatrix<f64>, kind: SpectrumKind) -> Result<Spectrum> {
    match kind {
        SpectrumKind::Singular => {
            let (_, s, _) = sorted_svd(x);
            Ok(Spectrum {
                kind,
                values: s,
            })
        }
        SpectrumKind::Eigen => {
            if !is_symmetric(x, SYMMETRY_TOL) {
                return Err(Error::NotSymmetric(format!(
                    "eigen spectrum of a {}x{} non-symmetric matrix",
                    x.nrows(),
                    x.ncols()
                )));
            }
            let (vals, _) = sorted_symmetric_eigen(x);
            Ok(Spectrum { kind, values: vals })
        }
    }
}

/// Sum of the k largest singular values. k = min(m, n) gives the nuclear
/// norm, k = 1 the spectral norm.
pub fn ky_fan_norm(x: &DMatrix<f64>, k: usize) -> Result<f64> {
    let q = x.nrows().min(x.ncols());
    if k == 0 || k > q {
        return Err(Error::Domain(format!("Ky-Fan order {k} outside 1..={q}")));
    }
    let s = ordered_spectrum(x, SpectrumKind::Singular)?;
    Ok(s.descending()[..k].iter().sum())
}

/// Nuclear norm (sum of all singular values).
pub fn nuclear_norm(x: &DMatrix<f64>) -> f64 {
    let s = ordered_spectrum(x, SpectrumKind::Singular).expect("singular spectrum is total");
    s.descending().iter().sum()
}

/// Length of the svec image of an n x n symmetric matrix.
pub fn svec_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Inner-product-preserving vectorization of a symmetric matrix: the lower
/// triangle column by column, diagonal entries kept, off-diagonal entries
/// scaled by sqrt(2) so that <A, B> = svec(A)^T svec(B).
pub fn svec(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    if !is_symmetric(a, SYMMETRY_TOL) {
        return Err(Error::NotSymmetric("svec input".into()));
    }
    let n = a.nrows();
    let mut v = DVector::zeros(svec_len(n));
    let mut idx = 0;
    for j in 0..n {
        v[idx] = a[(j, j)];
        idx += 1;
        for i in (j + 1)..n {
            v[idx] = std::f64::consts::SQRT_2 * a[(i, j)];
            idx += 1;
        }
    }
    Ok(v)
}

/// Inverse of [`svec`]; the vector length must be a triangular number.
pub fn ivec(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let len = v.len();
    let n = ((((8 * len + 1) as f64).sqrt() as usize).saturating_sub(1)) / 2;
    if svec_len(n) != len {
        return Err(Error::ShapeMismatch(format!(
            "ivec length {len} is not n(n+1)/2 for any n"
        )));
    }
    let mut a = DMatrix::zeros(n, n);
    let mut idx = 0;
    for j in 0..n {
        a[(j, j)] = v[idx];
        idx += 1;
        for i in (j + 1)..n {
            let x = v[idx] / std::f64::consts::SQRT_2;
            a[(i, j)] = x;
            a[(j, i)] = x;
            idx += 1;
        }
    }
    Ok(a)
}

/// Eigenvalue sign counts of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

/// Count negative, zero and positive eigenvalues; eigenvalues within
/// `zero_tol` times the spectral norm count as zero.
pub fn inertia(x: &DMatrix<f64>, zero_tol: f64) -> Result<Inertia> {
    if !is_symmetric(x, SYMMETRY_TOL) {
        return Err(Error::NotSymmetric("inertia input".into()));
    }
    let (vals, _) = sorted_symmetric_eigen(x);
    let scale = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let cut = zero_tol * scale;
    let mut out = Inertia { neg: 0, zero: 0, pos: 0 };
    for &v in &vals {
        if v.abs() <= cut {
            out.zero += 1;
        } else if v > 0.0 {
            out.pos += 1;
        } else {
            out.neg += 1;
        }
    }
    Ok(out)
}

/// Orthogonal projectors onto the column and row spaces of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPair {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub rank: usize,
}

/// The unique support {P, Q} with X = P X Q^T; rank is determined by
/// singular values above `rank_tol` times the largest. X = 0 yields
/// rank-0 zero projectors.
pub fn support_pair(x: &DMatrix<f64>, rank_tol: f64) -> SupportPair {
    let n = x.nrows();
    let m = x.ncols();
    let (u, s, v) = sorted_svd(x);
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= 0.0 {
        return SupportPair {
            p: DMatrix::zeros(n, n),
            q: DMatrix::zeros(m, m),
            rank: 0,
        };
    }
    let rank = s.iter().filter(|&&sv| sv > rank_tol * smax).count();
    let ur = u.columns(0, rank);
    let vr = v.columns(0, rank);
    SupportPair {
        p: ur * ur.transpose(),
        q: vr * vr.transpose(),
        rank,
    }
}
