//! Exact null-space recovery conditions, evaluated per kernel direction.
//!
//! Each condition kind is the predicate a null-space matrix W must
//! satisfy for the corresponding recovery guarantee to hold along that
//! direction. Predicates are scale-invariant; strict inequalities are
//! evaluated with a slack of `tol * ||W||_F` and the signed margin is
//! returned so callers can filter near-ties.

use nalgebra::DMatrix;

use crate::matrix_ops::{
    is_symmetric, nuclear_norm, sorted_svd, sorted_symmetric_eigen, support_pair, SupportPair,
    DEFAULT_RANK_TOL, SYMMETRY_TOL,
};
use crate::{Error, Result};

/// Which recovery predicate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// All rank <= r matrices recoverable: 2 ||W||_r < ||W||_*.
    StrongSquare,
    /// All matrices of a fixed support: ||(I-P) W (I-Q)||_* > ||P W Q||_*.
    Sectional,
    /// One fixed matrix with singular vectors (U, V):
    /// trace(U^T W V) + ||Ubar^T W Vbar||_* > 0.
    WeakFixedX,
    /// PSD trace minimization, fixed eigenbasis U: W not symmetric, or
    /// trace(W) > 0, or Ubar^T W Ubar has a negative eigenvalue.
    PsdWeak,
    /// PSD trace minimization, all rank <= r: W not symmetric, or
    /// trace(W) > 0, or W has more than r negative eigenvalues.
    PsdStrong,
    /// PSD feasibility, fixed eigenbasis: Ubar^T W Ubar has a negative
    /// eigenvalue.
    PsdUniqueWeak,
    /// PSD feasibility, all rank <= r: W has at least r + 1 negative
    /// eigenvalues.
    PsdUniqueStrong,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 7] = [
        ConditionKind::StrongSquare,
        ConditionKind::Sectional,
        ConditionKind::WeakFixedX,
        ConditionKind::PsdWeak,
        ConditionKind::PsdStrong,
        ConditionKind::PsdUniqueWeak,
        ConditionKind::PsdUniqueStrong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::StrongSquare => "strong",
            ConditionKind::Sectional => "sectional",
            ConditionKind::WeakFixedX => "weak",
            ConditionKind::PsdWeak => "psd-weak",
            ConditionKind::PsdStrong => "psd-strong",
            ConditionKind::PsdUniqueWeak => "psd-unique-weak",
            ConditionKind::PsdUniqueStrong => "psd-unique-strong",
        }
    }

    pub fn parse(s: &str) -> Option<ConditionKind> {
        Self::ALL.iter().copied().find(|k| k.name() == s)
    }

    /// Kinds whose null space lives in the symmetric matrices.
    pub fn is_psd(self) -> bool {
        matches!(
            self,
            ConditionKind::PsdWeak
                | ConditionKind::PsdStrong
                | ConditionKind::PsdUniqueWeak
                | ConditionKind::PsdUniqueStrong
        )
    }
}

/// Inputs a condition may need: a rank bound, a support pair, or the
/// singular/eigen basis of the fixed matrix.
#[derive(Debug, Clone, Default)]
pub struct ConditionContext {
    rank: Option<usize>,
    support: Option<SupportPair>,
    u: Option<DMatrix<f64>>,
    v: Option<DMatrix<f64>>,
}

impl ConditionContext {
    pub fn with_rank(r: usize) -> Self {
        ConditionContext {
            rank: Some(r),
            ..Default::default()
        }
    }

    pub fn with_support(support: SupportPair) -> Self {
        let rank = support.rank;
        ConditionContext {
            rank: Some(rank),
            support: Some(support),
            ..Default::default()
        }
    }

    /// Left/right partial unitaries of the fixed matrix; each must have
    /// orthonormal columns.
    pub fn with_unitaries(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<Self> {
        for (name, m) in [("U", &u), ("V", &v)] {
            let gram = m.transpose() * m;
            let err = (&gram - DMatrix::<f64>::identity(gram.nrows(), gram.ncols())).norm();
            if err > 1e-10 {
                return Err(Error::Precondition(format!(
                    "{name} is not a partial unitary (Gram error {err:.2e})"
                )));
            }
        }
        if u.ncols() != v.ncols() {
            return Err(Error::ShapeMismatch(
                "U and V must have the same number of columns".into(),
            ));
        }
        Ok(ConditionContext {
            rank: Some(u.ncols()),
            u: Some(u),
            v: Some(v),
            ..Default::default()
        })
    }

    /// Shared eigenbasis for the PSD kinds (V = U).
    pub fn with_psd_basis(u: DMatrix<f64>) -> Result<Self> {
        let v = u.clone();
        Self::with_unitaries(u, v)
    }

    /// Everything at once, derived from the fixed matrix itself.
    pub fn for_matrix(x: &DMatrix<f64>) -> Self {
        let sp = support_pair(x, DEFAULT_RANK_TOL);
        let (u, _, v) = sorted_svd(x);
        let r = sp.rank;
        ConditionContext {
            rank: Some(r),
            u: Some(u.columns(0, r).into_owned()),
            v: Some(v.columns(0, r).into_owned()),
            support: Some(sp),
        }
    }

    fn rank(&self) -> Result<usize> {
        self.rank.ok_or(Error::MissingContext("rank"))
    }

    fn support(&self) -> Result<&SupportPair> {
        self.support.as_ref().ok_or(Error::MissingContext("support"))
    }

    fn unitaries(&self) -> Result<(&DMatrix<f64>, &DMatrix<f64>)> {
        match (&self.u, &self.v) {
            (Some(u), Some(v)) => Ok((u, v)),
            _ => Err(Error::MissingContext("partial unitaries U, V")),
        }
    }
}

/// Predicate outcome with its signed margin, normalized by ||W||_F.
/// The predicates are strict inequalities, so `holds` certifies the
/// margin beyond the numerical slack: margin > tol. Exact ties violate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    pub margin: f64,
}

/// Orthonormal basis of the orthogonal complement of col(U), via the
/// eigendecomposition of the complement projector I - U U^T. Any valid
/// completion works since the predicates depend only on column spaces.
fn completion(u: &DMatrix<f64>) -> DMatrix<f64> {
    let n = u.nrows();
    let r = u.ncols();
    let proj = DMatrix::<f64>::identity(n, n) - u * u.transpose();
    let (vals, vecs) = sorted_symmetric_eigen(&proj);
    let keep = n - r;
    debug_assert!(vals[..keep].iter().all(|&l| l > 0.5));
    vecs.columns(0, keep).into_owned()
}

fn smallest_eigenvalues(w: &DMatrix<f64>) -> Vec<f64> {
    let (mut vals, _) = sorted_symmetric_eigen(w);
    vals.reverse();
    vals
}

/// Evaluate one null-space condition for the kernel direction `w`.
///
/// PSD kinds hold vacuously for non-symmetric `w` (a non-symmetric
/// perturbation cannot stay in the PSD cone). The returned margin is the
/// largest signed slack over the predicate's disjuncts, scaled by
/// 1/||W||_F.
pub fn check_condition(
    kind: ConditionKind,
    w: &DMatrix<f64>,
    ctx: &ConditionContext,
    tol: f64,
) -> Result<ConditionReport> {
    let norm_w = w.norm();
    if norm_w == 0.0 {
        return Err(Error::Precondition("W must be nonzero".into()));
    }
    if kind.is_psd() && !is_symmetric(w, SYMMETRY_TOL) {
        let mut asym = 0.0f64;
        for j in 0..w.ncols() {
            for i in 0..w.nrows() {
                let d = w[(i, j)] - w[(j, i)];
                asym += d * d;
            }
        }
        return Ok(ConditionReport {
            holds: true,
            margin: asym.sqrt() / norm_w,
        });
    }
    let margin = match kind {
        ConditionKind::StrongSquare => {
            let r = ctx.rank()?;
            let q = w.nrows().min(w.ncols());
            let top_r: f64 = if r == 0 {
                0.0
            } else {
                let (_, s, _) = sorted_svd(w);
                s[..r.min(q)].iter().sum()
            };
            (nuclear_norm(w) - 2.0 * top_r) / norm_w
        }
        ConditionKind::Sectional => {
            let sp = ctx.support()?;
            let n = w.nrows();
            let eye = DMatrix::<f64>::identity(n, n);
            let outer = (&eye - &sp.p) * w * (&eye - &sp.q);
            let inner = &sp.p * w * &sp.q;
            (nuclear_norm(&outer) - nuclear_norm(&inner)) / norm_w
        }
        ConditionKind::WeakFixedX => {
            let (u, v) = ctx.unitaries()?;
            let tr = (u.transpose() * w * v).trace();
            let outer = completion(u).transpose() * w * completion(v);
            (tr + nuclear_norm(&outer)) / norm_w
        }
        ConditionKind::PsdWeak => {
            let (u, _) = ctx.unitaries()?;
            let ubar = completion(u);
            let inner = ubar.transpose() * w * &ubar;
            let lam_min = smallest_eigenvalues(&inner)
                .first()
                .copied()
                .unwrap_or(f64::INFINITY);
            (w.trace() / norm_w).max(-lam_min / norm_w)
        }
        ConditionKind::PsdStrong => {
            let r = ctx.rank()?;
            let vals = smallest_eigenvalues(w);
            let eig_margin = if r < vals.len() {
                -vals[r] / norm_w
            } else {
                f64::NEG_INFINITY
            };
            (w.trace() / norm_w).max(eig_margin)
        }
        ConditionKind::PsdUniqueWeak => {
            let (u, _) = ctx.unitaries()?;
            let ubar = completion(u);
            if ubar.ncols() == 0 {
                f64::NEG_INFINITY
            } else {
                let inner = ubar.transpose() * w * &ubar;
                -smallest_eigenvalues(&inner)[0] / norm_w
            }
        }
        ConditionKind::PsdUniqueStrong => {
            let r = ctx.rank()?;
            let vals = smallest_eigenvalues(w);
            if r < vals.len() {
                -vals[r] / norm_w
            } else {
                f64::NEG_INFINITY
            }
        }
    };
    Ok(ConditionReport {
        holds: margin > tol,
        margin,
    })
}

/// The tightness construction for the strong condition: given a kernel
/// direction violating it at rank r, return X = -W_r (the top-r truncation
/// of W negated). X has rank <= r and ||X + W||_* <= ||X||_*, so X is not
/// the unique minimizer along W.
pub fn strong_counterexample(w: &DMatrix<f64>, r: usize) -> Result<DMatrix<f64>> {
    let report = check_condition(
        ConditionKind::StrongSquare,
        w,
        &ConditionContext::with_rank(r),
        1e-9,
    )?;
    if report.holds {
        return Err(Error::Precondition(format!(
            "W satisfies the strong condition at rank {r} (margin {:.3e})",
            report.margin
        )));
    }
    let (u, s, v) = sorted_svd(w);
    let mut x = DMatrix::zeros(w.nrows(), w.ncols());
    for i in 0..r.min(s.len()) {
        let ui = u.column(i);
        let vi = v.column(i);
        x += -s[i] * ui * vi.transpose();
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::{gaussian_matrix, gue_sample};
    use crate::matrix_ops::inertia;
    use crate::rng::rng_from_seed;
    use nalgebra::DVector;

    const TOL: f64 = 1e-9;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(v.to_vec()))
    }

    fn random_orthogonal(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        gaussian_matrix(n, n, &mut rng).qr().q()
    }

    #[test]
    fn strong_rank_one_direction_always_violates() {
        let w = diag(&[1.0, 0.0, 0.0]);
        let rep =
            check_condition(ConditionKind::StrongSquare, &w, &ConditionContext::with_rank(1), TOL)
                .unwrap();
        assert!(!rep.holds);
        assert!((rep.margin - -1.0).abs() < 1e-12);
    }

    #[test]
    fn weak_block_psd_direction_holds() {
        let r = 2;
        let n = 5;
        let mut w = DMatrix::zeros(n, n);
        let mut rng = rng_from_seed(3);
        let g = gaussian_matrix(n - r, n - r, &mut rng);
        let m = &g * g.transpose();
        w.view_mut((r, r), (n - r, n - r)).copy_from(&m);
        let u = DMatrix::<f64>::identity(n, n).columns(0, r).into_owned();
        let ctx = ConditionContext::with_unitaries(u.clone(), u).unwrap();
        let rep = check_condition(ConditionKind::WeakFixedX, &w, &ctx, TOL).unwrap();
        assert!(rep.holds);
        assert!(rep.margin > 0.0);
    }

    #[test]
    fn psd_unique_strong_from_inertia() {
        let w = gue_sample(8, 21);
        let neg = inertia(&w, 1e-10).unwrap().neg;
        assert!(neg >= 1);
        let ctx = ConditionContext::with_rank(neg - 1);
        let rep = check_condition(ConditionKind::PsdUniqueStrong, &w, &ctx, TOL).unwrap();
        assert!(rep.holds, "eta_-(W) = {neg} > r = {}", neg - 1);
        let ctx = ConditionContext::with_rank(neg);
        let rep = check_condition(ConditionKind::PsdUniqueStrong, &w, &ctx, TOL).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn psd_strong_trace_clause() {
        let mut w = gue_sample(6, 5);
        let t = w.trace();
        for i in 0..6 {
            w[(i, i)] += (1.0 - t) / 6.0; // force trace(W) = 1 > 0
        }
        for r in [0, 2, 5] {
            let rep =
                check_condition(ConditionKind::PsdStrong, &w, &ConditionContext::with_rank(r), TOL)
                    .unwrap();
            assert!(rep.holds);
        }
    }

    #[test]
    fn psd_weak_negative_complement_eigenvalue() {
        let n = 6;
        let r = 2;
        let u = DMatrix::<f64>::identity(n, n).columns(0, r).into_owned();
        let ctx = ConditionContext::with_psd_basis(u).unwrap();
        // complement block with a clear negative eigenvalue, trace pushed <= 0
        let mut w = gue_sample(n, 77);
        w[(r, r)] = -4.0;
        let t = w.trace();
        w[(0, 0)] -= t + 1.0;
        let rep = check_condition(ConditionKind::PsdWeak, &w, &ctx, TOL).unwrap();
        assert!(rep.holds);

        // complement block PSD and trace forced negative: predicate fails
        let mut rng = rng_from_seed(78);
        let g = gaussian_matrix(n - r, n - r, &mut rng);
        let mut w = DMatrix::<f64>::zeros(n, n);
        w.view_mut((r, r), (n - r, n - r)).copy_from(&(&g * g.transpose()));
        let b = gaussian_matrix(r, n - r, &mut rng);
        w.view_mut((0, r), (r, n - r)).copy_from(&b);
        w.view_mut((r, 0), (n - r, r)).copy_from(&b.transpose());
        w[(0, 0)] = -w.trace() - 2.0;
        let u = DMatrix::<f64>::identity(n, n).columns(0, r).into_owned();
        let ctx = ConditionContext::with_psd_basis(u).unwrap();
        let rep = check_condition(ConditionKind::PsdWeak, &w, &ctx, TOL).unwrap();
        assert!(!rep.holds, "margin {}", rep.margin);
    }

    #[test]
    fn nonsymmetric_w_passes_psd_kinds_vacuously() {
        let mut rng = rng_from_seed(9);
        let w = gaussian_matrix(5, 5, &mut rng);
        let ctx = ConditionContext::with_rank(1);
        for kind in [ConditionKind::PsdStrong, ConditionKind::PsdUniqueStrong] {
            let rep = check_condition(kind, &w, &ctx, TOL).unwrap();
            assert!(rep.holds);
            assert!(rep.margin > 0.0);
        }
    }

    #[test]
    fn zero_w_rejected_and_missing_context() {
        let z = DMatrix::<f64>::zeros(3, 3);
        assert!(check_condition(
            ConditionKind::StrongSquare,
            &z,
            &ConditionContext::with_rank(1),
            TOL
        )
        .is_err());
        let w = diag(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            check_condition(ConditionKind::Sectional, &w, &ConditionContext::with_rank(1), TOL),
            Err(Error::MissingContext(_))
        ));
        assert!(matches!(
            check_condition(ConditionKind::WeakFixedX, &w, &ConditionContext::with_rank(1), TOL),
            Err(Error::MissingContext(_))
        ));
    }

    #[test]
    fn monotone_in_rank() {
        let mut rng = rng_from_seed(31);
        for t in 0..50 {
            let w = gaussian_matrix(7, 7, &mut rng);
            for r in (1..6).rev() {
                let at_r = check_condition(
                    ConditionKind::StrongSquare,
                    &w,
                    &ConditionContext::with_rank(r),
                    TOL,
                )
                .unwrap();
                if at_r.holds {
                    for rp in 0..r {
                        let lower = check_condition(
                            ConditionKind::StrongSquare,
                            &w,
                            &ConditionContext::with_rank(rp),
                            TOL,
                        )
                        .unwrap();
                        assert!(lower.holds, "trial {t}: holds at {r} but not {rp}");
                    }
                    break;
                }
            }
            // PSD unique strong: satisfied at r implies satisfied below r
            let s = gue_sample(7, t);
            for r in (1..6).rev() {
                let at_r = check_condition(
                    ConditionKind::PsdUniqueStrong,
                    &s,
                    &ConditionContext::with_rank(r),
                    TOL,
                )
                .unwrap();
                if at_r.holds {
                    for rp in 0..r {
                        assert!(check_condition(
                            ConditionKind::PsdUniqueStrong,
                            &s,
                            &ConditionContext::with_rank(rp),
                            TOL
                        )
                        .unwrap()
                        .holds);
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn scale_and_unitary_invariance() {
        let mut rng = rng_from_seed(33);
        for t in 0..50 {
            let w = gaussian_matrix(6, 6, &mut rng);
            let ctx = ConditionContext::with_rank(2);
            let base = check_condition(ConditionKind::StrongSquare, &w, &ctx, TOL).unwrap();
            let scaled =
                check_condition(ConditionKind::StrongSquare, &(&w * 7.5), &ctx, TOL).unwrap();
            assert_eq!(base.holds, scaled.holds);
            assert!((base.margin - scaled.margin).abs() < 1e-10);

            let a = random_orthogonal(6, 100 + t);
            let b = random_orthogonal(6, 200 + t);
            let rotated =
                check_condition(ConditionKind::StrongSquare, &(&a * &w * &b), &ctx, TOL).unwrap();
            assert_eq!(base.holds, rotated.holds);
            assert!((base.margin - rotated.margin).abs() < 1e-9);
        }
    }

    #[test]
    fn completion_choice_does_not_matter() {
        // two partial unitaries with the same column space give the same
        // negativity verdict for Ubar^T W Ubar
        let n = 7;
        let r = 3;
        for t in 0..40 {
            let mut rng = rng_from_seed(700 + t);
            let u = gaussian_matrix(n, r, &mut rng).qr().q();
            let rot = random_orthogonal(r, 900 + t);
            let uy = &u * rot;
            let w = gue_sample(n, 50 + t);
            let ca = ConditionContext::with_psd_basis(u).unwrap();
            let cb = ConditionContext::with_psd_basis(uy).unwrap();
            let ra = check_condition(ConditionKind::PsdUniqueWeak, &w, &ca, TOL).unwrap();
            let rb = check_condition(ConditionKind::PsdUniqueWeak, &w, &cb, TOL).unwrap();
            assert_eq!(ra.holds, rb.holds);
            assert!((ra.margin - rb.margin).abs() < 1e-9);
        }
    }

    #[test]
    fn counterexample_hand_cases() {
        let w = diag(&[1.0, 0.0, 0.0]);
        let x = strong_counterexample(&w, 1).unwrap();
        assert!((&x - diag(&[-1.0, 0.0, 0.0])).norm() < 1e-12);
        assert!(nuclear_norm(&(&x + &w)) <= nuclear_norm(&x) + 1e-12);

        let w = diag(&[2.0, 1.0, 1.0]);
        let x = strong_counterexample(&w, 1).unwrap();
        assert!((&x - diag(&[-2.0, 0.0, 0.0])).norm() < 1e-12);
        let sum = nuclear_norm(&(&x + &w));
        assert!((sum - 2.0).abs() < 1e-12);
        assert!(sum <= nuclear_norm(&x) + 1e-12);
    }

    #[test]
    fn counterexample_random_violations() {
        let mut rng = rng_from_seed(77);
        let mut found = 0;
        for _ in 0..200 {
            // rank-1 dominated direction; violates the strong condition
            let u = gaussian_matrix(6, 1, &mut rng);
            let v = gaussian_matrix(6, 1, &mut rng);
            let noise = gaussian_matrix(6, 6, &mut rng) * 0.01;
            let w = &u * v.transpose() + noise;
            let ctx = ConditionContext::with_rank(2);
            if check_condition(ConditionKind::StrongSquare, &w, &ctx, TOL)
                .unwrap()
                .holds
            {
                continue;
            }
            found += 1;
            let x = strong_counterexample(&w, 2).unwrap();
            let sp = support_pair(&x, DEFAULT_RANK_TOL);
            assert!(sp.rank <= 2);
            assert!(nuclear_norm(&(&x + &w)) <= nuclear_norm(&x) + 1e-9);
        }
        assert!(found > 150, "violating directions should dominate: {found}");
    }

    #[test]
    fn counterexample_requires_violation() {
        // spread spectrum satisfies the condition at rank 1
        let w = diag(&[1.0, 1.0, 1.0, 1.0]);
        assert!(strong_counterexample(&w, 1).is_err());
    }

    #[test]
    fn for_matrix_builds_full_context() {
        let mut rng = rng_from_seed(55);
        let g1 = gaussian_matrix(6, 2, &mut rng);
        let g2 = gaussian_matrix(6, 2, &mut rng);
        let x = &g1 * g2.transpose();
        let ctx = ConditionContext::for_matrix(&x);
        assert_eq!(ctx.rank().unwrap(), 2);
        let w = gaussian_matrix(6, 6, &mut rng);
        for kind in [
            ConditionKind::StrongSquare,
            ConditionKind::Sectional,
            ConditionKind::WeakFixedX,
        ] {
            check_condition(kind, &w, &ctx, TOL).unwrap();
        }
    }
}
