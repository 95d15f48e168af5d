//! Linear algebra over real vector spaces carrying a diagonal indefinite
//! inner product.
//!
//! Every construction downstream works in orthonormal frames, so the only
//! metrics supported here are diagonal with entries `±1`. Vectors and
//! endomorphisms are plain `nalgebra` dynamic matrices; the metric is passed
//! explicitly wherever it matters.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Endo = DMatrix<f64>;
pub type CVector = DVector<Complex64>;
pub type CEndo = DMatrix<Complex64>;

/// Default tolerance for identities that hold in exact arithmetic.
pub const TOL_EXACT: f64 = 1e-9;
/// Default tolerance for comparisons against finite-difference derivatives.
pub const TOL_FD: f64 = 1e-4;

/// Numbers of positive and negative directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidSignature("p + q must be at least 1".into()));
        }
        Ok(Self { p, q })
    }

    /// Complex dimension `n = p + q`.
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// The metric `diag(+1 × 2p, −1 × 2q)` on real `2n`-space.
    pub fn metric(&self) -> DiagonalMetric {
        standard_metric(self.p, self.q)
    }
}

/// A diagonal metric whose entries are exactly `+1` or `−1`, in any order.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalMetric {
    signs: Vec<f64>,
}

/// `diag(+1 × 2p, −1 × 2q)`.
///
/// Panics if `p + q == 0`.
pub fn standard_metric(p: usize, q: usize) -> DiagonalMetric {
    assert!(p + q >= 1, "standard_metric needs p + q >= 1");
    DiagonalMetric::from_counts(2 * p, 2 * q)
}

impl DiagonalMetric {
    /// `plus` positive entries followed by `minus` negative ones.
    pub fn from_counts(plus: usize, minus: usize) -> Self {
        let mut signs = vec![1.0; plus];
        signs.extend(std::iter::repeat_n(-1.0, minus));
        Self { signs }
    }

    /// Explicit sign pattern, e.g. `[1, -1, -1, 1, 1, -1, -1]`.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidSignature("empty sign pattern".into()));
        }
        let signs = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(1.0),
                -1 => Ok(-1.0),
                other => Err(Error::InvalidSignature(format!("entry {other} is not ±1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { signs })
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn sign(&self, k: usize) -> f64 {
        self.signs[k]
    }

    pub fn plus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0.0).count()
    }

    pub fn minus_count(&self) -> usize {
        self.dim() - self.plus_count()
    }

    /// The Gram matrix `diag(signs)`.
    pub fn matrix(&self) -> Endo {
        Endo::from_diagonal(&Vector::from_column_slice(&self.signs))
    }

    /// `g ⊕ g'`, the block-diagonal sum.
    pub fn direct_sum(&self, other: &DiagonalMetric) -> DiagonalMetric {
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        DiagonalMetric { signs }
    }

    /// `Σ_k ε_k u_k v_k`, checking dimensions.
    pub fn inner(&self, u: &Vector, v: &Vector) -> Result<f64> {
        self.check_len(u.len())?;
        self.check_len(v.len())?;
        Ok(self.ip(u, v))
    }

    /// Unchecked inner product; panics on mismatched lengths.
    pub fn ip(&self, u: &Vector, v: &Vector) -> f64 {
        assert_eq!(u.len(), self.dim());
        assert_eq!(v.len(), self.dim());
        self.signs
            .iter()
            .zip(u.iter().zip(v.iter()))
            .map(|(s, (a, b))| s * a * b)
            .sum()
    }

    /// Complex-bilinear (not Hermitian) extension of the inner product.
    pub fn ip_c(&self, u: &CVector, v: &CVector) -> Complex64 {
        assert_eq!(u.len(), self.dim());
        assert_eq!(v.len(), self.dim());
        self.signs
            .iter()
            .zip(u.iter().zip(v.iter()))
            .map(|(s, (a, b))| a * b * *s)
            .sum()
    }

    /// Index lowering `v ↦ g(v, ·)`; since `G = G⁻¹` this is also raising.
    pub fn lower(&self, v: &Vector) -> Vector {
        Vector::from_iterator(v.len(), v.iter().zip(&self.signs).map(|(a, s)| a * s))
    }

    /// The g-adjoint `G Aᵀ G`; equals `A⁻¹` for g-orthogonal `A`.
    pub fn adjoint(&self, a: &Endo) -> Endo {
        let mut t = a.transpose();
        for i in 0..t.nrows() {
            for j in 0..t.ncols() {
                t[(i, j)] *= self.signs[i] * self.signs[j];
            }
        }
        t
    }

    /// `u ∧ v`, acting by `w ↦ ⟨v,w⟩u − ⟨u,w⟩v`.
    pub fn wedge(&self, u: &Vector, v: &Vector) -> Endo {
        u * self.lower(v).transpose() - v * self.lower(u).transpose()
    }

    /// Largest entry of `AᵀG + GA`, the failure of `A` to be g-skew.
    pub fn skew_defect(&self, a: &Endo) -> f64 {
        let m = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                let d = self.signs[i] * a[(i, j)] + a[(j, i)] * self.signs[j];
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// Largest entry of `AᵀGA − G`, the failure of `A` to be g-orthogonal.
    pub fn orthogonality_defect(&self, a: &Endo) -> f64 {
        let g = self.matrix();
        (a.transpose() * &g * a - g).amax()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }
}

/// `inner(g, u, v)` as a free function.
pub fn inner(g: &DiagonalMetric, u: &Vector, v: &Vector) -> Result<f64> {
    g.inner(u, v)
}

/// True iff `max |⟨Au,v⟩ + ⟨u,Av⟩| ≤ tol` over basis pairs.
pub fn is_g_skew(g: &DiagonalMetric, a: &Endo, tol: f64) -> bool {
    a.nrows() == g.dim() && a.ncols() == g.dim() && g.skew_defect(a) <= tol
}

pub fn commutator(a: &Endo, b: &Endo) -> Endo {
    a * b - b * a
}

pub fn complex(a: &Endo) -> CEndo {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn complex_vec(v: &Vector) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// Frobenius norm of a complex matrix.
pub fn cnorm(a: &CEndo) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cvnorm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// g-orthonormalisation with pivoting on the largest `|⟨v,v⟩|`.
///
/// Returns the basis and the signs `⟨b_i, b_i⟩ = ±1`. When every remaining
/// candidate is null but two of them pair non-trivially, their sum is used,
/// so a non-degenerate span is always orthonormalised.
pub fn indefinite_gram_schmidt(g: &DiagonalMetric, vectors: &[Vector], tol: f64) -> Result<(Vec<Vector>, Vec<f64>)> {
    for v in vectors {
        g.check_len(v.len())?;
    }
    let mut basis = Vec::new();
    let mut signs = Vec::new();
    extend_orthonormal(g, &mut basis, &mut signs, vectors.to_vec(), vectors.len(), tol)?;
    Ok((basis, signs))
}

/// Extends an orthonormal family to a full orthonormal basis of the space,
/// drawing candidates from the standard basis.
pub fn complete_orthonormal_basis(g: &DiagonalMetric, seeds: &[Vector], tol: f64) -> Result<(Vec<Vector>, Vec<f64>)> {
    let (mut basis, mut signs) = indefinite_gram_schmidt(g, seeds, tol)?;
    let pool = (0..g.dim())
        .map(|k| Vector::from_fn(g.dim(), |i, _| f64::from(i == k)))
        .collect();
    extend_orthonormal(g, &mut basis, &mut signs, pool, g.dim(), tol)?;
    Ok((basis, signs))
}

pub(crate) fn project_out(g: &DiagonalMetric, v: &mut Vector, basis: &[Vector], signs: &[f64]) {
    // two passes: classical Gram-Schmidt loses orthogonality otherwise
    for _ in 0..2 {
        for (b, s) in basis.iter().zip(signs) {
            let c = s * g.ip(v, b);
            v.axpy(-c, b, 1.0);
        }
    }
}

/// Chooses the next pivot from `pool`, removing it. `None` when the pool
/// spans a totally null (degenerate) subspace.
pub(crate) fn take_pivot(g: &DiagonalMetric, pool: &mut Vec<Vector>, tol: f64) -> Option<Vector> {
    let norms: Vec<f64> = pool.iter().map(|v| g.ip(v, v).abs()).collect();
    // first maximum, so ties keep input order
    let best = norms
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (i, &n)| match acc {
            Some((_, m)) if m >= n => acc,
            _ => Some((i, n)),
        })
        .map(|(i, _)| i)?;
    if norms[best] > tol {
        return Some(pool.remove(best));
    }
    let mut pair = None;
    let mut pair_norm = tol;
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let s = &pool[i] + &pool[j];
            let nn = g.ip(&s, &s).abs();
            if nn > pair_norm {
                pair_norm = nn;
                pair = Some((i, s));
            }
        }
    }
    let (i, s) = pair?;
    pool.remove(i);
    Some(s)
}

fn extend_orthonormal(
    g: &DiagonalMetric,
    basis: &mut Vec<Vector>,
    signs: &mut Vec<f64>,
    mut pool: Vec<Vector>,
    target: usize,
    tol: f64,
) -> Result<()> {
    while basis.len() < target && !pool.is_empty() {
        for v in pool.iter_mut() {
            project_out(g, v, basis, signs);
        }
        let v = take_pivot(g, &mut pool, tol).ok_or(Error::DegenerateSubspace { tol })?;
        let nn = g.ip(&v, &v);
        signs.push(nn.signum());
        basis.push(v / nn.abs().sqrt());
    }
    if basis.len() < target {
        return Err(Error::DegenerateSubspace { tol });
    }
    Ok(())
}

/// Bounds for the dense eigen solvers.
#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub max_dim: usize,
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_dim: 64,
            eps: f64::EPSILON,
            max_iter: 100_000,
        }
    }
}

fn sort_spectrum(mut ev: Vec<Complex64>) -> Vec<Complex64> {
    ev.sort_by(|a, b| match a.re.total_cmp(&b.re) {
        Ordering::Equal => a.im.total_cmp(&b.im),
        o => o,
    });
    ev
}

/// Eigenvalues with multiplicity of a complex matrix, sorted by
/// `(re, im)`. Uses a Hessenberg reduction followed by shifted QR (Schur).
pub fn eigen_spectrum(a: &CEndo, opts: &EigenOptions) -> Result<Vec<Complex64>> {
    if a.nrows() > opts.max_dim {
        return Err(Error::TooLarge {
            dim: a.nrows(),
            max: opts.max_dim,
        });
    }
    let schur = Schur::try_new(a.clone(), opts.eps, opts.max_iter).ok_or(Error::ConvergenceFailure {
        iterations: opts.max_iter,
    })?;
    let (_, t) = schur.unpack();
    Ok(sort_spectrum(t.diagonal().iter().copied().collect()))
}

/// Eigenvalues of a real matrix; complex pairs come from the real Schur
/// form's 2×2 blocks.
pub fn eigen_spectrum_real(a: &Endo, opts: &EigenOptions) -> Result<Vec<Complex64>> {
    if a.nrows() > opts.max_dim {
        return Err(Error::TooLarge {
            dim: a.nrows(),
            max: opts.max_dim,
        });
    }
    let schur = Schur::try_new(a.clone(), opts.eps, opts.max_iter).ok_or(Error::ConvergenceFailure {
        iterations: opts.max_iter,
    })?;
    Ok(sort_spectrum(schur.complex_eigenvalues().iter().copied().collect()))
}

/// Sylvester inertia of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inertia {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

/// Counts positive, negative and near-zero eigenvalues. An eigenvalue is
/// "near zero" when `|λ| ≤ tol · max(1, max|λ|)`.
pub fn sym_index(m: &Endo, tol: f64) -> Result<Inertia> {
    let asym = (m - m.transpose()).amax();
    if asym > tol * m.amax().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let sym = (m + m.transpose()) * 0.5;
    let ev = SymmetricEigen::new(sym).eigenvalues;
    let scale = ev.amax().max(1.0);
    let mut out = Inertia {
        plus: 0,
        minus: 0,
        zero: 0,
    };
    for &l in ev.iter() {
        if l > tol * scale {
            out.plus += 1;
        } else if l < -tol * scale {
            out.minus += 1;
        } else {
            out.zero += 1;
        }
    }
    Ok(out)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn matrix_exp(a: &Endo) -> Endo {
    a.clone().exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::GaussianStream;
    use approx_eq::assert_close;

    mod approx_eq {
        macro_rules! assert_close {
            ($a:expr, $b:expr, $tol:expr) => {{
                let (a, b): (f64, f64) = ($a, $b);
                assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
            }};
        }
        pub(crate) use assert_close;
    }

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn standard_metric_layout() {
        assert_eq!(standard_metric(1, 1).signs(), &[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(standard_metric(1, 0).signs(), &[1.0, 1.0]);
        let g = DiagonalMetric::from_signs(&[1, -1, -1, 1, 1, -1, -1]).unwrap();
        assert_eq!(g.signs(), &[1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]);
        assert!(DiagonalMetric::from_signs(&[1, 0]).is_err());
        assert!(Signature::new(0, 0).is_err());
    }

    #[test]
    fn inner_examples() {
        let g = DiagonalMetric::from_signs(&[1, -1]).unwrap();
        assert_eq!(g.inner(&v(&[0.0, 1.0]), &v(&[0.0, 1.0])).unwrap(), -1.0);
        let e = DiagonalMetric::from_signs(&[1, 1]).unwrap();
        assert_eq!(e.inner(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let l = DiagonalMetric::from_signs(&[1, -1, -1]).unwrap();
        assert_eq!(l.inner(&v(&[1.0, 1.0, 0.0]), &v(&[1.0, 1.0, 0.0])).unwrap(), 0.0);
        assert!(matches!(
            g.inner(&v(&[1.0]), &v(&[1.0, 0.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn skewness_examples() {
        let g = standard_metric(1, 0);
        assert!(is_g_skew(&g, &Endo::zeros(2, 2), 1e-12));
        let rot = g.wedge(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]));
        assert!(is_g_skew(&g, &rot, 1e-12));
        assert!(!is_g_skew(&g, &Endo::identity(2, 2), 1e-12));
    }

    #[test]
    fn gram_schmidt_examples() {
        let g = DiagonalMetric::from_signs(&[1, -1]).unwrap();
        let (b, s) = indefinite_gram_schmidt(&g, &[v(&[1.0, 0.0]), v(&[0.0, 1.0])], 1e-12).unwrap();
        assert_eq!(s, vec![1.0, -1.0]);
        assert_eq!(b[0], v(&[1.0, 0.0]));
        assert_eq!(b[1], v(&[0.0, 1.0]));

        assert!(matches!(
            indefinite_gram_schmidt(&g, &[v(&[1.0, 1.0])], 1e-12),
            Err(Error::DegenerateSubspace { .. })
        ));

        // Two null vectors spanning a non-degenerate plane.
        let (_, s) = indefinite_gram_schmidt(&g, &[v(&[1.0, 1.0]), v(&[1.0, -1.0])], 1e-12).unwrap();
        let mut s = s;
        s.sort_by(f64::total_cmp);
        assert_eq!(s, vec![-1.0, 1.0]);
    }

    #[test]
    fn gram_schmidt_hand_oracle() {
        // Hand computation: pivot (1,0,2) has <v,v> = 1 - 4 = -3, so
        // b1 = (1,0,2)/sqrt3 with sign -1; (1,0,0) minus its projection
        // (-1)*<(1,0,0),b1>b1 = (1,0,0) + (1/3)(1,0,2) = (4/3, 0, 2/3),
        // whose norm is 16/9 - 4/9 = 4/3.
        let g = DiagonalMetric::from_signs(&[1, 1, -1]).unwrap();
        let (b, s) = indefinite_gram_schmidt(&g, &[v(&[1.0, 0.0, 0.0]), v(&[1.0, 0.0, 2.0])], 1e-12).unwrap();
        assert_eq!(s, vec![-1.0, 1.0]);
        let r3 = 3f64.sqrt();
        let expect0 = v(&[1.0 / r3, 0.0, 2.0 / r3]);
        let expect1 = v(&[4.0 / 3.0, 0.0, 2.0 / 3.0]) / (4.0f64 / 3.0).sqrt();
        assert!((&b[0] - expect0).amax() < 1e-14);
        assert!((&b[1] - expect1).amax() < 1e-14);
    }

    #[test]
    fn complete_basis_covers_space() {
        let g = standard_metric(1, 1);
        let seed = v(&[2f64.sqrt(), 0.0, 1.0, 0.0]);
        let (b, s) = complete_orthonormal_basis(&g, &[seed], 1e-10).unwrap();
        assert_eq!(b.len(), 4);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { s[i] } else { 0.0 };
                assert_close!(g.ip(&b[i], &b[j]), expect, 1e-12);
            }
        }
        assert_eq!(s.iter().filter(|&&x| x > 0.0).count(), 2);
    }

    #[test]
    fn eigen_examples() {
        let opts = EigenOptions::default();
        let j = complex(&Endo::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        let ev = eigen_spectrum(&j, &opts).unwrap();
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);

        let d = complex(&Endo::from_diagonal(&v(&[5.0, 3.0])));
        let ev = eigen_spectrum(&d, &opts).unwrap();
        assert!((ev[0].re - 3.0).abs() < 1e-12 && (ev[1].re - 5.0).abs() < 1e-12);

        // Companion matrix of λ² + 4, roots ±2i.
        let c = Endo::from_row_slice(2, 2, &[0.0, -4.0, 1.0, 0.0]);
        let ev = eigen_spectrum_real(&c, &opts).unwrap();
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 2.0)).norm() < 1e-12);

        let big = CEndo::zeros(65, 65);
        assert!(matches!(eigen_spectrum(&big, &opts), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn inertia_examples() {
        let m = Endo::from_diagonal(&v(&[2.0, -3.0]));
        assert_eq!(
            sym_index(&m, 1e-10).unwrap(),
            Inertia {
                plus: 1,
                minus: 1,
                zero: 0
            }
        );
        assert_eq!(
            sym_index(&Endo::zeros(3, 3), 1e-10).unwrap(),
            Inertia {
                plus: 0,
                minus: 0,
                zero: 3
            }
        );
        let bad = Endo::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(sym_index(&bad, 1e-10), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(matrix_exp(&Endo::zeros(3, 3)), Endo::identity(3, 3));
        let g = standard_metric(1, 0);
        let th = 0.7;
        let rot = matrix_exp(&(g.wedge(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])) * th));
        // (e1∧e2) e2 = e1, so exp rotates e2 towards e1.
        let expect = Endo::from_row_slice(2, 2, &[th.cos(), th.sin(), -th.sin(), th.cos()]);
        assert!((rot - expect).amax() < 1e-14);

        let l = DiagonalMetric::from_signs(&[1, -1]).unwrap();
        let s = 0.9;
        let boost = matrix_exp(&(l.wedge(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])) * s));
        let expect = Endo::from_row_slice(2, 2, &[s.cosh(), -s.sinh(), -s.sinh(), s.cosh()]);
        assert!((&boost - expect).amax() < 1e-13);
        assert!(l.orthogonality_defect(&boost) < 1e-13);
    }

    #[test]
    fn exp_one_parameter_group() {
        let mut rng = GaussianStream::new(7);
        let a = rng.matrix(4, 4) * 0.3;
        let (s, t) = (0.4, -1.1);
        let lhs = matrix_exp(&(&a * (s + t)));
        let rhs = matrix_exp(&(&a * s)) * matrix_exp(&(&a * t));
        assert!((lhs - rhs).amax() < 1e-12);
    }
}
