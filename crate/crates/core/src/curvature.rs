//! Curvature-type tensors over an orthonormal frame, the `J`-action on them,
//! and the algebraic integrability conditions of the twistor space.
//!
//! A curvature operator is stored as the array of endomorphisms
//! `R_{ab} = R(e_a, e_b)`, antisymmetric in `(a, b)`. The 4-index form
//! `Rm(a,b,c,d) = ⟨R(e_a,e_b)e_c, e_d⟩` is derived on demand.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::{projectors, so_basis_matrices, so_coords, OrthogonalComplexStructure};
use crate::linalg::{
    cnorm, complex, complex_vec, cvnorm, eigen_spectrum_real, CEndo, CVector, DiagonalMetric, EigenOptions, Endo,
    Vector,
};
use crate::rng::GaussianStream;

/// Endomorphism-valued 2-form `(X, Y) ↦ R(X, Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureOperator {
    g: DiagonalMetric,
    comps: Vec<Endo>,
}

impl CurvatureOperator {
    pub fn zero(g: &DiagonalMetric) -> Self {
        let m = g.dim();
        Self {
            g: g.clone(),
            comps: vec![Endo::zeros(m, m); m * m],
        }
    }

    /// Builds from `f(a, b)` for `a < b` and extends antisymmetrically.
    pub fn from_fn(g: &DiagonalMetric, mut f: impl FnMut(usize, usize) -> Endo) -> Self {
        let mut out = Self::zero(g);
        let m = g.dim();
        for a in 0..m {
            for b in a + 1..m {
                let r = f(a, b);
                out.comps[b * m + a] = -&r;
                out.comps[a * m + b] = r;
            }
        }
        out
    }

    /// From the 4-index array `Rm[a][b][c][d] = ⟨R(e_a,e_b)e_c, e_d⟩`.
    pub fn from_rm(g: &DiagonalMetric, rm: &dyn Fn(usize, usize, usize, usize) -> f64) -> Self {
        let m = g.dim();
        Self::from_fn(g, |a, b| Endo::from_fn(m, m, |d, c| g.sign(d) * rm(a, b, c, d)))
    }

    pub fn metric(&self) -> &DiagonalMetric {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn component(&self, a: usize, b: usize) -> &Endo {
        &self.comps[a * self.dim() + b]
    }

    /// `R(X, Y)` by bilinear expansion.
    pub fn apply(&self, x: &Vector, y: &Vector) -> Endo {
        let m = self.dim();
        let mut out = Endo::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    let c = x[a] * y[b];
                    if c != 0.0 {
                        out += self.component(a, b) * c;
                    }
                }
            }
        }
        out
    }

    /// Complex-bilinear extension.
    pub fn apply_c(&self, x: &CVector, y: &CVector) -> CEndo {
        let m = self.dim();
        let mut out = CEndo::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                if a != b {
                    out += complex(self.component(a, b)) * (x[a] * y[b]);
                }
            }
        }
        out
    }

    pub fn rm(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.g.sign(d) * self.component(a, b)[(d, c)]
    }

    /// Largest `‖Σ_cyc R(e_a,e_b)e_c‖` over basis triples.
    pub fn bianchi_residual(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let s = self.component(a, b).column(c)
                        + self.component(b, c).column(a)
                        + self.component(c, a).column(b);
                    worst = worst.max(s.amax());
                }
            }
        }
        worst
    }

    /// Satisfies the first Bianchi identity within `tol`.
    pub fn is_algebraic(&self, tol: f64) -> bool {
        self.bianchi_residual() <= tol
    }

    /// Largest failure of some `R(e_a, e_b)` to be g-skew.
    pub fn skew_residual(&self) -> f64 {
        self.comps.iter().map(|r| self.g.skew_defect(r)).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|r| r.amax()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            g: self.g.clone(),
            comps: self.comps.iter().map(|r| r * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            g: self.g.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    /// Coordinates in the basis `(pair a<b) × (so wedge basis)`.
    pub fn to_coords(&self) -> Vector {
        let m = self.dim();
        let mut out = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                out.extend(so_coords(&self.g, self.component(a, b)).iter());
            }
        }
        Vector::from_vec(out)
    }
}

/// Vector-valued 2-form `(X, Y) ↦ T(X, Y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionOperator {
    dim: usize,
    comps: Vec<Vector>,
}

impl TorsionOperator {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            comps: vec![Vector::zeros(dim); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Vector) -> Self {
        let mut out = Self::zero(dim);
        for a in 0..dim {
            for b in a + 1..dim {
                let t = f(a, b);
                out.comps[b * dim + a] = -&t;
                out.comps[a * dim + b] = t;
            }
        }
        out
    }

    pub fn component(&self, a: usize, b: usize) -> &Vector {
        &self.comps[a * self.dim + b]
    }

    pub fn apply_c(&self, x: &CVector, y: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for a in 0..self.dim {
            for b in 0..self.dim {
                if a != b {
                    out += complex_vec(self.component(a, b)) * (x[a] * y[b]);
                }
            }
        }
        out
    }
}

fn basis_vector(m: usize, k: usize) -> Vector {
    Vector::from_fn(m, |i, _| f64::from(i == k))
}

/// `R(X, Y)Z = ⟨Y,Z⟩X − ⟨X,Z⟩Y`, i.e. `R(X, Y) = X ∧ Y`.
pub fn constant_curvature(g: &DiagonalMetric) -> CurvatureOperator {
    let m = g.dim();
    CurvatureOperator::from_fn(g, |a, b| g.wedge(&basis_vector(m, a), &basis_vector(m, b)))
}

/// `(J·R)(X,Y) = J R(X,Y) − R(JX,Y) − R(X,JY) − R(X,Y) J`.
pub fn j0_action(j: &OrthogonalComplexStructure, r: &CurvatureOperator) -> CurvatureOperator {
    let jm = j.matrix();
    let m = r.dim();
    CurvatureOperator::from_fn(r.metric(), |a, b| {
        let rab = r.component(a, b);
        let mut out = jm * rab - rab * jm;
        // R(J e_a, e_b) = Σ_c J_{ca} R(e_c, e_b)
        for c in 0..m {
            let ja = jm[(c, a)];
            if ja != 0.0 {
                out -= r.component(c, b) * ja;
            }
            let jb = jm[(c, b)];
            if jb != 0.0 {
                out -= r.component(a, c) * jb;
            }
        }
        out
    })
}

/// Matrix of `R ↦ J·R` on all antisymmetric `so(g)`-valued pairs, in the
/// coordinates of [`CurvatureOperator::to_coords`].
pub fn action_matrix(j: &OrthogonalComplexStructure) -> Endo {
    let g = j.metric();
    let m = g.dim();
    let wedges = so_basis_matrices(g);
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let n = pairs.len() * wedges.len();
    let mut out = Endo::zeros(n, n);
    let mut col = 0;
    for &(a, b) in &pairs {
        for w in &wedges {
            let r = CurvatureOperator::from_fn(g, |x, y| if (x, y) == (a, b) { w.clone() } else { Endo::zeros(m, m) });
            out.set_column(col, &j0_action(j, &r).to_coords());
            col += 1;
        }
    }
    out
}

/// Admissible eigenvalues of the `J`-action, as multiples of `i`.
pub const ACTION_EIGENVALUES: [f64; 5] = [-4.0, -2.0, 0.0, 2.0, 4.0];

/// Eigenvalues of the `J`-action on curvature-type tensors of real
/// dimension 4, 6 or 8, checked against `{0, ±2i, ±4i}` within `tol`.
pub fn action_spectrum(j: &OrthogonalComplexStructure, tol: f64) -> Result<Vec<Complex64>> {
    let m = j.metric().dim();
    if ![4, 6, 8].contains(&m) {
        return Err(Error::UnsupportedDimension(format!(
            "J-action spectrum needs 2n in {{4,6,8}}, got {m}"
        )));
    }
    let a = action_matrix(j);
    let opts = EigenOptions {
        max_dim: a.nrows(),
        ..EigenOptions::default()
    };
    let ev = eigen_spectrum_real(&a, &opts)?;
    for z in &ev {
        if spectrum_distance(*z) > tol {
            return Err(Error::SpectrumViolation { re: z.re, im: z.im });
        }
    }
    Ok(ev)
}

/// Distance from `z` to the nearest admissible eigenvalue.
pub fn spectrum_distance(z: Complex64) -> f64 {
    ACTION_EIGENVALUES
        .iter()
        .map(|&k| (z - Complex64::new(0.0, k)).norm())
        .fold(f64::INFINITY, f64::min)
}

/// The `±4i` part of `R`: `(X,Y) ↦ 2 Re[j⁺ R(j⁻X, j⁻Y) j⁻]`.
pub fn four_i_component(j: &OrthogonalComplexStructure, r: &CurvatureOperator) -> CurvatureOperator {
    let (jp, jm) = j.projectors();
    CurvatureOperator::from_fn(r.metric(), |a, b| {
        let x = jm.column(a).into_owned();
        let y = jm.column(b).into_owned();
        let c = &jp * r.apply_c(&x, &y) * &jm;
        c.map(|z| 2.0 * z.re)
    })
}

/// `(max ‖j⁺T(j⁻X,j⁻Y)‖, max ‖j⁺R(j⁻X,j⁻Y)j⁻‖)` over basis pairs.
pub fn integrability_residual(
    j: &OrthogonalComplexStructure,
    r: &CurvatureOperator,
    t: &TorsionOperator,
) -> (f64, f64) {
    let (jp, jm) = j.projectors();
    let m = r.dim();
    let mut tor = 0.0f64;
    let mut cur = 0.0f64;
    for a in 0..m {
        for b in a + 1..m {
            let x = jm.column(a).into_owned();
            let y = jm.column(b).into_owned();
            tor = tor.max(cvnorm(&(&jp * t.apply_c(&x, &y))));
            cur = cur.max(cnorm(&(&jp * r.apply_c(&x, &y) * &jm)));
        }
    }
    (tor, cur)
}

/// `Ric(X,Y) = Σ_k ε_k ⟨R(e_k,X)Y, e_k⟩` as a Gram matrix.
pub fn ricci(r: &CurvatureOperator) -> Endo {
    let g = r.metric();
    let m = r.dim();
    Endo::from_fn(m, m, |b, c| (0..m).map(|k| g.sign(k) * r.rm(k, b, c, k)).sum())
}

pub fn scalar_curvature(r: &CurvatureOperator) -> f64 {
    let ric = ricci(r);
    (0..r.dim()).map(|b| r.metric().sign(b) * ric[(b, b)]).sum()
}

/// Kulkarni–Nomizu product of two symmetric bilinear forms,
/// `(h⊙k)(X,Y,Z,W) = h(X,W)k(Y,Z) + h(Y,Z)k(X,W) − h(X,Z)k(Y,W) − h(Y,W)k(X,Z)`.
pub fn kulkarni_nomizu<'a>(h: &'a Endo, k: &'a Endo) -> impl Fn(usize, usize, usize, usize) -> f64 + 'a {
    move |x, y, z, w| h[(x, w)] * k[(y, z)] + h[(y, z)] * k[(x, w)] - h[(x, z)] * k[(y, w)] - h[(y, w)] * k[(x, z)]
}

/// `W = R − Ric₀⊙g/(m−2) − s/(2m(m−1))·g⊙g`.
pub fn weyl_tensor(r: &CurvatureOperator) -> Result<CurvatureOperator> {
    let g = r.metric();
    let m = r.dim();
    if m < 4 {
        return Err(Error::DimensionTooSmall { dim: m, min: 4 });
    }
    let scale = r.max_abs().max(1.0);
    let bianchi = r.bianchi_residual();
    if bianchi > 1e-8 * scale {
        return Err(Error::NotAlgebraic { residual: bianchi });
    }
    let gm = g.matrix();
    let ric = ricci(r);
    let s = scalar_curvature(r);
    let mf = m as f64;
    let ric0 = &ric - &gm * (s / mf);
    let rg = kulkarni_nomizu(&ric0, &gm);
    let gg = kulkarni_nomizu(&gm, &gm);
    let c1 = 1.0 / (mf - 2.0);
    let c2 = s / (2.0 * mf * (mf - 1.0));
    let w = move |a, b, c, d| r.rm(a, b, c, d) - c1 * rg(a, b, c, d) - c2 * gg(a, b, c, d);
    Ok(CurvatureOperator::from_rm(g, &w))
}

/// `Σ_i h_i ⊙ h_i` for `count` random symmetric forms; always algebraic.
pub fn random_algebraic_curvature(g: &DiagonalMetric, rng: &mut GaussianStream, count: usize) -> CurvatureOperator {
    let m = g.dim();
    let mut acc = CurvatureOperator::zero(g);
    for _ in 0..count {
        let a = rng.matrix(m, m);
        let h = (&a + a.transpose()) * 0.5;
        let kn = kulkarni_nomizu(&h, &h);
        acc = acc.add(&CurvatureOperator::from_rm(g, &kn));
    }
    acc
}

/// An arbitrary antisymmetric `so(g)`-valued pair, not necessarily algebraic.
pub fn random_curvature_type(g: &DiagonalMetric, rng: &mut GaussianStream) -> CurvatureOperator {
    CurvatureOperator::from_fn(g, |_, _| crate::lie::random_so(g, rng, 1.0))
}

/// Endomorphism-valued 1-form `X ↦ A_X`, stored on the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceTensor {
    comps: Vec<Endo>,
}

impl DifferenceTensor {
    pub fn new(comps: Vec<Endo>) -> Self {
        Self { comps }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            comps: vec![Endo::zeros(m, m); m],
        }
    }

    pub fn random(m: usize, rng: &mut GaussianStream) -> Self {
        Self {
            comps: (0..m).map(|_| rng.matrix(m, m)).collect(),
        }
    }

    /// `A_{e_a}`.
    pub fn component(&self, a: usize) -> &Endo {
        &self.comps[a]
    }

    pub fn apply(&self, x: &Vector, y: &Vector) -> Vector {
        self.comps
            .iter()
            .zip(x.iter())
            .fold(Vector::zeros(y.len()), |acc, (c, xa)| acc + c * y * *xa)
    }

    pub fn apply_c(&self, x: &CVector) -> CEndo {
        let m = self.comps.len();
        self.comps
            .iter()
            .zip(x.iter())
            .fold(CEndo::zeros(m, m), |acc, (c, xa)| acc + complex(c) * *xa)
    }
}

/// `A_X Y = X(f)Y + Y(f)X − g(X,Y) grad f`.
pub fn conformal_difference_tensor(g: &DiagonalMetric, df: &Vector, gradf: &Vector) -> Result<DifferenceTensor> {
    let m = g.dim();
    if df.len() != m || gradf.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: df.len().min(gradf.len()),
        });
    }
    let residual = (g.lower(df) - gradf).amax();
    if residual > 1e-12 * df.amax().max(1.0) {
        return Err(Error::InconsistentGradient { residual });
    }
    let comps = (0..m)
        .map(|a| {
            Endo::from_fn(m, m, |i, b| {
                let mut v = 0.0;
                if i == b {
                    v += df[a];
                }
                if i == a {
                    v += df[b];
                }
                if a == b {
                    v -= g.sign(a) * gradf[i];
                }
                v
            })
        })
        .collect();
    Ok(DifferenceTensor { comps })
}

/// `max_a ‖j⁺ A_{j⁻e_a} j⁻‖`.
pub fn acs_invariance_residual(j: &OrthogonalComplexStructure, a: &DifferenceTensor) -> f64 {
    let (jp, jm) = projectors(j.matrix());
    (0..j.metric().dim())
        .map(|k| {
            let y = jm.column(k).into_owned();
            cnorm(&(&jp * a.apply_c(&y) * &jm))
        })
        .fold(0.0, f64::max)
}
