//! Cross products from (split) quaternions and the almost complex structure
//! `J_x(u) = x × u` on the six-sphere in `Im(O')`.
//!
//! Three-vectors carry the metric `diag(+1,−1,−1)` (split) or the identity
//! (definite). Quaternions are `(a₀, a′)` with norm `a₀² + g(a′,a′)`, and
//! octonions are pairs `(a, α)`. The seven-dimensional space `0 × R⁷`
//! is laid out as `(a′, α)`, with sign pattern `+−−++−−` in the split case.

use crate::error::{Error, Result};
use crate::linalg::{sym_index, DiagonalMetric, Endo, Inertia, Vector};
use crate::sphere::{nabla_j, AlmostComplexField, EmbeddedSpace, PseudoSphere};

/// Which metric the imaginary three-space carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CrossProductAlgebra {
    /// `diag(+1, −1, −1)`; the seven-sphere ambient is `+−−++−−`.
    Split,
    /// The Euclidean cross product; the round `S⁶ ⊂ R⁷`.
    Definite,
}

/// How the second octonion component of `u × v` is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DoublingRule {
    /// `α·b̄ − β·ā`, the imaginary part of `v̄u` under Cayley–Dickson doubling.
    CayleyDickson,
    /// `α·β̄ − β·ᾱ`: the conjugates swapped relative to Cayley–Dickson.
    SwappedConjugates,
}

impl CrossProductAlgebra {
    pub fn signs3(self) -> [f64; 3] {
        match self {
            Self::Split => [1.0, -1.0, -1.0],
            Self::Definite => [1.0, 1.0, 1.0],
        }
    }

    /// `g(u, v)` on three-vectors.
    pub fn g3(self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let s = self.signs3();
        (0..3).map(|i| s[i] * u[i] * v[i]).sum()
    }

    /// The metric on `0 × R⁷`.
    pub fn ambient7(self) -> DiagonalMetric {
        let s = self.signs3();
        let signs: Vec<i8> = s.iter().chain(&[1.0]).chain(&s).map(|&x| x as i8).collect();
        DiagonalMetric::from_signs(&signs).expect("fixed pattern")
    }

    /// The metric on all of `R⁸`, `(a₀, a′, α₀, α′)`.
    pub fn ambient8(self) -> DiagonalMetric {
        DiagonalMetric::from_counts(1, 0).direct_sum(&self.ambient7())
    }

    pub fn sphere(self) -> PseudoSphere {
        PseudoSphere::new(self.ambient7()).expect("odd positive count")
    }

    /// `u × v` with `g(u×v, w) = det[u v w]`, i.e. `G⁻¹(u ×_E v)`.
    pub fn cross3(self, u: &[f64; 3], v: &[f64; 3]) -> [f64; 3] {
        let e = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let s = self.signs3();
        [e[0] * s[0], e[1] * s[1], e[2] * s[2]]
    }

    pub fn quat_mul(self, a: &SplitQuaternion, b: &SplitQuaternion) -> SplitQuaternion {
        let c = self.cross3(&a.v, &b.v);
        SplitQuaternion {
            re: a.re * b.re - self.g3(&a.v, &b.v),
            v: [0, 1, 2].map(|i| a.re * b.v[i] + b.re * a.v[i] + c[i]),
        }
    }

    pub fn quat_norm(self, a: &SplitQuaternion) -> f64 {
        a.re * a.re + self.g3(&a.v, &a.v)
    }

    /// `a × b = Im(b̄·a)`.
    pub fn quat_cross(self, a: &SplitQuaternion, b: &SplitQuaternion) -> [f64; 3] {
        self.quat_mul(&b.conj(), a).v
    }

    /// `u × v = (a×b − α×β, second)` for `u = (a, α)`, `v = (b, β)`.
    pub fn octonion_cross(self, u: &SplitOctonion, v: &SplitOctonion, rule: DoublingRule) -> SplitOctonion {
        let first = self.quat_cross(&u.a, &v.a);
        let second = self.quat_cross(&u.alpha, &v.alpha);
        let head = SplitQuaternion {
            re: 0.0,
            v: [0, 1, 2].map(|i| first[i] - second[i]),
        };
        let tail = match rule {
            DoublingRule::CayleyDickson => self
                .quat_mul(&u.alpha, &v.a.conj())
                .sub(&self.quat_mul(&v.alpha, &u.a.conj())),
            DoublingRule::SwappedConjugates => self
                .quat_mul(&u.alpha, &v.alpha.conj())
                .sub(&self.quat_mul(&v.alpha, &u.alpha.conj())),
        };
        SplitOctonion { a: head, alpha: tail }
    }

    /// `g₈(u, v)`.
    pub fn g8(self, u: &SplitOctonion, v: &SplitOctonion) -> f64 {
        self.ambient8().ip(&u.to_r8(), &v.to_r8())
    }

    /// Matrix of `u ↦ x × u` on `R⁷`.
    pub fn cross_matrix(self, x: &Vector, rule: DoublingRule) -> Endo {
        let xo = SplitOctonion::from_r7(x);
        let cols: Vec<Vector> = (0..7)
            .map(|k| {
                let e = SplitOctonion::from_r7(&Vector::from_fn(7, |i, _| f64::from(i == k)));
                self.octonion_cross(&xo, &e, rule).to_r7()
            })
            .collect();
        Endo::from_columns(&cols)
    }
}

/// `(a₀, a′)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitQuaternion {
    pub re: f64,
    pub v: [f64; 3],
}

impl SplitQuaternion {
    pub const ONE: Self = Self { re: 1.0, v: [0.0; 3] };

    pub fn new(re: f64, v: [f64; 3]) -> Self {
        Self { re, v }
    }

    /// `(a₀, −a′)`.
    pub fn conj(&self) -> Self {
        Self {
            re: self.re,
            v: self.v.map(|x| -x),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re - o.re,
            v: [0, 1, 2].map(|i| self.v[i] - o.v[i]),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().fold(self.re.abs(), |m, x| m.max(x.abs()))
    }
}

/// `(a, α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitOctonion {
    pub a: SplitQuaternion,
    pub alpha: SplitQuaternion,
}

impl SplitOctonion {
    /// `(0, a′, α)` from a point of `R⁷`.
    pub fn from_r7(x: &Vector) -> Self {
        assert_eq!(x.len(), 7);
        Self {
            a: SplitQuaternion::new(0.0, [x[0], x[1], x[2]]),
            alpha: SplitQuaternion::new(x[3], [x[4], x[5], x[6]]),
        }
    }

    /// Drops `a₀`.
    pub fn to_r7(&self) -> Vector {
        Vector::from_column_slice(&[
            self.a.v[0],
            self.a.v[1],
            self.a.v[2],
            self.alpha.re,
            self.alpha.v[0],
            self.alpha.v[1],
            self.alpha.v[2],
        ])
    }

    pub fn to_r8(&self) -> Vector {
        let mut out = Vector::zeros(8);
        out[0] = self.a.re;
        out.rows_mut(1, 7).copy_from(&self.to_r7());
        out
    }

    pub fn from_r8(x: &Vector) -> Self {
        assert_eq!(x.len(), 8);
        let mut o = Self::from_r7(&x.rows(1, 7).into_owned());
        o.a.re = x[0];
        o
    }
}

/// `J_x(u) = x × u` on the tangent space of the six-sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OctonionStructure {
    pub algebra: CrossProductAlgebra,
    pub rule: DoublingRule,
}

impl OctonionStructure {
    pub fn new(algebra: CrossProductAlgebra) -> Self {
        Self {
            algebra,
            rule: DoublingRule::CayleyDickson,
        }
    }

    /// `x × u`, checking `⟨x,x⟩ = 1` and `⟨u,x⟩ = 0`.
    pub fn apply(&self, x: &Vector, u: &Vector) -> Result<Vector> {
        j6_with(self.algebra, self.rule, x, u)
    }
}

impl AlmostComplexField for OctonionStructure {
    fn j_at(&self, y: &Vector) -> Result<Endo> {
        let p = self.algebra.sphere().projector(y);
        Ok(&p * self.algebra.cross_matrix(y, self.rule) * &p)
    }
}

/// `J_x(u) = x × u` with the Cayley–Dickson doubling.
pub fn j6(algebra: CrossProductAlgebra, x: &Vector, u: &Vector) -> Result<Vector> {
    j6_with(algebra, DoublingRule::CayleyDickson, x, u)
}

pub fn j6_with(algebra: CrossProductAlgebra, rule: DoublingRule, x: &Vector, u: &Vector) -> Result<Vector> {
    let s = algebra.sphere();
    s.check_point(x, 1e-9)?;
    s.check_tangent(x, u, 1e-9)?;
    let xo = SplitOctonion::from_r7(x);
    let uo = SplitOctonion::from_r7(u);
    Ok(algebra.octonion_cross(&xo, &uo, rule).to_r7())
}

/// Residuals of the complex-structure axioms at `x` for tangent `u, v`:
/// `(‖J²u + u‖, |g(Ju,Jv) − g(u,v)|, |g(Ju,u)|)`.
pub fn j6_invariant_residuals(
    algebra: CrossProductAlgebra,
    rule: DoublingRule,
    x: &Vector,
    u: &Vector,
    v: &Vector,
) -> Result<(f64, f64, f64)> {
    let g = algebra.ambient7();
    let ju = j6_with(algebra, rule, x, u)?;
    let jv = j6_with(algebra, rule, x, v)?;
    let jju = algebra
        .octonion_cross(&SplitOctonion::from_r7(x), &SplitOctonion::from_r7(&ju), rule)
        .to_r7();
    Ok((
        (jju + u).amax(),
        (g.ip(&ju, &jv) - g.ip(u, v)).abs(),
        g.ip(&ju, u).abs(),
    ))
}

/// `‖(∇_uJ)u‖` on the six-sphere.
pub fn nearly_kahler_residual(algebra: CrossProductAlgebra, x: &Vector, u: &Vector, h: f64) -> Result<f64> {
    let s = algebra.sphere();
    s.check_point(x, 1e-9)?;
    s.check_tangent(x, u, 1e-9)?;
    crate::sphere::nearly_kahler_defect(&s, &OctonionStructure::new(algebra), x, u, h)
}

/// `‖(∇_uJ)v + (∇_vJ)u‖`.
pub fn nearly_kahler_polarized(
    algebra: CrossProductAlgebra,
    x: &Vector,
    u: &Vector,
    v: &Vector,
    h: f64,
) -> Result<f64> {
    let s = algebra.sphere();
    let j = OctonionStructure::new(algebra);
    let a = nabla_j(&s, &j, x, u, h)? * v;
    let b = nabla_j(&s, &j, x, v, h)? * u;
    Ok((a + b).amax())
}

/// Inertia of the induced metric on `T_x`, read off `PᵀGP` where `P` is the
/// tangent projector. The normal direction shows up as one zero.
pub fn tangent_inertia(algebra: CrossProductAlgebra, x: &Vector) -> Result<Inertia> {
    let s = algebra.sphere();
    s.check_point(x, 1e-9)?;
    let p = s.projector(x);
    let gram = p.transpose() * s.ambient().matrix() * &p;
    sym_index(&((&gram + gram.transpose()) * 0.5), 1e-8)
}

/// Rejects any input that is not on the sphere; used by callers that want
/// a typed error before touching the FD machinery.
pub fn check_sphere_point(algebra: CrossProductAlgebra, x: &Vector) -> Result<()> {
    let s = algebra.sphere();
    if x.len() != s.ambient().dim() {
        return Err(Error::DimensionMismatch {
            expected: 7,
            got: x.len(),
        });
    }
    s.check_point(x, 1e-9)
}
