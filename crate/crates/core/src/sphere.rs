//! The pseudo-sphere `S^{2n}_{2q} = {x : ⟨x,x⟩ = 1} ⊂ R^{2p+1,2q}` and
//! finite-difference differential geometry on embedded spaces.
//!
//! Tangent vectors at `x` are extended to neighbourhoods by projection,
//! `X̃(y) = X − ⟨X,y⟩y`, and the Levi-Civita connection of the induced
//! metric is the tangential part of the ambient derivative. Derivatives along
//! `v` are central differences along the normalised line
//! `c(t) = (x + tv)/√⟨x+tv, x+tv⟩`.

use std::ops::{Div, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::{random_so, OrthogonalComplexStructure};
use crate::linalg::{take_pivot, CVector, DiagonalMetric, Endo, Vector};
use crate::rng::GaussianStream;

/// Points closer than this to the null cone cannot be normalised.
pub const CHART_TOL: f64 = 1e-6;

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

/// A vector field on the ambient space, evaluated pointwise.
pub type Field<'a> = dyn Fn(&Vector) -> Result<Vector> + Sync + 'a;

/// A non-degenerate submanifold of a flat pseudo-Euclidean space.
pub trait EmbeddedSpace: Sync {
    fn ambient(&self) -> &DiagonalMetric;

    /// Orthogonal projection of `v` onto `T_yM`.
    fn tangent_project(&self, y: &Vector, v: &Vector) -> Vector;

    /// A curve through `x` with velocity `v` at `t = 0`, for tangent `v`.
    fn curve(&self, x: &Vector, v: &Vector, t: f64) -> Result<Vector>;

    /// Matrix of [`EmbeddedSpace::tangent_project`] at `y`.
    fn projector(&self, y: &Vector) -> Endo {
        let m = self.ambient().dim();
        let cols: Vec<Vector> = (0..m).map(|k| self.tangent_project(y, &unit(m, k))).collect();
        Endo::from_columns(&cols)
    }
}

fn unit(m: usize, k: usize) -> Vector {
    Vector::from_fn(m, |i, _| f64::from(i == k))
}

/// The unit pseudo-sphere in an ambient space with an odd number of
/// positive and an even number of negative directions, in any order.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoSphere {
    ambient: DiagonalMetric,
}

impl PseudoSphere {
    pub fn new(ambient: DiagonalMetric) -> Result<Self> {
        if ambient.plus_count() % 2 != 1 || !ambient.minus_count().is_multiple_of(2) {
            return Err(Error::InvalidSignature(format!(
                "pseudo-sphere ambient needs 2p+1 positive and 2q negative directions, got ({},{})",
                ambient.plus_count(),
                ambient.minus_count()
            )));
        }
        Ok(Self { ambient })
    }

    /// `S^{2(p+q)}_{2q}` in the standard layout `diag(+1 × 2p+1, −1 × 2q)`.
    pub fn with_signature(p: usize, q: usize) -> Self {
        Self {
            ambient: DiagonalMetric::from_counts(2 * p + 1, 2 * q),
        }
    }

    /// Complex dimension `n`; the sphere has real dimension `2n`.
    pub fn n(&self) -> usize {
        (self.ambient.dim() - 1) / 2
    }

    pub fn check_point(&self, x: &Vector, tol: f64) -> Result<()> {
        if x.len() != self.ambient.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient.dim(),
                got: x.len(),
            });
        }
        let residual = (self.ambient.ip(x, x) - 1.0).abs();
        if residual > tol {
            return Err(Error::NotOnSphere { residual });
        }
        Ok(())
    }

    pub fn check_tangent(&self, x: &Vector, v: &Vector, tol: f64) -> Result<()> {
        let residual = self.ambient.ip(x, v).abs();
        if residual > tol * v.amax().max(1.0) {
            return Err(Error::NotTangent { residual });
        }
        Ok(())
    }

    /// A random point: the negative block is `N(0, 0.25)`, the positive
    /// block a uniformly random direction of length `√(1 + |w|²)`.
    pub fn random_point(&self, rng: &mut GaussianStream) -> Vector {
        let g = &self.ambient;
        let m = g.dim();
        let mut x = Vector::zeros(m);
        let mut minus_sq = 0.0;
        for i in 0..m {
            if g.sign(i) < 0.0 {
                x[i] = 0.5 * rng.normal();
                minus_sq += x[i] * x[i];
            }
        }
        let mut plus_sq = 0.0;
        let dir: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
        for (i, d) in dir.iter().enumerate() {
            if g.sign(i) > 0.0 {
                plus_sq += d * d;
            }
        }
        let r = (1.0 + minus_sq).sqrt() / plus_sq.sqrt();
        for i in 0..m {
            if g.sign(i) > 0.0 {
                x[i] = dir[i] * r;
            }
        }
        x
    }

    pub fn random_tangent(&self, x: &Vector, rng: &mut GaussianStream) -> Vector {
        self.tangent_project(x, &rng.vector(self.ambient.dim()))
    }

    /// A random point reached from `x` along a random tangent of size
    /// `scale`, shortened when needed so that `⟨v,v⟩ ≥ −½`.
    pub fn random_point_near(&self, x: &Vector, rng: &mut GaussianStream, scale: f64) -> Result<Vector> {
        let v = self.random_tangent(x, rng);
        let nn = self.ambient.ip(&v, &v);
        let t = if nn * scale * scale < -0.5 {
            (0.5 / -nn).sqrt()
        } else {
            scale
        };
        self.curve(x, &v, t)
    }
}

impl EmbeddedSpace for PseudoSphere {
    fn ambient(&self) -> &DiagonalMetric {
        &self.ambient
    }

    fn tangent_project(&self, y: &Vector, v: &Vector) -> Vector {
        v - y * self.ambient.ip(v, y)
    }

    fn curve(&self, x: &Vector, v: &Vector, t: f64) -> Result<Vector> {
        let y = x + v * t;
        let norm = self.ambient.ip(&y, &y);
        if norm <= CHART_TOL {
            return Err(Error::CurveLeavesChart { norm });
        }
        Ok(y / norm.sqrt())
    }

    fn projector(&self, y: &Vector) -> Endo {
        let m = y.len();
        Endo::identity(m, m) - y * self.ambient.lower(y).transpose()
    }
}

/// Flat pseudo-Euclidean space, the trivial embedded space.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSpace {
    g: DiagonalMetric,
}

impl FlatSpace {
    pub fn new(g: DiagonalMetric) -> Self {
        Self { g }
    }
}

impl EmbeddedSpace for FlatSpace {
    fn ambient(&self) -> &DiagonalMetric {
        &self.g
    }

    fn tangent_project(&self, _y: &Vector, v: &Vector) -> Vector {
        v.clone()
    }

    fn curve(&self, x: &Vector, v: &Vector, t: f64) -> Result<Vector> {
        Ok(x + v * t)
    }

    fn projector(&self, _y: &Vector) -> Endo {
        let m = self.g.dim();
        Endo::identity(m, m)
    }
}

/// `v − ⟨v,x⟩x` on a pseudo-sphere.
pub fn tangent_project<S: EmbeddedSpace + ?Sized>(s: &S, x: &Vector, v: &Vector) -> Vector {
    s.tangent_project(x, v)
}

fn central<S, T, F>(s: &S, x: &Vector, v: &Vector, h: f64, f: F) -> Result<T>
where
    S: EmbeddedSpace + ?Sized,
    T: Sub<Output = T> + Div<f64, Output = T>,
    F: Fn(&Vector) -> Result<T>,
{
    let yp = s.curve(x, v, h)?;
    let ym = s.curve(x, v, -h)?;
    Ok((f(&yp)? - f(&ym)?) / (2.0 * h))
}

/// Richardson extrapolation `(4 f(h/2) − f(h)) / 3` of an `O(h²)` scheme.
pub fn richardson(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    Ok((4.0 * f(h / 2.0)? - f(h)?) / 3.0)
}

/// The projected extension `y ↦ P_y field(y)`.
fn extended<'a, S: EmbeddedSpace + ?Sized>(s: &'a S, field: &'a Field<'a>) -> impl Fn(&Vector) -> Result<Vector> + 'a {
    move |y| Ok(s.tangent_project(y, &field(y)?))
}

/// Ambient directional derivative `D_v F` at `x` of the projected
/// extension of `field`.
pub fn directional_derivative<S: EmbeddedSpace + ?Sized>(
    s: &S,
    field: &Field,
    x: &Vector,
    v: &Vector,
    h: f64,
) -> Result<Vector> {
    central(s, x, v, h, extended(s, field))
}

/// `∇_v Ỹ = P_x(D_v Ỹ)`.
pub fn cov_deriv_vector<S: EmbeddedSpace + ?Sized>(
    s: &S,
    field: &Field,
    x: &Vector,
    v: &Vector,
    h: f64,
) -> Result<Vector> {
    let d = directional_derivative(s, field, x, v, h)?;
    Ok(s.tangent_project(x, &d))
}

/// Closed form of `∇_v Ỹ` at `y` for the projected constant field `Ỹ`:
/// `D_vỸ = −⟨Y,v⟩y − ⟨Y,y⟩v`, whose tangential part is `−⟨Y,y⟩v`.
pub fn projected_constant_derivative(g: &DiagonalMetric, y: &Vector, field: &Vector, v: &Vector) -> Vector {
    v * -g.ip(field, y)
}

/// `[X̃, Ỹ](x) = D_XỸ − D_YX̃` for the projected extensions.
pub fn lie_bracket<S: EmbeddedSpace + ?Sized>(s: &S, xf: &Field, yf: &Field, x: &Vector, h: f64) -> Result<Vector> {
    let xv = s.tangent_project(x, &xf(x)?);
    let yv = s.tangent_project(x, &yf(x)?);
    Ok(directional_derivative(s, yf, x, &xv, h)? - directional_derivative(s, xf, x, &yv, h)?)
}

fn constant(v: &Vector) -> impl Fn(&Vector) -> Result<Vector> + Sync + '_ {
    move |_| Ok(v.clone())
}

/// `R(X,Y)Z = ∇_X∇_YZ̃ − ∇_Y∇_XZ̃ − ∇_{[X,Y]}Z̃` by nested central
/// differences of projected-constant extensions.
pub fn fd_curvature<S: EmbeddedSpace + ?Sized>(
    s: &S,
    x: &Vector,
    xv: &Vector,
    yv: &Vector,
    zv: &Vector,
    h: f64,
) -> Result<Vector> {
    let zf = constant(zv);
    let nabla_z_along = |dir: &Vector| {
        let dir = dir.clone();
        let zf = &zf;
        move |y: &Vector| -> Result<Vector> {
            let d = s.tangent_project(y, &dir);
            cov_deriv_vector(s, zf, y, &d, h)
        }
    };
    let w_yz = nabla_z_along(yv);
    let w_xz = nabla_z_along(xv);
    let xy = cov_deriv_vector(s, &w_yz, x, xv, h)?;
    let yx = cov_deriv_vector(s, &w_xz, x, yv, h)?;
    let bracket = cov_deriv_vector(s, &constant(yv), x, xv, h)? - cov_deriv_vector(s, &constant(xv), x, yv, h)?;
    let br = cov_deriv_vector(s, &zf, x, &bracket, h)?;
    Ok(xy - yx - br)
}

/// `ρw = w − (⟨u+v,w⟩/(1+⟨u,v⟩))(u+v) + 2⟨u,w⟩v`, the rotation in the
/// `(u, v)` plane taking unit `u` to unit `v`.
pub fn rotation_taking(g: &DiagonalMetric, u: &Vector, v: &Vector, tol: f64) -> Result<Endo> {
    let value = 1.0 + g.ip(u, v);
    if value < tol {
        return Err(Error::AntipodalOrDegenerate { value });
    }
    let m = g.dim();
    let s = u + v;
    Ok(Endo::identity(m, m) - &s * g.lower(&s).transpose() / value + v * g.lower(u).transpose() * 2.0)
}

/// Sections are only evaluated where `1 + ⟨x₀, x⟩` exceeds this.
pub const SECTION_CHART: f64 = 0.1;

/// A smooth local section `x ↦ J(x)` of the twistor bundle over a
/// pseudo-sphere: `J(x) = ρ_x k(x) K k(x)⁻¹ ρ_x⁻¹` on `R·1 ⊕ R^{2p+1,2q}`,
/// where `ρ_x` rotates `x₀ = K(1)` to `x` and `k(x) = exp(Σ (x−x₀)_i M_i)`
/// with each `M_i` fixing `1` and `x₀`.
#[derive(Clone, Debug)]
pub struct JSection {
    sphere: PseudoSphere,
    k: OrthogonalComplexStructure,
    x0: Vector,
    twist: Vec<Endo>,
}

impl JSection {
    /// The untwisted section through `K`; `K` lives on `[+1] ⊕ ambient`.
    pub fn new(sphere: PseudoSphere, k: OrthogonalComplexStructure) -> Result<Self> {
        let expect = DiagonalMetric::from_counts(1, 0).direct_sum(sphere.ambient());
        if k.metric() != &expect {
            return Err(Error::IncompatibleJ(
                "reference structure must act on R·1 ⊕ ambient".into(),
            ));
        }
        let x0 = k.matrix().column(0).rows(1, sphere.ambient().dim()).into_owned();
        let residual = k.matrix()[(0, 0)].abs();
        if residual > 1e-9 {
            return Err(Error::IncompatibleJ(format!(
                "K(1) has a component along 1 ({residual:e})"
            )));
        }
        sphere.check_point(&x0, 1e-9)?;
        Ok(Self {
            sphere,
            k,
            x0,
            twist: Vec::new(),
        })
    }

    /// Adds the generators `M_i`; each is replaced by `Q M_i Q` with `Q`
    /// the projection onto `{1, x₀}^⊥`, so `k(x)` fixes `1` and `x₀`.
    pub fn with_twist(mut self, generators: Vec<Endo>) -> Result<Self> {
        let m = self.sphere.ambient().dim();
        if generators.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: generators.len(),
            });
        }
        let q = self.fixing_projector();
        self.twist = generators.iter().map(|a| &q * a * &q).collect();
        Ok(self)
    }

    /// Random reference structure and random twist of size `twist_scale`.
    pub fn random(sphere: PseudoSphere, rng: &mut GaussianStream, twist_scale: f64) -> Result<Self> {
        let metric = DiagonalMetric::from_counts(1, 0).direct_sum(sphere.ambient());
        let k = OrthogonalComplexStructure::standard_on(&metric)?.randomly_conjugated(rng, crate::lie::RANDOM_SCALE);
        let m = sphere.ambient().dim();
        let section = Self::new(sphere, k)?;
        if twist_scale == 0.0 {
            return Ok(section);
        }
        let gens = (0..m).map(|_| random_so(&metric, rng, twist_scale)).collect();
        section.with_twist(gens)
    }

    fn fixing_projector(&self) -> Endo {
        let g = self.twistor_metric();
        let m = g.dim();
        let one = unit(m, 0);
        let mut x0 = Vector::zeros(m);
        x0.rows_mut(1, m - 1).copy_from(&self.x0);
        Endo::identity(m, m) - &one * g.lower(&one).transpose() - &x0 * g.lower(&x0).transpose()
    }

    pub fn twistor_metric(&self) -> &DiagonalMetric {
        self.k.metric()
    }

    pub fn sphere(&self) -> &PseudoSphere {
        &self.sphere
    }

    pub fn base_point(&self) -> &Vector {
        &self.x0
    }

    pub fn reference(&self) -> &OrthogonalComplexStructure {
        &self.k
    }

    /// The full structure `J(x)` on `R·1 ⊕ ambient`.
    pub fn full_at(&self, x: &Vector) -> Result<OrthogonalComplexStructure> {
        let g = self.sphere.ambient();
        let m = g.dim();
        let chart = 1.0 + g.ip(&self.x0, x);
        if chart < SECTION_CHART {
            return Err(Error::AntipodalOrDegenerate { value: chart });
        }
        let rho = rotation_taking(g, &self.x0, x, SECTION_CHART)?;
        let mut big = Endo::identity(m + 1, m + 1);
        big.view_mut((1, 1), (m, m)).copy_from(&rho);
        let mut j = self.k.clone();
        if !self.twist.is_empty() {
            let d = x - &self.x0;
            let gen = self
                .twist
                .iter()
                .zip(d.iter())
                .fold(Endo::zeros(m + 1, m + 1), |acc, (t, c)| acc + t * *c);
            j = j.conjugate(&crate::linalg::matrix_exp(&gen));
        }
        Ok(j.conjugate(&big))
    }

    /// Largest violation among `J(1) = x`, `J(x) = −1`, `J² = −1` and
    /// g-orthogonality at `x`.
    pub fn invariant_residual(&self, x: &Vector) -> Result<f64> {
        let j = self.full_at(x)?;
        let jm = j.matrix();
        let m = jm.nrows();
        let mut xx = Vector::zeros(m);
        xx.rows_mut(1, m - 1).copy_from(x);
        let one = unit(m, 0);
        let r1 = (jm * &one - &xx).amax();
        let r2 = (jm * &xx + &one).amax();
        let r3 = (jm * jm + Endo::identity(m, m)).amax();
        let r4 = j.metric().orthogonality_defect(jm);
        Ok(r1.max(r2).max(r3).max(r4))
    }
}

/// `local_section(S, K, x)`: the untwisted section through `K` at `x`.
pub fn local_section(
    s: &PseudoSphere,
    k: &OrthogonalComplexStructure,
    x: &Vector,
) -> Result<OrthogonalComplexStructure> {
    JSection::new(s.clone(), k.clone())?.full_at(x)
}

/// An almost complex structure on an embedded space, as the ambient
/// endomorphism `Ĵ(y) = P_y J(y) P_y`.
pub trait AlmostComplexField: Sync {
    fn j_at(&self, y: &Vector) -> Result<Endo>;
}

impl AlmostComplexField for JSection {
    fn j_at(&self, y: &Vector) -> Result<Endo> {
        let full = self.full_at(y)?;
        let m = y.len();
        let restricted = full.matrix().view((1, 1), (m, m)).into_owned();
        let p = self.sphere.projector(y);
        Ok(&p * restricted * &p)
    }
}

/// A constant `J` on flat space.
#[derive(Clone, Debug)]
pub struct ConstantStructure {
    pub j: Endo,
}

impl AlmostComplexField for ConstantStructure {
    fn j_at(&self, _y: &Vector) -> Result<Endo> {
        Ok(self.j.clone())
    }
}

/// `(∇_vJ) = P_x (D_vĴ) P_x`.
pub fn nabla_j<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    v: &Vector,
    h: f64,
) -> Result<Endo> {
    let d = central(s, x, v, h, |y| j.j_at(y))?;
    let p = s.projector(x);
    Ok(&p * d * &p)
}

fn j_field<'a, S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &'a S,
    j: &'a J,
    v: &'a Vector,
) -> impl Fn(&Vector) -> Result<Vector> + Sync + 'a {
    move |y| Ok(j.j_at(y)? * s.tangent_project(y, v))
}

/// `N(X,Y) = [J̃X̃,J̃Ỹ] − J[J̃X̃,Ỹ] − J[X̃,J̃Ỹ] − [X̃,Ỹ]`.
pub fn nijenhuis<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    xv: &Vector,
    yv: &Vector,
    h: f64,
) -> Result<Vector> {
    let xf = constant(xv);
    let yf = constant(yv);
    let jx = j_field(s, j, xv);
    let jy = j_field(s, j, yv);
    let jm = j.j_at(x)?;
    let a = lie_bracket(s, &jx, &jy, x, h)?;
    let b = lie_bracket(s, &jx, &yf, x, h)?;
    let c = lie_bracket(s, &xf, &jy, x, h)?;
    let d = lie_bracket(s, &xf, &yf, x, h)?;
    Ok(a - &jm * b - &jm * c - d)
}

fn omega_at<J: AlmostComplexField + ?Sized>(
    g: &DiagonalMetric,
    j: &J,
    y: &Vector,
    u: &Vector,
    v: &Vector,
) -> Result<f64> {
    Ok(g.ip(&(j.j_at(y)? * u), v))
}

/// `dω` by the invariant formula
/// `Σ_cyc X̃·ω(Ỹ,Z̃) − Σ_cyc ω([X̃,Ỹ],Z̃)` with `ω = g(J·,·)`.
pub fn d_omega_fd<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    xv: &Vector,
    yv: &Vector,
    zv: &Vector,
    h: f64,
) -> Result<f64> {
    let g = s.ambient();
    let vs = [xv, yv, zv];
    let mut total = 0.0;
    for k in 0..3 {
        let (a, b, c) = (vs[k], vs[(k + 1) % 3], vs[(k + 2) % 3]);
        let deriv = central(s, x, a, h, |y| {
            let bt = s.tangent_project(y, b);
            let ct = s.tangent_project(y, c);
            omega_at(g, j, y, &bt, &ct)
        })?;
        let bracket = lie_bracket(s, &constant(a), &constant(b), x, h)?;
        total += deriv - omega_at(g, j, x, &bracket, c)?;
    }
    Ok(total)
}

/// `(∇_ZJ)X = ∇_Z(J̃X̃) − J∇_ZX̃`.
pub fn nabla_j_applied<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    zv: &Vector,
    xv: &Vector,
    h: f64,
) -> Result<Vector> {
    let jx = j_field(s, j, xv);
    let a = cov_deriv_vector(s, &jx, x, zv, h)?;
    let b = cov_deriv_vector(s, &constant(xv), x, zv, h)?;
    Ok(a - j.j_at(x)? * b)
}

/// `Σ_cyc g((∇_ZJ)X, Y)`.
pub fn d_omega_nabla_j<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    xv: &Vector,
    yv: &Vector,
    zv: &Vector,
    h: f64,
) -> Result<f64> {
    let g = s.ambient();
    let vs = [xv, yv, zv];
    let mut total = 0.0;
    for k in 0..3 {
        let (a, b, c) = (vs[k], vs[(k + 1) % 3], vs[(k + 2) % 3]);
        total += g.ip(&nabla_j_applied(s, j, x, c, a, h)?, b);
    }
    Ok(total)
}

/// `Σ_cyc c·Tr(R_{X,Y} ∘ ∇_ZJ)` with `R_{X,Y} = X ∧ Y`.
#[allow(clippy::too_many_arguments)]
pub fn d_omega_curvature_trace<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    xv: &Vector,
    yv: &Vector,
    zv: &Vector,
    h: f64,
    c: f64,
) -> Result<f64> {
    let g = s.ambient();
    let vs = [xv, yv, zv];
    let mut total = 0.0;
    for k in 0..3 {
        let (a, b, d) = (vs[k], vs[(k + 1) % 3], vs[(k + 2) % 3]);
        let r = g.wedge(a, b);
        let nj = nabla_j(s, j, x, d, h)?;
        total += (r * nj).trace();
    }
    Ok(c * total)
}

/// Least-squares `c` minimising `Σ (c·aᵢ − bᵢ)²`.
pub fn fit_coefficient(samples: &[(f64, f64)]) -> Result<f64> {
    let den: f64 = samples.iter().map(|(a, _)| a * a).sum();
    if den <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateSamples);
    }
    Ok(samples.iter().map(|(a, b)| a * b).sum::<f64>() / den)
}

/// A g-orthonormal frame `{X_k, JX_k}` of `T_xM`.
#[derive(Clone, Debug)]
pub struct JFrame {
    pub x: Vec<Vector>,
    pub jx: Vec<Vector>,
    pub signs: Vec<f64>,
}

impl JFrame {
    /// `e_k = X_k − iJX_k`, a `+i` eigenvector of `J`.
    pub fn e(&self, k: usize) -> CVector {
        CVector::from_fn(self.x[k].len(), |r, _| Complex64::new(self.x[k][r], -self.jx[k][r]))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Builds a J-adapted frame at `x` from the projected standard basis,
/// pivoting on the largest `|⟨v,v⟩|`.
pub fn j_adapted_frame<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    tol: f64,
) -> Result<JFrame> {
    let g = s.ambient();
    let m = g.dim();
    let jm = j.j_at(x)?;
    let mut pool: Vec<Vector> = (0..m).map(|k| s.tangent_project(x, &unit(m, k))).collect();
    let mut basis: Vec<Vector> = Vec::new();
    let mut bsigns: Vec<f64> = Vec::new();
    let mut frame = JFrame {
        x: Vec::new(),
        jx: Vec::new(),
        signs: Vec::new(),
    };
    loop {
        for v in pool.iter_mut() {
            crate::linalg::project_out(g, v, &basis, &bsigns);
        }
        let Some(v) = take_pivot(g, &mut pool, tol) else { break };
        let nn = g.ip(&v, &v);
        let v = v / nn.abs().sqrt();
        let jv = &jm * &v;
        let sign = nn.signum();
        basis.push(v.clone());
        basis.push(jv.clone());
        bsigns.extend([sign, sign]);
        frame.x.push(v);
        frame.jx.push(jv);
        frame.signs.push(sign);
    }
    if frame.is_empty() {
        return Err(Error::DegenerateSubspace { tol });
    }
    Ok(frame)
}

/// Connection coefficients `∇_ξ e_k = γ^h_k e_h + γ^{h̄}_k ē_h`, indexed
/// `[(h, k)]`.
#[derive(Clone, Debug)]
pub struct FrameCoefficients {
    pub gamma: nalgebra::DMatrix<Complex64>,
    pub gamma_bar: nalgebra::DMatrix<Complex64>,
}

impl FrameCoefficients {
    /// Largest `|ε_j γ^{j̄}_k + ε_k γ^{k̄}_j|`.
    pub fn antisymmetry_residual(&self, signs: &[f64]) -> f64 {
        let n = signs.len();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let r = self.gamma_bar[(j, k)] * signs[j] + self.gamma_bar[(k, j)] * signs[k];
                worst = worst.max(r.norm());
            }
        }
        worst
    }
}

/// `∇_ξ e_k` for the extension `ẽ_k = X̃_k − iĴX̃_k`.
pub fn nabla_frame<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    frame: &JFrame,
    xi: &Vector,
    h: f64,
) -> Result<Vec<CVector>> {
    (0..frame.len())
        .map(|k| {
            let re = cov_deriv_vector(s, &constant(&frame.x[k]), x, xi, h)?;
            let im = cov_deriv_vector(s, &j_field(s, j, &frame.x[k]), x, xi, h)?;
            Ok(CVector::from_fn(re.len(), |r, _| Complex64::new(re[r], -im[r])))
        })
        .collect()
}

/// `γ^h_k = ε_h⟨∇_ξe_k, ē_h⟩/2` and `γ^{h̄}_k = ε_h⟨∇_ξe_k, e_h⟩/2`.
pub fn frame_coefficients<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    frame: &JFrame,
    xi: &Vector,
    h: f64,
) -> Result<FrameCoefficients> {
    let g = s.ambient();
    let n = frame.len();
    let d = nabla_frame(s, j, x, frame, xi, h)?;
    let es: Vec<CVector> = (0..n).map(|k| frame.e(k)).collect();
    let mut gamma = nalgebra::DMatrix::zeros(n, n);
    let mut gamma_bar = nalgebra::DMatrix::zeros(n, n);
    for hh in 0..n {
        let eps = frame.signs[hh] * 0.5;
        let ebar = es[hh].conjugate();
        for k in 0..n {
            gamma[(hh, k)] = g.ip_c(&d[k], &ebar) * eps;
            gamma_bar[(hh, k)] = g.ip_c(&d[k], &es[hh]) * eps;
        }
    }
    Ok(FrameCoefficients { gamma, gamma_bar })
}

/// `∇_u J` for a complex tangent `u = a + ib`, as a complex endomorphism.
fn nabla_j_complex<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    u: &CVector,
    h: f64,
) -> Result<nalgebra::DMatrix<Complex64>> {
    let re = u.map(|z| z.re);
    let im = u.map(|z| z.im);
    let a = nabla_j(s, j, x, &re, h)?;
    let b = nabla_j(s, j, x, &im, h)?;
    Ok(a.zip_map(&b, Complex64::new))
}

/// `max ‖(∇_uJ)v‖` over pairs from a `+i` eigenframe of `J` at `x`.
pub fn holomorphy_residual<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    h: f64,
) -> Result<f64> {
    let frame = j_adapted_frame(s, j, x, 1e-8)?;
    let es: Vec<CVector> = (0..frame.len()).map(|k| frame.e(k)).collect();
    let mut worst = 0.0f64;
    for u in &es {
        let nj = nabla_j_complex(s, j, x, u, h)?;
        for v in &es {
            worst = worst.max(crate::linalg::cvnorm(&(&nj * v)));
        }
    }
    Ok(worst)
}

/// `‖(∇_uJ)u‖`, zero for nearly Kähler structures.
pub fn nearly_kahler_defect<S: EmbeddedSpace + ?Sized, J: AlmostComplexField + ?Sized>(
    s: &S,
    j: &J,
    x: &Vector,
    u: &Vector,
    h: f64,
) -> Result<f64> {
    Ok((nabla_j(s, j, x, u, h)? * u).amax())
}
